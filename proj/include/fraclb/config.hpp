#pragma once

#include "fraclb/exterior.hpp"
#include "fraclb/geometry.hpp"
#include "fraclb/quadrature.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace fraclb {

struct Tolerances {
  double eigen = 1e-10;
  double self_adjoint = 1e-12;
  double stochastic = 1e-10;
  double balakrishnan = 1e-5;
  double trace = 1e-8;
  double extension = 1e-3;
  double symmetry = 1e-10;
  double representation = 1e-4;
  double series = 1e-6;
  double gauge_ratio = 3.0;
  double regularity_ratio = 2.0;
};

struct RunConfig {
  std::string experiment;
  int dim = 1;
  double side_length = 8.0;
  int points = 32;
  std::vector<int> point_list{16, 32, 64};
  double alpha = 0.5;
  MetricProfile metric;
  Shape omega, w1, w2;
  bool allow_overlap = false;
  TimeQuadrature quad;
  double slack = 10.0;
  int moments = 8;
  double moment_floor = 1e-6;
  double threshold_safety = 4.0;
  double phi_strength = 0.25;
  double phi_radius = 0.75;
  int extension_levels = 96;
  double extension_height = 8.0;
  double probe_delta = 0.4;
  std::uint64_t seed = 0x5EED;
  int random_vectors = 20;
  Tolerances tol;
  std::string output_dir = "fraclb-out";

  // Every recognized key with its effective value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> effective;
};

// Parses `key = value` lines with `#` comments. Unknown keys, duplicates and
// malformed values are rejected with the offending line number.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

struct ExperimentInfo {
  const char* name;
  const char* description;
  const char* keys;
};

const std::vector<ExperimentInfo>& experiment_catalog();

}  // namespace fraclb
