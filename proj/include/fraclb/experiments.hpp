#pragma once

#include "fraclb/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fraclb {

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  // "<" or ">=" between value and limit.
  std::string relation = "<";
  bool pass = false;
};

struct CsvTable {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<Check> checks;
  std::vector<CsvTable> tables;
  std::vector<std::string> notes;

  bool passed() const;
};

ExperimentResult run_experiment(const RunConfig& config);

// Writes CSV tables and the manifest under root/output_dir and returns the
// directory used.
std::string write_artifacts(const RunConfig& config, const ExperimentResult& result,
                            const std::string& root);

std::string library_version();

}  // namespace fraclb
