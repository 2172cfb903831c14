#pragma once

#include "fraclb/exterior.hpp"
#include "fraclb/spectral.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace fraclb {

// Radial squash x -> c + rho(r) (x - c)/r with rho(r) = r (1 + eps (1 - r^2/R^2)^4)
// for r < R and rho(r) = r beyond, so the map is the identity outside the ball.
class GaugeMap {
 public:
  static GaugeMap identity();
  static GaugeMap radial_squash(const Point& center, double strength, double radius);

  bool is_identity() const { return strength_ == 0.0; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  double strength() const { return strength_; }

  double rho(double r) const;
  double rho_derivative(double r) const;
  Point apply(const TorusGrid& grid, const Point& x) const;
  Tensor jacobian(const TorusGrid& grid, const Point& x) const;

 private:
  GaugeMap(const Point& center, double strength, double radius);

  Point center_;
  double strength_;
  double radius_;
};

MetricField gauge_pullback(const TorusGrid& grid, const MetricProfile& profile,
                           const GaugeMap& phi);

// Throws unless the two metrics agree exactly at every exterior node.
void require_exterior_agreement(const MetricField& a, const MetricField& b,
                                const ExteriorConfig& config);

// Two operators on the same grid with identical exterior metric.
class HeatPair {
 public:
  HeatPair(const MetricField& first, const MetricField& second, const ExteriorConfig& config);

  const DiscreteLaplaceBeltrami& first_operator() const { return lap1_; }
  const DiscreteLaplaceBeltrami& second_operator() const { return lap2_; }
  const SpectralDecomposition& first() const { return dec1_; }
  const SpectralDecomposition& second() const { return dec2_; }
  const ExteriorConfig& config() const { return config_; }

 private:
  ExteriorConfig config_;
  DiscreteLaplaceBeltrami lap1_, lap2_;
  SpectralDecomposition dec1_, dec2_;
};

// t -> ((e^{-tA_1} - e^{-tA_2}) F)(x), plus the reference signal (e^{-tA_2} F)(x).
class HeatDifference {
 public:
  HeatDifference(const HeatPair& pair, const Vector& f, Index node);
  double operator()(double t) const;
  double reference(double t) const;

 private:
  Vector c1_, c2_, l1_, l2_;
};

double heat_difference_trace(const HeatPair& pair, const Vector& f, Index node, double t);

struct MomentTable {
  double alpha = 0.5;
  TimeQuadrature quad;
  Vector moments;
  // Same moments of |reference signal|, used to normalize.
  Vector scales;
  double signal_peak = 0.0;
  double reference_peak = 0.0;
};

using Sampler = std::function<double(double)>;

MomentTable moment_vector(const Sampler& u, double alpha, int M, const TimeQuadrature& quad,
                          const Sampler& reference = {});

// Restricts the window to start where |reference| first reaches floor times
// its peak; the lattice semigroup does not follow the continuum one earlier.
TimeQuadrature signal_window(const Sampler& reference, const TimeQuadrature& quad, double floor);

struct VanishingReport {
  bool vanishes = false;
  double threshold = 0.0;
  Vector normalized;
  double sample_ratio = 0.0;
  std::string summary() const;
};

VanishingReport vanishing_test(const MomentTable& table, double threshold);

struct KernelSample {
  double t;
  Index x, y;
  double k1, k2;
  double difference() const { return k1 - k2; }
  double relative() const;
};

std::vector<KernelSample> recover_heat_kernel_samples(
    const HeatPair& pair, const std::vector<std::pair<Index, Index>>& node_pairs,
    const std::vector<double>& times);

struct GaugeSetup {
  int dim = 2;
  double side_length = 4.0;
  int coarse_points = 24;
  double alpha = 0.5;
  Shape omega = Shape::ball(Point(2.0, 2.0), 0.8);
  Shape w1 = Shape::ball(Point(0.6, 2.0), 0.3);
  Shape w2 = Shape::ball(Point(3.4, 2.0), 0.3);
  bool allow_overlap = false;
  MetricProfile profile = MetricProfile::conformal_bump(0.5, 0.4, 0.6, Point(2.0, 2.0));
  GaugeMap phi = GaugeMap::radial_squash(Point(2.0, 2.0), 0.25, 0.75);
  // Data on W1, as functions of position.
  std::vector<std::function<double(const Point&)>> data;
};

struct GaugeLevel {
  int points = 0;
  double gauge_error = 0.0;
  double control_error = 0.0;
};

struct GaugeReport {
  GaugeLevel coarse, fine;
  double gauge_ratio = 0.0;
  double control_ratio = 0.0;
  bool pass = false;
  bool control_shrinks = false;
};

// Relative L2 difference on W2 of the DtN maps of Phi*g and g, max over data,
// at N and 2N; the control compares g against the flat metric.
GaugeReport gauge_experiment(const GaugeSetup& setup);
GaugeLevel gauge_level(const GaugeSetup& setup, int points);

}  // namespace fraclb
