#pragma once

#include "fraclb/exterior.hpp"

#include <vector>

namespace fraclb {

enum class NormMethod { fourier, difference_quotient };

struct SobolevNormEstimate {
  double order = 0.0;
  double value = 0.0;
  NormMethod method = NormMethod::fourier;
};

// Flat-symbol norm (sum (1 + |xi|^2)^s |u_hat(xi)|^2)^{1/2} with xi = 2 pi k / L
// and |u_hat|^2 normalized so that s = 0 gives the discrete L2 norm.
SobolevNormEstimate sobolev_norm_fourier(const TorusGrid& grid, const Vector& u, double s);

// sup over shifts d (grid steps) of (d h)^{-beta} sum_j |u(. + d h e_j) - u|_{H^mu}.
double diff_quotient_seminorm(const TorusGrid& grid, const Vector& u, double mu, double beta,
                              const std::vector<int>& shifts);

struct RegularityRow {
  int points = 0;
  double norm = 0.0;
};

struct RegularityReport {
  double order = 0.0;
  std::vector<RegularityRow> rows;
  double ratio = 0.0;
  bool bounded = false;
};

struct GridSolution {
  TorusGrid grid;
  Vector values;
};

RegularityReport regularity_probe(const std::vector<GridSolution>& solutions, double s);

struct ConstantReport {
  // Best C in |u|_w <= C E(u,u)^{1/2} over Omega-supported u.
  double poincare = 0.0;
  // Smallest E(u,u)/|u|_w^2 over Omega-supported u.
  double coercivity = 0.0;
  // Largest |u|_{H^a}^2 / (extension energy + |u|_w^2) over the test family.
  double trace = 0.0;
};

ConstantReport constant_estimates(const SpectralDecomposition& dec, double alpha,
                                  const ExteriorConfig& config,
                                  const std::vector<Vector>& family);

}  // namespace fraclb
