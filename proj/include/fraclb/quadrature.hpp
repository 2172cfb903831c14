#pragma once

#include "fraclb/geometry.hpp"

namespace fraclb {

// Log-uniform trapezoid rule for integrals over t in [t_min, t_max].
struct TimeQuadrature {
  double t_min = 1e-8;
  double t_max = 1e4;
  int nodes = 400;

  void validate() const;
  double log_step() const;
  Vector times() const;
  // Weights for dt, i.e. trapezoid weights in s = log t multiplied by t.
  Vector weights() const;
};

// Gamma(-a) for a in (0, 1), from Gamma(1 - a) / (-a).
double gamma_of_negative(double a);

}  // namespace fraclb
