#include "fraclb/quadrature.hpp"

#include "fraclb/errors.hpp"

#include <cmath>

namespace fraclb {

void TimeQuadrature::validate() const {
  if (!(t_min > 0.0) || !(t_max > t_min)) throw Error("spectral", "need 0 < t_min < t_max");
  if (nodes < 3) throw Error("spectral", "need at least 3 quadrature nodes");
}

double TimeQuadrature::log_step() const {
  return std::log(t_max / t_min) / double(nodes - 1);
}

Vector TimeQuadrature::times() const {
  validate();
  Vector t(nodes);
  const double ds = log_step(), s0 = std::log(t_min);
  for (int q = 0; q < nodes; ++q) t(q) = std::exp(s0 + ds * q);
  t(nodes - 1) = t_max;
  return t;
}

Vector TimeQuadrature::weights() const {
  Vector w = times() * log_step();
  w(0) *= 0.5;
  w(nodes - 1) *= 0.5;
  return w;
}

double gamma_of_negative(double a) {
  if (!(a > 0.0 && a < 1.0)) throw Error("spectral", "alpha outside (0,1)");
  return std::tgamma(1.0 - a) / (-a);
}

}  // namespace fraclb
