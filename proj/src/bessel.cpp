#include "fraclb/bessel.hpp"

#include "fraclb/errors.hpp"

#include <cmath>

namespace fraclb {

double bessel_k(double alpha, double z) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("extension", "alpha outside (0,1)");
  if (!(z > 0.0)) throw Error("extension", "bessel_k needs z > 0");
  // libstdc++ evaluates this with Temme's series below z = 2 and Steed's
  // continued fraction above.
  return std::cyl_bessel_k(alpha, z);
}

double bessel_profile(double alpha, double s) {
  if (s == 0.0) return 1.0;
  if (s > 700.0) return 0.0;
  return std::pow(s, alpha) * bessel_k(alpha, s) / (std::pow(2.0, alpha - 1.0) * std::tgamma(alpha));
}

double trace_constant(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("extension", "alpha outside (0,1)");
  return std::pow(2.0, 1.0 - 2.0 * alpha) * std::tgamma(1.0 - alpha) / std::tgamma(alpha);
}

}  // namespace fraclb
