#pragma once

namespace fraclb {

// Modified Bessel function of the second kind K_a(z), a in (0,1), z > 0.
double bessel_k(double alpha, double z);

// Normalized extension profile s^a K_a(s) / (2^{a-1} Gamma(a)); equals 1 at s = 0.
double bessel_profile(double alpha, double s);

// Constant d_a = 2^{1-2a} Gamma(1-a) / Gamma(a) in the weighted Neumann trace.
double trace_constant(double alpha);

}  // namespace fraclb
