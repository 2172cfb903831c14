#pragma once

#include "fraclb/geometry.hpp"

#include <cmath>
#include <vector>

namespace fraclb {

struct CgStats {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  // Quadratic energy 1/2 x'Ax - b'x after each iteration.
  std::vector<double> energy;
};

// Preconditioned conjugate gradients for a symmetric positive (semi)definite
// operator. `apply(x, y)` writes y = A x, `precondition(r, z)` writes z = P^{-1} r.
template <class Apply, class Precondition>
CgStats pcg(Apply&& apply, Precondition&& precondition, const Vector& b, Vector& x,
            double tolerance, int max_iterations, bool track_energy = false) {
  CgStats stats;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    stats.converged = true;
    return stats;
  }
  Vector r(b.size()), z(b.size()), p(b.size()), q(b.size());
  apply(x, q);
  r = b - q;
  precondition(r, z);
  p = z;
  double rz = r.dot(z);
  auto energy = [&] { return -0.5 * (x.dot(b) + x.dot(r)); };
  if (track_energy) stats.energy.push_back(energy());
  for (int k = 0; k < max_iterations; ++k) {
    stats.relative_residual = r.norm() / bnorm;
    if (stats.relative_residual < tolerance) {
      stats.converged = true;
      return stats;
    }
    apply(p, q);
    double pq = p.dot(q);
    if (!(pq > 0.0)) break;
    double step = rz / pq;
    x += step * p;
    r -= step * q;
    if (track_energy) stats.energy.push_back(energy());
    precondition(r, z);
    double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
    stats.iterations = k + 1;
  }
  stats.relative_residual = r.norm() / bnorm;
  stats.converged = stats.relative_residual < tolerance;
  return stats;
}

// In-place dense symmetric eigensolve. On return `a` holds the
// orthonormal eigenvectors as columns, eigenvalues ascending.
Vector symmetric_eigen(Matrix& a);

// Solves a tridiagonal system in place. `lower[i]` couples rows i+1 and i.
void solve_tridiagonal(const Vector& lower, const Vector& diag, const Vector& upper, Vector& rhs);

}  // namespace fraclb
