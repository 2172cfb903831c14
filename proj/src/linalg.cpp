#include "fraclb/linalg.hpp"

#include "fraclb/errors.hpp"

#include <Eigen/Eigenvalues>

namespace fraclb {

Vector symmetric_eigen(Matrix& a) {
  if (a.cols() != a.rows()) throw Error("spectral", "eigensolve needs a square matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw Error("spectral", "symmetric eigensolve did not converge");
  a = solver.eigenvectors();
  return solver.eigenvalues();
}

void solve_tridiagonal(const Vector& lower, const Vector& diag, const Vector& upper, Vector& rhs) {
  const Index n = diag.size();
  Vector c(n);
  double denom = diag(0);
  c(0) = n > 1 ? upper(0) / denom : 0.0;
  rhs(0) /= denom;
  for (Index i = 1; i < n; ++i) {
    denom = diag(i) - lower(i - 1) * c(i - 1);
    if (i + 1 < n) c(i) = upper(i) / denom;
    rhs(i) = (rhs(i) - lower(i - 1) * rhs(i - 1)) / denom;
  }
  for (Index i = n - 2; i >= 0; --i) rhs(i) -= c(i) * rhs(i + 1);
}

}  // namespace fraclb
