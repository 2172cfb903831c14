#pragma once

#include "fraclb/geometry.hpp"
#include "fraclb/quadrature.hpp"

#include <Eigen/Sparse>

#include <utility>
#include <vector>

namespace fraclb {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Divergence-form discretization of the positive Laplace-Beltrami operator.
// The stencil averages the forward-forward and backward-backward difference
// forms, which keeps cross terms centered and the operator self-adjoint in
// the weighted inner product.
class DiscreteLaplaceBeltrami {
 public:
  explicit DiscreteLaplaceBeltrami(const MetricField& metric);

  const MetricField& metric() const { return metric_; }
  const WeightedMeasure& measure() const { return measure_; }
  const TorusGrid& grid() const { return metric_.grid(); }
  Index size() const { return weighted_form_.rows(); }

  Vector apply(const Vector& u) const;
  // W A, symmetric positive semidefinite.
  const SparseMatrix& weighted_form() const { return weighted_form_; }
  Matrix dense() const;

 private:
  MetricField metric_;
  WeightedMeasure measure_;
  SparseMatrix weighted_form_;
};

DiscreteLaplaceBeltrami assemble_laplacian(const MetricField& metric);

class SpectralDecomposition {
 public:
  SpectralDecomposition(Vector eigenvalues, Matrix eigenvectors, Vector weights);

  Index size() const { return eigenvalues_.size(); }
  const Vector& eigenvalues() const { return eigenvalues_; }
  // Columns are eigenvectors, orthonormal in the weighted inner product.
  const Matrix& eigenvectors() const { return eigenvectors_; }
  const Vector& weights() const { return weights_; }

  Vector analyze(const Vector& u) const;
  Vector synthesize(const Vector& coefficients) const;
  Vector apply_multiplier(const Vector& multiplier, const Vector& u) const;
  // Dense matrix of the multiplier, Phi diag(m) Phi^T W.
  Matrix operator_matrix(const Vector& multiplier) const;
  // Kernel of the multiplier against the weighted measure, Phi diag(m) Phi^T.
  Matrix kernel_matrix(const Vector& multiplier) const;

 private:
  Vector eigenvalues_;
  Matrix eigenvectors_;
  Vector weights_;
};

constexpr Index kDefaultDecompositionCap = 4096;

SpectralDecomposition decompose(const DiscreteLaplaceBeltrami& op,
                                Index cap = kDefaultDecompositionCap);

Vector heat_multiplier(const SpectralDecomposition& dec, double t);
Vector heat_apply(const SpectralDecomposition& dec, double t, const Vector& u);
double heat_kernel(const SpectralDecomposition& dec, double t, Index i, Index j);
Matrix heat_kernel_matrix(const SpectralDecomposition& dec, double t);

Vector fractional_multiplier(const SpectralDecomposition& dec, double alpha);
Vector frac_apply_spectral(const SpectralDecomposition& dec, double alpha, const Vector& u);

// Per-mode value of the log-trapezoid Balakrishnan integral including the
// analytic pieces outside [t_min, t_max] and the end corrections.
double balakrishnan_mode_value(double lambda, double alpha, const TimeQuadrature& quad);
// Throws QuadratureWindowError unless the window reaches 1/(slack lambda_max)
// below and slack/lambda_1 above.
void check_window(const SpectralDecomposition& dec, const TimeQuadrature& quad, double slack);
Vector frac_apply_balakrishnan(const SpectralDecomposition& dec, double alpha, const Vector& u,
                               const TimeQuadrature& quad = {}, double slack = 10.0);

struct FracKernel {
  double alpha = 0.5;
  TimeQuadrature quad;
  std::vector<std::pair<Index, Index>> pairs;
  Vector values;
};

// t-integral of exp(-lambda t) t^{-1-alpha} over [t_min, infinity) plus the
// small-t part of (exp(-lambda t) - 1) t^{-1-alpha}. Exact off the diagonal.
double jump_mode_value(double lambda, double alpha, const TimeQuadrature& quad);
FracKernel jump_kernel(const SpectralDecomposition& dec, const MetricField& metric, double alpha,
                       const std::vector<std::pair<Index, Index>>& pairs,
                       const TimeQuadrature& quad = {});
// Kernel over all node pairs, zero on the diagonal.
Matrix jump_kernel_matrix(const SpectralDecomposition& dec, const MetricField& metric,
                          double alpha, const TimeQuadrature& quad = {});
double energy_form(const Matrix& kernel, const TorusGrid& grid, const Vector& u, const Vector& v);

// Smallest C with C^{-1} d^{-n-2a} <= K <= C d^{-n-2a} over the kernel's pairs.
double kernel_sandwich_constant(const FracKernel& kernel, const TorusGrid& grid);

}  // namespace fraclb
