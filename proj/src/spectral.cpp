#include "fraclb/spectral.hpp"

#include "fraclb/errors.hpp"
#include "fraclb/linalg.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <string>

namespace fraclb {

namespace {

void check_alpha_open(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("spectral", "alpha outside (0,1)");
}

// Upper incomplete gamma at negative order -a, a in (0,1).
double upper_gamma_negative(double a, double x) {
  if (x > 700.0) return 0.0;
  return (std::pow(x, -a) * std::exp(-x) - boost::math::tgamma(1.0 - a, x)) / a;
}

// Trapezoid in s = log t of f(s) plus the Euler-Maclaurin end correction.
// `f` and `df` are the s-integrand and its s-derivative at a given t.
template <class F, class DF>
double log_trapezoid(const TimeQuadrature& quad, F&& f, DF&& df) {
  const Vector t = quad.times();
  const double ds = quad.log_step();
  double sum = 0.5 * (f(t(0)) + f(t(quad.nodes - 1)));
  for (int q = 1; q + 1 < quad.nodes; ++q) sum += f(t(q));
  sum *= ds;
  return sum - ds * ds / 12.0 * (df(quad.t_max) - df(quad.t_min));
}

}  // namespace

DiscreteLaplaceBeltrami::DiscreteLaplaceBeltrami(const MetricField& metric)
    : metric_(metric), measure_(metric) {
  const TorusGrid& grid = metric_.grid();
  const Index M = grid.node_count();
  const int n = grid.dim();
  const double h = grid.spacing();
  const double scale = grid.cell_volume() / (h * h);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(size_t(M) * (n == 1 ? 8 : 32));
  for (Index i = 0; i < M; ++i) {
    const Tensor a = metric_.det_sqrt(i) * metric_.inverse_tensor(i);
    for (int sign : {+1, -1}) {
      // Difference d_j = e_hi - e_lo along axis j for this orientation.
      Index hi[2], lo[2];
      for (int j = 0; j < n; ++j) {
        hi[j] = sign > 0 ? grid.neighbor(i, j, 1) : i;
        lo[j] = sign > 0 ? i : grid.neighbor(i, j, -1);
      }
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double c = 0.5 * scale * a(j, k);
          if (c == 0.0) continue;
          triplets.emplace_back(hi[j], hi[k], c);
          triplets.emplace_back(hi[j], lo[k], -c);
          triplets.emplace_back(lo[j], hi[k], -c);
          triplets.emplace_back(lo[j], lo[k], c);
        }
    }
  }
  weighted_form_.resize(M, M);
  weighted_form_.setFromTriplets(triplets.begin(), triplets.end());
  weighted_form_.prune(0.0);
}

Vector DiscreteLaplaceBeltrami::apply(const Vector& u) const {
  if (u.size() != size()) throw Error("spectral", "vector length does not match node count");
  return (weighted_form_ * u).cwiseQuotient(measure_.weights());
}

Matrix DiscreteLaplaceBeltrami::dense() const {
  Matrix a = Matrix(weighted_form_);
  return measure_.weights().cwiseInverse().asDiagonal() * a;
}

DiscreteLaplaceBeltrami assemble_laplacian(const MetricField& metric) {
  return DiscreteLaplaceBeltrami(metric);
}

SpectralDecomposition::SpectralDecomposition(Vector eigenvalues, Matrix eigenvectors,
                                             Vector weights)
    : eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      weights_(std::move(weights)) {}

Vector SpectralDecomposition::analyze(const Vector& u) const {
  if (u.size() != size()) throw Error("spectral", "vector length does not match node count");
  return eigenvectors_.transpose() * u.cwiseProduct(weights_);
}

Vector SpectralDecomposition::synthesize(const Vector& coefficients) const {
  return eigenvectors_ * coefficients;
}

Vector SpectralDecomposition::apply_multiplier(const Vector& multiplier, const Vector& u) const {
  return synthesize(multiplier.cwiseProduct(analyze(u)));
}

Matrix SpectralDecomposition::kernel_matrix(const Vector& multiplier) const {
  Matrix scaled = eigenvectors_ * multiplier.asDiagonal();
  return scaled * eigenvectors_.transpose();
}

Matrix SpectralDecomposition::operator_matrix(const Vector& multiplier) const {
  return kernel_matrix(multiplier) * weights_.asDiagonal();
}

SpectralDecomposition decompose(const DiscreteLaplaceBeltrami& op, Index cap) {
  const Index M = op.size();
  if (M > cap)
    throw Error("spectral", "node count " + std::to_string(M) + " exceeds decomposition cap " +
                                std::to_string(cap));
  const Vector& w = op.measure().weights();
  const Vector r = w.cwiseSqrt().cwiseInverse();
  Matrix sym = r.asDiagonal() * Matrix(op.weighted_form()) * r.asDiagonal();
  Vector lambda = symmetric_eigen(sym);
  const double top = lambda(M - 1);
  if (std::abs(lambda(0)) > 1e-10 * top)
    throw Error("spectral", "lowest eigenvalue is not a zero mode");
  lambda(0) = 0.0;
  if (!(lambda(1) > 1e-10 * top)) throw Error("spectral", "zero eigenvalue is not simple");
  Matrix phi = r.asDiagonal() * sym;
  phi.col(0).setConstant(1.0 / std::sqrt(w.sum()));
  return SpectralDecomposition(std::move(lambda), std::move(phi), w);
}

Vector heat_multiplier(const SpectralDecomposition& dec, double t) {
  return (-t * dec.eigenvalues().array()).exp().matrix();
}

Vector heat_apply(const SpectralDecomposition& dec, double t, const Vector& u) {
  if (!(t >= 0.0)) throw Error("spectral", "heat time must be nonnegative");
  if (t == 0.0) return u;
  return dec.apply_multiplier(heat_multiplier(dec, t), u);
}

double heat_kernel(const SpectralDecomposition& dec, double t, Index i, Index j) {
  if (!(t > 0.0)) throw Error("spectral", "heat kernel needs t > 0");
  const Matrix& phi = dec.eigenvectors();
  const Vector m = heat_multiplier(dec, t);
  double sum = 0.0;
  for (Index k = 0; k < dec.size(); ++k) sum += m(k) * phi(i, k) * phi(j, k);
  return sum;
}

Matrix heat_kernel_matrix(const SpectralDecomposition& dec, double t) {
  if (!(t > 0.0)) throw Error("spectral", "heat kernel needs t > 0");
  Matrix k = dec.kernel_matrix(heat_multiplier(dec, t));
  return 0.5 * (k + k.transpose());
}

Vector fractional_multiplier(const SpectralDecomposition& dec, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("spectral", "alpha outside (0,1]");
  Vector m = dec.eigenvalues().array().pow(alpha).matrix();
  m(0) = 0.0;
  return m;
}

Vector frac_apply_spectral(const SpectralDecomposition& dec, double alpha, const Vector& u) {
  return dec.apply_multiplier(fractional_multiplier(dec, alpha), u);
}

namespace {

// Integral of (e^{-lambda t} - 1) t^{-1-a} over (0, t_min).
double lower_tail(double lambda, double a, double t_min) {
  if (lambda == 0.0) return 0.0;
  const double x = lambda * t_min;
  if (x < 1.0) {
    double sum = 0.0, term = 1.0;
    for (int m = 1; m < 60; ++m) {
      term *= -x / m;
      sum += term / (m - a);
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return std::pow(t_min, -a) * sum;
  }
  const double lower_gamma = gamma_of_negative(a) - upper_gamma_negative(a, x);
  return std::pow(lambda, a) * (lower_gamma + std::pow(x, -a) / a);
}

}  // namespace

double balakrishnan_mode_value(double lambda, double a, const TimeQuadrature& quad) {
  check_alpha_open(a);
  if (lambda == 0.0) return 0.0;
  auto f = [&](double t) { return std::expm1(-lambda * t) * std::pow(t, -a); };
  auto df = [&](double t) { return -lambda * t * std::exp(-lambda * t) * std::pow(t, -a) - a * f(t); };
  double inner = log_trapezoid(quad, f, df);

  const double lower = lower_tail(lambda, a, quad.t_min);
  double upper = std::pow(lambda, a) * upper_gamma_negative(a, lambda * quad.t_max) -
                 std::pow(quad.t_max, -a) / a;
  return lower + inner + upper;
}

void check_window(const SpectralDecomposition& dec, const TimeQuadrature& quad, double slack) {
  quad.validate();
  const Vector& lambda = dec.eigenvalues();
  const double lo = 1.0 / (slack * lambda(lambda.size() - 1));
  const double hi = slack / lambda(1);
  if (quad.t_min > lo)
    throw QuadratureWindowError("spectral", "t_min " + std::to_string(quad.t_min) +
                                                " above " + std::to_string(lo));
  if (quad.t_max < hi)
    throw QuadratureWindowError("spectral", "t_max " + std::to_string(quad.t_max) +
                                                " below " + std::to_string(hi));
}

Vector frac_apply_balakrishnan(const SpectralDecomposition& dec, double alpha, const Vector& u,
                               const TimeQuadrature& quad, double slack) {
  check_alpha_open(alpha);
  check_window(dec, quad, slack);
  const double g = gamma_of_negative(alpha);
  Vector m(dec.size());
  for (Index k = 0; k < dec.size(); ++k)
    m(k) = balakrishnan_mode_value(dec.eigenvalues()(k), alpha, quad) / g;
  return dec.apply_multiplier(m, u);
}

double jump_mode_value(double lambda, double a, const TimeQuadrature& quad) {
  check_alpha_open(a);
  auto f = [&](double t) { return std::exp(-lambda * t) * std::pow(t, -a); };
  auto df = [&](double t) { return (-lambda * t - a) * f(t); };
  double inner = log_trapezoid(quad, f, df);
  double upper = lambda == 0.0 ? std::pow(quad.t_max, -a) / a
                               : std::pow(lambda, a) * upper_gamma_negative(a, lambda * quad.t_max);
  return lower_tail(lambda, a, quad.t_min) + inner + upper;
}

namespace {

Vector jump_modes(const SpectralDecomposition& dec, double alpha, const TimeQuadrature& quad) {
  quad.validate();
  Vector m(dec.size());
  for (Index k = 0; k < dec.size(); ++k) m(k) = jump_mode_value(dec.eigenvalues()(k), alpha, quad);
  return m;
}

}  // namespace

FracKernel jump_kernel(const SpectralDecomposition& dec, const MetricField& metric, double alpha,
                       const std::vector<std::pair<Index, Index>>& pairs,
                       const TimeQuadrature& quad) {
  check_alpha_open(alpha);
  const Vector m = jump_modes(dec, alpha, quad);
  const double scale = 1.0 / (2.0 * std::abs(gamma_of_negative(alpha)));
  const Matrix& phi = dec.eigenvectors();
  FracKernel out{alpha, quad, pairs, Vector(Index(pairs.size()))};
  for (size_t p = 0; p < pairs.size(); ++p) {
    auto [i, j] = pairs[p];
    if (i == j) throw Error("spectral", "jump kernel is singular on the diagonal");
    double sum = 0.0;
    for (Index k = 0; k < dec.size(); ++k) sum += m(k) * phi(i, k) * phi(j, k);
    out.values(Index(p)) = scale * metric.det_sqrt(i) * metric.det_sqrt(j) * sum;
  }
  return out;
}

Matrix jump_kernel_matrix(const SpectralDecomposition& dec, const MetricField& metric,
                          double alpha, const TimeQuadrature& quad) {
  check_alpha_open(alpha);
  Matrix k = dec.kernel_matrix(jump_modes(dec, alpha, quad));
  const double scale = 1.0 / (2.0 * std::abs(gamma_of_negative(alpha)));
  const Vector& s = metric.det_sqrt();
  k = scale * (s.asDiagonal() * k * s.asDiagonal());
  k = 0.5 * (k + k.transpose()).eval();
  k.diagonal().setZero();
  return k;
}

double energy_form(const Matrix& kernel, const TorusGrid& grid, const Vector& u, const Vector& v) {
  const double h2n = grid.cell_volume() * grid.cell_volume();
  const Vector rows = kernel.rowwise().sum();
  double diag = (rows.array() * u.array() * v.array()).sum();
  return 2.0 * h2n * (diag - u.dot(kernel * v));
}

double kernel_sandwich_constant(const FracKernel& kernel, const TorusGrid& grid) {
  double c = 1.0;
  const double power = grid.dim() + 2.0 * kernel.alpha;
  for (size_t p = 0; p < kernel.pairs.size(); ++p) {
    auto [i, j] = kernel.pairs[p];
    double d = grid.distance(grid.coordinates(i), grid.coordinates(j));
    double ratio = kernel.values(Index(p)) * std::pow(d, power);
    if (!(ratio > 0.0)) return INFINITY;
    c = std::max({c, ratio, 1.0 / ratio});
  }
  return c;
}

}  // namespace fraclb
