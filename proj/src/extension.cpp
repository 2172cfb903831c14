#include "fraclb/extension.hpp"

#include "fraclb/bessel.hpp"
#include "fraclb/errors.hpp"
#include "fraclb/exterior.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>

namespace fraclb {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("extension", "alpha outside (0,1)");
}

}  // namespace

ExtensionSolution::ExtensionSolution(const SpectralDecomposition& dec, double alpha,
                                     Vector coefficients)
    : dec_(&dec), alpha_(alpha), coefficients_(std::move(coefficients)) {
  check_alpha(alpha);
}

double ExtensionSolution::mode_profile(Index k, double z) const {
  const double lambda = dec_->eigenvalues()(k);
  if (lambda == 0.0) return 1.0;
  return bessel_profile(alpha_, std::sqrt(lambda) * z);
}

Vector ExtensionSolution::evaluate(double z) const {
  if (!(z >= 0.0)) throw Error("extension", "extension height must be nonnegative");
  Vector c(coefficients_.size());
  for (Index k = 0; k < c.size(); ++k) c(k) = coefficients_(k) * mode_profile(k, z);
  return dec_->synthesize(c);
}

double ExtensionSolution::evaluate(Index node, double z) const {
  if (!(z >= 0.0)) throw Error("extension", "extension height must be nonnegative");
  const Matrix& phi = dec_->eigenvectors();
  double sum = 0.0;
  for (Index k = 0; k < coefficients_.size(); ++k)
    sum += coefficients_(k) * mode_profile(k, z) * phi(node, k);
  return sum;
}

ExtensionSolution extend_dirichlet(const SpectralDecomposition& dec, double alpha, const Vector& u) {
  return ExtensionSolution(dec, alpha, dec.analyze(u));
}

Vector neumann_trace(const ExtensionSolution& sol) {
  const double d = trace_constant(sol.alpha());
  const Vector frac = fractional_multiplier(sol.decomposition(), sol.alpha());
  return sol.decomposition().synthesize(-d * frac.cwiseProduct(sol.coefficients()));
}

double numeric_mode_trace(double alpha, double lambda) {
  check_alpha(alpha);
  if (!(lambda > 0.0)) return 0.0;
  constexpr int kPoints = 5;
  const double exponents[kPoints - 1] = {2.0 - 2.0 * alpha, 2.0, 4.0 - 2.0 * alpha, 4.0};
  const double z0 = 0.02 / std::sqrt(lambda);
  Eigen::Matrix<double, kPoints, kPoints> system;
  Eigen::Matrix<double, kPoints, 1> rhs;
  for (int k = 0; k < kPoints; ++k) {
    const double z = z0 * std::ldexp(1.0, -k);
    const double r = std::ldexp(1.0, -k);
    // Secant slope from z = 0, scaled by the weight; the factor 2a turns the
    // secant of a z^{2a} profile into its weighted derivative.
    const double psi = bessel_profile(alpha, std::sqrt(lambda) * z);
    rhs(k) = 2.0 * alpha * std::pow(z, -2.0 * alpha) * (psi - 1.0);
    system(k, 0) = 1.0;
    for (int e = 0; e < kPoints - 1; ++e) system(k, e + 1) = std::pow(r, exponents[e]);
  }
  return system.colPivHouseholderQr().solve(rhs)(0);
}

Vector numeric_trace_ratios(const SpectralDecomposition& dec, double alpha) {
  const Vector& lambda = dec.eigenvalues();
  Vector ratios(lambda.size() - 1);
  for (Index k = 1; k < lambda.size(); ++k)
    ratios(k - 1) = numeric_mode_trace(alpha, lambda(k)) / std::pow(lambda(k), alpha);
  return ratios;
}

Vector ExtensionMesh::weight_samples() const {
  return heights.array().pow(1.0 - 2.0 * alpha).matrix();
}

ExtensionMesh make_extension_mesh(double alpha, double lambda_1, int levels, double height_factor,
                                  double grading) {
  check_alpha(alpha);
  if (levels < 2) throw Error("extension", "extension mesh needs at least 2 levels");
  if (!(lambda_1 > 0.0)) throw Error("extension", "first nonzero eigenvalue must be positive");
  if (!(height_factor >= 5.0)) throw Error("extension", "truncation height below 5/sqrt(lambda_1)");
  ExtensionMesh mesh;
  mesh.alpha = alpha;
  mesh.grading = grading > 0.0 ? grading : std::max(2.0, 1.0 / alpha);
  if (mesh.grading < 1.0) throw Error("extension", "grading exponent must be at least 1");
  const double top = height_factor / std::sqrt(lambda_1);
  mesh.heights.resize(levels + 1);
  for (int p = 0; p <= levels; ++p)
    mesh.heights(p) = top * std::pow(double(p) / levels, mesh.grading);
  return mesh;
}

namespace {

// Tridiagonal stiffness and mass matrices of P1 elements with weight z^b.
struct ZMatrices {
  Vector stiff_diag, stiff_off, mass_diag, mass_off;
};

ZMatrices z_matrices(const ExtensionMesh& mesh) {
  const int P = mesh.levels();
  const double b = 1.0 - 2.0 * mesh.alpha;
  ZMatrices z{Vector::Zero(P + 1), Vector::Zero(P), Vector::Zero(P + 1), Vector::Zero(P)};
  using Rule = boost::math::quadrature::gauss<double, 30>;
  for (int e = 0; e < P; ++e) {
    const double lo = mesh.heights(e), hi = mesh.heights(e + 1), len = hi - lo;
    double w0, m00, m01, m11;
    if (e == 0) {
      const double scale = std::pow(hi, b + 1.0);
      w0 = scale / (b + 1.0);
      m00 = scale * std::beta(b + 1.0, 3.0);
      m01 = scale * std::beta(b + 2.0, 2.0);
      m11 = scale / (b + 3.0);
    } else {
      auto weight = [&](double z) { return std::pow(z, b); };
      auto left = [&](double z) { return (hi - z) / len; };
      auto right = [&](double z) { return (z - lo) / len; };
      w0 = Rule::integrate(weight, lo, hi);
      m00 = Rule::integrate([&](double z) { return weight(z) * left(z) * left(z); }, lo, hi);
      m01 = Rule::integrate([&](double z) { return weight(z) * left(z) * right(z); }, lo, hi);
      m11 = Rule::integrate([&](double z) { return weight(z) * right(z) * right(z); }, lo, hi);
    }
    const double k = w0 / (len * len);
    z.stiff_diag(e) += k;
    z.stiff_diag(e + 1) += k;
    z.stiff_off(e) -= k;
    z.mass_diag(e) += m00;
    z.mass_diag(e + 1) += m11;
    z.mass_off(e) += m01;
  }
  return z;
}

// Y = X T for symmetric tridiagonal T acting on columns.
void tridiagonal_columns(const Eigen::Ref<const Matrix>& x, const Vector& diag, const Vector& off,
                         Matrix& y) {
  const Index P = diag.size();
  for (Index p = 0; p < P; ++p) {
    y.col(p) = diag(p) * x.col(p);
    if (p > 0) y.col(p) += off(p - 1) * x.col(p - 1);
    if (p + 1 < P) y.col(p) += off(p) * x.col(p + 1);
  }
}

}  // namespace

ExtensionField fd_extension_solve(const DiscreteLaplaceBeltrami& op, double alpha,
                                  const ExtensionMesh& mesh, const std::vector<Index>& dirichlet,
                                  const std::vector<Index>& neumann, const Vector& f_dirichlet,
                                  const Vector& f_neumann, const ExtensionSolveOptions& options) {
  check_alpha(alpha);
  if (std::abs(mesh.alpha - alpha) > 0.0) throw Error("extension", "mesh built for another alpha");
  const Index M = op.size();
  const int levels = mesh.levels() + 1;
  if (f_dirichlet.size() != M || f_neumann.size() != M)
    throw Error("extension", "boundary data must be node vectors");
  std::vector<int> role(size_t(M), 0);
  for (Index i : dirichlet) role.at(size_t(i)) += 1;
  for (Index i : neumann) role.at(size_t(i)) += 2;
  for (int r : role)
    if (r != 1 && r != 2) throw Error("extension", "Dirichlet and Neumann nodes must partition the grid");

  const ZMatrices z = z_matrices(mesh);
  const Vector& w = op.measure().weights();
  const SparseMatrix& S = op.weighted_form();
  const Vector s_diag = Vector(S.diagonal());

  Matrix xk(M, levels), xm(M, levels);
  auto apply_full = [&](const Vector& xv, Vector& yv) {
    Eigen::Map<const Matrix> X(xv.data(), M, levels);
    Eigen::Map<Matrix> Y(yv.data(), M, levels);
    tridiagonal_columns(X, z.stiff_diag, z.stiff_off, xk);
    tridiagonal_columns(X, z.mass_diag, z.mass_off, xm);
    Y.noalias() = w.asDiagonal() * xk;
    Y.noalias() += S * xm;
  };

  Vector fixed_values = Vector::Zero(M * levels);
  Vector rhs = Vector::Zero(M * levels);
  for (Index i = 0; i < M; ++i) {
    if (role[size_t(i)] == 1)
      fixed_values(i) = f_dirichlet(i);
    else
      rhs(i) = -w(i) * f_neumann(i);
  }
  if (dirichlet.empty()) {
    const double total = rhs.sum(), scale = rhs.cwiseAbs().sum();
    if (std::abs(total) > 1e-12 * std::max(scale, 1e-300))
      throw Error("extension", "pure Neumann data is incompatible (nonzero mean)");
  }
  Vector tmp(M * levels);
  apply_full(fixed_values, tmp);
  rhs -= tmp;
  for (Index i : dirichlet) rhs(i) = 0.0;

  auto apply = [&](const Vector& xv, Vector& yv) {
    apply_full(xv, yv);
    for (Index i : dirichlet) yv(i) = 0.0;
  };
  Vector lower(levels - 1), diag(levels), upper(levels - 1), line(levels);
  auto precondition = [&](const Vector& rv, Vector& zv) {
    for (Index i = 0; i < M; ++i) {
      const Index first = role[size_t(i)] == 1 ? 1 : 0;
      const Index n = levels - first;
      for (Index p = 0; p < n; ++p) {
        const Index q = p + first;
        diag(p) = w(i) * z.stiff_diag(q) + s_diag(i) * z.mass_diag(q);
        if (p + 1 < n) lower(p) = upper(p) = w(i) * z.stiff_off(q) + s_diag(i) * z.mass_off(q);
        line(p) = rv(i + M * q);
      }
      auto seg = line.head(n).eval();
      solve_tridiagonal(lower.head(std::max<Index>(n - 1, 0)).eval(), diag.head(n).eval(),
                        upper.head(std::max<Index>(n - 1, 0)).eval(), seg);
      if (first == 1) zv(i) = 0.0;
      for (Index p = 0; p < n; ++p) zv(i + M * (p + first)) = seg(p);
    }
  };

  Vector x = Vector::Zero(M * levels);
  ExtensionField out;
  out.stats = pcg(apply, precondition, rhs, x, options.tolerance, options.max_iterations,
                  options.track_energy);
  if (!out.stats.converged)
    throw Error("extension", "conjugate gradients did not converge (relative residual " +
                                 std::to_string(out.stats.relative_residual) + ")");
  x += fixed_values;
  out.values = Eigen::Map<Matrix>(x.data(), M, levels);
  return out;
}

HeatTrace::HeatTrace(const DiscreteLaplaceBeltrami& op, const SpectralDecomposition& dec,
                     const Vector& h, Index node) {
  const SparseMatrix& S = op.weighted_form();
  const Vector& w = op.measure().weights();
  double norm = 0.0;
  for (Index i = 0; i < S.outerSize(); ++i) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(S, i); it; ++it) row += std::abs(it.value());
    norm = std::max(norm, row / w(i));
  }
  t_switch_ = 0.5 / norm;
  constexpr int kTerms = 80;
  taylor_.resize(kTerms);
  Vector v = h;
  for (int m = 0; m < kTerms; ++m) {
    if (m > 0) v = op.apply(v) / double(m);
    taylor_(m) = v(node);
  }
  modal_ = dec.analyze(h).cwiseProduct(dec.eigenvectors().row(node).transpose());
  lambda_ = dec.eigenvalues();
}

double HeatTrace::operator()(double t) const {
  if (t <= t_switch_) {
    double sum = 0.0;
    for (Index m = taylor_.size() - 1; m >= 0; --m) sum = sum * (-t) + taylor_(m);
    return sum;
  }
  return (modal_.array() * (-t * lambda_.array()).exp()).sum();
}

double representation_integral(const HeatTrace& trace, double alpha, double z,
                               const TimeQuadrature& quad) {
  check_alpha(alpha);
  const Vector t = quad.times(), w = quad.weights();
  double sum = 0.0;
  for (Index q = 0; q < t.size(); ++q)
    sum += w(q) * trace(t(q)) * std::exp(-z * z / (4.0 * t(q))) * std::pow(t(q), alpha - 1.0);
  return sum;
}

namespace {

void check_off_support(const Vector& f, Index node) {
  if (node < 0 || node >= f.size()) throw Error("extension", "node index out of range");
  if (f(node) != 0.0) throw Error("extension", "evaluation node lies inside supp F");
}

}  // namespace

double calibrate_representation(const DiscreteLaplaceBeltrami& op,
                                const SpectralDecomposition& dec, double alpha, const Vector& f,
                                Index node, const TimeQuadrature& quad) {
  check_off_support(f, node);
  const Vector h = op.apply(f);
  const double target = neumann_solve(dec, alpha, h)(node);
  const double raw = representation_integral(HeatTrace(op, dec, h, node), alpha, 0.0, quad);
  if (raw == 0.0) throw Error("extension", "calibration node carries no signal");
  return target / raw;
}

double representation_solution(const DiscreteLaplaceBeltrami& op, const SpectralDecomposition& dec,
                               double alpha, const Vector& f, Index node, double z,
                               double constant, const TimeQuadrature& quad) {
  check_off_support(f, node);
  if (!(z >= 0.0)) throw Error("extension", "extension height must be nonnegative");
  const HeatTrace trace(op, dec, op.apply(f), node);
  return constant * representation_integral(trace, alpha, z, quad);
}

double SeriesCoefficients::partial_sum(size_t r, double z, int terms) const {
  const Index J = terms < 0 ? values.cols() - 1 : std::min<Index>(terms, values.cols() - 1);
  double sum = 0.0, power = 1.0;
  for (Index j = 0; j <= J; ++j) {
    sum += values(Index(r), j) * power;
    power *= z * z;
  }
  return sum;
}

SeriesCoefficients series_coefficients(const DiscreteLaplaceBeltrami& op,
                                       const SpectralDecomposition& dec, double alpha,
                                       const Vector& f, const std::vector<Index>& nodes, int J,
                                       double constant, const TimeQuadrature& quad) {
  check_alpha(alpha);
  if (J < 0 || J > 12) throw Error("extension", "series order must lie in [0, 12]");
  const Vector h = op.apply(f);
  const Vector t = quad.times(), w = quad.weights();
  SeriesCoefficients out;
  out.alpha = alpha;
  out.nodes = nodes;
  out.values.resize(Index(nodes.size()), J + 1);
  out.decay_slopes.resize(Index(nodes.size()));
  for (size_t r = 0; r < nodes.size(); ++r) {
    check_off_support(f, nodes[r]);
    const HeatTrace trace(op, dec, h, nodes[r]);
    Vector u(t.size());
    for (Index q = 0; q < t.size(); ++q) u(q) = trace(t(q));
    double factor = constant;
    for (int j = 0; j <= J; ++j) {
      if (j > 0) factor *= -0.25 / j;
      double sum = 0.0, biggest = 0.0;
      for (Index q = 0; q < t.size(); ++q) {
        const double term = w(q) * u(q) * std::pow(t(q), alpha - 1.0 - j);
        sum += term;
        biggest = std::max(biggest, std::abs(term));
      }
      const double edge = std::abs(w(0) * u(0) * std::pow(t(0), alpha - 1.0 - j));
      if (edge > 1e-12 * std::max(std::abs(sum), biggest * 1e-3))
        throw QuadratureWindowError("extension", "t_min does not resolve the t^(a-1-" +
                                                     std::to_string(j) + ") weight");
      out.values(Index(r), j) = factor * sum;
    }
    // Least-squares slope of log|C_j| over j >= 1.
    double sj = 0, sl = 0, sjj = 0, sjl = 0;
    int count = 0;
    for (int j = 1; j <= J; ++j) {
      const double c = std::abs(out.values(Index(r), j));
      if (c == 0.0) continue;
      const double l = std::log(c);
      sj += j;
      sl += l;
      sjj += double(j) * j;
      sjl += j * l;
      ++count;
    }
    out.decay_slopes(Index(r)) =
        count >= 2 ? (count * sjl - sj * sl) / (count * sjj - sj * sj) : 0.0;
  }
  return out;
}

}  // namespace fraclb
