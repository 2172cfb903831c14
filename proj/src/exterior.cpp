#include "fraclb/exterior.hpp"

#include "fraclb/bessel.hpp"
#include "fraclb/errors.hpp"
#include "fraclb/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace fraclb {

Shape Shape::ball(const Point& center, double radius) {
  return Shape{Kind::ball, center, 0.0, radius};
}

Shape Shape::annulus(const Point& center, double inner, double outer) {
  return Shape{Kind::annulus, center, inner, outer};
}

bool Shape::contains(const TorusGrid& grid, const Point& x) const {
  const double r = grid.distance(center, x);
  if (kind == Kind::ball) return r < outer_radius;
  return r >= inner_radius && r < outer_radius;
}

std::vector<Index> Shape::nodes(const TorusGrid& grid) const {
  std::vector<Index> out;
  for (Index i = 0; i < grid.node_count(); ++i)
    if (contains(grid, grid.coordinates(i))) out.push_back(i);
  return out;
}

namespace {

double set_distance(const TorusGrid& grid, const std::vector<Index>& a,
                    const std::vector<Index>& b) {
  double best = INFINITY;
  for (Index i : a) {
    const Point x = grid.coordinates(i);
    for (Index j : b) best = std::min(best, grid.distance(x, grid.coordinates(j)));
  }
  return best;
}

std::vector<bool> mask(Index size, const std::vector<Index>& nodes) {
  std::vector<bool> m(size_t(size), false);
  for (Index i : nodes) {
    if (i < 0 || i >= size) throw Error("exterior", "node index out of range");
    m[size_t(i)] = true;
  }
  return m;
}

}  // namespace

ExteriorConfig ExteriorConfig::from_sets(const TorusGrid& grid, std::vector<Index> omega,
                                         std::vector<Index> w1, std::vector<Index> w2,
                                         bool allow_overlap) {
  ExteriorConfig c(grid);
  const Index M = grid.node_count();
  for (auto* set : {&omega, &w1, &w2}) {
    std::sort(set->begin(), set->end());
    set->erase(std::unique(set->begin(), set->end()), set->end());
  }
  if (omega.empty()) throw Error("exterior", "Omega is empty");
  if (w1.empty() || w2.empty()) throw Error("exterior", "measurement sets must be nonempty");
  if (Index(omega.size()) == M) throw Error("exterior", "Omega covers the whole grid");
  c.in_omega_ = mask(M, omega);
  c.in_w1_ = mask(M, w1);
  c.in_w2_ = mask(M, w2);
  for (Index i = 0; i < M; ++i) {
    if (c.in_omega_[size_t(i)] && (c.in_w1_[size_t(i)] || c.in_w2_[size_t(i)]))
      throw Error("exterior", "W1 and W2 must lie in the exterior");
    if (!c.in_omega_[size_t(i)]) c.exterior_.push_back(i);
  }
  const double gap = 2.0 * grid.spacing();
  if (set_distance(grid, w1, omega) <= gap || set_distance(grid, w2, omega) <= gap)
    throw Error("exterior", "W1 and W2 must stay more than 2h away from Omega");
  if (!allow_overlap && set_distance(grid, w1, w2) <= gap)
    throw Error("exterior", "W1 and W2 must stay more than 2h apart");

  // The exterior must be connected as a grid graph.
  std::vector<bool> seen(size_t(M), false);
  std::deque<Index> queue{c.exterior_.front()};
  seen[size_t(c.exterior_.front())] = true;
  size_t reached = 0;
  while (!queue.empty()) {
    Index i = queue.front();
    queue.pop_front();
    ++reached;
    for (int axis = 0; axis < grid.dim(); ++axis)
      for (int step : {-1, 1}) {
        Index j = grid.neighbor(i, axis, step);
        if (!seen[size_t(j)] && !c.in_omega_[size_t(j)]) {
          seen[size_t(j)] = true;
          queue.push_back(j);
        }
      }
  }
  if (reached != c.exterior_.size()) throw Error("exterior", "exterior is not connected");
  c.omega_ = std::move(omega);
  c.w1_ = std::move(w1);
  c.w2_ = std::move(w2);
  return c;
}

ExteriorConfig ExteriorConfig::from_shapes(const TorusGrid& grid, const Shape& omega,
                                           const Shape& w1, const Shape& w2, bool allow_overlap) {
  return from_sets(grid, omega.nodes(grid), w1.nodes(grid), w2.nodes(grid), allow_overlap);
}

NodeRole ExteriorConfig::role(Index i) const {
  if (in_omega_[size_t(i)]) return NodeRole::omega;
  const bool a = in_w1_[size_t(i)], b = in_w2_[size_t(i)];
  if (a && b) return NodeRole::w12;
  if (a) return NodeRole::w1;
  if (b) return NodeRole::w2;
  return NodeRole::exterior;
}

const char* role_name(NodeRole role) {
  switch (role) {
    case NodeRole::omega: return "omega";
    case NodeRole::w1: return "w1";
    case NodeRole::w2: return "w2";
    case NodeRole::w12: return "w12";
    default: return "ext";
  }
}

FractionalOperator::FractionalOperator(const SpectralDecomposition& dec, double alpha)
    : alpha_(alpha), weights_(dec.weights()) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("exterior", "alpha outside (0,1)");
  Matrix k = dec.kernel_matrix(fractional_multiplier(dec, alpha));
  weighted_ = weights_.asDiagonal() * k * weights_.asDiagonal();
  weighted_ = 0.5 * (weighted_ + weighted_.transpose()).eval();
  dense_ = weights_.cwiseInverse().asDiagonal() * weighted_;
}

ExteriorSolution solve_exterior(const FractionalOperator& op, const ExteriorConfig& config,
                                const Vector& f, const ExteriorSolveOptions& options) {
  const Index M = op.size();
  if (f.size() != M) throw Error("exterior", "datum must be a node vector");
  const auto& om = config.omega();
  const auto& ext = config.exterior();
  const Index n = Index(om.size());
  Matrix block(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) block(a, b) = op.weighted()(om[size_t(a)], om[size_t(b)]);
  Vector rhs = Vector::Zero(n);
  for (Index a = 0; a < n; ++a) {
    double s = 0.0;
    for (Index j : ext) s += op.weighted()(om[size_t(a)], j) * f(j);
    rhs(a) = -s;
  }
  const Vector inv_diag = block.diagonal().cwiseInverse();
  Vector x = Vector::Zero(n);
  CgStats stats = pcg([&](const Vector& p, Vector& q) { q.noalias() = block * p; },
                      [&](const Vector& r, Vector& z) { z = inv_diag.cwiseProduct(r); }, rhs, x,
                      options.tolerance, options.max_iterations);
  if (!stats.converged)
    throw Error("exterior", "conjugate gradients did not converge (relative residual " +
                                std::to_string(stats.relative_residual) + ")");
  ExteriorSolution out;
  out.u = Vector::Zero(M);
  for (Index j : ext) out.u(j) = f(j);
  for (Index a = 0; a < n; ++a) out.u(om[size_t(a)]) = x(a);
  out.residual = stats.relative_residual;
  out.iterations = stats.iterations;
  return out;
}

Vector solve_exterior_dirichlet(const FractionalOperator& op, const ExteriorConfig& config,
                                const Vector& f, const ExteriorSolveOptions& options) {
  return solve_exterior(op, config, f, options).u;
}

double DtNRecord::pairing(const Vector& g) const {
  double s = 0.0;
  for (Index i : measurement) s += output(i) * g(i) * det_sqrt(i);
  return s;
}

namespace {

DtNRecord measure(const FractionalOperator& op, const MetricField& metric,
                  const ExteriorConfig& config, const Vector& f,
                  const std::vector<Index>& measurement, const ExteriorSolveOptions& options) {
  ExteriorSolution sol = solve_exterior(op, config, f, options);
  const Vector full = op.apply(sol.u);
  DtNRecord rec{f, Vector::Zero(f.size()), measurement, sol.residual, metric.det_sqrt()};
  for (Index i : measurement) rec.output(i) = full(i);
  return rec;
}

}  // namespace

DtNRecord dtn_partial(const FractionalOperator& op, const MetricField& metric,
                      const ExteriorConfig& config, const Vector& f_on_w1,
                      const ExteriorSolveOptions& options) {
  std::vector<bool> in_w1(size_t(f_on_w1.size()), false);
  for (Index i : config.w1()) in_w1[size_t(i)] = true;
  for (Index i = 0; i < f_on_w1.size(); ++i)
    if (f_on_w1(i) != 0.0 && !in_w1[size_t(i)])
      throw Error("exterior", "datum is not supported in W1");
  return measure(op, metric, config, f_on_w1, config.w2(), options);
}

DtNRecord dtn_full(const FractionalOperator& op, const MetricField& metric,
                   const ExteriorConfig& config, const Vector& h_on_exterior,
                   const ExteriorSolveOptions& options) {
  for (Index i : config.omega())
    if (h_on_exterior(i) != 0.0) throw Error("exterior", "datum is not supported in the exterior");
  return measure(op, metric, config, h_on_exterior, config.exterior(), options);
}

Vector SourceSolutionRecord::exterior_values() const {
  Vector v(Index(exterior.size()));
  for (size_t a = 0; a < exterior.size(); ++a) v(Index(a)) = solution(exterior[a]);
  return v;
}

SourceSolutionRecord poisson_solve(const SpectralDecomposition& dec, double alpha,
                                   const ExteriorConfig& config, const Vector& f) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("exterior", "alpha outside (0,1)");
  for (Index i : config.omega())
    if (f(i) != 0.0) throw Error("exterior", "source is not supported in the exterior");
  return SourceSolutionRecord{f, frac_apply_spectral(dec, 1.0 - alpha, f), config.exterior()};
}

std::vector<SourceSolutionRecord> source_to_solution_map(const DiscreteLaplaceBeltrami& lap,
                                                         const SpectralDecomposition& dec,
                                                         double alpha,
                                                         const ExteriorConfig& config,
                                                         const Vector& f, int m) {
  if (m < 0) throw Error("exterior", "power count must be nonnegative");
  std::vector<SourceSolutionRecord> out;
  Vector source = f;
  for (int j = 0; j <= m; ++j) {
    if (j > 0) source = lap.apply(source);
    out.push_back(poisson_solve(dec, alpha, config, source));
  }
  return out;
}

Vector neumann_solve(const SpectralDecomposition& dec, double alpha, const Vector& h) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("exterior", "alpha outside (0,1)");
  Vector c = dec.analyze(h);
  const double scale = std::sqrt(h.cwiseProduct(h).cwiseProduct(dec.weights()).sum());
  if (std::abs(c(0)) > 1e-10 * std::max(scale, 1e-300))
    throw Error("exterior", "Neumann datum has nonzero mean");
  const double d = trace_constant(alpha);
  c(0) = 0.0;
  for (Index k = 1; k < c.size(); ++k) c(k) *= -1.0 / (d * std::pow(dec.eigenvalues()(k), alpha));
  return dec.synthesize(c);
}

}  // namespace fraclb
