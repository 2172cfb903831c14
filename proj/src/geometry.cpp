#include "fraclb/geometry.hpp"

#include "fraclb/errors.hpp"

#include <cmath>
#include <string>

namespace fraclb {

namespace {

long wrap(long i, long n) {
  long r = i % n;
  return r < 0 ? r + n : r;
}

double wrap_offset(double d, double L) { return d - L * std::round(d / L); }

}  // namespace

TorusGrid::TorusGrid(int dim, double side_length, int points_per_side)
    : dim_(dim), side_(side_length), n_(points_per_side), h_(0.0) {
  if (dim != 1 && dim != 2) throw Error("geometry", "dim must be 1 or 2");
  if (!(side_length > 0.0)) throw Error("geometry", "side length must be positive");
  if (points_per_side < 4) throw Error("geometry", "need at least 4 points per side");
  if (points_per_side % 2 != 0) throw Error("geometry", "points per side must be even");
  h_ = side_ / n_;
}

double TorusGrid::cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }

Index TorusGrid::node_count() const {
  return dim_ == 1 ? Index(n_) : Index(n_) * Index(n_);
}

Index TorusGrid::flat_index(long ix, long iy) const {
  if (dim_ == 1) return wrap(ix, n_);
  return wrap(ix, n_) + Index(n_) * wrap(iy, n_);
}

long TorusGrid::axis_index(Index i, int axis) const {
  return axis == 0 ? long(i % n_) : long(i / n_);
}

Index TorusGrid::neighbor(Index i, int axis, int step) const {
  if (dim_ == 1) return flat_index(axis_index(i, 0) + step);
  long ix = axis_index(i, 0), iy = axis_index(i, 1);
  return axis == 0 ? flat_index(ix + step, iy) : flat_index(ix, iy + step);
}

Point TorusGrid::coordinates(Index i) const {
  if (dim_ == 1) return Point(double(i) * h_, 0.0);
  return Point(double(axis_index(i, 0)) * h_, double(axis_index(i, 1)) * h_);
}

Point TorusGrid::displacement(const Point& a, const Point& b) const {
  Point d(wrap_offset(b.x() - a.x(), side_), 0.0);
  if (dim_ == 2) d.y() = wrap_offset(b.y() - a.y(), side_);
  return d;
}

double TorusGrid::distance(const Point& a, const Point& b) const {
  return displacement(a, b).norm();
}

Index TorusGrid::nearest_node(const Point& x) const {
  long ix = std::lround(x.x() / h_);
  long iy = dim_ == 2 ? std::lround(x.y() / h_) : 0;
  return flat_index(ix, iy);
}

TorusGrid build_grid(int dim, double side_length, int points_per_side) {
  return TorusGrid(dim, side_length, points_per_side);
}

MetricProfile MetricProfile::identity() { return MetricProfile{}; }

MetricProfile MetricProfile::conformal_bump(double beta, std::optional<double> sigma,
                                            double radius, const Point& center) {
  return MetricProfile{Kind::conformal_bump, beta, sigma, radius, center};
}

MetricProfile MetricProfile::anisotropic_bump(double beta, std::optional<double> sigma,
                                              double radius, const Point& center) {
  return MetricProfile{Kind::anisotropic_bump, beta, sigma, radius, center};
}

double bump_profile(double r, std::optional<double> sigma, double radius) {
  double q = r / radius;
  if (q >= 1.0) return 0.0;
  double value = std::exp(1.0 - 1.0 / (1.0 - q * q));
  if (sigma) value *= std::exp(-r * r / (2.0 * *sigma * *sigma));
  return value;
}

Tensor evaluate_profile(const MetricProfile& profile, const TorusGrid& grid, const Point& x) {
  Tensor g = Tensor::Identity();
  if (profile.kind == MetricProfile::Kind::identity) return g;
  double b = bump_profile(grid.distance(profile.center, x), profile.sigma, profile.radius);
  if (b == 0.0) return g;
  double a = 1.0 + profile.beta * b;
  if (profile.kind == MetricProfile::Kind::conformal_bump || grid.dim() == 1) {
    g(0, 0) = a;
    if (grid.dim() == 2) g(1, 1) = a;
    return g;
  }
  // Stretch along the diagonal direction, compress across it.
  double p = 0.5 * (a + 1.0 / a), m = 0.5 * (a - 1.0 / a);
  g << p, m, m, p;
  return g;
}

MetricField::MetricField(const TorusGrid& grid, std::vector<Tensor> tensors, const Point& center,
                         double support_radius)
    : grid_(grid),
      tensor_(std::move(tensors)),
      det_sqrt_(grid.node_count()),
      center_(center),
      support_radius_(support_radius) {
  const Index M = grid_.node_count();
  if (Index(tensor_.size()) != M) throw Error("geometry", "tensor count does not match grid");
  if (!(support_radius < grid_.side_length() / 2.0))
    throw Error("geometry", "support radius must be below L/2");
  inverse_.resize(tensor_.size());
  const bool two = grid_.dim() == 2;
  for (Index i = 0; i < M; ++i) {
    Tensor& g = tensor_[size_t(i)];
    if (!two) {
      g(0, 1) = g(1, 0) = 0.0;
      g(1, 1) = 1.0;
    }
    if (g(0, 1) != g(1, 0)) throw Error("geometry", "metric tensor not symmetric");
    double det = two ? g.determinant() : g(0, 0);
    if (!(g(0, 0) > 0.0) || !(det > 0.0))
      throw Error("geometry", "metric not positive definite at node " + std::to_string(i));
    inverse_[size_t(i)] = two ? Tensor(g.inverse()) : Tensor(Eigen::Vector2d(1.0 / g(0, 0), 1.0).asDiagonal());
    det_sqrt_(i) = std::sqrt(det);
    if (grid_.distance(center_, grid_.coordinates(i)) > support_radius_ && g != Tensor::Identity())
      throw Error("geometry", "metric differs from identity outside its support radius");
  }
}

MetricField MetricField::from_profile(const TorusGrid& grid, const MetricProfile& profile) {
  if (profile.kind != MetricProfile::Kind::identity) {
    if (!(profile.beta > -1.0)) throw Error("geometry", "beta <= -1 loses ellipticity");
    if (!(profile.radius > 0.0)) throw Error("geometry", "bump radius must be positive");
    if (!(profile.radius < grid.side_length() / 2.0))
      throw Error("geometry", "bump radius must be below L/2");
    if (profile.sigma && !(*profile.sigma > 0.0))
      throw Error("geometry", "sigma must be positive");
  }
  std::vector<Tensor> tensors(size_t(grid.node_count()));
  for (Index i = 0; i < grid.node_count(); ++i)
    tensors[size_t(i)] = evaluate_profile(profile, grid, grid.coordinates(i));
  double radius = profile.kind == MetricProfile::Kind::identity ? 0.0 : profile.radius;
  return MetricField(grid, std::move(tensors), profile.center, radius);
}

MetricField MetricField::from_samples(const TorusGrid& grid, std::vector<Tensor> tensors,
                                      const Point& center, double support_radius) {
  return MetricField(grid, std::move(tensors), center, support_radius);
}

std::pair<double, double> MetricField::ellipticity_bounds() const {
  double lo = INFINITY, hi = 0.0;
  for (const Tensor& g : tensor_) {
    if (grid_.dim() == 1) {
      lo = std::min(lo, g(0, 0));
      hi = std::max(hi, g(0, 0));
    } else {
      Eigen::SelfAdjointEigenSolver<Tensor> es(g, Eigen::EigenvaluesOnly);
      lo = std::min(lo, es.eigenvalues()(0));
      hi = std::max(hi, es.eigenvalues()(1));
    }
  }
  return {lo, hi};
}

bool MetricField::equals_at(const MetricField& other, Index i) const {
  return tensor(i) == other.tensor(i);
}

MetricField make_metric(const TorusGrid& grid, const MetricProfile& profile) {
  return MetricField::from_profile(grid, profile);
}

WeightedMeasure::WeightedMeasure(const MetricField& metric)
    : w_(metric.det_sqrt() * metric.grid().cell_volume()) {}

double weighted_inner(const Vector& u, const Vector& v, const WeightedMeasure& measure) {
  if (u.size() != measure.size() || v.size() != measure.size())
    throw Error("geometry", "vector length does not match node count");
  return (u.array() * v.array() * measure.weights().array()).sum();
}

double weighted_norm(const Vector& u, const WeightedMeasure& measure) {
  return std::sqrt(weighted_inner(u, u, measure));
}

}  // namespace fraclb
