#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace fraclb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;
// Points and tensors are stored in 2D form. In 1D only the first
// component / top-left entry is meaningful.
using Point = Eigen::Vector2d;
using Tensor = Eigen::Matrix2d;

// Uniform periodic grid on [0, L)^dim.
class TorusGrid {
 public:
  TorusGrid(int dim, double side_length, int points_per_side);

  int dim() const { return dim_; }
  double side_length() const { return side_; }
  int points_per_side() const { return n_; }
  double spacing() const { return h_; }
  double cell_volume() const;
  Index node_count() const;

  // Flat index i = ix + N*iy; indices wrap modulo N.
  Index flat_index(long ix, long iy = 0) const;
  long axis_index(Index i, int axis) const;
  Index neighbor(Index i, int axis, int step) const;
  Point coordinates(Index i) const;

  // Componentwise minimal-image displacement b - a.
  Point displacement(const Point& a, const Point& b) const;
  double distance(const Point& a, const Point& b) const;
  Index nearest_node(const Point& x) const;

 private:
  int dim_;
  double side_;
  int n_;
  double h_;
};

TorusGrid build_grid(int dim, double side_length, int points_per_side);

struct MetricProfile {
  enum class Kind { identity, conformal_bump, anisotropic_bump };
  Kind kind = Kind::identity;
  double beta = 0.0;
  // Width of the Gaussian factor; empty means the bare cutoff.
  std::optional<double> sigma;
  double radius = 1.0;
  Point center = Point::Zero();

  static MetricProfile identity();
  static MetricProfile conformal_bump(double beta, std::optional<double> sigma, double radius,
                                      const Point& center);
  static MetricProfile anisotropic_bump(double beta, std::optional<double> sigma, double radius,
                                        const Point& center);
};

// Smooth compactly supported bump with peak value 1 at r = 0.
double bump_profile(double r, std::optional<double> sigma, double radius);

// Closed-form evaluation of a profile at an arbitrary point.
Tensor evaluate_profile(const MetricProfile& profile, const TorusGrid& grid, const Point& x);

class MetricField {
 public:
  static MetricField from_profile(const TorusGrid& grid, const MetricProfile& profile);
  // General sampled field; identity is required outside `support_radius`
  // around `center`.
  static MetricField from_samples(const TorusGrid& grid, std::vector<Tensor> tensors,
                                  const Point& center, double support_radius);

  const TorusGrid& grid() const { return grid_; }
  const Tensor& tensor(Index i) const { return tensor_[static_cast<size_t>(i)]; }
  const Tensor& inverse_tensor(Index i) const { return inverse_[static_cast<size_t>(i)]; }
  double det_sqrt(Index i) const { return det_sqrt_(i); }
  const Vector& det_sqrt() const { return det_sqrt_; }
  const Point& center() const { return center_; }
  double support_radius() const { return support_radius_; }

  // Smallest and largest eigenvalue of g over all nodes.
  std::pair<double, double> ellipticity_bounds() const;
  bool equals_at(const MetricField& other, Index i) const;

 private:
  MetricField(const TorusGrid& grid, std::vector<Tensor> tensors, const Point& center,
              double support_radius);

  TorusGrid grid_;
  std::vector<Tensor> tensor_;
  std::vector<Tensor> inverse_;
  Vector det_sqrt_;
  Point center_;
  double support_radius_;
};

MetricField make_metric(const TorusGrid& grid, const MetricProfile& profile);

class WeightedMeasure {
 public:
  explicit WeightedMeasure(const MetricField& metric);
  const Vector& weights() const { return w_; }
  double operator()(Index i) const { return w_(i); }
  Index size() const { return w_.size(); }

 private:
  Vector w_;
};

double weighted_inner(const Vector& u, const Vector& v, const WeightedMeasure& measure);
double weighted_norm(const Vector& u, const WeightedMeasure& measure);

}  // namespace fraclb
