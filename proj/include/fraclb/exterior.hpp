#pragma once

#include "fraclb/spectral.hpp"

#include <vector>

namespace fraclb {

struct Shape {
  enum class Kind { ball, annulus };
  Kind kind = Kind::ball;
  Point center = Point::Zero();
  double inner_radius = 0.0;
  double outer_radius = 1.0;

  static Shape ball(const Point& center, double radius);
  static Shape annulus(const Point& center, double inner, double outer);
  bool contains(const TorusGrid& grid, const Point& x) const;
  std::vector<Index> nodes(const TorusGrid& grid) const;
};

enum class NodeRole { omega, w1, w2, w12, exterior };

class ExteriorConfig {
 public:
  // W1 and W2 must keep a 2h gap from Omega; from each other only unless
  // overlap is allowed.
  static ExteriorConfig from_sets(const TorusGrid& grid, std::vector<Index> omega,
                                  std::vector<Index> w1, std::vector<Index> w2,
                                  bool allow_overlap = false);
  static ExteriorConfig from_shapes(const TorusGrid& grid, const Shape& omega, const Shape& w1,
                                    const Shape& w2, bool allow_overlap = false);

  const TorusGrid& grid() const { return grid_; }
  const std::vector<Index>& omega() const { return omega_; }
  const std::vector<Index>& w1() const { return w1_; }
  const std::vector<Index>& w2() const { return w2_; }
  const std::vector<Index>& exterior() const { return exterior_; }
  bool in_omega(Index i) const { return in_omega_[size_t(i)]; }
  NodeRole role(Index i) const;

 private:
  explicit ExteriorConfig(const TorusGrid& grid) : grid_(grid) {}

  TorusGrid grid_;
  std::vector<Index> omega_, w1_, w2_, exterior_;
  std::vector<bool> in_omega_, in_w1_, in_w2_;
};

const char* role_name(NodeRole role);

// Dense spectral fractional power A^a and its symmetric weighted form W A^a.
class FractionalOperator {
 public:
  FractionalOperator(const SpectralDecomposition& dec, double alpha);

  double alpha() const { return alpha_; }
  const Matrix& dense() const { return dense_; }
  const Matrix& weighted() const { return weighted_; }
  const Vector& weights() const { return weights_; }
  Index size() const { return dense_.rows(); }
  Vector apply(const Vector& u) const { return dense_ * u; }

 private:
  double alpha_;
  Matrix dense_;
  Matrix weighted_;
  Vector weights_;
};

struct ExteriorSolveOptions {
  double tolerance = 1e-12;
  int max_iterations = 10000;
};

struct ExteriorSolution {
  Vector u;
  double residual = 0.0;
  int iterations = 0;
};

ExteriorSolution solve_exterior(const FractionalOperator& op, const ExteriorConfig& config,
                                const Vector& f, const ExteriorSolveOptions& options = {});
Vector solve_exterior_dirichlet(const FractionalOperator& op, const ExteriorConfig& config,
                                const Vector& f, const ExteriorSolveOptions& options = {});

// Measurements are stored in the unweighted nodal basis.
struct DtNRecord {
  Vector input;
  Vector output;
  std::vector<Index> measurement;
  double residual = 0.0;
  Vector det_sqrt;

  Vector unweighted() const { return output; }
  Vector weighted() const { return output.cwiseProduct(det_sqrt); }
  // Sum of output * g * sqrt|g| over the measurement set.
  double pairing(const Vector& g) const;
};

DtNRecord dtn_partial(const FractionalOperator& op, const MetricField& metric,
                      const ExteriorConfig& config, const Vector& f_on_w1,
                      const ExteriorSolveOptions& options = {});
DtNRecord dtn_full(const FractionalOperator& op, const MetricField& metric,
                   const ExteriorConfig& config, const Vector& h_on_exterior,
                   const ExteriorSolveOptions& options = {});

struct SourceSolutionRecord {
  Vector source;
  Vector solution;
  std::vector<Index> exterior;

  Vector exterior_values() const;
};

SourceSolutionRecord poisson_solve(const SpectralDecomposition& dec, double alpha,
                                   const ExteriorConfig& config, const Vector& f);
// Records for F, A F, ..., A^m F.
std::vector<SourceSolutionRecord> source_to_solution_map(const DiscreteLaplaceBeltrami& lap,
                                                         const SpectralDecomposition& dec,
                                                         double alpha,
                                                         const ExteriorConfig& config,
                                                         const Vector& f, int m);

// Solution trace of the extension Neumann problem with weighted Neumann
// datum h (mean zero), normalized to mean zero: -(1/d_a) A^{-a} h.
Vector neumann_solve(const SpectralDecomposition& dec, double alpha, const Vector& h);

}  // namespace fraclb
