#pragma once

#include "fraclb/linalg.hpp"
#include "fraclb/spectral.hpp"

#include <vector>

namespace fraclb {

// Mode-wise Bessel solution of the degenerate extension problem.
class ExtensionSolution {
 public:
  ExtensionSolution(const SpectralDecomposition& dec, double alpha, Vector coefficients);

  double alpha() const { return alpha_; }
  const SpectralDecomposition& decomposition() const { return *dec_; }
  const Vector& coefficients() const { return coefficients_; }

  double mode_profile(Index k, double z) const;
  Vector evaluate(double z) const;
  double evaluate(Index node, double z) const;

 private:
  const SpectralDecomposition* dec_;
  double alpha_;
  Vector coefficients_;
};

ExtensionSolution extend_dirichlet(const SpectralDecomposition& dec, double alpha, const Vector& u);

// Weighted Neumann trace lim z^{1-2a} d/dz of the extension, from the
// closed-form small-z behavior of each mode.
Vector neumann_trace(const ExtensionSolution& sol);

// Same limit for a single unit mode with eigenvalue lambda, obtained
// numerically from secant slopes at a geometric z-sequence with Richardson
// elimination of the known correction powers.
double numeric_mode_trace(double alpha, double lambda);

// Numeric trace of each mode k >= 1 divided by lambda_k^a.
Vector numeric_trace_ratios(const SpectralDecomposition& dec, double alpha);

struct ExtensionMesh {
  double alpha = 0.5;
  double grading = 2.0;
  Vector heights;

  int levels() const { return int(heights.size()) - 1; }
  double top() const { return heights(heights.size() - 1); }
  Vector weight_samples() const;
};

// Graded heights z_p = H (p/P)^kappa with H = height_factor / sqrt(lambda_1)
// and kappa = max(2, 1/alpha) unless given.
ExtensionMesh make_extension_mesh(double alpha, double lambda_1, int levels = 96,
                                  double height_factor = 8.0, double grading = 0.0);

struct ExtensionSolveOptions {
  double tolerance = 1e-10;
  int max_iterations = 20000;
  bool track_energy = false;
};

struct ExtensionField {
  // values(i, p) at node i and height z_p.
  Matrix values;
  CgStats stats;

  Vector trace() const { return values.col(0); }
};

// Finite elements in the extension variable (exact z^{1-2a} weight), the
// lattice stencil tangentially. Dirichlet data on `dirichlet` nodes at z = 0,
// weighted Neumann data on `neumann` nodes, natural condition at the top.
ExtensionField fd_extension_solve(const DiscreteLaplaceBeltrami& op, double alpha,
                                  const ExtensionMesh& mesh, const std::vector<Index>& dirichlet,
                                  const std::vector<Index>& neumann, const Vector& f_dirichlet,
                                  const Vector& f_neumann, const ExtensionSolveOptions& options = {});

// t -> (e^{-tA} H)(x) at one node. Uses the Taylor series of the semigroup
// below the lattice time scale, where the modal sum has only absolute
// accuracy, and the modal sum above it.
class HeatTrace {
 public:
  HeatTrace(const DiscreteLaplaceBeltrami& op, const SpectralDecomposition& dec, const Vector& h,
            Index node);
  double operator()(double t) const;
  double switch_time() const { return t_switch_; }

 private:
  Vector taylor_;
  Vector modal_;
  Vector lambda_;
  double t_switch_;
};

// Raw representation integral for the Neumann problem with datum A F,
// without the normalizing constant.
double representation_integral(const HeatTrace& trace, double alpha, double z,
                               const TimeQuadrature& quad);

// Calibrated constant: the exterior Neumann solve at `node` over the raw
// integral at z = 0.
double calibrate_representation(const DiscreteLaplaceBeltrami& op,
                                const SpectralDecomposition& dec, double alpha, const Vector& f,
                                Index node, const TimeQuadrature& quad = {});

double representation_solution(const DiscreteLaplaceBeltrami& op, const SpectralDecomposition& dec,
                               double alpha, const Vector& f, Index node, double z,
                               double constant, const TimeQuadrature& quad = {});

struct SeriesCoefficients {
  double alpha = 0.5;
  std::vector<Index> nodes;
  // values(r, j) = C_j at nodes[r].
  Matrix values;
  // Least-squares slope of log|C_j| against j per node.
  Vector decay_slopes;

  double partial_sum(size_t r, double z, int terms = -1) const;
};

SeriesCoefficients series_coefficients(const DiscreteLaplaceBeltrami& op,
                                       const SpectralDecomposition& dec, double alpha,
                                       const Vector& f, const std::vector<Index>& nodes, int J,
                                       double constant, const TimeQuadrature& quad = {});

}  // namespace fraclb
