#include "fraclb/analysis.hpp"

#include "fraclb/errors.hpp"
#include "fraclb/extension.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>

namespace fraclb {

namespace {

using Complex = std::complex<double>;

// Unnormalized DFT of the node vector; output indexed like the nodes.
std::vector<Complex> transform(const TorusGrid& grid, const Vector& u) {
  const int N = grid.points_per_side();
  Eigen::FFT<double> fft;
  std::vector<Complex> data(u.data(), u.data() + u.size());
  std::vector<Complex> in(static_cast<size_t>(N)), out(static_cast<size_t>(N));
  const int lines = grid.dim() == 1 ? 1 : N;
  for (int y = 0; y < lines; ++y) {
    for (int x = 0; x < N; ++x) in[size_t(x)] = data[size_t(x + N * y)];
    fft.fwd(out, in);
    for (int x = 0; x < N; ++x) data[size_t(x + N * y)] = out[size_t(x)];
  }
  if (grid.dim() == 2)
    for (int x = 0; x < N; ++x) {
      for (int y = 0; y < N; ++y) in[size_t(y)] = data[size_t(x + N * y)];
      fft.fwd(out, in);
      for (int y = 0; y < N; ++y) data[size_t(x + N * y)] = out[size_t(y)];
    }
  return data;
}

double frequency(const TorusGrid& grid, long k) {
  const int N = grid.points_per_side();
  if (k >= N / 2) k -= N;
  return 2.0 * M_PI * double(k) / grid.side_length();
}

}  // namespace

SobolevNormEstimate sobolev_norm_fourier(const TorusGrid& grid, const Vector& u, double s) {
  if (u.size() != grid.node_count()) throw Error("analysis", "vector length does not match grid");
  const std::vector<Complex> c = transform(grid, u);
  const double scale = grid.cell_volume() / double(grid.node_count());
  double sum = 0.0;
  for (Index i = 0; i < grid.node_count(); ++i) {
    double xi2 = 0.0;
    for (int axis = 0; axis < grid.dim(); ++axis) {
      const double xi = frequency(grid, grid.axis_index(i, axis));
      xi2 += xi * xi;
    }
    sum += std::pow(1.0 + xi2, s) * std::norm(c[size_t(i)]);
  }
  return {s, std::sqrt(sum * scale), NormMethod::fourier};
}

double diff_quotient_seminorm(const TorusGrid& grid, const Vector& u, double mu, double beta,
                              const std::vector<int>& shifts) {
  if (!(beta > 0.0 && beta <= 1.0)) throw Error("analysis", "beta outside (0,1]");
  if (shifts.empty()) throw Error("analysis", "need at least one shift");
  double best = 0.0;
  for (int d : shifts) {
    if (d <= 0) throw Error("analysis", "shifts must be positive grid steps");
    double sum = 0.0;
    for (int axis = 0; axis < grid.dim(); ++axis) {
      Vector diff(u.size());
      for (Index i = 0; i < u.size(); ++i) diff(i) = u(grid.neighbor(i, axis, d)) - u(i);
      sum += sobolev_norm_fourier(grid, diff, mu).value;
    }
    best = std::max(best, std::pow(d * grid.spacing(), -beta) * sum);
  }
  return best;
}

RegularityReport regularity_probe(const std::vector<GridSolution>& solutions, double s) {
  if (solutions.size() < 3) throw Error("analysis", "regularity probe needs at least 3 grids");
  RegularityReport r;
  r.order = s;
  for (const GridSolution& g : solutions)
    r.rows.push_back({g.grid.points_per_side(), sobolev_norm_fourier(g.grid, g.values, s).value});
  r.ratio = r.rows.back().norm / r.rows.front().norm;
  r.bounded = r.ratio < 2.0;
  return r;
}

ConstantReport constant_estimates(const SpectralDecomposition& dec, double alpha,
                                  const ExteriorConfig& config,
                                  const std::vector<Vector>& family) {
  if (family.empty()) throw Error("analysis", "empty test family");
  const FractionalOperator op(dec, alpha);
  const auto& om = config.omega();
  const Index n = Index(om.size());
  Matrix energy(n, n);
  Vector mass(n);
  for (Index a = 0; a < n; ++a) {
    mass(a) = dec.weights()(om[size_t(a)]);
    for (Index b = 0; b < n; ++b) energy(a, b) = op.weighted()(om[size_t(a)], om[size_t(b)]);
  }
  // Generalized problem E x = mu W x, symmetrized with W^{-1/2}.
  const Vector r = mass.cwiseSqrt().cwiseInverse();
  Matrix sym = r.asDiagonal() * energy * r.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  ConstantReport out;
  out.coercivity = es.eigenvalues()(0);
  out.poincare = 1.0 / std::sqrt(out.coercivity);

  for (const Vector& u : family) {
    for (Index i = 0; i < u.size(); ++i)
      if (u(i) != 0.0 && !config.in_omega(i))
        throw Error("analysis", "test function is not supported in Omega");
    const Vector trace = neumann_trace(extend_dirichlet(dec, alpha, u));
    const double ext_energy = -trace.cwiseProduct(u).cwiseProduct(dec.weights()).sum();
    const double l2 = u.cwiseProduct(u).cwiseProduct(dec.weights()).sum();
    const double hs = sobolev_norm_fourier(config.grid(), u, alpha).value;
    out.trace = std::max(out.trace, hs * hs / (ext_energy + l2));
  }
  return out;
}

}  // namespace fraclb
