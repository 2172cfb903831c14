#include "fraclb/bessel.hpp"
#include "fraclb/errors.hpp"
#include "fraclb/exterior.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fraclb;

namespace {

struct Setup {
  TorusGrid grid{2, 4.0, 16};
  MetricField metric = make_metric(grid, MetricProfile::anisotropic_bump(0.5, std::nullopt, 0.6, Point(2.0, 2.0)));
  DiscreteLaplaceBeltrami lap = assemble_laplacian(metric);
  SpectralDecomposition dec = decompose(lap);
  ExteriorConfig config = ExteriorConfig::from_shapes(grid, Shape::ball(Point(2.0, 2.0), 0.6),
                                                      Shape::ball(Point(0.6, 2.0), 0.3),
                                                      Shape::ball(Point(3.4, 2.0), 0.3));
};

Vector on(const std::vector<Index>& set, Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Vector v = Vector::Zero(n);
  for (Index i : set) v(i) = d(rng);
  return v;
}

}  // namespace

TEST_CASE("shapes select nodes by periodic distance") {
  const TorusGrid g(2, 4.0, 8);
  const Shape ball = Shape::ball(Point(0.0, 0.0), 0.6);
  CHECK(ball.nodes(g).size() == 5);
  const Shape ring = Shape::annulus(Point(2.0, 2.0), 0.4, 0.6);
  CHECK(ring.nodes(g).size() == 4);
  CHECK_FALSE(ring.contains(g, Point(2.0, 2.0)));
}

TEST_CASE("configuration partitions the nodes") {
  Setup s;
  CHECK(s.config.omega().size() + s.config.exterior().size() == size_t(s.grid.node_count()));
  for (Index i : s.config.w1()) CHECK(s.config.role(i) == NodeRole::w1);
  for (Index i : s.config.omega()) CHECK(s.config.in_omega(i));
  CHECK(std::string(role_name(NodeRole::exterior)) == "ext");
}

TEST_CASE("configuration guards") {
  const TorusGrid g(2, 4.0, 16);
  const Shape om = Shape::ball(Point(2.0, 2.0), 0.6);
  // W1 touching Omega.
  CHECK_THROWS_AS(ExteriorConfig::from_shapes(g, om, Shape::ball(Point(1.0, 2.0), 0.3),
                                              Shape::ball(Point(3.4, 2.0), 0.3)),
                  Error);
  // W1 and W2 overlapping only with the flag.
  const Shape w = Shape::ball(Point(0.4, 2.0), 0.3);
  CHECK_THROWS_AS(ExteriorConfig::from_shapes(g, om, w, w), Error);
  CHECK_NOTHROW(ExteriorConfig::from_shapes(g, om, w, w, true));
  // Empty W.
  CHECK_THROWS_AS(ExteriorConfig::from_shapes(g, om, Shape::ball(Point(0.1, 0.1), 0.01), w), Error);
}

TEST_CASE("exterior solve is fractional harmonic in Omega and keeps the data") {
  Setup s;
  const FractionalOperator op(s.dec, 0.5);
  const Vector f = on(s.config.exterior(), s.grid.node_count(), 1);
  const ExteriorSolution sol = solve_exterior(op, s.config, f);
  const Vector au = op.apply(sol.u);
  for (Index i : s.config.omega()) CHECK(std::abs(au(i)) < 1e-9 * au.cwiseAbs().maxCoeff());
  for (Index i : s.config.exterior()) CHECK(sol.u(i) == f(i));
  CHECK(sol.residual < 1e-11);
}

TEST_CASE("constants solve the exterior problem and the operator matrix is symmetric") {
  Setup s;
  const FractionalOperator op(s.dec, 0.3);
  CHECK((op.weighted() - op.weighted().transpose()).cwiseAbs().maxCoeff() == 0.0);
  Vector c = Vector::Zero(s.grid.node_count());
  for (Index i : s.config.exterior()) c(i) = 2.5;
  const Vector u = solve_exterior_dirichlet(op, s.config, c);
  CHECK((u.array() - 2.5).abs().maxCoeff() < 1e-10);
}

TEST_CASE("DtN pairing is symmetric") {
  Setup s;
  const ExteriorConfig self = ExteriorConfig::from_sets(s.grid, s.config.omega(), s.config.w1(), s.config.w1(), true);
  const FractionalOperator op(s.dec, 0.75);
  for (unsigned k = 0; k < 5; ++k) {
    const Vector f = on(s.config.w1(), s.grid.node_count(), 2 * k), g = on(s.config.w1(), s.grid.node_count(), 2 * k + 1);
    const double a = dtn_partial(op, s.metric, self, f).pairing(g);
    const double b = dtn_partial(op, s.metric, self, g).pairing(f);
    CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
  }
}

TEST_CASE("partial DtN requires data supported in W1") {
  Setup s;
  const FractionalOperator op(s.dec, 0.5);
  CHECK_THROWS_AS(dtn_partial(op, s.metric, s.config, Vector::Ones(s.grid.node_count())), Error);
}

TEST_CASE("Poisson solutions and the source-to-solution map") {
  Setup s;
  Vector F = Vector::Zero(s.grid.node_count());
  for (Index i : s.config.w1()) F(i) = 1.0;
  const SourceSolutionRecord r = poisson_solve(s.dec, 0.5, s.config, F);
  const Vector lhs = frac_apply_spectral(s.dec, 0.5, r.solution);
  CHECK((lhs - s.lap.apply(F)).cwiseAbs().maxCoeff() < 1e-9 * s.lap.apply(F).cwiseAbs().maxCoeff());
  CHECK(r.exterior_values().size() == Index(s.config.exterior().size()));
  const auto maps = source_to_solution_map(s.lap, s.dec, 0.5, s.config, F, 2);
  CHECK(maps.size() == 3);
  Vector inside = Vector::Zero(s.grid.node_count());
  inside(s.config.omega().front()) = 1.0;
  CHECK_THROWS_AS(poisson_solve(s.dec, 0.5, s.config, inside), Error);
}

TEST_CASE("Neumann solve inverts the scaled fractional power") {
  Setup s;
  Vector g = on(s.config.exterior(), s.grid.node_count(), 9);
  CHECK_THROWS_AS(neumann_solve(s.dec, 0.5, Vector::Ones(s.grid.node_count())), Error);
  g.array() -= g.dot(s.dec.weights()) / s.dec.weights().sum();
  const Vector u = neumann_solve(s.dec, 0.25, g);
  const Vector back = -trace_constant(0.25) * frac_apply_spectral(s.dec, 0.25, u);
  CHECK((back - g).cwiseAbs().maxCoeff() < 1e-10);
}
