#include "fraclb/analysis.hpp"
#include "fraclb/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace fraclb;

TEST_CASE("Fourier Sobolev norm of a single mode") {
  const TorusGrid g(1, 8.0, 32);
  Vector u(32);
  for (Index i = 0; i < 32; ++i) u(i) = std::sin(2.0 * M_PI * g.coordinates(i).x() / 8.0);
  const double xi2 = std::pow(2.0 * M_PI / 8.0, 2);
  for (double s : {0.0, 0.5, 1.3})
    CHECK(sobolev_norm_fourier(g, u, s).value == doctest::Approx(std::sqrt(std::pow(1.0 + xi2, s) * 4.0)));
}

TEST_CASE("Fourier Sobolev norm in two dimensions") {
  const TorusGrid g(2, 4.0, 16);
  Vector u(g.node_count());
  for (Index i = 0; i < g.node_count(); ++i) {
    const Point x = g.coordinates(i);
    u(i) = std::cos(2.0 * M_PI * x.x() / 4.0) * std::cos(4.0 * M_PI * x.y() / 4.0);
  }
  const double xi2 = std::pow(2.0 * M_PI / 4.0, 2) + std::pow(4.0 * M_PI / 4.0, 2);
  // Mean square 1/4 over area 16.
  CHECK(sobolev_norm_fourier(g, u, 0.7).value == doctest::Approx(std::sqrt(std::pow(1.0 + xi2, 0.7) * 4.0)));
  CHECK(sobolev_norm_fourier(g, Vector::Ones(g.node_count()), 3.0).value == doctest::Approx(4.0));
  CHECK_THROWS_AS(sobolev_norm_fourier(g, Vector::Ones(3), 1.0), Error);
}

TEST_CASE("difference quotients of a smooth function stay bounded") {
  auto seminorm = [](int n) {
    const TorusGrid g(1, 2.0 * M_PI, n);
    Vector u(n);
    for (Index i = 0; i < n; ++i) u(i) = std::sin(g.coordinates(i).x());
    return diff_quotient_seminorm(g, u, 0.0, 1.0, {1, 2});
  };
  CHECK(seminorm(64) == doctest::Approx(seminorm(128)).epsilon(1e-2));
  const TorusGrid g(1, 1.0, 8);
  CHECK_THROWS_AS(diff_quotient_seminorm(g, Vector::Ones(8), 0.0, 1.5, {1}), Error);
  CHECK_THROWS_AS(diff_quotient_seminorm(g, Vector::Ones(8), 0.0, 0.5, {}), Error);
}

TEST_CASE("regularity probe separates smooth and rough sequences") {
  std::vector<GridSolution> smooth, rough;
  for (int n : {16, 32, 64}) {
    const TorusGrid g(1, 8.0, n);
    Vector s(n), r(n);
    for (Index i = 0; i < n; ++i) {
      const double x = g.coordinates(i).x();
      s(i) = std::exp(std::cos(2.0 * M_PI * x / 8.0));
      r(i) = x < 4.0 ? 1.0 : 0.0;
    }
    smooth.push_back({g, s});
    rough.push_back({g, r});
  }
  const RegularityReport a = regularity_probe(smooth, 1.5);
  CHECK(a.bounded);
  CHECK(a.rows.size() == 3);
  const RegularityReport b = regularity_probe(rough, 1.5);
  CHECK_FALSE(b.bounded);
  CHECK_THROWS_AS(regularity_probe({smooth[0], smooth[1]}, 1.0), Error);
}

TEST_CASE("constant estimates on a small configuration") {
  const TorusGrid g(1, 8.0, 32);
  const SpectralDecomposition dec = decompose(assemble_laplacian(make_metric(g, MetricProfile::identity())));
  const auto config = ExteriorConfig::from_shapes(g, Shape::ball(Point(4.0, 0.0), 1.2),
                                                  Shape::ball(Point(1.2, 0.0), 0.7),
                                                  Shape::ball(Point(6.8, 0.0), 0.7));
  std::vector<Vector> family;
  for (int k = 1; k <= 3; ++k) {
    Vector u = Vector::Zero(32);
    for (Index i : config.omega()) u(i) = std::sin(k * M_PI * (g.coordinates(i).x() - 2.75) / 2.5);
    family.push_back(u);
  }
  const ConstantReport r = constant_estimates(dec, 0.5, config, family);
  CHECK(r.coercivity > 0.0);
  CHECK(r.poincare == doctest::Approx(1.0 / std::sqrt(r.coercivity)));
  CHECK(r.trace > 0.0);
  CHECK(std::isfinite(r.trace));
  CHECK_THROWS_AS(constant_estimates(dec, 0.5, config, {Vector::Ones(32)}), Error);
}
