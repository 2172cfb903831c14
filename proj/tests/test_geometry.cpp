#include "fraclb/errors.hpp"
#include "fraclb/geometry.hpp"

#include <doctest.h>

#include <cmath>

using namespace fraclb;

TEST_CASE("torus indexing wraps in both directions") {
  const TorusGrid g(2, 4.0, 8);
  CHECK(g.node_count() == 64);
  CHECK(g.spacing() == doctest::Approx(0.5));
  CHECK(g.cell_volume() == doctest::Approx(0.25));
  const Index i = g.flat_index(7, 3);
  CHECK(i == 7 + 8 * 3);
  CHECK(g.neighbor(i, 0, 1) == g.flat_index(0, 3));
  CHECK(g.neighbor(i, 1, -4) == g.flat_index(7, 7));
  CHECK(g.axis_index(i, 1) == 3);
  CHECK(g.flat_index(-1, -1) == g.flat_index(7, 7));
}

TEST_CASE("displacement takes the shortest periodic representative") {
  const TorusGrid g(2, 4.0, 8);
  const Point d = g.displacement(Point(0.25, 3.75), Point(3.75, 0.25));
  CHECK(d.x() == doctest::Approx(-0.5));
  CHECK(d.y() == doctest::Approx(0.5));
  CHECK(g.distance(Point(0.0, 0.0), Point(2.0, 2.0)) == doctest::Approx(std::sqrt(8.0)));
  CHECK(g.nearest_node(Point(3.9, 0.1)) == g.flat_index(0, 0));
}

TEST_CASE("one-dimensional grids ignore the second coordinate") {
  const TorusGrid g(1, 8.0, 16);
  CHECK(g.node_count() == 16);
  CHECK(g.coordinates(3).y() == 0.0);
  CHECK(g.neighbor(15, 0, 1) == 0);
}

TEST_CASE("grid construction rejects bad input") {
  CHECK_THROWS_AS(TorusGrid(3, 1.0, 8), Error);
  CHECK_THROWS_AS(TorusGrid(1, 1.0, 7), Error);
  CHECK_THROWS_AS(TorusGrid(1, -1.0, 8), Error);
}

TEST_CASE("bump profile") {
  CHECK(bump_profile(0.0, std::nullopt, 1.0) == doctest::Approx(1.0));
  CHECK(bump_profile(1.0, std::nullopt, 1.0) == 0.0);
  CHECK(bump_profile(0.5, std::nullopt, 1.0) == doctest::Approx(std::exp(1.0 - 1.0 / 0.75)));
  CHECK(bump_profile(0.5, 0.4, 1.0) ==
        doctest::Approx(std::exp(1.0 - 1.0 / 0.75) * std::exp(-0.25 / 0.32)));
}

TEST_CASE("anisotropic bump has unit determinant and the expected eigenvalues") {
  const TorusGrid g(2, 4.0, 16);
  const auto p = MetricProfile::anisotropic_bump(0.5, std::nullopt, 1.0, Point(2.0, 2.0));
  const Tensor t = evaluate_profile(p, g, Point(2.0, 2.0));
  CHECK(t.determinant() == doctest::Approx(1.0));
  Eigen::SelfAdjointEigenSolver<Tensor> es(t);
  CHECK(es.eigenvalues()(0) == doctest::Approx(1.0 / 1.5));
  CHECK(es.eigenvalues()(1) == doctest::Approx(1.5));
  CHECK(evaluate_profile(p, g, Point(0.0, 0.0)) == Tensor::Identity());
}

TEST_CASE("metric field stores inverses, volume density and bounds") {
  const TorusGrid g(2, 4.0, 16);
  const auto p = MetricProfile::conformal_bump(0.5, std::nullopt, 1.0, Point(2.0, 2.0));
  const MetricField m = make_metric(g, p);
  const Index c = g.nearest_node(Point(2.0, 2.0));
  CHECK(m.det_sqrt(c) == doctest::Approx(1.5));
  CHECK((m.tensor(c) * m.inverse_tensor(c) - Tensor::Identity()).norm() < 1e-15);
  auto [lo, hi] = m.ellipticity_bounds();
  CHECK(lo == doctest::Approx(1.0));
  CHECK(hi == doctest::Approx(1.5));
  const MetricField flat = make_metric(g, MetricProfile::identity());
  CHECK(m.equals_at(flat, 0));
  CHECK_FALSE(m.equals_at(flat, c));
}

TEST_CASE("metric samples must be positive definite and the support must fit") {
  const TorusGrid g(1, 4.0, 8);
  std::vector<Tensor> bad(8, Tensor::Identity());
  bad[2](0, 0) = -1.0;
  CHECK_THROWS_AS(MetricField::from_samples(g, bad, Point(2.0, 0.0), 1.0), Error);
  std::vector<Tensor> ok(8, Tensor::Identity());
  CHECK_THROWS_AS(MetricField::from_samples(g, ok, Point(2.0, 0.0), 2.5), Error);
  CHECK_THROWS_AS(MetricField::from_samples(g, std::vector<Tensor>(3, Tensor::Identity()),
                                            Point(2.0, 0.0), 1.0),
                  Error);
}

TEST_CASE("weighted inner product uses the Riemannian cell volume") {
  const TorusGrid g(1, 4.0, 8);
  const MetricField m = make_metric(g, MetricProfile::identity());
  const WeightedMeasure w(m);
  const Vector one = Vector::Ones(8);
  CHECK(weighted_inner(one, one, w) == doctest::Approx(4.0));
  CHECK(weighted_norm(2.0 * one, w) == doctest::Approx(4.0));
  CHECK_THROWS_AS(weighted_inner(Vector::Ones(3), one, w), Error);
}

TEST_CASE("errors carry the module name") {
  try {
    TorusGrid(5, 1.0, 8);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.module() == "geometry");
    CHECK(std::string(e.what()).rfind("geometry: ", 0) == 0);
  }
}
