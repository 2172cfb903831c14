#include "fraclb/errors.hpp"
#include "fraclb/recovery.hpp"

#include <doctest.h>

#include <cmath>

using namespace fraclb;

TEST_CASE("radial squash map") {
  const TorusGrid g(2, 4.0, 16);
  const GaugeMap phi = GaugeMap::radial_squash(Point(2.0, 2.0), 0.25, 0.75);
  CHECK(phi.rho(0.0) == 0.0);
  CHECK(phi.rho(0.75) == 0.75);
  CHECK(phi.rho_derivative(0.0) == doctest::Approx(1.25));
  CHECK(phi.apply(g, Point(0.5, 0.5)) == Point(0.5, 0.5));
  const Point y = phi.apply(g, Point(2.3, 2.0));
  const double t = 1.0 - 0.09 / 0.5625;
  CHECK(y.x() == doctest::Approx(2.0 + 0.3 * (1.0 + 0.25 * std::pow(t, 4))));
  // Jacobian against central differences.
  const Point x(2.2, 1.9);
  const double e = 1e-6;
  Tensor fd;
  for (int k = 0; k < 2; ++k) {
    Point a = x, b = x;
    a(k) += e;
    b(k) -= e;
    fd.col(k) = (phi.apply(g, a) - phi.apply(g, b)) / (2.0 * e);
  }
  CHECK((fd - phi.jacobian(g, x)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK_THROWS_AS(GaugeMap::radial_squash(Point(2.0, 2.0), 2.0, 0.75), Error);
}

TEST_CASE("pullback metric at the fixed center is scaled by the Jacobian") {
  const TorusGrid g(2, 4.0, 16);
  const GaugeMap phi = GaugeMap::radial_squash(Point(2.0, 2.0), 0.25, 0.75);
  const MetricField m = gauge_pullback(g, MetricProfile::identity(), phi);
  const Index c = g.nearest_node(Point(2.0, 2.0));
  CHECK((m.tensor(c) - 1.5625 * Tensor::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  const MetricField flat = make_metric(g, MetricProfile::identity());
  CHECK(m.equals_at(flat, g.nearest_node(Point(0.5, 0.5))));
}

TEST_CASE("pullback volume matches the original volume") {
  const TorusGrid g(2, 4.0, 48);
  const auto p = MetricProfile::conformal_bump(0.5, 0.4, 0.6, Point(2.0, 2.0));
  const GaugeMap phi = GaugeMap::radial_squash(Point(2.0, 2.0), 0.25, 0.75);
  const double v1 = WeightedMeasure(make_metric(g, p)).weights().sum();
  const double v2 = WeightedMeasure(gauge_pullback(g, p, phi)).weights().sum();
  CHECK(std::abs(v1 - v2) < 1e-4 * v1);
}

TEST_CASE("heat pairs require exterior agreement") {
  const TorusGrid g(2, 4.0, 16);
  const auto config = ExteriorConfig::from_shapes(g, Shape::ball(Point(2.0, 2.0), 0.6),
                                                  Shape::ball(Point(0.6, 2.0), 0.3),
                                                  Shape::ball(Point(3.4, 2.0), 0.3));
  const MetricField flat = make_metric(g, MetricProfile::identity());
  const MetricField wide = make_metric(g, MetricProfile::conformal_bump(0.2, std::nullopt, 1.9, Point(2.0, 2.0)));
  CHECK_THROWS_AS(HeatPair(flat, wide, config), Error);
  const HeatPair same(flat, flat, config);
  Vector f = Vector::Zero(g.node_count());
  for (Index i : config.w1()) f(i) = 1.0;
  const Index x = config.w2().front();
  CHECK(heat_difference_trace(same, f, x, 0.7) == 0.0);
  CHECK_THROWS_AS(HeatDifference(same, f, config.w1().front()), Error);
  const auto samples = recover_heat_kernel_samples(same, {{config.w1().front(), x}}, {0.5, 1.0});
  CHECK(samples.size() == 2);
  CHECK(samples[0].relative() == 0.0);
  CHECK_THROWS_AS(recover_heat_kernel_samples(same, {{config.omega().front(), x}}, {1.0}), Error);
}

TEST_CASE("moments of a known signal") {
  // u(t) = t^{2+a} e^{-t} has moments Gamma(2 - m).
  const double a = 0.5;
  const Sampler u = [a](double t) { return std::pow(t, 2.0 + a) * std::exp(-t); };
  const MomentTable m = moment_vector(u, a, 1, TimeQuadrature{}, u);
  CHECK(m.moments(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(m.moments(1) == doctest::Approx(1.0).epsilon(1e-8));
  const VanishingReport r = vanishing_test(m, 0.5);
  CHECK_FALSE(r.vanishes);
  CHECK(r.normalized(0) == doctest::Approx(1.0));
}

TEST_CASE("signal window starts where the reference becomes visible") {
  const Sampler v = [](double t) { return std::exp(-1.0 / t); };
  const TimeQuadrature w = signal_window(v, TimeQuadrature{}, 1e-6);
  CHECK(w.t_min > 1.0 / std::log(1e6) * 0.95);
  CHECK(w.t_min < 1.0 / std::log(1e6) * 1.1);
  CHECK(w.t_max == 1e4);
}

TEST_CASE("moment overflow is a window error") {
  const Sampler u = [](double) { return 1.0; };
  TimeQuadrature q;
  q.t_min = 1e-40;
  CHECK_THROWS_AS(moment_vector(u, 0.5, 7, q, u), QuadratureWindowError);
  CHECK_THROWS_AS(moment_vector(u, 1.5, 3, TimeQuadrature{}, u), Error);
}

TEST_CASE("identity gauge leaves the DtN map unchanged") {
  GaugeSetup s;
  s.coarse_points = 24;
  s.phi = GaugeMap::identity();
  const GaugeLevel level = gauge_level(s, 24);
  CHECK(level.gauge_error == 0.0);
  CHECK(level.control_error > 1e-6);
}
