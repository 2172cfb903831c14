#include "fraclb/recovery.hpp"

#include "fraclb/errors.hpp"

#include <cmath>
#include <sstream>

namespace fraclb {

GaugeMap::GaugeMap(const Point& center, double strength, double radius)
    : center_(center), strength_(strength), radius_(radius) {}

GaugeMap GaugeMap::identity() { return GaugeMap(Point::Zero(), 0.0, 1.0); }

GaugeMap GaugeMap::radial_squash(const Point& center, double strength, double radius) {
  if (!(radius > 0.0)) throw Error("recovery", "squash radius must be positive");
  GaugeMap map(center, strength, radius);
  // rho must be strictly increasing for the map to be a diffeomorphism.
  constexpr int kSamples = 4000;
  for (int s = 0; s <= kSamples; ++s) {
    double r = radius * s / kSamples;
    if (!(map.rho_derivative(r) > 0.0))
      throw Error("recovery", "radial profile is not monotone; the map is not a diffeomorphism");
  }
  return map;
}

double GaugeMap::rho(double r) const {
  if (r >= radius_) return r;
  const double t = 1.0 - r * r / (radius_ * radius_);
  return r * (1.0 + strength_ * std::pow(t, 4));
}

double GaugeMap::rho_derivative(double r) const {
  if (r >= radius_) return 1.0;
  const double t = 1.0 - r * r / (radius_ * radius_);
  return 1.0 + strength_ * std::pow(t, 4) - 8.0 * strength_ * r * r / (radius_ * radius_) * std::pow(t, 3);
}

Point GaugeMap::apply(const TorusGrid& grid, const Point& x) const {
  if (is_identity()) return x;
  const Point d = grid.displacement(center_, x);
  const double r = d.norm();
  if (r >= radius_) return x;
  const double t = 1.0 - r * r / (radius_ * radius_);
  return x + strength_ * std::pow(t, 4) * d;
}

Tensor GaugeMap::jacobian(const TorusGrid& grid, const Point& x) const {
  Tensor j = Tensor::Identity();
  if (is_identity()) return j;
  const Point d = grid.displacement(center_, x);
  const double r = d.norm();
  if (r >= radius_) return j;
  const double t = 1.0 - r * r / (radius_ * radius_);
  const double q = -8.0 / (radius_ * radius_) * std::pow(t, 3);
  j = (1.0 + strength_ * std::pow(t, 4)) * Tensor::Identity() + strength_ * q * d * d.transpose();
  if (grid.dim() == 1) {
    j(0, 1) = j(1, 0) = 0.0;
    j(1, 1) = 1.0;
  }
  return j;
}

MetricField gauge_pullback(const TorusGrid& grid, const MetricProfile& profile,
                           const GaugeMap& phi) {
  std::vector<Tensor> tensors(size_t(grid.node_count()));
  for (Index i = 0; i < grid.node_count(); ++i) {
    const Point x = grid.coordinates(i);
    const Tensor j = phi.jacobian(grid, x);
    if (j == Tensor::Identity()) {
      tensors[size_t(i)] = evaluate_profile(profile, grid, x);
      continue;
    }
    const Point y = phi.apply(grid, x);
    if (!(j.topLeftCorner(grid.dim(), grid.dim()).determinant() > 0.0))
      throw Error("recovery", "gauge map Jacobian is not orientation preserving");
    Tensor g = j.transpose() * evaluate_profile(profile, grid, y) * j;
    g(1, 0) = g(0, 1);
    tensors[size_t(i)] = g;
  }
  Point center = phi.is_identity() ? profile.center : phi.center();
  double radius = phi.is_identity() ? 0.0 : phi.radius();
  if (profile.kind != MetricProfile::Kind::identity)
    radius = std::max(radius, grid.distance(center, profile.center) + profile.radius);
  return MetricField::from_samples(grid, std::move(tensors), center, radius);
}

void require_exterior_agreement(const MetricField& a, const MetricField& b,
                                const ExteriorConfig& config) {
  for (Index i : config.exterior())
    if (!a.equals_at(b, i))
      throw Error("recovery", "metrics differ at exterior node " + std::to_string(i));
}

HeatPair::HeatPair(const MetricField& first, const MetricField& second,
                   const ExteriorConfig& config)
    : config_((require_exterior_agreement(first, second, config), config)),
      lap1_(first),
      lap2_(second),
      dec1_(decompose(lap1_)),
      dec2_(decompose(lap2_)) {}

HeatDifference::HeatDifference(const HeatPair& pair, const Vector& f, Index node)
    : c1_(pair.first().analyze(f).cwiseProduct(pair.first().eigenvectors().row(node).transpose())),
      c2_(pair.second().analyze(f).cwiseProduct(pair.second().eigenvectors().row(node).transpose())),
      l1_(pair.first().eigenvalues()),
      l2_(pair.second().eigenvalues()) {
  if (f(node) != 0.0) throw Error("recovery", "evaluation node lies inside supp F");
}

double HeatDifference::operator()(double t) const {
  return (c1_.array() * (-t * l1_.array()).exp()).sum() -
         (c2_.array() * (-t * l2_.array()).exp()).sum();
}

double HeatDifference::reference(double t) const {
  return (c2_.array() * (-t * l2_.array()).exp()).sum();
}

double heat_difference_trace(const HeatPair& pair, const Vector& f, Index node, double t) {
  if (!(t > 0.0)) throw Error("recovery", "heat time must be positive");
  return HeatDifference(pair, f, node)(t);
}

MomentTable moment_vector(const Sampler& u, double alpha, int M, const TimeQuadrature& quad,
                          const Sampler& reference) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("recovery", "alpha outside (0,1)");
  if (M < 0) throw Error("recovery", "moment count must be nonnegative");
  const Vector t = quad.times(), w = quad.weights();
  MomentTable table;
  table.alpha = alpha;
  table.quad = quad;
  table.moments = Vector::Zero(M + 1);
  table.scales = Vector::Zero(M + 1);
  const double u0 = u(t(0));
  if (!(std::abs(u0) * std::pow(t(0), -1.0 - alpha - M) < 1e300))
    throw QuadratureWindowError("recovery", "moment integrand overflows at t_min; raise t_min");
  for (Index q = 0; q < t.size(); ++q) {
    const double uq = q == 0 ? u0 : u(t(q));
    const double vq = reference ? std::abs(reference(t(q))) : 0.0;
    table.signal_peak = std::max(table.signal_peak, std::abs(uq));
    table.reference_peak = std::max(table.reference_peak, vq);
    double power = w(q) * std::pow(t(q), -1.0 - alpha);
    for (int m = 0; m <= M; ++m) {
      table.moments(m) += uq * power;
      table.scales(m) += vq * power;
      power /= t(q);
    }
  }
  return table;
}

TimeQuadrature signal_window(const Sampler& reference, const TimeQuadrature& quad, double floor) {
  const Vector t = quad.times();
  Vector v(t.size());
  for (Index q = 0; q < t.size(); ++q) v(q) = std::abs(reference(t(q)));
  const double peak = v.maxCoeff();
  if (!(peak > 0.0)) throw Error("recovery", "reference signal vanishes on the window");
  Index first = 0;
  while (v(first) < floor * peak) ++first;
  TimeQuadrature out = quad;
  out.t_min = t(first);
  out.nodes = int(t.size() - first);
  if (out.nodes < 3) throw QuadratureWindowError("recovery", "signal window is too short");
  return out;
}

VanishingReport vanishing_test(const MomentTable& table, double threshold) {
  VanishingReport r;
  r.threshold = threshold;
  const Index n = table.moments.size();
  r.normalized = Vector::Zero(n);
  for (Index m = 0; m < n; ++m) {
    const double scale = table.scales(m);
    r.normalized(m) = table.moments(m) == 0.0 ? 0.0 : std::abs(table.moments(m)) / scale;
  }
  r.sample_ratio = table.signal_peak == 0.0 ? 0.0 : table.signal_peak / table.reference_peak;
  r.vanishes = r.normalized.maxCoeff() < threshold;
  return r;
}

std::string VanishingReport::summary() const {
  std::ostringstream out;
  out.precision(3);
  out << (vanishes ? "vanishes" : "does not vanish") << " (threshold " << threshold
      << ", max moment " << normalized.maxCoeff() << ", sampled " << sample_ratio << ")";
  return out.str();
}

double KernelSample::relative() const {
  return std::abs(k1 - k2) / std::max(std::abs(k2), 1e-300);
}

std::vector<KernelSample> recover_heat_kernel_samples(
    const HeatPair& pair, const std::vector<std::pair<Index, Index>>& node_pairs,
    const std::vector<double>& times) {
  std::vector<bool> exterior(size_t(pair.first().size()), false);
  for (Index i : pair.config().exterior()) exterior[size_t(i)] = true;
  std::vector<KernelSample> out;
  for (double t : times)
    for (auto [x, y] : node_pairs) {
      if (!exterior[size_t(x)] || !exterior[size_t(y)])
        throw Error("recovery", "kernel samples must use exterior nodes");
      out.push_back({t, x, y, heat_kernel(pair.first(), t, x, y), heat_kernel(pair.second(), t, x, y)});
    }
  return out;
}

namespace {

double relative_w2_difference(const DtNRecord& a, const DtNRecord& b) {
  double diff = 0.0, norm = 0.0;
  for (Index i : a.measurement) {
    diff += (a.output(i) - b.output(i)) * (a.output(i) - b.output(i));
    norm += b.output(i) * b.output(i);
  }
  return std::sqrt(diff / norm);
}

}  // namespace

GaugeLevel gauge_level(const GaugeSetup& setup, int points) {
  const TorusGrid grid(setup.dim, setup.side_length, points);
  const ExteriorConfig config =
      ExteriorConfig::from_shapes(grid, setup.omega, setup.w1, setup.w2, setup.allow_overlap);
  const MetricField base = make_metric(grid, setup.profile);
  const MetricField pulled = gauge_pullback(grid, setup.profile, setup.phi);
  const MetricField flat = make_metric(grid, MetricProfile::identity());
  require_exterior_agreement(base, pulled, config);
  require_exterior_agreement(base, flat, config);

  std::vector<std::function<double(const Point&)>> data = setup.data;
  if (data.empty()) {
    const Point c = setup.w1.center;
    data.push_back([c, &grid](const Point& x) {
      return std::exp(-grid.displacement(c, x).squaredNorm() / 0.05);
    });
    data.push_back([c, &grid](const Point& x) {
      const Point d = grid.displacement(c, x);
      return (d.y() + 0.5 * d.x()) * std::exp(-d.squaredNorm() / 0.05);
    });
  }
  std::vector<Vector> inputs;
  for (const auto& fn : data) {
    Vector f = Vector::Zero(grid.node_count());
    for (Index i : config.w1()) f(i) = fn(grid.coordinates(i));
    inputs.push_back(f);
  }

  auto records = [&](const MetricField& metric) {
    const SpectralDecomposition dec = decompose(assemble_laplacian(metric));
    const FractionalOperator op(dec, setup.alpha);
    std::vector<DtNRecord> out;
    for (const Vector& f : inputs) out.push_back(dtn_partial(op, metric, config, f));
    return out;
  };
  const auto rb = records(base);
  const auto rp = records(pulled);
  const auto rf = records(flat);
  GaugeLevel level;
  level.points = points;
  for (size_t k = 0; k < inputs.size(); ++k) {
    level.gauge_error = std::max(level.gauge_error, relative_w2_difference(rp[k], rb[k]));
    level.control_error = std::max(level.control_error, relative_w2_difference(rf[k], rb[k]));
  }
  return level;
}

GaugeReport gauge_experiment(const GaugeSetup& setup) {
  GaugeReport r;
  r.coarse = gauge_level(setup, setup.coarse_points);
  r.fine = gauge_level(setup, 2 * setup.coarse_points);
  r.gauge_ratio = r.fine.gauge_error > 0.0 ? r.coarse.gauge_error / r.fine.gauge_error : INFINITY;
  r.control_ratio = r.coarse.control_error / r.fine.control_error;
  r.pass = setup.phi.is_identity() ? r.coarse.gauge_error < 1e-10 && r.fine.gauge_error < 1e-10
                                   : r.gauge_ratio >= 3.0;
  r.control_shrinks = r.control_ratio >= 3.0;
  return r;
}

}  // namespace fraclb
