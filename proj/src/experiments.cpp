#include "fraclb/experiments.hpp"

#include "fraclb/analysis.hpp"
#include "fraclb/bessel.hpp"
#include "fraclb/errors.hpp"
#include "fraclb/extension.hpp"
#include "fraclb/exterior.hpp"
#include "fraclb/recovery.hpp"
#include "fraclb/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace fraclb {

std::string library_version() { return "1.0.0"; }

bool ExperimentResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::string fmt(Index v) { return std::to_string(v); }

std::string label(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

void check_below(ExperimentResult& r, const std::string& name, double value, double limit) {
  r.checks.push_back({name, value, limit, "<", value < limit});
}

void check_at_least(ExperimentResult& r, const std::string& name, double value, double limit) {
  r.checks.push_back({name, value, limit, ">=", value >= limit});
}

Vector random_vector(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

double relative_error(const Vector& a, const Vector& b, const Vector& w) {
  const Vector d = a - b;
  return std::sqrt(d.cwiseProduct(d).cwiseProduct(w).sum() / b.cwiseProduct(b).cwiseProduct(w).sum());
}

// Smooth exterior datum: a Gaussian centered on W1 plus a constant offset.
Vector exterior_datum(const TorusGrid& grid, const ExteriorConfig& config, const Point& center) {
  Vector f = Vector::Zero(grid.node_count());
  for (Index i : config.exterior())
    f(i) = std::exp(-grid.displacement(center, grid.coordinates(i)).squaredNorm()) + 0.3;
  return f;
}

// Gaussian source of width `width` restricted to the nodes of a ball.
Vector ball_source(const TorusGrid& grid, const Point& center, double radius, double width) {
  Vector f = Vector::Zero(grid.node_count());
  for (Index i = 0; i < grid.node_count(); ++i) {
    const double r2 = grid.displacement(center, grid.coordinates(i)).squaredNorm();
    if (r2 < radius * radius) f(i) = std::exp(-r2 / width);
  }
  return f;
}

std::vector<double> circulant_spectrum(const TorusGrid& grid) {
  const int N = grid.points_per_side();
  const double h = grid.spacing();
  std::vector<double> axis(static_cast<size_t>(N));
  for (int k = 0; k < N; ++k) axis[size_t(k)] = 4.0 / (h * h) * std::pow(std::sin(M_PI * k / N), 2);
  std::vector<double> out;
  if (grid.dim() == 1) {
    out = axis;
  } else {
    for (double a : axis)
      for (double b : axis) out.push_back(a + b);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> point_columns(const TorusGrid& grid, Index i) {
  const Point x = grid.coordinates(i);
  std::vector<std::string> cols{fmt(x.x())};
  if (grid.dim() == 2) cols.push_back(fmt(x.y()));
  return cols;
}

ExperimentResult operator_check(const RunConfig& c) {
  ExperimentResult r;
  const TorusGrid grid(c.dim, c.side_length, c.points);
  const MetricField metric = make_metric(grid, c.metric);
  const DiscreteLaplaceBeltrami lap = assemble_laplacian(metric);
  const SpectralDecomposition dec = decompose(lap);
  const Vector& lambda = dec.eigenvalues();
  const Index M = dec.size();
  std::mt19937_64 rng(c.seed);

  CsvTable eig{"eigenvalues.csv", {"k", "lambda"}, {}};
  const bool flat = c.metric.kind == MetricProfile::Kind::identity;
  std::vector<double> closed;
  if (flat) {
    closed = circulant_spectrum(grid);
    eig.header.push_back("closed_form");
  }
  double eig_defect = 0.0;
  for (Index k = 0; k < M; ++k) {
    eig.rows.push_back({fmt(k), fmt(lambda(k))});
    if (flat) {
      eig.rows.back().push_back(fmt(closed[size_t(k)]));
      eig_defect = std::max(eig_defect, std::abs(lambda(k) - closed[size_t(k)]) / lambda(M - 1));
    }
  }
  r.tables.push_back(std::move(eig));
  if (flat) check_below(r, "eigenvalues match circulant closed form", eig_defect, c.tol.eigen);

  const Matrix gram = dec.eigenvectors().transpose() * dec.weights().asDiagonal() * dec.eigenvectors();
  check_below(r, "weighted orthonormality", (gram - Matrix::Identity(M, M)).cwiseAbs().maxCoeff(), c.tol.eigen);

  const WeightedMeasure& measure = lap.measure();
  double adjoint = 0.0;
  for (int p = 0; p < 100; ++p) {
    const Vector u = random_vector(rng, M), v = random_vector(rng, M);
    const double defect = std::abs(weighted_inner(lap.apply(u), v, measure) -
                                   weighted_inner(u, lap.apply(v), measure));
    adjoint = std::max(adjoint, defect / (lambda(M - 1) * weighted_norm(u, measure) *
                                          weighted_norm(v, measure)));
  }
  check_below(r, "weighted self-adjointness", adjoint, c.tol.self_adjoint);
  check_below(r, "constants are harmonic", lap.apply(Vector::Ones(M)).cwiseAbs().maxCoeff(),
              c.tol.eigen * lambda(M - 1));

  double stochastic = 0.0;
  for (double t : {0.01, 0.1, 1.0, 10.0}) {
    const Vector rows = heat_kernel_matrix(dec, t) * dec.weights();
    stochastic = std::max(stochastic, (rows.array() - 1.0).abs().maxCoeff());
  }
  check_below(r, "heat rows integrate to one", stochastic, c.tol.stochastic);

  double bal = 0.0;
  for (double alpha : {0.25, 0.5, 0.75, c.alpha}) {
    const Vector u = random_vector(rng, M);
    bal = std::max(bal, relative_error(frac_apply_balakrishnan(dec, alpha, u, c.quad, c.slack),
                                       frac_apply_spectral(dec, alpha, u), dec.weights()));
  }
  check_below(r, "Balakrishnan quadrature matches spectral power", bal, c.tol.balakrishnan);

  // Kernel pairs from the center node outwards along the first axis.
  const Index center = grid.nearest_node(Point(c.side_length / 2, c.side_length / 2));
  std::vector<std::pair<Index, Index>> pairs;
  for (int s = 1; s <= c.points / 4; ++s) pairs.emplace_back(center, grid.neighbor(center, 0, s));
  const FracKernel kernel = jump_kernel(dec, metric, c.alpha, pairs, c.quad);
  std::vector<std::pair<Index, Index>> swapped;
  for (auto [i, j] : pairs) swapped.emplace_back(j, i);
  const FracKernel back = jump_kernel(dec, metric, c.alpha, swapped, c.quad);
  check_below(r, "jump kernel symmetry", (kernel.values - back.values).cwiseAbs().maxCoeff(),
              1e-12 * kernel.values.cwiseAbs().maxCoeff());
  check_at_least(r, "jump kernel positive", kernel.values.minCoeff(), 0.0);
  const double sandwich = kernel_sandwich_constant(kernel, grid);
  r.notes.push_back("fitted kernel sandwich constant C = " + fmt(sandwich));
  CsvTable ktab{"kernel.csv", {"i", "j", "dist", "K", "lower", "upper"}, {}};
  for (size_t p = 0; p < pairs.size(); ++p) {
    auto [i, j] = pairs[p];
    const double d = grid.distance(grid.coordinates(i), grid.coordinates(j));
    const double base = std::pow(d, -grid.dim() - 2.0 * c.alpha);
    ktab.rows.push_back({fmt(i), fmt(j), fmt(d), fmt(kernel.values(Index(p))), fmt(base / sandwich),
                         fmt(base * sandwich)});
  }
  r.tables.push_back(std::move(ktab));

  CsvTable qtab{"quadrature.csv", {"t", "integrand_norm"}, {}};
  const Vector u = random_vector(rng, M);
  const Vector t = c.quad.times();
  for (Index q = 0; q < t.size(); ++q) {
    const Vector d = heat_apply(dec, t(q), u) - u;
    qtab.rows.push_back({fmt(t(q)), fmt(weighted_norm(d, measure) * std::pow(t(q), -1.0 - c.alpha))});
  }
  r.tables.push_back(std::move(qtab));
  return r;
}

ExperimentResult extension_check(const RunConfig& c) {
  ExperimentResult r;
  const TorusGrid grid(c.dim, c.side_length, c.points);
  const MetricField metric = make_metric(grid, c.metric);
  const DiscreteLaplaceBeltrami lap = assemble_laplacian(metric);
  const SpectralDecomposition dec = decompose(lap);
  const Index M = dec.size();
  std::mt19937_64 rng(c.seed);
  const double d = trace_constant(c.alpha);

  const Vector ratios = numeric_trace_ratios(dec, c.alpha);
  CsvTable ttab{"trace_ratio.csv", {"k", "ratio"}, {}};
  for (Index k = 0; k < ratios.size(); ++k) ttab.rows.push_back({fmt(k + 1), fmt(ratios(k))});
  r.tables.push_back(std::move(ttab));
  check_below(r, "numeric trace ratio is mode independent", ratios.maxCoeff() - ratios.minCoeff(),
              c.tol.trace);
  check_below(r, "numeric trace ratio matches -d_alpha", (ratios.array() + d).abs().maxCoeff(),
              c.tol.trace);
  if (c.alpha == 0.5)
    check_below(r, "trace ratio is -1 at alpha 1/2", (ratios.array() + 1.0).abs().maxCoeff(), 1e-10);

  double trace_defect = 0.0;
  for (int p = 0; p < c.random_vectors; ++p) {
    const Vector u = random_vector(rng, M);
    const Vector tr = neumann_trace(extend_dirichlet(dec, c.alpha, u));
    const Vector ref = -d * frac_apply_spectral(dec, c.alpha, u);
    trace_defect = std::max(trace_defect, weighted_norm(tr - ref, lap.measure()) /
                                              weighted_norm(u, lap.measure()));
  }
  check_below(r, "Neumann trace equals -d_alpha times fractional power", trace_defect, 1e-8);

  CsvTable ptab{"mode_profiles.csv", {"k", "z", "value"}, {}};
  const ExtensionMesh mesh = make_extension_mesh(c.alpha, dec.eigenvalues()(1), c.extension_levels,
                                                 c.extension_height);
  const ExtensionSolution unit(dec, c.alpha, Vector::Ones(M));
  for (Index k = 1; k <= std::min<Index>(4, M - 1); ++k)
    for (Index p = 0; p < mesh.heights.size(); ++p)
      ptab.rows.push_back({fmt(k), fmt(mesh.heights(p)), fmt(unit.mode_profile(k, mesh.heights(p)))});
  r.tables.push_back(std::move(ptab));

  // Mixed problem against the nonlocal exterior solve, at two meshes.
  const ExteriorConfig config = ExteriorConfig::from_shapes(grid, c.omega, c.w1, c.w2, c.allow_overlap);
  const Vector f = exterior_datum(grid, config, c.w1.center);
  const FractionalOperator frac(dec, c.alpha);
  const Vector nonlocal = solve_exterior_dirichlet(frac, config, f);
  Vector w_omega = Vector::Zero(M);
  for (Index i : config.omega()) w_omega(i) = dec.weights()(i);
  auto mixed_error = [&](int levels) {
    const ExtensionMesh m = make_extension_mesh(c.alpha, dec.eigenvalues()(1), levels, c.extension_height);
    const ExtensionField field = fd_extension_solve(lap, c.alpha, m, config.exterior(), config.omega(), f,
                                                    Vector::Zero(M));
    return relative_error(field.trace(), nonlocal, w_omega);
  };
  const double coarse = mixed_error(c.extension_levels);
  const double fine = mixed_error(2 * c.extension_levels);
  check_below(r, "extension solve matches exterior solve on Omega", coarse, c.tol.extension);
  check_at_least(r, "extension error reduction under mesh refinement", coarse / fine, 2.0);

  // Pure Dirichlet data against the Bessel evaluator on the mesh.
  {
    const Vector u = exterior_datum(grid, config, c.w2.center) + f;
    std::vector<Index> all(static_cast<size_t>(M));
    for (Index i = 0; i < M; ++i) all[size_t(i)] = i;
    const ExtensionField field = fd_extension_solve(lap, c.alpha, mesh, all, {}, u, Vector::Zero(M));
    const ExtensionSolution sol = extend_dirichlet(dec, c.alpha, u);
    double num = 0.0, den = 0.0;
    for (Index p = 1; p < mesh.heights.size(); ++p) {
      const Vector exact = sol.evaluate(mesh.heights(p));
      const double dz = mesh.heights(p) - mesh.heights(p - 1);
      num += dz * (field.values.col(p) - exact).cwiseProduct(field.values.col(p) - exact).dot(dec.weights());
      den += dz * exact.cwiseProduct(exact).dot(dec.weights());
    }
    check_below(r, "Dirichlet extension solve matches Bessel solution", std::sqrt(num / den),
                c.tol.extension);
  }

  // Representation formula and its normal series.
  {
    const double radius = 0.05 * c.side_length;
    const Vector source = ball_source(grid, c.w1.center, radius, radius * radius / 4.0);
    std::vector<Index> far;
    Index calibration = -1;
    for (Index i : config.exterior()) {
      const double dist = grid.distance(grid.coordinates(i), c.w1.center);
      if (source(i) != 0.0) continue;
      if (calibration < 0 && dist > 0.2 * c.side_length) calibration = i;
      if (dist > 0.3 * c.side_length) far.push_back(i);
    }
    if (calibration < 0 || far.empty()) throw Error("cli", "representation check found no exterior nodes");
    const double constant = calibrate_representation(lap, dec, c.alpha, source, calibration, c.quad);
    const Vector neumann = neumann_solve(dec, c.alpha, lap.apply(source));
    double worst = 0.0;
    for (Index i : far) {
      const double rep = representation_solution(lap, dec, c.alpha, source, i, 0.0, constant, c.quad);
      worst = std::max(worst, std::abs(rep - neumann(i)) / neumann.cwiseAbs().maxCoeff());
    }
    r.notes.push_back("calibrated representation constant = " + fmt(constant));
    check_below(r, "calibrated representation matches Neumann solve", worst, c.tol.representation);

    // Series at the farthest node.
    Index x = far.front();
    double best = 0.0;
    for (Index i : far) {
      const double dist = grid.distance(grid.coordinates(i), c.w1.center);
      if (dist > best) best = dist, x = i;
    }
    const int J = 12;
    const SeriesCoefficients series =
        series_coefficients(lap, dec, c.alpha, source, {x}, J, constant, c.quad);
    const double z = (best - radius) / 4.0;
    const double rep = representation_solution(lap, dec, c.alpha, source, x, z, constant, c.quad);
    check_below(r, "normal series reproduces representation", std::abs(series.partial_sum(0, z) - rep) / std::abs(rep),
                c.tol.series);
    CsvTable stab{"series.csv", {"x_index", "j", "C_j"}, {}};
    for (int j = 0; j <= J; ++j) stab.rows.push_back({fmt(x), fmt(Index(j)), fmt(series.values(0, j))});
    r.tables.push_back(std::move(stab));
  }
  return r;
}

ExperimentResult dtn_experiment(const RunConfig& c) {
  ExperimentResult r;
  const TorusGrid grid(c.dim, c.side_length, c.points);
  const MetricField metric = make_metric(grid, c.metric);
  const DiscreteLaplaceBeltrami lap = assemble_laplacian(metric);
  const SpectralDecomposition dec = decompose(lap);
  const FractionalOperator op(dec, c.alpha);
  const ExteriorConfig config = ExteriorConfig::from_shapes(grid, c.omega, c.w1, c.w2, c.allow_overlap);
  // Measurement on W1 itself for the symmetry pairing.
  const ExteriorConfig self = ExteriorConfig::from_sets(grid, config.omega(), config.w1(), config.w1(), true);
  const Index M = grid.node_count();
  std::mt19937_64 rng(c.seed);

  auto on_w1 = [&]() {
    const Vector v = random_vector(rng, M);
    Vector f = Vector::Zero(M);
    for (Index i : config.w1()) f(i) = v(i);
    return f;
  };
  double sym = 0.0, residual = 0.0;
  for (int p = 0; p < c.random_vectors; ++p) {
    const Vector f = on_w1(), h = on_w1();
    const DtNRecord rf = dtn_partial(op, metric, self, f), rh = dtn_partial(op, metric, self, h);
    const double a = rf.pairing(h), b = rh.pairing(f);
    sym = std::max(sym, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    residual = std::max({residual, rf.residual, rh.residual});
  }
  check_below(r, "DtN pairing symmetry", sym, c.tol.symmetry);
  check_below(r, "exterior solver residual", residual, 1e-9);

  const Vector f = on_w1();
  const DtNRecord partial = dtn_partial(op, metric, config, f);
  const DtNRecord full = dtn_full(op, metric, config, f);
  double restriction = 0.0;
  for (Index i : config.w2()) restriction = std::max(restriction, std::abs(partial.output(i) - full.output(i)));
  check_below(r, "full DtN restricts to partial DtN", restriction,
              1e-12 * std::max(1.0, full.output.cwiseAbs().maxCoeff()));

  Vector constant = Vector::Zero(M);
  for (Index i : config.exterior()) constant(i) = 1.7;
  const DtNRecord flat = dtn_full(op, metric, config, constant);
  check_below(r, "DtN annihilates constants", flat.output.cwiseAbs().maxCoeff(), 1e-9);

  // Pivot identity: the DtN map of a Poisson solution's trace returns A F.
  const Vector source = ball_source(grid, c.w1.center, c.w1.outer_radius, 0.05 * c.side_length);
  const SourceSolutionRecord poisson = poisson_solve(dec, c.alpha, config, source);
  Vector trace = Vector::Zero(M);
  for (Index i : config.exterior()) trace(i) = poisson.solution(i);
  const DtNRecord pivot = dtn_full(op, metric, config, trace);
  const Vector af = lap.apply(source);
  double pivot_err = 0.0;
  for (Index i : config.exterior()) pivot_err = std::max(pivot_err, std::abs(pivot.output(i) - af(i)));
  check_below(r, "DtN of Poisson trace returns A F on the exterior", pivot_err / af.cwiseAbs().maxCoeff(), 1e-9);

  const ExteriorSolution sol = solve_exterior(op, config, f);
  const Vector dtn = op.apply(sol.u);
  CsvTable tab{"dtn.csv", {"node", "x"}, {}};
  if (c.dim == 2) tab.header.push_back("y");
  for (const char* h : {"role", "f", "u", "dtn"}) tab.header.push_back(h);
  for (Index i = 0; i < M; ++i) {
    std::vector<std::string> row{fmt(i)};
    for (auto& s : point_columns(grid, i)) row.push_back(s);
    row.push_back(role_name(config.role(i)));
    row.push_back(fmt(f(i)));
    row.push_back(fmt(sol.u(i)));
    row.push_back(fmt(dtn(i)));
    tab.rows.push_back(std::move(row));
  }
  r.tables.push_back(std::move(tab));
  return r;
}

GaugeSetup gauge_setup(const RunConfig& c) {
  GaugeSetup s;
  s.dim = c.dim;
  s.side_length = c.side_length;
  s.coarse_points = c.points;
  s.alpha = c.alpha;
  s.omega = c.omega;
  s.w1 = c.w1;
  s.w2 = c.w2;
  s.allow_overlap = c.allow_overlap;
  s.profile = c.metric;
  s.phi = c.phi_strength == 0.0 ? GaugeMap::identity()
                                 : GaugeMap::radial_squash(c.omega.center, c.phi_strength, c.phi_radius);
  return s;
}

ExperimentResult gauge_run(const RunConfig& c) {
  ExperimentResult r;
  const GaugeSetup setup = gauge_setup(c);
  const GaugeReport report = gauge_experiment(setup);
  CsvTable tab{"gauge.csv", {"N", "gauge_error", "control_error"}, {}};
  for (const GaugeLevel& l : {report.coarse, report.fine})
    tab.rows.push_back({fmt(Index(l.points)), fmt(l.gauge_error), fmt(l.control_error)});
  r.tables.push_back(std::move(tab));
  if (setup.phi.is_identity()) {
    check_below(r, "identity gauge leaves DtN unchanged",
                std::max(report.coarse.gauge_error, report.fine.gauge_error), 1e-10);
  } else {
    check_at_least(r, "gauge DtN difference shrinks under refinement", report.gauge_ratio, c.tol.gauge_ratio);
    check_below(r, "control DtN difference does not shrink", report.control_ratio, c.tol.gauge_ratio);
  }
  return r;
}

ExperimentResult recovery_run(const RunConfig& c) {
  ExperimentResult r;
  const TorusGrid grid(c.dim, c.side_length, c.points);
  const ExteriorConfig config = ExteriorConfig::from_shapes(grid, c.omega, c.w1, c.w2, c.allow_overlap);
  const GaugeMap phi = GaugeMap::radial_squash(c.omega.center, c.phi_strength, c.phi_radius);
  const MetricField flat = make_metric(grid, MetricProfile::identity());
  const MetricField base = make_metric(grid, c.metric);
  const MetricField bump = make_metric(
      grid, MetricProfile::conformal_bump(0.1, std::nullopt, c.omega.outer_radius, c.omega.center));

  struct Case {
    std::string name;
    HeatPair pair;
  };
  std::vector<Case> cases;
  cases.push_back({"flat-gauge", HeatPair(flat, gauge_pullback(grid, MetricProfile::identity(), phi), config)});
  cases.push_back({"gauge", HeatPair(base, gauge_pullback(grid, c.metric, phi), config)});
  cases.push_back({"distinct", HeatPair(flat, bump, config)});

  const Vector source = ball_source(grid, c.w1.center, c.w1.outer_radius, 0.01 * c.side_length);
  const Index x = grid.nearest_node(c.w2.center);
  CsvTable mtab{"moments.csv", {"experiment", "metric_pair", "m", "moment", "verdict"}, {}};
  std::vector<VanishingReport> reports;
  std::vector<MomentTable> tables;
  for (const Case& k : cases) {
    const HeatDifference u(k.pair, source, x);
    const Sampler ref = [&u](double t) { return u.reference(t); };
    const TimeQuadrature window = signal_window(ref, c.quad, c.moment_floor);
    tables.push_back(moment_vector([&u](double t) { return u(t); }, c.alpha, c.moments - 1, window, ref));
  }
  const double h2 = grid.spacing() * grid.spacing();
  const VanishingReport calib = vanishing_test(tables[0], 1.0);
  const double constant = c.threshold_safety * calib.normalized.maxCoeff() / h2;
  const double threshold = constant * h2;
  r.notes.push_back("moment threshold C h^2 with C = " + fmt(constant));
  for (size_t k = 0; k < cases.size(); ++k) {
    reports.push_back(vanishing_test(tables[k], threshold));
    for (Index m = 0; m < tables[k].moments.size(); ++m)
      mtab.rows.push_back({"recovery", cases[k].name, fmt(m), fmt(tables[k].moments(m)),
                           reports[k].vanishes ? "vanishes" : "differs"});
    r.notes.push_back(cases[k].name + ": " + reports[k].summary());
  }
  r.tables.push_back(std::move(mtab));
  check_below(r, "gauge pair moments vanish", reports[1].normalized.maxCoeff(), threshold);
  check_at_least(r, "distinct pair moments do not vanish", reports[2].vanishes ? 0.0 : 1.0, 1.0);
  check_at_least(r, "distinct pair m=0 moment exceeds 10x threshold", reports[2].normalized(0), 10.0 * threshold);

  // Heat kernel samples between W1 and W2 nodes.
  std::vector<std::pair<Index, Index>> pairs;
  const auto& a = config.w1();
  const auto& b = config.w2();
  for (size_t s = 0; s < 4; ++s) pairs.emplace_back(a[s * a.size() / 4], b[b.size() - 1 - s * b.size() / 4]);
  const std::vector<double> times{0.25, 1.0, 4.0};
  CsvTable ktab{"kernel_samples.csv", {"metric_pair", "t", "x", "y", "k1", "k2", "diff"}, {}};
  std::vector<double> worst;
  for (const Case& k : cases) {
    double w = 0.0;
    for (const KernelSample& s : recover_heat_kernel_samples(k.pair, pairs, times)) {
      ktab.rows.push_back({k.name, fmt(s.t), fmt(s.x), fmt(s.y), fmt(s.k1), fmt(s.k2), fmt(s.difference())});
      w = std::max(w, s.relative());
    }
    worst.push_back(w);
  }
  r.tables.push_back(std::move(ktab));
  const double ktol = c.threshold_safety * worst[0];
  r.notes.push_back("kernel tolerance = " + fmt(ktol));
  check_below(r, "gauge pair heat kernels agree", worst[1], ktol);
  r.notes.push_back("distinct pair max relative kernel difference = " + fmt(worst[2]));
  return r;
}

ExperimentResult regularity_run(const RunConfig& c) {
  ExperimentResult r;
  std::vector<GridSolution> solutions;
  for (int n : c.point_list) {
    const TorusGrid grid(c.dim, c.side_length, n);
    const MetricField metric = make_metric(grid, c.metric);
    const SpectralDecomposition dec = decompose(assemble_laplacian(metric));
    const ExteriorConfig config = ExteriorConfig::from_shapes(grid, c.omega, c.w1, c.w2, c.allow_overlap);
    const FractionalOperator op(dec, c.alpha);
    solutions.push_back({grid, solve_exterior_dirichlet(op, config, exterior_datum(grid, config, c.w1.center))});
  }
  CsvTable tab{"regularity.csv", {"N", "s", "norm", "verdict"}, {}};
  for (double s : {c.alpha, c.alpha + c.probe_delta, c.alpha + 0.9}) {
    const RegularityReport rep = regularity_probe(solutions, s);
    for (const RegularityRow& row : rep.rows)
      tab.rows.push_back({fmt(Index(row.points)), fmt(s), fmt(row.norm), rep.bounded ? "BOUNDED" : "GROWING"});
    if (s < c.alpha + 0.5)
      check_below(r, "H^" + label(s) + " norm bounded under refinement", rep.ratio, c.tol.regularity_ratio);
    else
      r.notes.push_back("H^" + label(s) + " growth ratio " + fmt(rep.ratio) + " (informational)");
  }
  r.tables.push_back(std::move(tab));
  return r;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& config) {
  ExperimentResult r;
  if (config.experiment == "operator-check") r = operator_check(config);
  else if (config.experiment == "extension-check") r = extension_check(config);
  else if (config.experiment == "dtn") r = dtn_experiment(config);
  else if (config.experiment == "gauge") r = gauge_run(config);
  else if (config.experiment == "recovery") r = recovery_run(config);
  else if (config.experiment == "regularity") r = regularity_run(config);
  else throw Error("cli", "unknown experiment '" + config.experiment + "'");
  r.experiment = config.experiment;
  return r;
}

std::string write_artifacts(const RunConfig& config, const ExperimentResult& result,
                            const std::string& root) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(root) / config.output_dir;
  fs::create_directories(dir);
  for (const CsvTable& t : result.tables) {
    std::ofstream out(dir / t.file);
    if (!out) throw Error("cli", "cannot write " + (dir / t.file).string());
    for (size_t k = 0; k < t.header.size(); ++k) out << (k ? "," : "") << t.header[k];
    out << '\n';
    for (const auto& row : t.rows) {
      for (size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
      out << '\n';
    }
  }
  std::ofstream m(dir / "manifest.txt");
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  m << "timestamp = " << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ") << '\n';
  m << "version = " << library_version() << '\n';
  for (const auto& [k, v] : config.effective) m << "config." << k << " = " << v << '\n';
  for (const Check& c : result.checks)
    m << "check = " << (c.pass ? "PASS" : "FAIL") << " | " << c.name << " | " << fmt(c.value) << ' '
      << c.relation << ' ' << fmt(c.limit) << '\n';
  for (const std::string& n : result.notes) m << "note = " << n << '\n';
  m << "verdict = " << (result.passed() ? "PASS" : "FAIL") << '\n';
  return dir.string();
}

}  // namespace fraclb
