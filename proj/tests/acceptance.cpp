#include "fraclb/config.hpp"
#include "fraclb/errors.hpp"
#include "fraclb/experiments.hpp"
#include "fraclb/extension.hpp"
#include "fraclb/bessel.hpp"
#include "fraclb/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace fraclb;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v) {
  std::ostringstream out;
  out.precision(3);
  out << v;
  return out.str();
}

RunConfig config_from(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "acceptance");
}

const Check& find_check(const ExperimentResult& r, const std::string& name) {
  for (const Check& c : r.checks)
    if (c.name == name) return c;
  throw Error("cli", "experiment " + r.experiment + " has no check '" + name + "'");
}

Verdict from_checks(const ExperimentResult& r, const std::vector<std::string>& names) {
  Verdict v{true, ""};
  for (const std::string& n : names) {
    const Check& c = find_check(r, n);
    v.pass = v.pass && c.pass;
    v.detail += (v.detail.empty() ? "" : "; ") + n + " " + num(c.value) + " " + c.relation + " " + num(c.limit);
  }
  return v;
}

std::vector<MetricProfile> test_metrics(int dim, double L) {
  const Point c(L / 2.0, dim == 2 ? L / 2.0 : 0.0);
  return {MetricProfile::identity(), MetricProfile::conformal_bump(0.5, 0.4, L / 4.0, c),
          MetricProfile::anisotropic_bump(0.5, std::nullopt, L / 4.0, c)};
}

Vector random_vector(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

Verdict two_definitions() {
  const auto start = Clock::now();
  std::mt19937_64 rng(0x5EED);
  double worst = 0.0;
  for (int dim : {1, 2}) {
    const double L = dim == 1 ? 8.0 : 4.0;
    const TorusGrid grid(dim, L, dim == 1 ? 32 : 24);
    for (const MetricProfile& p : test_metrics(dim, L)) {
      const SpectralDecomposition dec = decompose(assemble_laplacian(make_metric(grid, p)));
      const Vector u = random_vector(rng, dec.size());
      for (double alpha : {0.25, 0.5, 0.75}) {
        const Vector a = frac_apply_spectral(dec, alpha, u);
        const Vector d = frac_apply_balakrishnan(dec, alpha, u) - a;
        worst = std::max(worst, std::sqrt(d.cwiseProduct(d).dot(dec.weights()) / a.cwiseProduct(a).dot(dec.weights())));
      }
    }
  }
  const double t = seconds_since(start);
  return {worst < 1e-5 && t < 30.0, "max relative error " + num(worst) + " (< 1e-5), " + num(t) + " s (< 30 s)"};
}

// Lattice sum of |e1 + L k|^{-3} over k in Z^2 with the far field replaced by its integral.
double image_sum(double L) {
  const double R = 400.0 * L;
  const int K = 401;
  double s = 0.0;
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b) {
      const double r = std::hypot(1.0 + L * a, L * b);
      if (r < R) s += std::pow(r, -3.0);
    }
  return s + 2.0 * M_PI / (L * L * R);
}

Verdict kernel_constant() {
  const auto start = Clock::now();
  const double L = 4.0;
  std::vector<double> h, k;
  for (int n : {24, 32, 48}) {
    const TorusGrid grid(2, L, n);
    const MetricField m = make_metric(grid, MetricProfile::identity());
    const SpectralDecomposition dec = decompose(assemble_laplacian(m));
    const int steps = int(std::lround(1.0 / grid.spacing()));
    const FracKernel kern = jump_kernel(dec, m, 0.5, {{0, grid.neighbor(0, 0, steps)}});
    h.push_back(grid.spacing());
    k.push_back(kern.values(0));
  }
  // Fit K(h) = K0 + b h^2 + c h^4 through the three grids.
  Eigen::Matrix3d A;
  Eigen::Vector3d rhs;
  for (int i = 0; i < 3; ++i) {
    A.row(i) << 1.0, h[size_t(i)] * h[size_t(i)], std::pow(h[size_t(i)], 4);
    rhs(i) = k[size_t(i)];
  }
  const double k0 = A.colPivHouseholderQr().solve(rhs)(0);
  const double fitted = k0 / image_sum(L);
  const double exact = 1.0 / (4.0 * M_PI);
  const double rel = std::abs(fitted / exact - 1.0);
  const double t = seconds_since(start);
  return {rel < 1e-3 && t < 60.0, "extrapolated constant " + num(fitted) + " vs 1/(4 pi), relative error " +
                                      num(rel) + " (< 1e-3), finest-grid raw " + num(k.back() / image_sum(L)) +
                                      ", " + num(t) + " s (< 60 s)"};
}

Verdict stochastic() {
  double worst = 0.0;
  for (int dim : {1, 2}) {
    const double L = dim == 1 ? 8.0 : 4.0;
    const TorusGrid grid(dim, L, dim == 1 ? 32 : 24);
    for (const MetricProfile& p : test_metrics(dim, L)) {
      const SpectralDecomposition dec = decompose(assemble_laplacian(make_metric(grid, p)));
      for (double t : {0.01, 0.1, 1.0, 10.0})
        worst = std::max(worst, ((heat_kernel_matrix(dec, t) * dec.weights()).array() - 1.0).abs().maxCoeff());
    }
  }
  return {worst < 1e-10, "max row-sum defect " + num(worst) + " (< 1e-10)"};
}

Verdict extension_ratio() {
  double spread = 0.0, offset = 0.0, half = 0.0;
  for (int dim : {1, 2}) {
    const double L = dim == 1 ? 8.0 : 4.0;
    const TorusGrid grid(dim, L, dim == 1 ? 32 : 24);
    for (const MetricProfile& p : test_metrics(dim, L)) {
      const SpectralDecomposition dec = decompose(assemble_laplacian(make_metric(grid, p)));
      for (double alpha : {0.25, 0.5, 0.75}) {
        const Vector r = numeric_trace_ratios(dec, alpha);
        spread = std::max(spread, r.maxCoeff() - r.minCoeff());
        offset = std::max(offset, (r.array() + trace_constant(alpha)).abs().maxCoeff());
        if (alpha == 0.5) half = std::max(half, (r.array() + 1.0).abs().maxCoeff());
      }
    }
  }
  return {spread < 1e-8 && offset < 1e-8 && half < 1e-10,
          "mode spread " + num(spread) + " (< 1e-8), distance to -d_alpha " + num(offset) +
              " (< 1e-8), alpha 1/2 distance to -1 " + num(half) + " (< 1e-10)"};
}

Verdict solver_agreement() {
  const ExperimentResult r = run_experiment(config_from(
      "experiment = extension-check\ndim = 1\nN = 32\nalpha = 0.5\nmetric = conformal_bump\nbeta = 0.5\nr0 = 1.2\n"));
  return from_checks(r, {"extension solve matches exterior solve on Omega",
                         "extension error reduction under mesh refinement"});
}

Verdict dtn_symmetry() {
  Verdict v{true, ""};
  for (const char* text :
       {"experiment = dtn\ndim = 1\nalpha = 0.25\nmetric = conformal_bump\nbeta = 0.5\nr0 = 1.2\n",
        "experiment = dtn\ndim = 2\nalpha = 0.5\nmetric = anisotropic_bump\nbeta = 0.5\nr0 = 0.6\n",
        "experiment = dtn\ndim = 2\nalpha = 0.75\nmetric = conformal_bump\nbeta = 0.5\nsigma = 0.4\nr0 = 0.6\n"}) {
    const RunConfig c = config_from(text);
    if (c.random_vectors != 20) throw Error("cli", "expected 20 random pairs");
    const Verdict part = from_checks(run_experiment(c), {"DtN pairing symmetry"});
    v.pass = v.pass && part.pass;
    v.detail += (v.detail.empty() ? "" : "; ") + std::string(c.dim == 1 ? "1D" : "2D") + " alpha " +
                num(c.alpha) + ": " + part.detail;
  }
  return v;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kGaugeConfig =
    "experiment = gauge\ndim = 2\nL = 4\nN = 24\nalpha = 0.5\nmetric = conformal_bump\nbeta = 0.5\n"
    "sigma = 0.4\nr0 = 0.6\nphi_strength = 0.25\nphi_radius = 0.75\n";

Verdict gauge_obstruction() {
  const auto start = Clock::now();
  const ExperimentResult r = run_experiment(config_from(kGaugeConfig));
  Verdict v = from_checks(r, {"gauge DtN difference shrinks under refinement",
                              "control DtN difference does not shrink"});
  const double t = seconds_since(start);
  v.pass = v.pass && t < 300.0;
  v.detail += "; " + num(t) + " s (< 300 s)";
  return v;
}

Verdict recovery() {
  const ExperimentResult r = run_experiment(config_from(
      "experiment = recovery\ndim = 2\nL = 4\nN = 24\nalpha = 0.5\nmetric = conformal_bump\nbeta = 0.5\n"
      "sigma = 0.4\nr0 = 0.6\n"));
  return from_checks(r, {"gauge pair moments vanish", "gauge pair heat kernels agree",
                         "distinct pair moments do not vanish",
                         "distinct pair m=0 moment exceeds 10x threshold"});
}

Verdict representation() {
  const ExperimentResult r = run_experiment(config_from(
      "experiment = extension-check\ndim = 1\nN = 32\nalpha = 0.5\nmetric = conformal_bump\nbeta = 0.5\nr0 = 1.2\n"));
  return from_checks(r, {"calibrated representation matches Neumann solve", "normal series reproduces representation"});
}

Verdict regularity() {
  const ExperimentResult r = run_experiment(config_from(
      "experiment = regularity\ndim = 1\nN_list = 16,32,64\nalpha = 0.5\nmetric = conformal_bump\nbeta = 0.5\n"
      "r0 = 1.2\nprobe_delta = 0.4\n"));
  return from_checks(r, {"H^0.9 norm bounded under refinement"});
}

Verdict determinism() {
  const fs::path base = fs::current_path() / "determinism";
  fs::remove_all(base);
  fs::create_directories(base);
  std::vector<std::string> files;
  for (const char* name : {"operator-1d", "extension", "dtn", "recovery"}) {
    const fs::path cfg = fs::path(FRACLB_CONFIG_DIR) / (std::string(name) + ".cfg");
    for (const char* run : {"a", "b"}) {
      const std::string cmd = "FRACLB_OUTPUT_ROOT='" + (base / run).string() + "' '" + FRACLB_CLI + "' run '" +
                              cfg.string() + "' > /dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, std::string("CLI run failed for ") + name};
    }
  }
  size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(base / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), base / "a");
    std::string a = read_file(entry.path()), b = read_file(base / "b" / rel);
    if (rel.filename() == "manifest.txt") {
      auto strip = [](std::string s) { return s.substr(s.find('\n') + 1); };
      a = strip(a);
      b = strip(b);
    }
    if (a != b) return {false, rel.string() + " differs between runs"};
    ++compared;
  }
  return {compared > 0, std::to_string(compared) + " artifacts byte-identical across two CLI runs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"two-definition equivalence", two_definitions},
      {"Euclidean kernel constant", kernel_constant},
      {"stochastic completeness", stochastic},
      {"extension trace ratio", extension_ratio},
      {"local/nonlocal solver agreement", solver_agreement},
      {"DtN symmetry", dtn_symmetry},
      {"gauge obstruction", gauge_obstruction},
      {"recovery pipeline", recovery},
      {"representation formula and series", representation},
      {"regularity probe", regularity},
      {"determinism", determinism},
  };
  int failures = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << "criterion " << k + 1 << " " << (v.pass ? "PASS" : "FAIL") << " " << criteria[k].first << ": "
              << v.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria PASS" : std::to_string(failures) + " criteria FAIL") << std::endl;
  return failures == 0 ? 0 : 1;
}
