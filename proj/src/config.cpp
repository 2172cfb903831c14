#include "fraclb/config.hpp"

#include "fraclb/errors.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace fraclb {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "experiment", "dim", "L", "N", "N_list", "alpha",
      "metric", "beta", "sigma", "r0", "center_x", "center_y",
      "omega_shape", "omega_center_x", "omega_center_y", "omega_radius", "omega_inner_radius",
      "w1_center_x", "w1_center_y", "w1_radius", "w2_center_x", "w2_center_y", "w2_radius",
      "allow_overlap", "t_min", "t_max", "nodes", "slack", "moments", "moment_floor",
      "threshold_safety", "phi_strength", "phi_radius", "extension_levels", "extension_height",
      "probe_delta", "seed", "random_vectors", "tol_eigen", "tol_self_adjoint", "tol_stochastic",
      "tol_balakrishnan", "tol_trace", "tol_extension", "tol_symmetry", "tol_representation",
      "tol_series", "tol_gauge_ratio", "tol_regularity_ratio", "output_dir"};
  return keys;
}

class Reader {
 public:
  Reader(std::map<std::string, std::pair<std::string, int>> entries, std::string source)
      : entries_(std::move(entries)), source_(std::move(source)) {}

  std::string text(const std::string& key, const std::string& fallback) {
    auto it = entries_.find(key);
    std::string v = it == entries_.end() ? fallback : it->second.first;
    line_ = it == entries_.end() ? 0 : it->second.second;
    effective_.emplace_back(key, v);
    return v;
  }

  double number(const std::string& key, double fallback) {
    const std::string v = text(key, format_double(fallback));
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) fail(key + ": not a number '" + v + "'");
    return out;
  }

  long integer(const std::string& key, long fallback) {
    const std::string v = text(key, std::to_string(fallback));
    long out = 0;
    int base = 10;
    const char* begin = v.data();
    if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
      base = 16;
      begin += 2;
    }
    auto [p, ec] = std::from_chars(begin, v.data() + v.size(), out, base);
    if (ec != std::errc() || p != v.data() + v.size()) fail(key + ": not an integer '" + v + "'");
    return out;
  }

  bool flag(const std::string& key, bool fallback) {
    const std::string v = text(key, fallback ? "true" : "false");
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(key + ": expected true or false");
  }

  [[noreturn]] void fail(const std::string& message) const {
    std::string where = line_ > 0 ? source_ + ":" + std::to_string(line_) + ": " : source_ + ": ";
    throw Error("config", where + message);
  }

  std::vector<std::pair<std::string, std::string>> take_effective() { return std::move(effective_); }

 private:
  std::map<std::string, std::pair<std::string, int>> entries_;
  std::string source_;
  int line_ = 0;
  std::vector<std::pair<std::string, std::string>> effective_;
};

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> catalog = {
      {"operator-check", "Laplacian, spectrum, heat semigroup, both fractional powers, jump kernel",
       "dim L N alpha metric [beta sigma r0 center_x center_y] [t_min t_max nodes]"},
      {"extension-check", "Bessel extension, Neumann trace constant, extension solver, representation series",
       "dim L N alpha [omega_* w1_* w2_*] [extension_levels extension_height]"},
      {"dtn", "exterior Dirichlet solve, partial and full DtN maps, pairing symmetry",
       "dim L N alpha metric [omega_* w1_* w2_*] random_vectors"},
      {"gauge", "DtN maps of a metric and its radial-squash pullback at N and 2N",
       "dim L N alpha metric beta sigma r0 phi_strength phi_radius [omega_* w1_* w2_*]"},
      {"recovery", "moment tables and heat-kernel samples for gauge and distinct metric pairs",
       "dim L N alpha metric beta sigma r0 phi_strength phi_radius moments moment_floor"},
      {"regularity", "Sobolev norms of exterior solutions under refinement",
       "dim L N_list alpha probe_delta [omega_* w1_*]"},
  };
  return catalog;
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  std::map<std::string, std::pair<std::string, int>> entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(number) + ": ";
    if (eq == std::string::npos) throw Error("config", where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw Error("config", where + "expected 'key = value'");
    bool known = false;
    for (const auto& k : known_keys()) known = known || k == key;
    if (!known) throw Error("config", where + "unknown key '" + key + "'");
    if (!entries.emplace(key, std::make_pair(value, number)).second)
      throw Error("config", where + "duplicate key '" + key + "'");
  }

  Reader r(std::move(entries), source);
  RunConfig c;
  c.experiment = r.text("experiment", "");
  bool known = false;
  for (const auto& e : experiment_catalog()) known = known || c.experiment == e.name;
  if (!known) r.fail("unknown experiment '" + c.experiment + "'");

  c.dim = int(r.integer("dim", 1));
  if (c.dim != 1 && c.dim != 2) r.fail("dim must be 1 or 2");
  c.side_length = r.number("L", c.dim == 1 ? 8.0 : 4.0);
  if (!(c.side_length > 0.0)) r.fail("L must be positive");
  c.points = int(r.integer("N", c.dim == 1 ? 32 : 24));
  if (c.points < 4 || c.points % 2) r.fail("N must be even and at least 4");
  {
    std::string list = r.text("N_list", "16,32,64");
    c.point_list.clear();
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      int v = 0;
      auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || p != item.data() + item.size() || v < 4 || v % 2)
        r.fail("N_list entries must be even integers >= 4");
      c.point_list.push_back(v);
    }
  }
  c.alpha = r.number("alpha", 0.5);
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) r.fail("alpha outside (0,1)");

  const double L = c.side_length;
  const double mid = L / 2.0;
  const std::string kind = r.text("metric", "identity");
  const double beta = r.number("beta", 0.5);
  const std::string sigma_text = r.text("sigma", "none");
  std::optional<double> sigma;
  if (sigma_text != "none") {
    double s = 0.0;
    auto [p, ec] = std::from_chars(sigma_text.data(), sigma_text.data() + sigma_text.size(), s);
    if (ec != std::errc() || p != sigma_text.data() + sigma_text.size() || !(s > 0.0))
      r.fail("sigma must be a positive number or 'none'");
    sigma = s;
  }
  const double r0 = r.number("r0", 0.15 * L);
  const Point center(r.number("center_x", mid), c.dim == 2 ? r.number("center_y", mid) : 0.0);
  if (kind == "identity")
    c.metric = MetricProfile::identity();
  else if (kind == "conformal_bump")
    c.metric = MetricProfile::conformal_bump(beta, sigma, r0, center);
  else if (kind == "anisotropic_bump")
    c.metric = MetricProfile::anisotropic_bump(beta, sigma, r0, center);
  else
    r.fail("metric must be identity, conformal_bump or anisotropic_bump");
  if (kind != "identity") {
    if (!(beta > -1.0)) r.fail("beta <= -1 loses ellipticity");
    if (!(r0 > 0.0 && r0 < L / 2.0)) r.fail("r0 must lie in (0, L/2)");
  }

  auto point = [&](const std::string& prefix, double x, double y) {
    return Point(r.number(prefix + "_center_x", x), c.dim == 2 ? r.number(prefix + "_center_y", y) : 0.0);
  };
  const std::string omega_shape = r.text("omega_shape", "ball");
  const Point oc = point("omega", mid, mid);
  const double orad = r.number("omega_radius", (c.dim == 1 ? 0.15 : 0.2) * L);
  if (omega_shape == "ball") {
    c.omega = Shape::ball(oc, orad);
  } else if (omega_shape == "annulus") {
    c.omega = Shape::annulus(oc, r.number("omega_inner_radius", 0.1 * L), orad);
    if (!(c.omega.inner_radius < orad)) r.fail("omega_inner_radius must be below omega_radius");
  } else {
    r.fail("omega_shape must be ball or annulus");
  }
  if (!(orad > 0.0)) r.fail("omega_radius must be positive");
  const Point c1 = point("w1", mid - 0.35 * L, mid);
  c.w1 = Shape::ball(c1, r.number("w1_radius", (c.dim == 1 ? 0.0875 : 0.075) * L));
  const Point c2 = point("w2", mid + 0.35 * L, mid);
  c.w2 = Shape::ball(c2, r.number("w2_radius", (c.dim == 1 ? 0.0875 : 0.075) * L));
  if (!(c.w1.outer_radius > 0.0 && c.w2.outer_radius > 0.0)) r.fail("W radii must be positive");
  c.allow_overlap = r.flag("allow_overlap", false);

  c.quad.t_min = r.number("t_min", 1e-8);
  c.quad.t_max = r.number("t_max", 1e4);
  c.quad.nodes = int(r.integer("nodes", 400));
  if (!(c.quad.t_min > 0.0 && c.quad.t_max > c.quad.t_min)) r.fail("need 0 < t_min < t_max");
  if (c.quad.nodes < 3) r.fail("nodes must be at least 3");
  c.slack = r.number("slack", 10.0);
  if (!(c.slack >= 1.0)) r.fail("slack must be at least 1");
  c.moments = int(r.integer("moments", 8));
  if (c.moments < 1) r.fail("moments must be positive");
  c.moment_floor = r.number("moment_floor", 1e-6);
  if (!(c.moment_floor > 0.0 && c.moment_floor < 1.0)) r.fail("moment_floor must lie in (0,1)");
  c.threshold_safety = r.number("threshold_safety", 4.0);
  if (!(c.threshold_safety >= 1.0)) r.fail("threshold_safety must be at least 1");
  c.phi_strength = r.number("phi_strength", 0.25);
  c.phi_radius = r.number("phi_radius", 0.75 * orad / 0.8);
  if (!(c.phi_radius > 0.0 && c.phi_radius <= orad)) r.fail("phi_radius must lie in (0, omega_radius]");
  c.extension_levels = int(r.integer("extension_levels", 96));
  if (c.extension_levels < 2) r.fail("extension_levels must be at least 2");
  c.extension_height = r.number("extension_height", 8.0);
  if (!(c.extension_height >= 5.0)) r.fail("extension_height must be at least 5");
  c.probe_delta = r.number("probe_delta", 0.4);
  if (!(c.probe_delta > 0.0 && c.probe_delta < 0.5)) r.fail("probe_delta must lie in (0, 1/2)");
  c.seed = std::uint64_t(r.integer("seed", 0x5EED));
  c.random_vectors = int(r.integer("random_vectors", 20));
  if (c.random_vectors < 1) r.fail("random_vectors must be positive");

  auto tolerance = [&](const std::string& key, double& field) {
    field = r.number(key, field);
    if (!(field > 0.0)) r.fail(key + " must be positive");
  };
  tolerance("tol_eigen", c.tol.eigen);
  tolerance("tol_self_adjoint", c.tol.self_adjoint);
  tolerance("tol_stochastic", c.tol.stochastic);
  tolerance("tol_balakrishnan", c.tol.balakrishnan);
  tolerance("tol_trace", c.tol.trace);
  tolerance("tol_extension", c.tol.extension);
  tolerance("tol_symmetry", c.tol.symmetry);
  tolerance("tol_representation", c.tol.representation);
  tolerance("tol_series", c.tol.series);
  tolerance("tol_gauge_ratio", c.tol.gauge_ratio);
  tolerance("tol_regularity_ratio", c.tol.regularity_ratio);
  c.output_dir = r.text("output_dir", "fraclb-out");
  c.effective = r.take_effective();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config", "cannot read " + path);
  return parse_config(in, path);
}

}  // namespace fraclb
