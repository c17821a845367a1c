#include "crab_cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

namespace crab::cli {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kCommands{"validate", "lift-check", "constants", "discriminant",
                                      "chords",   "spectrum",   "growth",    "oracle",
                                      "probe",    "descend"};

const std::set<std::string> kSections{"model",   "isotopy",   "run",     "tolerances", "seeding",
                                      "chords",  "profile",   "descend", "output"};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

double to_double(const std::string& path, const std::string& raw) {
  const std::string s = trim(raw);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    bad(path, "expected a number, got '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) bad(path, "expected a finite number, got '" + s + "'");
  return v;
}

long long to_integer(const std::string& path, const std::string& raw) {
  const std::string s = trim(raw);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    bad(path, "expected an integer, got '" + s + "'");
  }
  if (used != s.size()) bad(path, "expected an integer, got '" + s + "'");
  return v;
}

std::vector<double> to_list(const std::string& path, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(path, item));
  if (out.empty()) bad(path, "expected a comma-separated list of numbers");
  return out;
}

/// Reader that tracks which keys were consumed so leftovers can be rejected.
class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) {
    const std::string path = section.empty() ? key : section + "." + key;
    used_.insert(path);
    const auto node = tree_.get_child_optional(pt::ptree::path_type(path, '.'));
    if (!node) return std::nullopt;
    return trim(node->data());
  }

  static std::string label(const std::string& section, const std::string& key) {
    return section.empty() ? key : "[" + section + "]." + key;
  }

  void number(const std::string& s, const std::string& k, double& out) {
    if (auto v = raw(s, k)) out = to_double(label(s, k), *v);
  }
  void positive(const std::string& s, const std::string& k, double& out) {
    number(s, k, out);
    if (!(out > 0.0)) bad(label(s, k), "must be positive");
  }
  void integer(const std::string& s, const std::string& k, int& out, long long lo, long long hi) {
    if (auto v = raw(s, k)) {
      const long long x = to_integer(label(s, k), *v);
      if (x < lo || x > hi)
        bad(label(s, k), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      out = static_cast<int>(x);
    }
  }
  void list(const std::string& s, const std::string& k, std::vector<double>& out) {
    if (auto v = raw(s, k)) out = to_list(label(s, k), *v);
  }
  void text(const std::string& s, const std::string& k, std::string& out) {
    if (auto v = raw(s, k)) out = *v;
  }

  void reject_unknown() const {
    for (const auto& [section, node] : tree_) {
      if (node.empty()) {
        if (!used_.count(section) && !kSections.count(section)) bad(section, "unknown key");
        continue;
      }
      if (!kSections.count(section)) bad("[" + section + "]", "unknown section");
      for (const auto& [key, leaf] : node) {
        if (!used_.count(section + "." + key)) bad("[" + section + "]." + key, "unknown key");
      }
    }
  }

 private:
  const pt::ptree& tree_;
  std::set<std::string> used_;
};

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: line " + std::to_string(e.line()) + ": " + e.message());
  }
  Reader r(tree);
  RunConfig c;

  const auto schema = r.raw("", "schema");
  if (!schema) bad("schema", "missing (expected '" + std::string(kSchema) + "')");
  if (*schema != kSchema) bad("schema", "unsupported '" + *schema + "' (expected '" + kSchema + "')");
  if (auto v = r.raw("", "seed")) {
    const long long s = to_integer("seed", *v);
    if (s < 0) bad("seed", "must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  }

  // [run]
  r.text("run", "command", c.command);
  if (c.command.empty()) bad("[run].command", "missing");
  if (!kCommands.count(c.command)) bad("[run].command", "unknown command '" + c.command + "'");
  r.integer("run", "threads", c.threads, 1, 256);
  std::vector<double> window{c.window_lo, c.window_hi};
  r.list("run", "window", window);
  if (window.size() != 2) bad("[run].window", "expected two numbers 'lo, hi'");
  if (!(window[0] < window[1])) bad("[run].window", "must satisfy lo < hi");
  c.window_lo = window[0];
  c.window_hi = window[1];
  r.list("run", "m_list", c.m_list);
  for (std::size_t i = 0; i < c.m_list.size(); ++i) {
    if (!(c.m_list[i] > 0.0)) bad("[run].m_list", "values must be positive");
    if (i > 0 && !(c.m_list[i] > c.m_list[i - 1])) bad("[run].m_list", "must be increasing");
  }
  if (auto v = r.raw("run", "a")) {
    c.oracle_a = to_double("[run].a", *v);
    if (!(c.oracle_a > 0.0)) bad("[run].a", "must be positive");
  }
  r.integer("run", "samples", c.samples, 1, 10'000'000);
  r.text("run", "growth_source", c.growth_source);
  if (c.growth_source != "discriminant" && c.growth_source != "chords")
    bad("[run].growth_source", "expected 'discriminant' or 'chords'");

  // [model]
  r.text("model", "name", c.model.name);
  if (c.model.name == "flat-torus") {
    r.integer("model", "dim", c.model.torus_dim, 1, 3);
  } else if (c.model.name == "ellipsoid") {
    r.list("model", "radii", c.model.radii);
    for (double a : c.model.radii)
      if (!(a > 0.0)) bad("[model].radii", "radii must be positive");
  } else if (c.model.name != "circle") {
    bad("[model].name", "unknown model '" + c.model.name + "' (circle, flat-torus, ellipsoid)");
  }

  // [isotopy]
  r.text("isotopy", "kind", c.isotopy.kind);
  if (c.isotopy.kind == "constant") {
    r.number("isotopy", "value", c.isotopy.value);
  } else if (c.isotopy.kind == "sinusoidal") {
    auto& s = c.isotopy.sinusoidal;
    r.number("isotopy", "base", s.base);
    r.number("isotopy", "amplitude", s.amplitude);
    r.number("isotopy", "kx", s.kx);
    r.number("isotopy", "kt", s.kt);
    r.number("isotopy", "phase", s.phase);
    r.integer("isotopy", "coordinate", s.coordinate, 0, 64);
  } else if (c.isotopy.kind == "kinetic") {
    if (c.model.name != "flat-torus") bad("[isotopy].kind", "'kinetic' needs the flat-torus model");
    c.isotopy.kinetic.weights.assign(static_cast<std::size_t>(c.model.torus_dim), 2.0);
    r.list("isotopy", "weights", c.isotopy.kinetic.weights);
    r.number("isotopy", "modulation", c.isotopy.kinetic.modulation);
    if (c.isotopy.kinetic.weights.size() != static_cast<std::size_t>(c.model.torus_dim))
      bad("[isotopy].weights", "need one weight per torus dimension");
  } else {
    bad("[isotopy].kind", "unknown built-in '" + c.isotopy.kind + "' (constant, sinusoidal, kinetic)");
  }

  // [tolerances]
  r.positive("tolerances", "newton", c.newton.tol);
  c.search.tol = c.newton.tol;
  c.chord_search.tol = c.newton.tol;
  r.positive("tolerances", "search", c.search.tol);
  c.chord_search.tol = c.search.tol;
  r.positive("tolerances", "integrator", c.newton.integrator_tol);
  r.positive("tolerances", "descend", c.descend.tol);
  r.positive("tolerances", "cluster", c.search.cluster_tol);
  r.positive("tolerances", "dedup", c.search.dedup_tol);
  r.positive("tolerances", "nondegeneracy", c.search.nondegeneracy_tol);

  // [seeding]
  r.integer("seeding", "seeds_per_unit", c.search.seeds_per_unit, 1, 4096);
  c.chord_search.seeds_per_unit = c.search.seeds_per_unit;
  r.integer("seeding", "points_per_dim", c.search.points_per_dim, 1, 1024);
  r.positive("seeding", "candidate_threshold", c.search.candidate_threshold);
  c.chord_search.candidate_threshold = c.search.candidate_threshold;
  r.integer("seeding", "grid_points", c.path_grid.points_per_dim, 1, 4096);
  r.integer("seeding", "grid_times", c.path_grid.time_samples, 1, 4096);
  c.constants.bounds_grid = c.path_grid;

  // [chords]
  r.list("chords", "q0", c.q0);
  r.list("chords", "q1", c.q1);
  r.integer("chords", "min_directions", c.chord_search.min_directions, 2, 1'000'000);

  // [profile]
  r.number("profile", "kappa_factor", c.kappa_factor);
  r.number("profile", "R_factor", c.R_factor);
  if (c.kappa_factor < 1.0) bad("[profile].kappa_factor", "must be at least 1");
  if (c.R_factor < 1.0) bad("[profile].R_factor", "must be at least 1");
  r.integer("profile", "c_points", c.constants.c_grid.points_per_dim, 1, 4096);
  r.integer("profile", "c_times", c.constants.c_grid.time_samples, 1, 4096);
  r.integer("profile", "c_etas", c.constants.c_grid.eta_samples, 2, 4096);

  // [descend]
  std::string mode = "residual";
  r.text("descend", "mode", mode);
  if (mode == "residual") {
    c.descend.mode = DescentMode::Residual;
  } else if (mode == "action") {
    c.descend.mode = DescentMode::Action;
  } else {
    bad("[descend].mode", "expected 'residual' or 'action'");
  }
  r.integer("descend", "max_steps", c.descend.max_steps, 0, 1'000'000);
  r.integer("descend", "nodes", c.newton.nodes, 16, 1 << 20);
  r.number("descend", "eta", c.descend_eta);
  r.number("descend", "perturbation", c.perturbation);
  if (c.perturbation < 0.0) bad("[descend].perturbation", "must be nonnegative");
  r.integer("descend", "probe_samples", c.probe.samples, 1, 1'000'000);

  // [output]
  std::string dir;
  r.text("output", "dir", dir);
  if (!dir.empty()) c.out_dir = dir;

  r.reject_unknown();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ModelPtr build_model(const ModelConfig& m) {
  if (m.name == "circle") return make_circle();
  if (m.name == "flat-torus") return make_flat_torus(m.torus_dim);
  if (m.name == "ellipsoid") return make_ellipsoid(m.radii);
  throw ConfigError("[model].name: unknown model '" + m.name + "'");
}

IsotopySpec build_isotopy(const IsotopyConfig& c, const ContactModel& model) {
  if (c.kind == "constant") return constant_hamiltonian(c.value);
  if (c.kind == "sinusoidal") {
    if (c.sinusoidal.coordinate >= model.point_size())
      throw ConfigError("[isotopy].coordinate: model has only " + std::to_string(model.point_size()) +
                        " coordinates");
    return sinusoidal_hamiltonian(c.sinusoidal);
  }
  if (c.kind == "kinetic") {
    if (model.kind() != ModelKind::FlatTorusUnitCotangent)
      throw ConfigError("[isotopy].kind: 'kinetic' needs the flat-torus model");
    return kinetic_energy_hamiltonian(model.point_size() / 2, c.kinetic);
  }
  throw ConfigError("[isotopy].kind: unknown built-in '" + c.kind + "'");
}

}  // namespace crab::cli
