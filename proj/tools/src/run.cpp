#include "crab_cli/run.hpp"

#include "crab/action.hpp"
#include "crab/cutoff.hpp"
#include "crab/discriminant.hpp"
#include "crab/spectrum.hpp"
#include "crab/symplectization.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

namespace crab::cli {

namespace {

using json = nlohmann::ordered_json;

std::string num(double v) { return fmt::format("{:.15g}", v); }

class Table {
 public:
  Table(std::string title, std::string units, std::vector<std::string> columns)
      : title_(std::move(title)), units_(std::move(units)), columns_(std::move(columns)) {}

  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  std::string str() const {
    std::string out = "# " + title_ + "\n# units: " + units_ + "\n";
    out += fmt::format("{}\n", fmt::join(columns_, ","));
    for (const auto& r : rows_) out += fmt::format("{}\n", fmt::join(r, ","));
    return out;
  }

 private:
  std::string title_;
  std::string units_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

std::vector<std::string> coord_cells(const Vec& x) {
  std::vector<std::string> c;
  for (Eigen::Index k = 0; k < x.size(); ++k) c.push_back(num(x[k]));
  return c;
}

std::vector<std::string> prefixed(const std::string& prefix, const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (const auto& n : names) out.push_back(prefix + n);
  return out;
}

json profile_json(const CutoffProfile& p) {
  return {{"kappa", p.kappa}, {"R", p.R}, {"m", p.m}, {"M", p.M}, {"C", p.C}, {"R_kappa", p.outer()}};
}

json constants_json(const WindowConstants& w) {
  return {{"a", w.a},   {"b", w.b},           {"C", w.C},  {"m", w.m},
          {"M", w.M},   {"kappa0", w.kappa0}, {"R0", w.R0}};
}

struct Context {
  const RunConfig& cfg;
  ModelPtr model;
  IsotopySpec spec;
  json results = json::object();
  std::vector<std::pair<std::string, std::string>> tables;

  void table(const std::string& name, const Table& t) { tables.emplace_back(name, t.str()); }
};

/// Sets kValidationFailure with a message when positivity or periodicity fails.
RunOutcome cmd_validate(Context& ctx) {
  const PathReport rep = validate_path(*ctx.model, ctx.spec, ctx.cfg.path_grid);
  Table t("path validation", "h dimensionless; distances in chart units", {"check", "value", "pass"});
  t.row({"min_h", num(rep.min_h), rep.positive ? "1" : "0"});
  t.row({"max_h", num(rep.max_h), "1"});
  t.row({"max_twist_violation", num(rep.max_violation), rep.twisted_periodic ? "1" : "0"});
  t.row({"periodicity_defect", num(rep.periodicity_defect), rep.periodicity_defect <= 1e-9 ? "1" : "0"});
  ctx.table("validate.csv", t);
  ctx.results = {{"positive", rep.positive},
                 {"twisted_periodic", rep.twisted_periodic},
                 {"max_violation", rep.max_violation},
                 {"min_h", rep.min_h},
                 {"max_h", rep.max_h},
                 {"periodicity_defect", rep.periodicity_defect}};
  if (!rep.positive) return {kValidationFailure, "validation failed: positivity"};
  if (!rep.twisted_periodic) return {kValidationFailure, "validation failed: twisted periodicity"};
  return {};
}

WindowConstants window_constants(Context& ctx) {
  return admissible_constants(*ctx.model, ctx.spec, ctx.cfg.window_lo, ctx.cfg.window_hi,
                              ctx.cfg.constants);
}

RunOutcome cmd_constants(Context& ctx) {
  const WindowConstants w = window_constants(ctx);
  Table t("admissible constants for the window", "all dimensionless", {"name", "value"});
  ctx.results = constants_json(w);
  for (const auto& [k, v] : ctx.results.items()) t.row({k, num(v.get<double>())});
  ctx.table("constants.csv", t);
  return {};
}

RunOutcome cmd_lift_check(Context& ctx) {
  const ContactModel& model = *ctx.model;
  const auto n = static_cast<std::size_t>(ctx.cfg.samples);
  const std::vector<ConeSample> lift_samples =
      random_cone_samples(model, n, 0.5, 5.0, 0.0, 1.0, ctx.cfg.seed);
  double lift_max = 0.0;
  for (const ConeSample& s : lift_samples)
    lift_max = std::max(lift_max, lift_pullback_defect(model, ctx.spec, s.t, model.from_cone(s.z)));

  const WindowConstants w = window_constants(ctx);
  const CutoffProfile prof = make_profile(w, ctx.cfg.kappa_factor, ctx.cfg.R_factor);
  const CutoffHamiltonian F(model, ctx.spec, prof);
  const std::vector<ConeSample> plateau =
      random_cone_samples(model, n, 2.0, prof.outer(), 0.0, 1.0, ctx.cfg.seed + 1);
  const double plateau_max = verify_liouville_identity(model, F, prof.kappa, plateau);
  std::vector<ConeSample> ramp = random_cone_samples(model, n, 1.0, 2.0, 0.0, 1.0, ctx.cfg.seed + 2);
  const std::vector<ConeSample> outer =
      random_cone_samples(model, n, prof.outer(), prof.outer() + 1.0, 0.0, 1.0, ctx.cfg.seed + 3);
  ramp.insert(ramp.end(), outer.begin(), outer.end());
  double ramp_identity = 0.0;
  double ramp_min = std::numeric_limits<double>::infinity();
  for (const ConeSample& s : ramp) {
    const double d = liouville_defect(model, F, prof.kappa, s);
    const ConePoint p = model.from_cone(s.z);
    const double h = ctx.spec.value(model.normalize(p.x), s.t);
    const double expected = p.r * p.r * prof.beta_prime(p.r) * (h - prof.frak_h(p.r));
    ramp_identity = std::max(ramp_identity, std::abs(d - expected));
    ramp_min = std::min(ramp_min, d);
  }
  Table t("lift and Liouville identities", "defects in chart units of the Liouville form",
          {"check", "samples", "max_defect", "bound", "pass"});
  t.row({"lift_preserves_lambda", std::to_string(n), num(lift_max), "1e-06", lift_max <= 1e-6 ? "1" : "0"});
  t.row({"liouville_plateau", std::to_string(n), num(plateau_max), "1e-06", plateau_max <= 1e-6 ? "1" : "0"});
  t.row({"liouville_ramp_identity", std::to_string(2 * n), num(ramp_identity), "1e-06",
         ramp_identity <= 1e-6 ? "1" : "0"});
  t.row({"liouville_ramp_min", std::to_string(2 * n), num(ramp_min), "-1e-10", ramp_min >= -1e-10 ? "1" : "0"});
  ctx.table("lift_check.csv", t);
  ctx.results = {{"lift_max_defect", lift_max},
                 {"liouville_plateau_max", plateau_max},
                 {"liouville_ramp_identity_max", ramp_identity},
                 {"liouville_ramp_min", ramp_min},
                 {"profile", profile_json(prof)}};
  return {};
}

void component_table(Context& ctx, const std::string& name, const std::vector<Component>& comps) {
  std::vector<std::string> cols{"component_id", "eta", "action"};
  for (const auto& c : ctx.model->coordinate_names()) cols.push_back(c);
  for (const auto& c : std::vector<std::string>{"multiplicity", "nondegenerate", "residual_x", "residual_rho"})
    cols.push_back(c);
  Table t("discriminant components (representative point each)",
          "eta and action dimensionless; coordinates in chart units", cols);
  for (const Component& c : comps) {
    std::vector<std::string> row{std::to_string(c.id), num(c.eta), num(c.representative.action)};
    for (auto& s : coord_cells(c.representative.x)) row.push_back(s);
    row.push_back(std::to_string(c.multiplicity));
    row.push_back(c.nondegenerate ? "1" : "0");
    row.push_back(num(c.representative.residual_x));
    row.push_back(num(c.representative.residual_rho));
    t.row(row);
  }
  ctx.table(name, t);
}

SearchOptions search_options(const Context& ctx) {
  SearchOptions o = ctx.cfg.search;
  o.threads = ctx.cfg.threads;
  return o;
}

ChordOptions chord_options(const Context& ctx) {
  ChordOptions o = ctx.cfg.chord_search;
  o.threads = ctx.cfg.threads;
  return o;
}

RunOutcome cmd_discriminant(Context& ctx) {
  const DiscriminantResult r =
      find_discriminant(*ctx.model, ctx.spec, ctx.cfg.window_lo, ctx.cfg.window_hi, search_options(ctx));
  component_table(ctx, "discriminant.csv", r.components);
  std::vector<std::string> cols{"component_id", "eta"};
  for (const auto& c : ctx.model->coordinate_names()) cols.push_back(c);
  cols.push_back("residual_x");
  cols.push_back("residual_rho");
  cols.push_back("sigma_min");
  Table pts("all refined discriminant points", "eta dimensionless; coordinates in chart units", cols);
  for (const DiscriminantPoint& p : r.points) {
    std::vector<std::string> row{std::to_string(p.component_id), num(p.eta)};
    for (auto& s : coord_cells(p.x)) row.push_back(s);
    row.push_back(num(p.residual_x));
    row.push_back(num(p.residual_rho));
    row.push_back(num(p.sigma_min));
    pts.row(row);
  }
  ctx.table("discriminant_points.csv", pts);
  json etas = json::array();
  for (const Component& c : r.components) etas.push_back(c.eta);
  ctx.results = {{"components", r.components.size()},
                 {"points", r.points.size()},
                 {"eta_values", etas},
                 {"nonresonant", check_nonresonant(r.points)},
                 {"seeds", r.stats.seeds},
                 {"candidates", r.stats.candidates},
                 {"converged", r.stats.converged}};
  return {};
}

std::pair<Vec, Vec> fibres(const Context& ctx) {
  const int n = ctx.model->point_size() / 2;
  if (ctx.model->kind() != ModelKind::FlatTorusUnitCotangent)
    throw ConfigError("[model].name: chords need the flat-torus model");
  if (static_cast<int>(ctx.cfg.q0.size()) != n) throw ConfigError("[chords].q0: need one entry per torus dimension");
  if (static_cast<int>(ctx.cfg.q1.size()) != n) throw ConfigError("[chords].q1: need one entry per torus dimension");
  return {Eigen::Map<const Vec>(ctx.cfg.q0.data(), n), Eigen::Map<const Vec>(ctx.cfg.q1.data(), n)};
}

RunOutcome cmd_chords(Context& ctx) {
  const auto [q0, q1] = fibres(ctx);
  const auto chords =
      find_chords(*ctx.model, ctx.spec, q0, q1, ctx.cfg.window_lo, ctx.cfg.window_hi, chord_options(ctx));
  std::vector<std::string> cols{"index", "eta", "action"};
  for (const auto& c : prefixed("start_", ctx.model->coordinate_names())) cols.push_back(c);
  for (const auto& c : prefixed("end_", ctx.model->coordinate_names())) cols.push_back(c);
  cols.push_back("residual");
  Table t("Legendrian chords between unit fibres", "eta and action dimensionless (chord length for h = 1); coordinates in chart units", cols);
  json etas = json::array();
  for (std::size_t i = 0; i < chords.size(); ++i) {
    const auto& c = chords[i];
    std::vector<std::string> row{std::to_string(i), num(c.eta), num(c.action)};
    for (auto& s : coord_cells(c.x)) row.push_back(s);
    for (auto& s : coord_cells(c.endpoint)) row.push_back(s);
    row.push_back(num(c.residual));
    t.row(row);
    etas.push_back(c.eta);
  }
  ctx.table("chords.csv", t);
  ctx.results = {{"chords", chords.size()}, {"eta_values", etas}};
  return {};
}

json window_json(const SpectrumWindow& w) {
  json levels = json::array();
  for (const auto& [eta, mult] : w.values) levels.push_back({{"eta", eta}, {"multiplicity", mult}});
  return {{"n", w.n}, {"m", w.m}, {"count", w.count}, {"dim_proxy", w.dim_proxy}, {"levels", levels}};
}

RunOutcome cmd_spectrum(Context& ctx) {
  const SpectrumWindow w =
      spectrum(*ctx.model, ctx.spec, ctx.cfg.window_lo, ctx.cfg.window_hi, search_options(ctx));
  Table t("filtered action spectrum (n, m]", "eta dimensionless; multiplicity counts components",
          {"eta", "multiplicity"});
  for (const auto& [eta, mult] : w.values) t.row({num(eta), std::to_string(mult)});
  ctx.table("spectrum.csv", t);
  component_table(ctx, "spectrum_components.csv", w.components);
  ctx.results = window_json(w);
  ctx.results["dim_proxy_note"] = "proxy: 2 per Morse-Bott component, 1 per nondegenerate one";
  return {};
}

RunOutcome cmd_growth(Context& ctx) {
  GrowthReport g;
  if (ctx.cfg.growth_source == "chords") {
    const auto [q0, q1] = fibres(ctx);
    g = chord_growth_rate(*ctx.model, ctx.spec, q0, q1, ctx.cfg.m_list, chord_options(ctx));
  } else {
    g = growth_rate(*ctx.model, ctx.spec, ctx.cfg.m_list, search_options(ctx));
  }
  Table t("spectral count proxy for mu(m)", "m dimensionless action bound; mu_proxy is a count",
          {"m", "mu_proxy"});
  std::string plot = "# m mu_proxy\n";
  for (std::size_t i = 0; i < g.m.size(); ++i) {
    t.row({num(g.m[i]), std::to_string(g.mu[i])});
    plot += fmt::format("{} {}\n", num(g.m[i]), g.mu[i]);
  }
  ctx.table("growth.csv", t);
  ctx.tables.emplace_back("growth_plot.dat", plot);
  ctx.results = {{"source", ctx.cfg.growth_source},
                 {"m", g.m},
                 {"mu_proxy", g.mu},
                 {"exponent", g.undefined ? json(nullptr) : json(g.exponent)},
                 {"classification", to_string(g.classification)},
                 {"undefined", g.undefined}};
  return {};
}

RunOutcome cmd_oracle(Context& ctx) {
  double a = ctx.cfg.oracle_a;
  if (a == 0.0) {
    if (ctx.model->kind() != ModelKind::Circle || ctx.cfg.isotopy.kind != "constant")
      throw ConfigError("[run].a: required unless the isotopy is a constant on the circle");
    a = ctx.cfg.isotopy.value;
  }
  const CircleOracle o = circle_oracle(a, ctx.cfg.window_lo, ctx.cfg.window_hi);
  Table t("circle rotation oracle: eta = k/a in (n, m]", "eta dimensionless", {"k", "eta"});
  for (double eta : o.eta_values) t.row({std::to_string(std::lround(eta * a)), num(eta)});
  ctx.table("oracle.csv", t);
  ctx.results = {{"a", o.a},
                 {"n", o.n},
                 {"m", o.m},
                 {"eta_values", o.eta_values},
                 {"component_count", o.component_count},
                 {"bruteforce_count", o.bruteforce_count},
                 {"formula_value", o.formula_value},
                 {"rational_warning", o.rational_warning},
                 {"note", o.note}};
  return {};
}

RunOutcome cmd_probe(Context& ctx) {
  const ContactModel& model = *ctx.model;
  const WindowConstants w = window_constants(ctx);
  const CutoffProfile prof = make_profile(w, ctx.cfg.kappa_factor, ctx.cfg.R_factor);
  const RabinowitzFunctional A(model, ctx.spec, prof);
  const DiscriminantResult r =
      find_discriminant(model, ctx.spec, ctx.cfg.window_lo, ctx.cfg.window_hi, search_options(ctx));
  Table t("fundamental-lemma probe per component",
          "eta, action, epsilon dimensionless; r in radial units",
          {"component_id", "eta", "action", "converged", "epsilon", "r_min", "r_max", "samples"});
  json rows = json::array();
  double eps_min = 1.0;
  for (const Component& c : r.components) {
    if (c.eta == 0.0) continue;
    const Loop guess = loop_from_discriminant(A, c.representative.x, c.eta, ctx.cfg.newton.nodes);
    const RefineResult rr = refine_newton(A, guess, ctx.cfg.newton);
    ProbeOptions po = ctx.cfg.probe;
    po.seed = ctx.cfg.seed + static_cast<std::uint64_t>(c.id);
    const ProbeResult pr = fundamental_lemma_probe(A, rr.loop, po);
    eps_min = std::min(eps_min, pr.epsilon);
    t.row({std::to_string(c.id), num(rr.loop.eta), num(rr.action), rr.converged ? "1" : "0",
           num(pr.epsilon), num(rr.r_min), num(rr.r_max), std::to_string(pr.samples)});
    rows.push_back({{"component_id", c.id}, {"eta", rr.loop.eta}, {"epsilon", pr.epsilon}});
  }
  ctx.table("probe.csv", t);
  ctx.results = {{"constants", constants_json(w)},
                 {"profile", profile_json(prof)},
                 {"min_epsilon", eps_min},
                 {"components", rows}};
  return {};
}

RunOutcome cmd_descend(Context& ctx) {
  const ContactModel& model = *ctx.model;
  const WindowConstants w = window_constants(ctx);
  const CutoffProfile prof = make_profile(w, ctx.cfg.kappa_factor, ctx.cfg.R_factor);
  const RabinowitzFunctional A(model, ctx.spec, prof);
  const int nodes = ctx.cfg.newton.nodes;
  Loop start;
  if (std::isnan(ctx.cfg.descend_eta)) {
    const DiscriminantResult r =
        find_discriminant(model, ctx.spec, ctx.cfg.window_lo, ctx.cfg.window_hi, search_options(ctx));
    const auto it = std::find_if(r.components.begin(), r.components.end(),
                                 [](const Component& c) { return c.eta != 0.0; });
    if (it == r.components.end())
      throw NumericError("descend: no discriminant point in the window to start from");
    start = loop_from_discriminant(A, it->representative.x, it->eta, nodes);
  } else {
    start = loop_from_discriminant(A, model.sample(1).front(), ctx.cfg.descend_eta, nodes);
  }
  std::mt19937_64 rng(ctx.cfg.seed);
  const auto xi = random_variation(start.size(), model.cone_size(), ctx.cfg.perturbation, 3, rng());
  std::uniform_real_distribution<double> shift(-1.0, 1.0);
  start = A.displaced(start, xi, ctx.cfg.perturbation * shift(rng), 1.0);

  const DescendResult d = descend(A, start, ctx.cfg.descend);
  Table hist("descent history", "action and gradient norm dimensionless", {"step", "action", "gradient_norm"});
  for (std::size_t i = 0; i < d.action_history.size(); ++i)
    hist.row({std::to_string(i), num(d.action_history[i]), num(d.norm_history[i])});
  ctx.table("descend_history.csv", hist);
  ctx.tables.emplace_back("loop.csv", loop_table(model, d.loop, d.action, d.gradient_norm));

  json refined = nullptr;
  if (d.converged || ctx.cfg.descend.mode == DescentMode::Residual) {
    const RefineResult rr = refine_newton(A, d.loop, ctx.cfg.newton);
    refined = {{"converged", rr.converged}, {"eta", rr.loop.eta}, {"action", rr.action},
               {"residual_z", rr.residual_z}, {"residual_F", rr.residual_F},
               {"r_min", rr.r_min}, {"r_max", rr.r_max}, {"message", rr.message}};
    if (rr.converged)
      ctx.tables.emplace_back("refined_loop.csv",
                              loop_table(model, rr.loop, rr.action, A.gradient_norm(rr.loop)));
  }
  ctx.results = {{"profile", profile_json(prof)},
                 {"mode", ctx.cfg.descend.mode == DescentMode::Residual ? "residual" : "action"},
                 {"start_eta", start.eta},
                 {"converged", d.converged},
                 {"accepted_steps", d.accepted_steps},
                 {"eta", d.loop.eta},
                 {"action", d.action},
                 {"gradient_norm", d.gradient_norm},
                 {"refined", refined}};
  return {};
}

json config_json(const RunConfig& c) {
  json model = {{"name", c.model.name}};
  if (c.model.name == "flat-torus") model["dim"] = c.model.torus_dim;
  if (c.model.name == "ellipsoid") model["radii"] = c.model.radii;
  json iso = {{"kind", c.isotopy.kind}};
  if (c.isotopy.kind == "constant") iso["value"] = c.isotopy.value;
  if (c.isotopy.kind == "sinusoidal") {
    const auto& s = c.isotopy.sinusoidal;
    iso.update({{"base", s.base}, {"amplitude", s.amplitude}, {"kx", s.kx}, {"kt", s.kt},
                {"phase", s.phase}, {"coordinate", s.coordinate}});
  }
  if (c.isotopy.kind == "kinetic")
    iso.update({{"weights", c.isotopy.kinetic.weights}, {"modulation", c.isotopy.kinetic.modulation}});
  return {{"model", model},
          {"isotopy", iso},
          {"window", {c.window_lo, c.window_hi}},
          {"seeding", {{"seeds_per_unit", c.search.seeds_per_unit},
                       {"points_per_dim", c.search.points_per_dim},
                       {"candidate_threshold", c.search.candidate_threshold}}},
          {"tolerances", {{"search", c.search.tol},
                          {"newton", c.newton.tol},
                          {"integrator", c.newton.integrator_tol},
                          {"descend", c.descend.tol}}}};
}

std::string human_summary(const json& summary) {
  std::string out;
  for (const auto& [k, v] : summary.items()) {
    if (k == "config") continue;
    if (k == "results") {
      for (const auto& [rk, rv] : v.items()) out += fmt::format("{}: {}\n", rk, rv.dump());
    } else {
      out += fmt::format("{}: {}\n", k, v.is_string() ? v.get<std::string>() : v.dump());
    }
  }
  return out;
}

}  // namespace

RunOutcome run(const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) return {kConfigError, "[output].dir: cannot create '" + config.out_dir.string() + "'"};

  RunOutcome outcome;
  json summary;
  summary["schema"] = kSchema;
  summary["version"] = "0.1.0";
  summary["command"] = config.command;
  summary["seed"] = config.seed;
  summary["config"] = config_json(config);
  try {
    ModelPtr model = build_model(config.model);
    Context ctx{config, model, build_isotopy(config.isotopy, *model), json::object(), {}};
    const std::string& c = config.command;
    if (c == "validate") outcome = cmd_validate(ctx);
    else if (c == "lift-check") outcome = cmd_lift_check(ctx);
    else if (c == "constants") outcome = cmd_constants(ctx);
    else if (c == "discriminant") outcome = cmd_discriminant(ctx);
    else if (c == "chords") outcome = cmd_chords(ctx);
    else if (c == "spectrum") outcome = cmd_spectrum(ctx);
    else if (c == "growth") outcome = cmd_growth(ctx);
    else if (c == "oracle") outcome = cmd_oracle(ctx);
    else if (c == "probe") outcome = cmd_probe(ctx);
    else if (c == "descend") outcome = cmd_descend(ctx);
    else throw ConfigError("[run].command: unknown command '" + c + "'");
    for (const auto& [name, content] : ctx.tables) write_file(config.out_dir / name, content);
    summary["results"] = ctx.results;
  } catch (const ConfigError& e) {
    outcome = {kConfigError, std::string("config error: ") + e.what()};
  } catch (const PositivityError& e) {
    outcome = {kValidationFailure, "validation failed: positivity"};
    summary["error"] = e.what();
  } catch (const NumericError& e) {
    outcome = {kNumericFailure, std::string("numeric failure: ") + e.what()};
    write_file(config.out_dir / "diagnostics.txt",
               fmt::format("command: {}\nseed: {}\nerror: {}\n", config.command, config.seed, e.what()));
  } catch (const DomainError& e) {
    outcome = {kNumericFailure, std::string("numeric failure: ") + e.what()};
    write_file(config.out_dir / "diagnostics.txt",
               fmt::format("command: {}\nseed: {}\nerror: {}\n", config.command, config.seed, e.what()));
  } catch (const std::invalid_argument& e) {
    outcome = {kConfigError, std::string("config error: ") + e.what()};
  }
  summary["status"] = outcome.status;
  summary["message"] = outcome.message.empty() ? "ok" : outcome.message;
  write_file(config.out_dir / "summary.json", summary.dump(2) + "\n");
  write_file(config.out_dir / "summary.txt", human_summary(summary));
  return outcome;
}

}  // namespace crab::cli
