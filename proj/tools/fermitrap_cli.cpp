// fermitrap command line: density / momentum / occupations / duality /
// oracle / couplings / validate. Configuration comes from a JSON file plus
// dotted --set overrides; outputs are CSV or JSON with the resolved config
// embedded. Runs are deterministic for a fixed config.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fermitrap/fermitrap.hpp"

using namespace fermitrap;
using nlohmann::json;

namespace {

std::chrono::steady_clock::time_point run_start;

std::string elapsed() {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s",
                std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start)
                    .count());
  return buf;
}

json default_config(const std::string& task) {
  json cfg = {
      {"task", task},
      {"trap", {{"N", 10}, {"omega_l", 2.0 * M_PI * 10.0}, {"mass", constants::mass_li6}}},
      {"model", {{"kind", "Free"}}},
      {"M_max", -1},
      {"grid", {{"half_range", -1.0}, {"points", 2048}}},
      {"quadrature", {{"tol", 1e-8}}},
      {"output", {{"path", task + (task == "density" || task == "momentum" ? ".csv" : ".json")},
                  {"format", task == "density" || task == "momentum" ? "csv" : "json"}}},
      {"figure_bundle", false},
      {"duality", {{"alpha1", 0.5}}},
      {"oracle",
       {{"n_below", 4},
        {"n_levels", json::array({16, 18})},
        {"m_cut", 1},
        {"window_halfwidth", -1},
        {"p_max", 1},
        {"dense_threshold", 4000}}},
      {"couplings",
       {{"potential", "dipole"},
        {"mu_bohr", 1.0},
        {"c6", constants::c6_li},
        {"lambda", -1.0},
        {"edge_m", -1},
        {"edge_p", -1},
        {"panel", json::array()},
        {"species", true}}},
  };
  return cfg;
}

void deep_merge(json& base, const json& overlay) {
  if (!overlay.is_object()) {
    base = overlay;
    return;
  }
  if (!base.is_object()) base = json::object();
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (base.contains(it.key()))
      deep_merge(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

void apply_set(json& cfg, const std::string& expr) {
  const auto eq = expr.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--set expects key=value, got \"" + expr + "\"");
  const std::string path = expr.substr(0, eq);
  const std::string raw = expr.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &cfg;
  std::size_t pos = 0;
  while (true) {
    const auto dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (key.empty()) throw ConfigError("--set: empty key segment in \"" + path + "\"");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    pos = dot + 1;
  }
}

void validate_config(const json& cfg) {
  ensure_known_keys(cfg,
                    {"task", "trap", "model", "M_max", "grid", "quadrature", "output",
                     "figure_bundle", "duality", "oracle", "couplings"},
                    "config");
  ensure_known_keys(cfg.at("grid"), {"half_range", "points"}, "grid");
  ensure_known_keys(cfg.at("quadrature"), {"tol"}, "quadrature");
  ensure_known_keys(cfg.at("output"), {"path", "format"}, "output");
  ensure_known_keys(cfg.at("duality"), {"alpha1"}, "duality");
  ensure_known_keys(cfg.at("oracle"),
                    {"n_below", "n_levels", "m_cut", "window_halfwidth", "p_max",
                     "dense_threshold"},
                    "oracle");
  ensure_known_keys(cfg.at("couplings"),
                    {"potential", "mu_bohr", "c6", "lambda", "edge_m", "edge_p", "panel",
                     "species"},
                    "couplings");
  const std::string format = cfg.at("output").at("format").get<std::string>();
  if (format != "csv" && format != "json")
    throw ConfigError("output.format must be \"csv\" or \"json\"");
}

struct Resolved {
  TrapConfig trap;
  InteractionModel model;
  int m_max;
  double tol;
  std::vector<double> grid;
  std::string out_path;
  std::string format;
  std::string config_line;
};

Resolved resolve(const json& cfg) {
  Resolved r;
  r.trap = trap_from_json(cfg.at("trap"));
  r.model = model_from_json(cfg.at("model"), r.trap.N);
  r.m_max = cfg.at("M_max").get<int>();
  if (r.m_max < 0) r.m_max = 2 * r.trap.N;
  r.tol = cfg.at("quadrature").at("tol").get<double>();
  double half = cfg.at("grid").at("half_range").get<double>();
  if (half <= 0.0) half = 1.5 * std::sqrt(2.0 * r.trap.N - 1.0);
  const int points = cfg.at("grid").at("points").get<int>();
  if (points < 2) throw ConfigError("grid.points must be >= 2");
  r.grid.resize(points);
  for (int i = 0; i < points; ++i) r.grid[i] = -half + 2.0 * half * i / (points - 1);
  r.out_path = cfg.at("output").at("path").get<std::string>();
  r.format = cfg.at("output").at("format").get<std::string>();
  json resolved = cfg;
  resolved["M_max"] = r.m_max;
  resolved["grid"]["half_range"] = half;
  r.config_line = resolved.dump();
  return r;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file \"" + path + "\"");
  out << content;
}

std::string render_json(const json& report) { return report.dump(2) + "\n"; }

int run_density_like(const json& cfg, ProfileKind kind) {
  auto r = resolve(cfg);
  const bool bundle = cfg.at("figure_bundle").get<bool>();
  std::ostringstream body;
  double sum_residual = 0.0;

  if (bundle) {
    if (kind != ProfileKind::density || r.model.kind != ModelKind::IM2)
      throw ConfigError("figure_bundle needs task=density with an IM2 model");
    auto occ_free = occupation_matrix(r.trap, InteractionModel::free_model(), r.m_max, r.tol);
    const double a0 = std::abs(r.model.alpha0());
    auto plus = InteractionModel::im2_from_alpha(a0, r.model.r_gamma, r.model.r_alpha);
    auto minus = InteractionModel::im2_from_alpha(-a0, r.model.r_gamma, r.model.r_alpha);
    auto occ_plus = occupation_matrix(r.trap, plus, r.m_max, r.tol);
    auto occ_minus = occupation_matrix(r.trap, minus, r.m_max, r.tol);
    auto prof_free = density(r.trap, occ_free, r.grid);
    auto prof_plus = density(r.trap, occ_plus, r.grid);
    auto prof_minus = density(r.trap, occ_minus, r.grid);
    sum_residual = std::abs(occ_plus.occupation_sum() - r.trap.N);
    if (r.format == "csv") {
      figure_bundle_to_csv(prof_free, prof_plus, prof_minus, body, r.config_line);
    } else {
      json rep = {{"free", profile_to_json(prof_free)},
                  {"repulsive", profile_to_json(prof_plus)},
                  {"attractive", profile_to_json(prof_minus)},
                  {"config", json::parse(r.config_line)}};
      body << render_json(rep);
    }
  } else {
    auto occ = occupation_matrix(r.trap, r.model, r.m_max, r.tol);
    auto prof = (kind == ProfileKind::density) ? density(r.trap, occ, r.grid)
                                               : momentum(r.trap, occ, r.grid);
    if (r.m_max >= 2 * r.trap.N - 1)
      sum_residual = std::abs(occ.occupation_sum() - r.trap.N);
    if (r.format == "csv") {
      profile_to_csv(prof, body, r.config_line);
    } else {
      json rep = profile_to_json(prof);
      rep["config"] = json::parse(r.config_line);
      body << render_json(rep);
    }
  }
  write_file(r.out_path, body.str());
  std::printf("%s: N=%d model=%s sum_rule_residual=%.3g wrote=%s elapsed=%s\n",
              kind == ProfileKind::density ? "density" : "momentum", r.trap.N,
              r.model.id().c_str(), sum_residual, r.out_path.c_str(), elapsed().c_str());
  return 0;
}

int run_occupations(const json& cfg) {
  auto r = resolve(cfg);
  auto occ = occupation_matrix(r.trap, r.model, r.m_max, r.tol);
  std::ostringstream body;
  if (r.format == "csv") {
    occupation_matrix_to_csv(occ, body, r.config_line);
  } else {
    json rep = occupation_matrix_to_json(occ);
    rep["config"] = json::parse(r.config_line);
    body << render_json(rep);
  }
  write_file(r.out_path, body.str());
  const double residual =
      (r.m_max >= 2 * r.trap.N - 1) ? std::abs(occ.occupation_sum() - r.trap.N) : -1.0;
  std::printf("occupations: N=%d model=%s entries=%zu sum_rule_residual=%.3g wrote=%s elapsed=%s\n",
              r.trap.N, r.model.id().c_str(), occ.values.size(), residual,
              r.out_path.c_str(), elapsed().c_str());
  return 0;
}

int run_duality(const json& cfg) {
  auto r = resolve(cfg);
  const double alpha1 = cfg.at("duality").at("alpha1").get<double>();
  auto rep = duality_check(r.trap, alpha1, r.grid, r.m_max);
  json out = {{"alpha1", rep.alpha1},
              {"max_abs_deviation", rep.max_abs_deviation},
              {"tol", rep.tol},
              {"pass", rep.pass},
              {"config", json::parse(r.config_line)}};
  write_file(r.out_path, render_json(out));
  std::printf("duality: alpha1=%g max_dev=%.3g pass=%d wrote=%s elapsed=%s\n", alpha1,
              rep.max_abs_deviation, rep.pass ? 1 : 0, r.out_path.c_str(), elapsed().c_str());
  return 0;
}

json ed_report_to_json(const EdCompareReport& rep) {
  json rows = json::array();
  for (const auto& row : rep.rows)
    rows.push_back({{"M", row.M},
                    {"p", row.p},
                    {"ed", row.ed},
                    {"luttinger", row.luttinger},
                    {"abs_dev", row.abs_dev}});
  return json{{"dim", rep.dim},
              {"n_levels", rep.n_levels},
              {"dropped_bilinears", rep.dropped_bilinears},
              {"ground_energy", rep.ground_energy},
              {"gap", rep.gap},
              {"residual", rep.residual},
              {"max_abs_dev", rep.max_abs_dev},
              {"rms_dev", rep.rms_dev},
              {"rows", rows}};
}

int run_oracle(const json& cfg) {
  auto r = resolve(cfg);
  const auto& oc = cfg.at("oracle");
  const int n_below = oc.at("n_below").get<int>();
  const int m_cut = oc.at("m_cut").get<int>();
  int halfwidth = oc.at("window_halfwidth").get<int>();
  if (halfwidth < 0) halfwidth = std::max(1, r.trap.N / 2);
  const int p_max = oc.at("p_max").get<int>();
  const int dense_threshold = oc.at("dense_threshold").get<int>();

  json sizes = json::array();
  double prev_dev = -1.0;
  bool monotone = true;
  for (const auto& nl : oc.at("n_levels")) {
    auto rep = run_ed_comparison(r.trap, r.model, m_cut, n_below, nl.get<int>(), halfwidth,
                                 p_max, dense_threshold);
    if (prev_dev >= 0.0 && rep.max_abs_dev > prev_dev) monotone = false;
    prev_dev = rep.max_abs_dev;
    sizes.push_back(ed_report_to_json(rep));
  }
  json out = {{"sizes", sizes},
              {"monotone_decreasing", monotone},
              {"config", json::parse(r.config_line)}};
  write_file(r.out_path, render_json(out));
  std::printf("oracle: N=%d model=%s final_max_dev=%.3g monotone=%d wrote=%s elapsed=%s\n",
              r.trap.N, r.model.id().c_str(), prev_dev, monotone ? 1 : 0,
              r.out_path.c_str(), elapsed().c_str());
  return 0;
}

int run_couplings(const json& cfg) {
  auto r = resolve(cfg);
  const auto& cc = cfg.at("couplings");
  double lambda = cc.at("lambda").get<double>();
  if (lambda <= 0.0) lambda = 1.0 / r.trap.N;
  const std::string pot_kind = cc.at("potential").get<std::string>();
  PotentialSpec pot;
  if (pot_kind == "dipole") {
    pot = dipole_potential(cc.at("mu_bohr").get<double>() * constants::mu_bohr, r.trap, lambda);
  } else if (pot_kind == "vdw") {
    pot = vdw_potential(vdw_strength_from_c6(cc.at("c6").get<double>()), r.trap, lambda);
  } else {
    throw ConfigError("couplings.potential must be \"dipole\" or \"vdw\"");
  }

  int edge_m = cc.at("edge_m").get<int>();
  int edge_p = cc.at("edge_p").get<int>();
  if (edge_m < 0) edge_m = r.trap.N;
  if (edge_p < 0) edge_p = r.trap.N;
  auto est = estimate_v1(pot, r.trap, edge_m, edge_p);

  json panel_rows = json::array();
  std::ostringstream panel_csv;
  panel_csv << "# fermitrap matrix-element panel\n";
  panel_csv << "# config: " << r.config_line << "\n";
  panel_csv << "m,p,q,n,value,method\n";
  for (const auto& idx : cc.at("panel")) {
    const int m = idx.at(0).get<int>(), p = idx.at(1).get<int>(), q = idx.at(2).get<int>(),
              n = idx.at(3).get<int>();
    auto el = matrix_element_exact(pot, r.trap, m, p, q, n);
    panel_rows.push_back({{"m", m}, {"p", p}, {"q", q}, {"n", n}, {"value", el.value}});
    panel_csv << m << "," << p << "," << q << "," << n << ","
              << format_double(el.value) << ",exact\n";
  }

  json out = {{"potential",
               {{"kind", pot_kind},
                {"lambda", lambda},
                {"d", pot.d},
                {"strength", pot.strength},
                {"fourier_k0", pot.fourier(0.0)}}},
              {"estimate_v1",
               {{"m", edge_m},
                {"p", edge_p},
                {"prefactor", est.prefactor},
                {"integral", est.integral},
                {"value", est.value}}},
              {"panel", panel_rows},
              {"config", json::parse(r.config_line)}};
  if (cc.at("species").get<bool>()) {
    out["species_enhancement"] = {
        {"cr53_over_li6", species_enhancement(li6_species(), cr53_species())},
        {"polar_1debye_over_mu_bohr",
         species_enhancement({constants::mu_bohr, false, constants::mass_li6},
                             polar_molecule_species(constants::mass_li6))}};
  }

  if (r.format == "csv") {
    if (cc.at("panel").empty())
      throw ConfigError("couplings with output.format=csv needs a non-empty panel");
    write_file(r.out_path, panel_csv.str());
  } else {
    write_file(r.out_path, render_json(out));
  }
  std::printf("couplings: potential=%s V1_prefactor=%.6g integral=%.6g wrote=%s elapsed=%s\n",
              pot_kind.c_str(), est.prefactor, est.integral, r.out_path.c_str(),
              elapsed().c_str());
  return 0;
}

int run_validate(const json& cfg) {
  auto r = resolve(cfg);
  json out;
  out["trap"] = trap_to_json(r.trap);
  const double kf_energy = std::sqrt(2.0 * r.trap.mass * r.trap.eps_F) / constants::hbar;
  out["trap_kf_consistency"] = std::abs(r.trap.k_F - kf_energy) / r.trap.k_F;

  const int m_check = std::max(40, 2 * r.trap.N);
  auto val = validate_model(r.model, m_check);
  json rows = json::array();
  for (const auto& row : val.rows)
    rows.push_back({{"m", row.m},
                    {"va", row.va},
                    {"vb", row.vb},
                    {"consistent", row.consistent},
                    {"stability", row.stability}});
  out["model"] = {{"id", r.model.id()},
                  {"all_consistent", val.all_consistent},
                  {"tail_decays", val.tail_decays},
                  {"first_m_below_1e6", val.first_m_below_1e6},
                  {"rows", rows}};

  bool suites_pass = val.all_consistent && out["trap_kf_consistency"].get<double>() < 1e-12;
  if (val.all_consistent) {
    auto occ = occupation_matrix(r.trap, r.model, std::max(r.m_max, 2 * r.trap.N - 1), r.tol);
    const double residual = std::abs(occ.occupation_sum() - r.trap.N);
    double ph_violation = 0.0;
    for (int m = 0; m <= 2 * r.trap.N - 1; ++m) {
      ph_violation = std::max(
          ph_violation, std::abs(occ.at(m, 0) + occ.at(2 * r.trap.N - 1 - m, 0) - 1.0));
    }
    out["sum_rule_residual"] = residual;
    out["particle_hole_violation"] = ph_violation;
    suites_pass = suites_pass && residual < 1e-6 && ph_violation < 1e-6;
  }
  out["pass"] = suites_pass;
  out["config"] = json::parse(r.config_line);
  write_file(r.out_path, render_json(out));
  std::printf("validate: model=%s consistent=%d pass=%d wrote=%s elapsed=%s\n",
              r.model.id().c_str(), val.all_consistent ? 1 : 0, suites_pass ? 1 : 0,
              r.out_path.c_str(), elapsed().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Luttinger-model solver for 1D fermions in a harmonic trap"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_path, format;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--set", sets, "dotted config override, e.g. model.alpha0=1");
  app.add_option("--out", out_path, "output file path");
  app.add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  const std::vector<std::string> tasks = {"density",  "momentum",  "occupations", "duality",
                                          "oracle",   "couplings", "validate"};
  for (const auto& t : tasks) app.add_subcommand(t);

  CLI11_PARSE(app, argc, argv);
  run_start = std::chrono::steady_clock::now();
  const std::string task = app.get_subcommands().front()->get_name();

  try {
    json cfg = default_config(task);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config file \"" + config_path + "\"");
      json user = json::parse(in, nullptr, false);
      if (user.is_discarded()) throw ConfigError("config file is not valid JSON");
      deep_merge(cfg, user);
    }
    for (const auto& s : sets) apply_set(cfg, s);
    cfg["task"] = task;
    if (!out_path.empty()) cfg["output"]["path"] = out_path;
    if (!format.empty()) cfg["output"]["format"] = format;
    validate_config(cfg);

    if (task == "density") return run_density_like(cfg, ProfileKind::density);
    if (task == "momentum") return run_density_like(cfg, ProfileKind::momentum);
    if (task == "occupations") return run_occupations(cfg);
    if (task == "duality") return run_duality(cfg);
    if (task == "oracle") return run_oracle(cfg);
    if (task == "couplings") return run_couplings(cfg);
    if (task == "validate") return run_validate(cfg);
    throw ConfigError("unknown task " + task);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ModelInvalidError& e) {
    std::fprintf(stderr, "model invalid: %s\n", e.what());
    return 3;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "numerical non-convergence: %s\n", e.what());
    return 4;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
}
