#ifndef FERMITRAP_IO_HPP
#define FERMITRAP_IO_HPP

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "fermitrap/errors.hpp"
#include "fermitrap/interaction.hpp"
#include "fermitrap/observables.hpp"
#include "fermitrap/occupations.hpp"
#include "fermitrap/trap.hpp"

namespace fermitrap {

using nlohmann::json;

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Unknown-field rejection: every key in j must appear in allowed.
inline void ensure_known_keys(const json& j, const std::vector<std::string>& allowed,
                              const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& key : allowed) ok = ok || (it.key() == key);
    if (!ok) throw ConfigError(context + ": unknown field \"" + it.key() + "\"");
  }
}

inline json trap_to_json(const TrapConfig& t) {
  return json{{"N", t.N},     {"omega_l", t.omega_l}, {"mass", t.mass},
              {"alpha", t.alpha}, {"l", t.l},         {"L_F", t.L_F},
              {"eps_F", t.eps_F}, {"k_F", t.k_F}};
}

inline TrapConfig trap_from_json(const json& j) {
  ensure_known_keys(j, {"N", "omega_l", "mass", "alpha", "l", "L_F", "eps_F", "k_F"},
                    "trap");
  if (!j.contains("N")) throw ConfigError("trap: missing N");
  const int n = j.at("N").get<int>();
  const double omega = j.value("omega_l", 2.0 * M_PI * 10.0);
  const double mass = j.value("mass", constants::mass_li6);
  auto t = derive_trap(n, omega, mass);
  // derived fields, when present, must agree with the recomputation
  for (const char* key : {"alpha", "l", "L_F", "eps_F", "k_F"}) {
    if (j.contains(key)) {
      const double claimed = j.at(key).get<double>();
      const double actual = trap_to_json(t).at(key).get<double>();
      if (std::abs(claimed - actual) > 1e-9 * std::abs(actual))
        throw ConfigError(std::string("trap: inconsistent derived field \"") + key + "\"");
    }
  }
  return t;
}

inline json model_to_json(const InteractionModel& m) {
  json j{{"kind", to_string(m.kind)}};
  switch (m.kind) {
    case ModelKind::Free:
      break;
    case ModelKind::IM1:
      j["v1"] = m.v1;
      j["alpha1"] = m.alpha1;
      break;
    case ModelKind::IM2:
      j["gamma0"] = m.gamma0;
      j["sign"] = m.sign;
      j["r_gamma"] = m.r_gamma;
      j["r_alpha"] = m.r_alpha;
      j["alpha0"] = m.alpha0();
      break;
    case ModelKind::Custom:
      j["va"] = m.va_table;
      j["vb"] = m.vb_table;
      break;
  }
  return j;
}

inline InteractionModel model_from_json(const json& j, int n_particles) {
  ensure_known_keys(
      j, {"kind", "v1", "alpha1", "gamma0", "sign", "r_gamma", "r_alpha", "alpha0", "va", "vb"},
      "model");
  const std::string kind = j.value("kind", "Free");
  if (kind == "Free") return InteractionModel::free_model();
  if (kind == "IM1") {
    if (j.contains("alpha1")) return InteractionModel::im1_from_alpha(j.at("alpha1").get<double>());
    if (j.contains("v1")) return InteractionModel::im1(j.at("v1").get<double>());
    throw ConfigError("model: IM1 needs \"alpha1\" or \"v1\"");
  }
  if (kind == "IM2") {
    double rg = 0.0, ra = 0.0;
    InteractionModel::default_rates(n_particles, rg, ra);
    rg = j.value("r_gamma", rg);
    ra = j.value("r_alpha", ra);
    if (j.contains("alpha0"))
      return InteractionModel::im2_from_alpha(j.at("alpha0").get<double>(), rg, ra);
    if (j.contains("gamma0"))
      return InteractionModel::im2(j.at("gamma0").get<double>(), j.value("sign", 1), rg, ra);
    throw ConfigError("model: IM2 needs \"alpha0\" or \"gamma0\"");
  }
  if (kind == "Custom") {
    if (!j.contains("va") || !j.contains("vb")) throw ConfigError("model: Custom needs va, vb");
    return InteractionModel::custom(j.at("va").get<std::vector<double>>(),
                                    j.at("vb").get<std::vector<double>>());
  }
  throw ConfigError("model: unknown kind \"" + kind + "\"");
}

inline json occupation_matrix_to_json(const OccupationMatrix& occ) {
  json entries = json::array();
  for (int m = 0; m <= occ.M_max; ++m)
    for (int p = 0; p < occ.p_count(m); ++p)
      entries.push_back(json::array({m, p, occ.at(m, p)}));
  return json{{"N", occ.N},
              {"M_max", occ.M_max},
              {"model_id", occ.model_id},
              {"entries", entries},
              {"quadrature_meta",
               {{"nodes", occ.meta.nodes},
                {"est_error", occ.meta.est_error},
                {"m_cut", occ.meta.m_cut},
                {"truncation_error", occ.meta.truncation_error},
                {"flagged", occ.meta.flagged}}}};
}

inline OccupationMatrix occupation_matrix_from_json(const json& j) {
  auto occ = OccupationMatrix::empty(j.at("N").get<int>(), j.at("M_max").get<int>(),
                                     j.value("model_id", ""));
  for (const auto& e : j.at("entries"))
    occ.slot(e.at(0).get<int>(), e.at(1).get<int>()) = e.at(2).get<double>();
  if (j.contains("quadrature_meta")) {
    const auto& q = j.at("quadrature_meta");
    occ.meta.nodes = q.value("nodes", 0);
    occ.meta.est_error = q.value("est_error", 0.0);
    occ.meta.m_cut = q.value("m_cut", 0);
    occ.meta.truncation_error = q.value("truncation_error", 0.0);
    occ.meta.flagged = q.value("flagged", false);
  }
  return occ;
}

inline json profile_to_json(const Profile& prof) {
  return json{{"kind", prof.kind == ProfileKind::density ? "density" : "momentum"},
              {"N", prof.N},
              {"model_id", prof.model_id},
              {"grid", prof.grid},
              {"values", prof.values},
              {"integral", prof.integral},
              {"warnings", prof.warnings}};
}

// CSV with '#'-prefixed metadata headers; coordinate then value.
inline void profile_to_csv(const Profile& prof, std::ostream& out,
                           const std::string& config_line) {
  out << "# fermitrap " << (prof.kind == ProfileKind::density ? "density" : "momentum")
      << " profile\n";
  out << "# model: " << prof.model_id << "\n";
  out << "# N: " << prof.N << "\n";
  out << "# integral: " << format_double(prof.integral) << "\n";
  for (const auto& w : prof.warnings) out << "# warning: " << w << "\n";
  if (!config_line.empty()) out << "# config: " << config_line << "\n";
  out << (prof.kind == ProfileKind::density ? "v,n" : "kappa,p") << "\n";
  for (std::size_t i = 0; i < prof.grid.size(); ++i)
    out << format_double(prof.grid[i]) << "," << format_double(prof.values[i]) << "\n";
}

// Three-curve density bundle: v, n_free, n_repulsive, n_attractive.
inline void figure_bundle_to_csv(const Profile& free_prof, const Profile& repulsive,
                                 const Profile& attractive, std::ostream& out,
                                 const std::string& config_line) {
  if (free_prof.grid != repulsive.grid || free_prof.grid != attractive.grid)
    throw std::invalid_argument("figure bundle: profiles must share one grid");
  out << "# fermitrap density bundle\n";
  out << "# curves: free, repulsive (" << repulsive.model_id << "), attractive ("
      << attractive.model_id << ")\n";
  out << "# integrals: " << format_double(free_prof.integral) << ","
      << format_double(repulsive.integral) << "," << format_double(attractive.integral)
      << "\n";
  if (!config_line.empty()) out << "# config: " << config_line << "\n";
  out << "v,n_free,n_repulsive,n_attractive\n";
  for (std::size_t i = 0; i < free_prof.grid.size(); ++i)
    out << format_double(free_prof.grid[i]) << "," << format_double(free_prof.values[i])
        << "," << format_double(repulsive.values[i]) << ","
        << format_double(attractive.values[i]) << "\n";
}

inline void occupation_matrix_to_csv(const OccupationMatrix& occ, std::ostream& out,
                                     const std::string& config_line) {
  out << "# fermitrap occupation matrix\n";
  out << "# model: " << occ.model_id << "\n";
  out << "# N: " << occ.N << "\n";
  if (!config_line.empty()) out << "# config: " << config_line << "\n";
  out << "M,p,value\n";
  for (int m = 0; m <= occ.M_max; ++m)
    for (int p = 0; p < occ.p_count(m); ++p)
      out << m << "," << p << "," << format_double(occ.at(m, p)) << "\n";
}

}  // namespace fermitrap

#endif  // FERMITRAP_IO_HPP
