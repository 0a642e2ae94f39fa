#ifndef FERMITRAP_INTERACTION_HPP
#define FERMITRAP_INTERACTION_HPP

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fermitrap/errors.hpp"

namespace fermitrap {

enum class ModelKind { Free, IM1, IM2, Custom };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Free: return "Free";
    case ModelKind::IM1: return "IM1";
    case ModelKind::IM2: return "IM2";
    case ModelKind::Custom: return "Custom";
  }
  return "?";
}

// One interaction mode after the Bogoliubov transformation. All energies
// are dimensionless (units of hbar omega_l).
struct CouplingPoint {
  int m = 0;
  double va = 0.0, vb = 0.0;
  double gamma = 0.0, alpha = 0.0;
  double zeta = 0.0;
  double K = 1.0;
  double eps = 1.0;
  double z_gamma = 0.0, z_alpha = 0.0;
};

// The solvable interaction family. IM1 is the single-mode toy model with
// V_a(1) = V_b(1) = V(1); IM2 carries exponentially decaying coupling
// constants gamma_m = gamma0 exp(-r_gamma m) and
// alpha_m = alpha0 exp(-r_alpha m / 2), alpha0 = sign*sqrt(gamma0(1+gamma0)).
// Custom holds tabulated V_a(m), V_b(m) for the series path and the ED
// oracle.
struct InteractionModel {
  ModelKind kind = ModelKind::Free;

  // IM1 (cached couplings at m=1)
  double v1 = 0.0;
  double gamma1 = 0.0, alpha1 = 0.0;

  // IM2
  double gamma0 = 0.0;
  int sign = 1;
  double r_gamma = 0.0, r_alpha = 0.0;

  // Custom, element [i] is mode m = i+1
  std::vector<double> va_table, vb_table;

  static InteractionModel free_model() { return {}; }

  // May describe an inconsistent model (|V_b| > |hw + V_a|); construction
  // never throws so that validate_model can report on it, but the cached
  // couplings are NaN and every solver path rejects it through coupling_at.
  static InteractionModel im1(double v1_in) {
    InteractionModel m;
    m.kind = ModelKind::IM1;
    m.v1 = v1_in;
    if (std::abs(v1_in) <= std::abs(1.0 + v1_in)) {
      const double zeta = 0.5 * std::atanh(v1_in / (1.0 + v1_in));
      m.gamma1 = std::sinh(zeta) * std::sinh(zeta);
      m.alpha1 = 0.5 * std::sinh(2.0 * zeta);
    } else {
      m.gamma1 = m.alpha1 = std::nan("");
    }
    return m;
  }

  // parameterization straight through the density-formula coupling alpha_1
  static InteractionModel im1_from_alpha(double alpha1_in) {
    InteractionModel m;
    m.kind = ModelKind::IM1;
    m.alpha1 = alpha1_in;
    m.gamma1 = 0.5 * (std::sqrt(1.0 + 4.0 * alpha1_in * alpha1_in) - 1.0);
    const double zeta = 0.5 * std::asinh(2.0 * alpha1_in);
    const double k_lutt = std::exp(-2.0 * zeta);
    m.v1 = 0.5 * (1.0 / (k_lutt * k_lutt) - 1.0);
    return m;
  }

  static InteractionModel im2(double gamma0_in, int sign_in, double r_gamma_in,
                              double r_alpha_in) {
    if (gamma0_in < 0.0) throw ModelInvalidError("IM2: gamma0 must be >= 0");
    if (!(r_gamma_in > 0.0) || !(r_alpha_in > 0.0))
      throw ModelInvalidError("IM2: decay rates must be > 0");
    InteractionModel m;
    m.kind = ModelKind::IM2;
    m.gamma0 = gamma0_in;
    m.sign = sign_in >= 0 ? 1 : -1;
    m.r_gamma = r_gamma_in;
    m.r_alpha = r_alpha_in;
    return m;
  }

  static InteractionModel im2_from_alpha(double alpha0_in, double r_gamma_in,
                                         double r_alpha_in) {
    // gamma0 solves gamma(1+gamma) = alpha0^2
    const double g0 = 0.5 * (std::sqrt(1.0 + 4.0 * alpha0_in * alpha0_in) - 1.0);
    return im2(g0, alpha0_in >= 0.0 ? 1 : -1, r_gamma_in, r_alpha_in);
  }

  static InteractionModel custom(std::vector<double> va, std::vector<double> vb) {
    if (va.size() != vb.size())
      throw ModelInvalidError("Custom: V_a and V_b tables must have equal length");
    InteractionModel m;
    m.kind = ModelKind::Custom;
    m.va_table = std::move(va);
    m.vb_table = std::move(vb);
    return m;
  }

  // default decay rates, r ~ 1/sqrt(N): 0.3 / 0.4 at N = 10
  static void default_rates(int n_particles, double& r_gamma_out, double& r_alpha_out) {
    const double scale = std::sqrt(10.0 / n_particles);
    r_gamma_out = 0.3 * scale;
    r_alpha_out = 0.4 * scale;
  }

  double alpha0() const {
    return sign * std::sqrt(gamma0 * (1.0 + gamma0));
  }

  // V_a(m), V_b(m) in units of hbar omega_l. For IM2 the symmetric
  // V_a = V_b = V(m) form is reconstructed from gamma_m via V = ((1/K^2)-1)/2.
  double va(int m) const { return vab(m); }
  double vb(int m) const { return vab(m); }

  double gamma_m(int m) const;
  double alpha_m(int m) const;

  std::string id() const {
    char buf[160];
    switch (kind) {
      case ModelKind::Free:
        return "Free";
      case ModelKind::IM1:
        std::snprintf(buf, sizeof buf, "IM1(alpha1=%.6g)", alpha1);
        return buf;
      case ModelKind::IM2:
        std::snprintf(buf, sizeof buf, "IM2(alpha0=%.6g,r_gamma=%.6g,r_alpha=%.6g)",
                      alpha0(), r_gamma, r_alpha);
        return buf;
      case ModelKind::Custom:
        std::snprintf(buf, sizeof buf, "Custom(m_max=%zu)", va_table.size());
        return buf;
    }
    return "?";
  }

 private:
  double vab(int m) const {
    switch (kind) {
      case ModelKind::Free:
        return 0.0;
      case ModelKind::IM1:
        return m == 1 ? v1 : 0.0;
      case ModelKind::IM2: {
        const double g = gamma_m(m);
        const double zeta = sign * std::asinh(std::sqrt(g));
        const double k_lutt = std::exp(-2.0 * zeta);
        return 0.5 * (1.0 / (k_lutt * k_lutt) - 1.0);
      }
      case ModelKind::Custom:
        return 0.0;  // resolved by the caller via the tables
    }
    return 0.0;
  }
};

inline double InteractionModel::gamma_m(int m) const {
  switch (kind) {
    case ModelKind::Free:
      return 0.0;
    case ModelKind::IM1:
      return m == 1 ? gamma1 : 0.0;
    case ModelKind::IM2:
      return gamma0 * std::exp(-r_gamma * m);
    case ModelKind::Custom:
      break;
  }
  return 0.0;
}

inline double InteractionModel::alpha_m(int m) const {
  switch (kind) {
    case ModelKind::Free:
      return 0.0;
    case ModelKind::IM1:
      return m == 1 ? alpha1 : 0.0;
    case ModelKind::IM2:
      return alpha0() * std::exp(-0.5 * r_alpha * m);
    case ModelKind::Custom:
      break;
  }
  return 0.0;
}

// Bogoliubov transformation at mode m: tanh(2 zeta) = V_b/(1 + V_a),
// K = exp(-2 zeta), gamma = sinh^2 zeta, eps = sqrt((1+V_a)^2 - V_b^2).
// Throws ModelInvalidError when |V_b| > |1 + V_a|.
inline CouplingPoint coupling_at(const InteractionModel& model, int m) {
  if (m < 1) throw std::invalid_argument("coupling_at: m must be >= 1");
  CouplingPoint c;
  c.m = m;

  if (model.kind == ModelKind::Free) return c;

  if (model.kind == ModelKind::IM2) {
    c.gamma = model.gamma_m(m);
    c.alpha = model.alpha_m(m);
    c.zeta = model.sign * std::asinh(std::sqrt(c.gamma));
    c.K = std::exp(-2.0 * c.zeta);
    c.va = c.vb = model.va(m);
    c.eps = 1.0 / c.K;
    c.z_gamma = std::cosh(model.r_gamma) - 1.0;
    c.z_alpha = std::cosh(0.5 * model.r_alpha) - 1.0;
    return c;
  }

  double va = 0.0, vb = 0.0;
  if (model.kind == ModelKind::IM1) {
    va = vb = (m == 1) ? model.v1 : 0.0;
  } else {  // Custom
    if (m <= static_cast<int>(model.va_table.size())) {
      va = model.va_table[m - 1];
      vb = model.vb_table[m - 1];
    }
  }
  const double denom = 1.0 + va;
  if (std::abs(vb) > std::abs(denom))
    throw ModelInvalidError("coupling_at: |V_b(" + std::to_string(m) +
                            ")| > |hw + V_a|, model not diagonalizable");
  c.va = va;
  c.vb = vb;
  c.zeta = 0.5 * std::atanh(vb / denom);
  c.K = std::exp(-2.0 * c.zeta);
  c.gamma = std::sinh(c.zeta) * std::sinh(c.zeta);
  const double sgn = (vb > 0.0) ? 1.0 : (vb < 0.0 ? -1.0 : 0.0);
  c.alpha = sgn * std::sqrt(c.gamma * (1.0 + c.gamma));
  c.eps = std::sqrt(denom * denom - vb * vb);
  return c;
}

struct ValidationRow {
  int m = 0;
  double va = 0.0, vb = 0.0;
  bool consistent = true;
  double stability = 0.0;  // sqrt(m) V_b / (1 + V_a)
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  bool all_consistent = true;
  bool tail_decays = true;    // |stability| non-increasing over the last half
  int first_m_below_1e6 = -1;  // first m with |stability| < 1e-6, -1 if none
};

// Report-only check of the consistency condition |V_b| <= |1 + V_a| and
// the stability sequence sqrt(m) V_b/(1 + V_a) up to m_max.
inline ValidationReport validate_model(const InteractionModel& model, int m_max) {
  if (m_max < 1) throw std::invalid_argument("validate_model: m_max must be >= 1");
  ValidationReport rep;
  rep.rows.reserve(m_max);
  for (int m = 1; m <= m_max; ++m) {
    ValidationRow row;
    row.m = m;
    if (model.kind == ModelKind::Custom) {
      if (m <= static_cast<int>(model.va_table.size())) {
        row.va = model.va_table[m - 1];
        row.vb = model.vb_table[m - 1];
      }
    } else {
      row.va = model.va(m);
      row.vb = model.vb(m);
    }
    row.consistent = std::abs(row.vb) <= std::abs(1.0 + row.va);
    row.stability = std::sqrt(static_cast<double>(m)) * row.vb / (1.0 + row.va);
    rep.all_consistent = rep.all_consistent && row.consistent;
    if (rep.first_m_below_1e6 < 0 && std::abs(row.stability) < 1e-6)
      rep.first_m_below_1e6 = m;
    rep.rows.push_back(row);
  }
  for (std::size_t i = rep.rows.size() / 2; i + 1 < rep.rows.size(); ++i) {
    if (std::abs(rep.rows[i + 1].stability) > std::abs(rep.rows[i].stability) + 1e-15)
      rep.tail_decays = false;
  }
  return rep;
}

}  // namespace fermitrap

#endif  // FERMITRAP_INTERACTION_HPP
