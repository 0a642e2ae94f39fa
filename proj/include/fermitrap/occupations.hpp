#ifndef FERMITRAP_OCCUPATIONS_HPP
#define FERMITRAP_OCCUPATIONS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fermitrap/errors.hpp"
#include "fermitrap/interaction.hpp"
#include "fermitrap/quadrature.hpp"
#include "fermitrap/specfun.hpp"
#include "fermitrap/trap.hpp"

namespace fermitrap {

struct QuadratureMeta {
  int nodes = 0;          // largest grid used by any entry
  double est_error = 0.0; // largest node-doubling difference
  int m_cut = 0;          // series truncation (general path)
  double truncation_error = 0.0;
  bool flagged = false;   // set when a coupling tail did not converge
};

// Banded table of <c^+_{M-p} c_{M+p}>; only even index differences exist,
// p is the half-difference. Stored entries satisfy M - p >= 0 and
// M + p <= M_max. The table is symmetric: each value stands for both
// operator orderings.
struct OccupationMatrix {
  int N = 0;
  int M_max = 0;
  std::string model_id;
  QuadratureMeta meta;

  std::vector<double> values;
  std::vector<int> offsets;  // offsets[M] + p indexes (M, p)

  static OccupationMatrix empty(int n_particles, int m_max, std::string id) {
    OccupationMatrix occ;
    occ.N = n_particles;
    occ.M_max = m_max;
    occ.model_id = std::move(id);
    occ.offsets.resize(m_max + 2, 0);
    for (int m = 0; m <= m_max; ++m)
      occ.offsets[m + 1] = occ.offsets[m] + occ.p_count(m);
    occ.values.assign(occ.offsets[m_max + 1], 0.0);
    return occ;
  }

  int p_count(int m) const { return std::min(m, M_max - m) + 1; }

  bool has(int m, int p) const {
    return m >= 0 && m <= M_max && p >= 0 && p <= std::min(m, M_max - m);
  }

  double at(int m, int p) const {
    if (!has(m, p)) throw std::out_of_range("OccupationMatrix::at: no such entry");
    return values[offsets[m] + p];
  }

  double& slot(int m, int p) { return values[offsets[m] + p]; }

  double occupation(int m) const { return at(m, 0); }

  // Sum of occupation probabilities over [0, 2N-1]; the particle-hole pair
  // structure closes the tail exactly. Requires M_max >= 2N-1.
  double occupation_sum() const {
    if (M_max < 2 * N - 1)
      throw std::invalid_argument("occupation_sum: needs M_max >= 2N-1");
    double sum = 0.0;
    for (int m = 0; m <= 2 * N - 1; ++m) sum += at(m, 0);
    return sum;
  }
};

// ---------------------------------------------------------------------------
// IM1: single closed integral of the Dirichlet kernel against a Gaussian
// damping factor and a modified Bessel function.
// ---------------------------------------------------------------------------

inline double occ_im1(const TrapConfig& trap, const InteractionModel& model, int M,
                      int p, double tol = 1e-9, QuadratureMeta* meta = nullptr) {
  if (M - p < 0) throw std::invalid_argument("occ_im1: requires M - p >= 0");
  if (p < 0) throw std::invalid_argument("occ_im1: requires p >= 0");
  if (model.kind != ModelKind::IM1 && model.kind != ModelKind::Free)
    throw std::invalid_argument("occ_im1: needs an IM1 (or Free) model");
  if (model.kind == ModelKind::IM1) coupling_at(model, 1);  // consistency gate

  const double g1 = model.gamma_m(1);
  const double a1 = model.alpha_m(1);
  const double a = M + 0.5 - trap.N;
  auto f = [&](double s) {
    const double oneminus = 1.0 - std::cos(s);
    return dirichlet_kernel(a, s) * std::exp(-2.0 * g1 * oneminus) *
           bessel_i(p, 2.0 * a1 * oneminus);
  };
  const int n0 = 16 * std::max({static_cast<int>(std::ceil(std::abs(a))), p, 8});
  auto res = periodic_trapezoid_auto(f, n0, tol);
  if (meta) {
    meta->nodes = std::max(meta->nodes, res.nodes);
    meta->est_error = std::max(meta->est_error, res.est_error);
  }
  return (p == 0 ? 0.5 : 0.0) - res.value;
}

// ---------------------------------------------------------------------------
// IM2: closed double-integral form. Inner and outer integrals share one
// node grid so the cos(t -+ s) factors reduce to index shifts of a single
// power table.
// ---------------------------------------------------------------------------

namespace detail {

struct Im2Tables {
  int n = 0;
  double step = 0.0;
  std::vector<double> outer;    // (1 + Z_a - cos t)^(-alpha0)
  std::vector<double> gfac;     // (Z_g / (1 + Z_g - cos s))^(gamma0)
  std::vector<double> hfac;     // (1 + Z_a - cos(k step))^(alpha0/2)
  std::vector<double> costab;   // cos(theta_i)
  std::vector<double> theta;    // -pi + i*step

  static Im2Tables build(const InteractionModel& model, int n) {
    Im2Tables t;
    t.n = n;
    t.step = 2.0 * M_PI / n;
    const double g0 = model.gamma0;
    const double a0 = model.alpha0();
    const double zg = std::cosh(model.r_gamma) - 1.0;
    const double za = std::cosh(0.5 * model.r_alpha) - 1.0;
    t.outer.resize(n);
    t.gfac.resize(n);
    t.hfac.resize(n);
    t.costab.resize(n);
    t.theta.resize(n);
    for (int i = 0; i < n; ++i) {
      t.theta[i] = -M_PI + i * t.step;
      const double c = std::cos(t.theta[i]);
      t.costab[i] = c;
      t.outer[i] = std::pow(1.0 + za - c, -a0);
      t.gfac[i] = std::pow(zg / (1.0 + zg - c), g0);
      t.hfac[i] = std::pow(1.0 + za - std::cos(i * t.step), 0.5 * a0);
    }
    return t;
  }
};

// All (M, p) entries of the IM2 double integral on one n x n grid:
// (1/2) d_{p,0} - (1/n^2) sum_i cos(p t_i) outer_i sum_j D_M(s_j) g_j H_{i-j} H_{i+j}.
inline void im2_entries_at(const Im2Tables& t, int n_particles,
                           const std::vector<std::pair<int, int>>& index_pairs,
                           std::vector<double>& out) {
  const int n = t.n;
  int m_lo = 1 << 30, m_hi = -1;
  for (auto& [m, p] : index_pairs) {
    m_lo = std::min(m_lo, m);
    m_hi = std::max(m_hi, m);
  }
  // inner[i] per M, reused across all p with the same M
  std::vector<double> inner(n);
  std::vector<double> dvals(n);
  out.assign(index_pairs.size(), 0.0);
  for (int m = m_lo; m <= m_hi; ++m) {
    bool wanted = false;
    for (auto& [mm, pp] : index_pairs) wanted = wanted || (mm == m);
    if (!wanted) continue;
    const double a = m + 0.5 - n_particles;
    for (int j = 0; j < n; ++j) dvals[j] = dirichlet_kernel(a, t.theta[j]) * t.gfac[j];
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        const int d1 = i - j < 0 ? i - j + n : i - j;
        int d2 = i + j;
        if (d2 >= n) d2 -= n;
        acc += dvals[j] * t.hfac[d1] * t.hfac[d2];
      }
      inner[i] = acc * t.outer[i];
    }
    for (std::size_t e = 0; e < index_pairs.size(); ++e) {
      if (index_pairs[e].first != m) continue;
      const int p = index_pairs[e].second;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += std::cos(p * t.theta[i]) * inner[i];
      out[e] = (p == 0 ? 0.5 : 0.0) - acc / (static_cast<double>(n) * n);
    }
  }
}

}  // namespace detail

// Batch evaluation of the IM2 double integral with node doubling until
// every requested entry is stable to tol.
inline std::vector<double> occ_im2_entries(const TrapConfig& trap,
                                           const InteractionModel& model,
                                           const std::vector<std::pair<int, int>>& index_pairs,
                                           double tol = 1e-8,
                                           QuadratureMeta* meta = nullptr,
                                           int n_max = 4096) {
  if (model.kind != ModelKind::IM2) throw std::invalid_argument("occ_im2: needs an IM2 model");
  if (!(model.r_gamma > 0.0) || !(model.r_alpha > 0.0))
    throw std::domain_error("occ_im2: decay rates must be > 0 (Z constants vanish otherwise)");
  for (auto& [m, p] : index_pairs) {
    if (m - p < 0 || p < 0) throw std::invalid_argument("occ_im2: requires 0 <= p <= M");
  }
  int n = 128;
  std::vector<double> prev, cur;
  detail::im2_entries_at(detail::Im2Tables::build(model, n), trap.N, index_pairs, prev);
  while (n < n_max) {
    n *= 2;
    detail::im2_entries_at(detail::Im2Tables::build(model, n), trap.N, index_pairs, cur);
    double diff = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i)
      diff = std::max(diff, std::abs(cur[i] - prev[i]));
    if (diff <= tol) {
      if (meta) {
        meta->nodes = std::max(meta->nodes, n);
        meta->est_error = std::max(meta->est_error, diff);
      }
      return cur;
    }
    prev = cur;
  }
  throw ConvergenceError("occ_im2: node cap reached before tolerance");
}

inline double occ_im2(const TrapConfig& trap, const InteractionModel& model, int M,
                      int p, double tol = 1e-8, QuadratureMeta* meta = nullptr) {
  return occ_im2_entries(trap, model, {{M, p}}, tol, meta)[0];
}

// ---------------------------------------------------------------------------
// Generic W-series path: the model-agnostic (slow) oracle.
// ---------------------------------------------------------------------------

// Tabulated coupling constants gamma_m, alpha_m for m = 1..m_cut.
struct CouplingTable {
  std::vector<double> gamma, alpha;
  double truncation_error = 0.0;  // bound on the dropped W tail
  bool flagged = false;

  int m_cut() const { return static_cast<int>(gamma.size()); }

  static CouplingTable from_model(const InteractionModel& model, double tail_tol = 1e-12,
                                  int cap = 10000) {
    CouplingTable t;
    switch (model.kind) {
      case ModelKind::Free:
        break;
      case ModelKind::IM1:
        coupling_at(model, 1);
        t.gamma = {model.gamma_m(1)};
        t.alpha = {model.alpha_m(1)};
        break;
      case ModelKind::IM2: {
        for (int m = 1; m <= cap; ++m) {
          const double g = model.gamma_m(m);
          const double al = model.alpha_m(m);
          if (g + std::abs(al) < tail_tol) break;
          t.gamma.push_back(g);
          t.alpha.push_back(al);
        }
        break;
      }
      case ModelKind::Custom: {
        for (int m = 1; m <= static_cast<int>(model.va_table.size()); ++m) {
          auto c = coupling_at(model, m);
          t.gamma.push_back(c.gamma);
          t.alpha.push_back(c.alpha);
        }
        break;
      }
    }
    // W tail bound: 2 * sum_{m > m_cut} (gamma_m + |alpha_m|) * 2 / m
    if (!t.gamma.empty()) {
      const int mc = t.m_cut();
      const double last = t.gamma.back() + std::abs(t.alpha.back());
      if (model.kind == ModelKind::IM2 && last >= tail_tol) {
        // geometric continuation of the slower alpha decay
        const double q = std::exp(-0.5 * model.r_alpha);
        t.truncation_error = 4.0 * last * q / ((1.0 - q) * (mc + 1));
        t.flagged = t.truncation_error > 1e-9;
      }
    }
    return t;
  }
};

// Gaussian-boson exponent W(u, v), truncated at the table length.
struct WFunction {
  CouplingTable table;

  double operator()(double u, double v) const {
    double w = 0.0;
    for (int m = 1; m <= table.m_cut(); ++m) {
      w += (table.gamma[m - 1] - table.alpha[m - 1] * std::cos(m * (u + v))) *
           (1.0 - std::cos(m * (u - v))) / m;
    }
    return 2.0 * w;
  }
};

namespace detail {

// exp(-W) sampled on the shared n x n grid in the rotated variables
// t = u + v, s = u - v.
struct WGrid {
  int n = 0;
  double step = 0.0;
  std::vector<double> theta;
  std::vector<double> exp_neg_w;  // row-major [i*n + j] = exp(-W(t_i, s_j))

  static WGrid build(const CouplingTable& table, int n) {
    WGrid g;
    g.n = n;
    g.step = 2.0 * M_PI / n;
    g.theta.resize(n);
    std::vector<double> costab(n);
    for (int k = 0; k < n; ++k) {
      g.theta[k] = -M_PI + k * g.step;
      costab[k] = std::cos(2.0 * M_PI * k / n);
    }
    // cos(m * theta_k) = (-1)^m costab[(m k) mod n]
    const int mc = table.m_cut();
    std::vector<double> w(static_cast<std::size_t>(n) * n, 0.0);
    for (int m = 1; m <= mc; ++m) {
      const double par = (m % 2) ? -1.0 : 1.0;
      const double gm = table.gamma[m - 1], am = table.alpha[m - 1];
      if (gm == 0.0 && am == 0.0) continue;
      for (int i = 0; i < n; ++i) {
        const double cmt = par * costab[(static_cast<std::size_t>(m) * i) % n];
        const double row_coeff = (gm - am * cmt) / m;
        double* wrow = &w[static_cast<std::size_t>(i) * n];
        for (int j = 0; j < n; ++j) {
          const double cms = par * costab[(static_cast<std::size_t>(m) * j) % n];
          wrow[j] += row_coeff * (1.0 - cms);
        }
      }
    }
    g.exp_neg_w.resize(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) g.exp_neg_w[k] = std::exp(-2.0 * w[k]);
    return g;
  }
};

inline void general_entries_at(const WGrid& g, int n_particles,
                               const std::vector<std::pair<int, int>>& index_pairs,
                               std::vector<double>& out) {
  const int n = g.n;
  std::vector<double> inner(n), dvals(n);
  out.assign(index_pairs.size(), 0.0);
  int m_prev = -(1 << 30);
  for (std::size_t e = 0; e < index_pairs.size(); ++e) {
    const int m = index_pairs[e].first;
    const int p = index_pairs[e].second;
    if (m != m_prev) {
      const double a = m + 0.5 - n_particles;
      for (int j = 0; j < n; ++j) dvals[j] = dirichlet_kernel(a, g.theta[j]);
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* row = &g.exp_neg_w[static_cast<std::size_t>(i) * n];
        for (int j = 0; j < n; ++j) acc += dvals[j] * row[j];
        inner[i] = acc;
      }
      m_prev = m;
    }
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::cos(p * g.theta[i]) * inner[i];
    out[e] = (p == 0 ? 0.5 : 0.0) - acc / (static_cast<double>(n) * n);
  }
}

}  // namespace detail

// Batch form of the W-series path. index_pairs should be grouped by M for
// efficiency (the inner integral is shared).
inline std::vector<double> occ_general_entries(const TrapConfig& trap,
                                               const CouplingTable& table,
                                               const std::vector<std::pair<int, int>>& index_pairs,
                                               double tol = 1e-8,
                                               QuadratureMeta* meta = nullptr,
                                               int n_max = 4096) {
  for (auto& [m, p] : index_pairs) {
    if (m - p < 0 || p < 0) throw std::invalid_argument("occ_general: requires 0 <= p <= M");
  }
  int n = 128;
  std::vector<double> prev, cur;
  detail::general_entries_at(detail::WGrid::build(table, n), trap.N, index_pairs, prev);
  while (n < n_max) {
    n *= 2;
    detail::general_entries_at(detail::WGrid::build(table, n), trap.N, index_pairs, cur);
    double diff = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i)
      diff = std::max(diff, std::abs(cur[i] - prev[i]));
    if (diff <= tol) {
      if (meta) {
        meta->nodes = std::max(meta->nodes, n);
        meta->est_error = std::max(meta->est_error, diff);
        meta->m_cut = table.m_cut();
        meta->truncation_error = table.truncation_error;
        meta->flagged = meta->flagged || table.flagged;
      }
      return cur;
    }
    prev = cur;
  }
  throw ConvergenceError("occ_general: node cap reached before tolerance");
}

inline double occ_general(const TrapConfig& trap, const CouplingTable& table, int M,
                          int p, double tol = 1e-8, QuadratureMeta* meta = nullptr) {
  return occ_general_entries(trap, table, {{M, p}}, tol, meta)[0];
}

// ---------------------------------------------------------------------------
// First-order perturbation theory in V_b(1) with V_a(1) = 0: the only O(vb1)
// matrix elements are the p = 1 entries next to the Fermi edge,
//   <c^+_{M-1} c_{M+1}> = (vb1/4) (d_{M,N-1} - d_{M,N}).
// Diagonal corrections are O(vb1^2).
// ---------------------------------------------------------------------------

inline double occ_first_order_slope(const TrapConfig& trap, int M, int p) {
  if (p == 1) {
    if (M == trap.N - 1) return 0.25;
    if (M == trap.N) return -0.25;
  }
  return 0.0;
}

inline double occ_first_order(const TrapConfig& trap, double vb1, int M, int p) {
  if (M - p < 0 || p < 0) throw std::invalid_argument("occ_first_order: requires 0 <= p <= M");
  const double free_val = (p == 0) ? (M < trap.N ? 1.0 : 0.0) : 0.0;
  return free_val + vb1 * occ_first_order_slope(trap, M, p);
}

// ---------------------------------------------------------------------------
// Full table builder.
// ---------------------------------------------------------------------------

inline OccupationMatrix occupation_matrix(const TrapConfig& trap,
                                          const InteractionModel& model, int M_max,
                                          double tol = 1e-8) {
  if (M_max < trap.N - 1)
    throw std::invalid_argument("occupation_matrix: M_max must be >= N-1");
  OccupationMatrix occ = OccupationMatrix::empty(trap.N, M_max, model.id());

  std::vector<std::pair<int, int>> pairs;
  for (int m = 0; m <= M_max; ++m)
    for (int p = 0; p < occ.p_count(m); ++p) pairs.emplace_back(m, p);

  switch (model.kind) {
    case ModelKind::Free: {
      for (int m = 0; m <= M_max; ++m) occ.slot(m, 0) = (m < trap.N) ? 1.0 : 0.0;
      break;
    }
    case ModelKind::IM1: {
      for (auto& [m, p] : pairs) occ.slot(m, p) = occ_im1(trap, model, m, p, tol, &occ.meta);
      break;
    }
    case ModelKind::IM2: {
      auto vals = occ_im2_entries(trap, model, pairs, tol, &occ.meta);
      for (std::size_t i = 0; i < pairs.size(); ++i)
        occ.slot(pairs[i].first, pairs[i].second) = vals[i];
      break;
    }
    case ModelKind::Custom: {
      auto table = CouplingTable::from_model(model);
      auto vals = occ_general_entries(trap, table, pairs, tol, &occ.meta);
      for (std::size_t i = 0; i < pairs.size(); ++i)
        occ.slot(pairs[i].first, pairs[i].second) = vals[i];
      break;
    }
  }
  return occ;
}

// ---------------------------------------------------------------------------
// Delta-sequence check: the summed Dirichlet kernels satisfy
// Int (ds/2pi) [sum_{M=0}^{Q} D_{M+1/2-N}(s)] f(s) -> f(0) ((Q+1)/2 - N).
// ---------------------------------------------------------------------------

struct FermiSumRow {
  std::string name;
  double computed = 0.0;
  double expected = 0.0;
  double abs_err = 0.0;
};

struct FermiSumReport {
  int N = 0, Q = 0;
  std::vector<FermiSumRow> rows;
};

inline FermiSumReport fermi_sum_identity_check(int n_particles, int Q, int nodes = 0) {
  if (Q < 2 * n_particles)
    throw std::invalid_argument("fermi_sum_identity_check: requires Q >= 2N");
  if (nodes <= 0) nodes = std::max(1024, 4 * (Q + 8));
  FermiSumReport rep;
  rep.N = n_particles;
  rep.Q = Q;
  auto kernel_sum = [&](double s) {
    double acc = 0.0;
    for (int m = 0; m <= Q; ++m) acc += dirichlet_kernel(m + 0.5 - n_particles, s);
    return acc;
  };
  const double weight = 0.5 * (Q + 1.0) - n_particles;
  // The identity is exact for test functions band-limited below N: Fourier
  // content at degree j >= N leaves a Q-independent residual
  // sum_j c_j (j - N)/2. The third row therefore uses a degree-(N-1)
  // polynomial with all harmonics populated.
  const int deg = n_particles - 1;
  std::vector<std::pair<std::string, std::function<double(double)>>> fns = {
      {"one", [](double) { return 1.0; }},
      {"cos", [](double s) { return std::cos(s); }},
      {"poly_bandlimited",
       [deg](double s) {
         double acc = 0.0;
         for (int k = 0; k <= deg; ++k) acc += std::pow(0.5, k) * std::cos(k * s);
         return acc;
       }},
  };
  for (auto& [name, f] : fns) {
    FermiSumRow row;
    row.name = name;
    row.computed = periodic_trapezoid([&](double s) { return kernel_sum(s) * f(s); }, nodes);
    row.expected = f(0.0) * weight;
    row.abs_err = std::abs(row.computed - row.expected);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace fermitrap

#endif  // FERMITRAP_OCCUPATIONS_HPP
