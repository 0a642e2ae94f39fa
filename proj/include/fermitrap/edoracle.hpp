#ifndef FERMITRAP_EDORACLE_HPP
#define FERMITRAP_EDORACLE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fermitrap/errors.hpp"
#include "fermitrap/interaction.hpp"
#include "fermitrap/occupations.hpp"

namespace fermitrap {

// Spinless-fermion Fock space over oscillator levels [level_lo, level_hi]
// with a fixed particle number. level_lo may be negative: those levels
// emulate the anomalous vacuum with the linear energy continuation
// (n + 1/2), and are filled in the reference state.
struct FockBasis {
  int level_lo = 0;
  int level_hi = 0;
  int n_tot = 0;
  std::vector<std::uint64_t> states;  // sorted ascending

  int n_levels() const { return level_hi - level_lo + 1; }
  int dim() const { return static_cast<int>(states.size()); }
  int bit_of(int level) const { return level - level_lo; }

  std::uint64_t reference_state() const { return (std::uint64_t{1} << n_tot) - 1; }

  int index_of(std::uint64_t s) const {
    auto it = std::lower_bound(states.begin(), states.end(), s);
    if (it == states.end() || *it != s) return -1;
    return static_cast<int>(it - states.begin());
  }

  static FockBasis make(int level_lo, int level_hi, int n_tot) {
    const int levels = level_hi - level_lo + 1;
    if (levels < 1 || levels > 62)
      throw std::invalid_argument("FockBasis: need 1..62 levels");
    if (n_tot < 1 || n_tot > levels)
      throw std::invalid_argument("FockBasis: need 1 <= N_tot <= level count");
    double log_dim = std::lgamma(levels + 1.0) - std::lgamma(n_tot + 1.0) -
                     std::lgamma(levels - n_tot + 1.0);
    if (log_dim > std::log(4.0e6))
      throw std::invalid_argument("FockBasis: dimension exceeds 4e6");
    FockBasis basis;
    basis.level_lo = level_lo;
    basis.level_hi = level_hi;
    basis.n_tot = n_tot;
    // Gosper's hack enumerates all n_tot-bit subsets in increasing order
    std::uint64_t s = (std::uint64_t{1} << n_tot) - 1;
    const std::uint64_t limit = std::uint64_t{1} << levels;
    while (s < limit) {
      basis.states.push_back(s);
      const std::uint64_t c = s & (~s + 1);
      const std::uint64_t r = s + c;
      s = (((r ^ s) >> 2) / c) | r;
    }
    return basis;
  }
};

// Symmetric sparse operator in CSR form.
struct ManyBodyOperator {
  int dim = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;
  double hermiticity_residual = 0.0;
  long dropped_bilinears = 0;

  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
      double acc = 0.0;
      for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += val[k] * x[col[k]];
      y[i] = acc;
    }
  }
};

namespace detail {

inline int parity_below(std::uint64_t s, int bit) {
  const std::uint64_t mask = (std::uint64_t{1} << bit) - 1;
  return __builtin_popcountll(s & mask) & 1;
}

// c^+_{b+shift} c_b summed over b: apply rho(shift) to |s>, appending
// signed results. shift may be negative.
inline void apply_rho(std::uint64_t s, double amp, int shift, int n_levels,
                      std::vector<std::pair<std::uint64_t, double>>& out) {
  for (int b = 0; b < n_levels; ++b) {
    const int a = b + shift;
    if (a < 0 || a >= n_levels) continue;
    if (!(s >> b & 1)) continue;
    std::uint64_t t = s ^ (std::uint64_t{1} << b);
    if (t >> a & 1) continue;
    double sign = parity_below(s, b) ? -1.0 : 1.0;
    if (parity_below(t, a)) sign = -sign;
    out.emplace_back(t | (std::uint64_t{1} << a), amp * sign);
  }
}

}  // namespace detail

// H = sum_n (n + 1/2) c^+_n c_n
//   + (1/2) sum_{m<=m_cut} { V_a(m) [rho(m)rho(-m) + rho(-m)rho(m)]
//                          + V_b(m) [rho(m)rho(m) + rho(-m)rho(-m)] },
// restricted to the basis window; bilinears leaving the window are dropped
// and counted. Energies in units of hbar omega_l.
inline ManyBodyOperator build_hamiltonian(const FockBasis& basis,
                                          const InteractionModel& model, int m_cut) {
  if (m_cut < 1) throw std::invalid_argument("build_hamiltonian: m_cut must be >= 1");
  const int levels = basis.n_levels();
  if (m_cut >= levels)
    throw std::invalid_argument(
        "build_hamiltonian: basis too small for m_cut (every rho(" +
        std::to_string(m_cut) + ") bilinear would cross the boundary)");

  std::vector<std::pair<double, double>> vab(m_cut + 1, {0.0, 0.0});
  for (int m = 1; m <= m_cut; ++m) {
    if (model.kind == ModelKind::Custom) {
      if (m <= static_cast<int>(model.va_table.size()))
        vab[m] = {model.va_table[m - 1], model.vb_table[m - 1]};
    } else {
      vab[m] = {model.va(m), model.vb(m)};
    }
  }

  ManyBodyOperator h;
  h.dim = basis.dim();
  h.row_ptr.assign(h.dim + 1, 0);
  for (int m = 1; m <= m_cut; ++m) {
    if (vab[m].first != 0.0) h.dropped_bilinears += 4L * 2 * m;
    if (vab[m].second != 0.0) h.dropped_bilinears += 4L * 2 * m;
  }

  std::vector<std::vector<std::pair<int, double>>> rows(h.dim);
  std::vector<std::pair<std::uint64_t, double>> stage1, stage2;
  for (int j = 0; j < h.dim; ++j) {
    const std::uint64_t s = basis.states[j];
    std::map<std::uint64_t, double> acc;

    double diag = 0.0;
    for (int b = 0; b < levels; ++b)
      if (s >> b & 1) diag += (basis.level_lo + b) + 0.5;
    acc[s] += diag;

    for (int m = 1; m <= m_cut; ++m) {
      const auto [va, vb] = vab[m];
      if (va == 0.0 && vb == 0.0) continue;
      // the four ordered products (first applied operator listed second)
      const std::pair<int, int> prods[4] = {{m, -m}, {-m, m}, {m, m}, {-m, -m}};
      const double coeff[4] = {0.5 * va, 0.5 * va, 0.5 * vb, 0.5 * vb};
      for (int t = 0; t < 4; ++t) {
        if (coeff[t] == 0.0) continue;
        stage1.clear();
        detail::apply_rho(s, coeff[t], prods[t].second, levels, stage1);
        for (const auto& [s1, a1] : stage1) {
          stage2.clear();
          detail::apply_rho(s1, a1, prods[t].first, levels, stage2);
          for (const auto& [s2, a2] : stage2) acc[s2] += a2;
        }
      }
    }

    auto& row = rows[j];
    row.reserve(acc.size());
    for (const auto& [state, value] : acc) {
      if (value == 0.0) continue;
      const int i = basis.index_of(state);
      if (i < 0)
        throw std::logic_error("build_hamiltonian: operator left the particle-number block");
      row.emplace_back(i, value);
    }
  }

  std::size_t nnz = 0;
  for (const auto& row : rows) nnz += row.size();
  h.col.reserve(nnz);
  h.val.reserve(nnz);
  for (int j = 0; j < h.dim; ++j) {
    for (const auto& [i, v] : rows[j]) {
      h.col.push_back(i);
      h.val.push_back(v);
    }
    h.row_ptr[j + 1] = static_cast<int>(h.col.size());
  }

  // measure the float-noise asymmetry, then average with the transpose
  // (columns are sorted within each row, so the mirror entry is a binary
  // search away; a missing mirror can only be an exact-zero cancellation)
  auto find_entry = [&](int r, int c) -> int {
    int lo = h.row_ptr[r], hi = h.row_ptr[r + 1];
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (h.col[mid] < c)
        lo = mid + 1;
      else
        hi = mid;
    }
    return (lo < h.row_ptr[r + 1] && h.col[lo] == c) ? lo : -1;
  };
  double resid = 0.0;
  for (int i = 0; i < h.dim; ++i) {
    for (int k = h.row_ptr[i]; k < h.row_ptr[i + 1]; ++k) {
      const int j = h.col[k];
      if (j <= i) continue;
      const int kt = find_entry(j, i);
      const double vt = kt < 0 ? 0.0 : h.val[kt];
      resid = std::max(resid, std::abs(h.val[k] - vt));
      const double avg = 0.5 * (h.val[k] + vt);
      h.val[k] = avg;
      if (kt >= 0) h.val[kt] = avg;
    }
  }
  h.hermiticity_residual = resid;
  return h;
}

struct GroundState {
  double energy = 0.0;
  std::vector<double> vec;
  double residual = 0.0;
  double gap = 0.0;
};

namespace detail {

inline GroundState ground_state_dense(const ManyBodyOperator& h) {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(h.dim, h.dim);
  for (int i = 0; i < h.dim; ++i)
    for (int k = h.row_ptr[i]; k < h.row_ptr[i + 1]; ++k) dense(i, h.col[k]) = h.val[k];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("ground_state: dense eigensolver failed");
  GroundState gs;
  gs.energy = solver.eigenvalues()(0);
  gs.gap = h.dim > 1 ? solver.eigenvalues()(1) - solver.eigenvalues()(0) : 0.0;
  gs.vec.resize(h.dim);
  for (int i = 0; i < h.dim; ++i) gs.vec[i] = solver.eigenvectors()(i, 0);
  std::vector<double> hx;
  h.apply(gs.vec, hx);
  double r2 = 0.0;
  for (int i = 0; i < h.dim; ++i) {
    const double r = hx[i] - gs.energy * gs.vec[i];
    r2 += r * r;
  }
  gs.residual = std::sqrt(r2);
  return gs;
}

inline GroundState ground_state_lanczos(const ManyBodyOperator& h, int max_iter,
                                        double tol) {
  const int n = h.dim;
  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<std::vector<double>> basis;
  std::vector<double> alphas, betas;

  std::vector<double> v(n), w(n);
  for (double& x : v) x = uni(rng);
  double nrm = 0.0;
  for (double x : v) nrm += x * x;
  nrm = std::sqrt(nrm);
  for (double& x : v) x /= nrm;
  basis.push_back(v);

  auto tridiag_lowest = [&](Eigen::VectorXd& y, double& theta0, double& theta1) {
    const int k = static_cast<int>(alphas.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      t(i, i) = alphas[i];
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = betas[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    theta0 = es.eigenvalues()(0);
    theta1 = k > 1 ? es.eigenvalues()(1) : theta0;
    y = es.eigenvectors().col(0);
  };

  double theta0 = 0.0, theta1 = 0.0;
  Eigen::VectorXd y;
  for (int it = 0; it < max_iter; ++it) {
    h.apply(basis.back(), w);
    if (it > 0) {
      const double beta = betas.back();
      const auto& prev = basis[basis.size() - 2];
      for (int i = 0; i < n; ++i) w[i] -= beta * prev[i];
    }
    double alpha = 0.0;
    for (int i = 0; i < n; ++i) alpha += w[i] * basis.back()[i];
    alphas.push_back(alpha);
    for (int i = 0; i < n; ++i) w[i] -= alpha * basis.back()[i];
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        double proj = 0.0;
        for (int i = 0; i < n; ++i) proj += w[i] * q[i];
        for (int i = 0; i < n; ++i) w[i] -= proj * q[i];
      }
    }
    double beta = 0.0;
    for (double x : w) beta += x * x;
    beta = std::sqrt(beta);

    tridiag_lowest(y, theta0, theta1);
    const double conv = (alphas.size() > 1) ? std::abs(beta * y(y.size() - 1)) : 1.0;
    if (conv < tol || beta < 1e-14 || it == max_iter - 1) {
      GroundState gs;
      gs.energy = theta0;
      gs.gap = theta1 - theta0;
      gs.vec.assign(n, 0.0);
      for (std::size_t k = 0; k < basis.size(); ++k)
        for (int i = 0; i < n; ++i) gs.vec[i] += y(k) * basis[k][i];
      double vnrm = 0.0;
      for (double x : gs.vec) vnrm += x * x;
      vnrm = std::sqrt(vnrm);
      for (double& x : gs.vec) x /= vnrm;
      std::vector<double> hx;
      h.apply(gs.vec, hx);
      double r2 = 0.0;
      for (int i = 0; i < n; ++i) {
        const double r = hx[i] - gs.energy * gs.vec[i];
        r2 += r * r;
      }
      gs.residual = std::sqrt(r2);
      if (gs.residual > tol * 100.0 && beta >= 1e-14 && it == max_iter - 1)
        throw ConvergenceError("ground_state: Lanczos residual " +
                               std::to_string(gs.residual));
      return gs;
    }
    betas.push_back(beta);
    for (double& x : w) x /= beta;
    basis.push_back(w);
  }
  throw ConvergenceError("ground_state: Lanczos failed");
}

}  // namespace detail

inline GroundState ground_state(const ManyBodyOperator& h, int dense_threshold = 4000,
                                double tol = 1e-11, int max_iter = 400) {
  if (h.dim < 1) throw std::invalid_argument("ground_state: empty operator");
  if (h.dim <= dense_threshold) return detail::ground_state_dense(h);
  return detail::ground_state_lanczos(h, max_iter, tol);
}

// One-body reduced density matrix <c^+_a c_b> over the basis window.
struct OneBodyMatrix {
  int level_lo = 0;
  int level_hi = 0;
  std::vector<double> rho;  // row-major (n_levels x n_levels)

  int n_levels() const { return level_hi - level_lo + 1; }
  double at_levels(int level_a, int level_b) const {
    const int n = n_levels();
    return rho[static_cast<std::size_t>(level_a - level_lo) * n + (level_b - level_lo)];
  }
  double trace() const {
    double t = 0.0;
    for (int a = 0; a < n_levels(); ++a) t += rho[static_cast<std::size_t>(a) * n_levels() + a];
    return t;
  }
  double max_odd_difference() const {
    const int n = n_levels();
    double worst = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if ((a - b) % 2 != 0)
          worst = std::max(worst, std::abs(rho[static_cast<std::size_t>(a) * n + b]));
    return worst;
  }
};

inline OneBodyMatrix one_body_matrix(const std::vector<double>& state,
                                     const FockBasis& basis) {
  const int n = basis.n_levels();
  OneBodyMatrix obm;
  obm.level_lo = basis.level_lo;
  obm.level_hi = basis.level_hi;
  obm.rho.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < basis.dim(); ++j) {
    const double cj = state[j];
    if (cj == 0.0) continue;
    const std::uint64_t s = basis.states[j];
    for (int b = 0; b < n; ++b) {
      if (!(s >> b & 1)) continue;
      obm.rho[static_cast<std::size_t>(b) * n + b] += cj * cj;
      std::uint64_t t = s ^ (std::uint64_t{1} << b);
      for (int a = 0; a < n; ++a) {
        if (a == b || (t >> a & 1)) continue;
        double sign = detail::parity_below(s, b) ? -1.0 : 1.0;
        if (detail::parity_below(t, a)) sign = -sign;
        const int i = basis.index_of(t | (std::uint64_t{1} << a));
        if (i >= 0) obm.rho[static_cast<std::size_t>(a) * n + b] += sign * state[i] * cj;
      }
    }
  }
  return obm;
}

struct EdCompareRow {
  int M = 0, p = 0;
  double ed = 0.0;
  double luttinger = 0.0;
  double abs_dev = 0.0;
};

struct EdCompareReport {
  int dim = 0;
  int n_levels = 0;
  long dropped_bilinears = 0;
  double ground_energy = 0.0;
  double gap = 0.0;
  double residual = 0.0;
  std::vector<EdCompareRow> rows;
  double max_abs_dev = 0.0;
  double rms_dev = 0.0;
};

// Deviation between the ED one-body matrix and an occupation table over a
// level window near the Fermi edge (diagonal plus even off-diagonals).
inline EdCompareReport compare_to_luttinger(const OneBodyMatrix& obm,
                                            const OccupationMatrix& occ,
                                            const std::vector<int>& window_levels,
                                            int p_max = 1) {
  EdCompareReport rep;
  double sq = 0.0;
  for (int M : window_levels) {
    for (int p = 0; p <= p_max; ++p) {
      if (M - p < obm.level_lo || M + p > obm.level_hi) continue;
      if (!occ.has(M, p)) continue;
      EdCompareRow row;
      row.M = M;
      row.p = p;
      row.ed = obm.at_levels(M - p, M + p);
      row.luttinger = occ.at(M, p);
      row.abs_dev = std::abs(row.ed - row.luttinger);
      rep.rows.push_back(row);
      rep.max_abs_dev = std::max(rep.max_abs_dev, row.abs_dev);
      sq += row.abs_dev * row.abs_dev;
    }
  }
  if (!rep.rows.empty()) rep.rms_dev = std::sqrt(sq / rep.rows.size());
  return rep;
}

// One full oracle pass: basis with n_below anomalous levels, n_levels total,
// vs the closed-form occupation table for the physical particle number.
inline EdCompareReport run_ed_comparison(const TrapConfig& trap,
                                         const InteractionModel& model, int m_cut,
                                         int n_below, int n_levels,
                                         int window_halfwidth, int p_max = 1,
                                         int dense_threshold = 4000) {
  const int n_phys = trap.N;
  auto basis = FockBasis::make(-n_below, n_levels - n_below - 1, n_phys + n_below);
  auto h = build_hamiltonian(basis, model, m_cut);
  auto gs = ground_state(h, dense_threshold);
  auto obm = one_body_matrix(gs.vec, basis);

  auto occ = occupation_matrix(trap, model, 2 * n_phys, 1e-9);
  std::vector<int> window;
  for (int M = std::max(0, n_phys - window_halfwidth); M <= n_phys + window_halfwidth; ++M)
    window.push_back(M);

  auto rep = compare_to_luttinger(obm, occ, window, p_max);
  rep.dim = basis.dim();
  rep.n_levels = basis.n_levels();
  rep.dropped_bilinears = h.dropped_bilinears;
  rep.ground_energy = gs.energy;
  rep.gap = gs.gap;
  rep.residual = gs.residual;
  return rep;
}

}  // namespace fermitrap

#endif  // FERMITRAP_EDORACLE_HPP
