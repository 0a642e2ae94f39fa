#ifndef FERMITRAP_QUADRATURE_HPP
#define FERMITRAP_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "fermitrap/errors.hpp"

namespace fermitrap {

struct QuadResult {
  double value = 0.0;
  double est_error = 0.0;
  int nodes = 0;
};

// Mean of f over the periodic interval [-pi, pi), i.e. (1/2pi) Int f ds,
// with n equispaced nodes. Spectrally accurate for smooth periodic f.
template <typename F>
double periodic_trapezoid(F&& f, int n) {
  const double step = 2.0 * M_PI / n;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) sum += f(-M_PI + j * step);
  return sum / n;
}

// Node-doubling driver: doubles n until two consecutive results differ by
// less than tol (absolute). The final difference is the error estimate.
template <typename F>
QuadResult periodic_trapezoid_auto(F&& f, int n0, double tol, int n_max = (1 << 20)) {
  int n = std::max(8, n0);
  if (n % 2) ++n;
  double prev = periodic_trapezoid(f, n);
  while (n < n_max) {
    n *= 2;
    const double cur = periodic_trapezoid(f, n);
    const double diff = std::abs(cur - prev);
    if (diff <= tol) return {cur, diff, n};
    prev = cur;
  }
  throw ConvergenceError("periodic_trapezoid_auto: no convergence at n_max nodes");
}

namespace detail {

// Gauss-Kronrod 15(7) abscissae and weights on [-1, 1] (QUADPACK dqk15).
inline constexpr double gk15_x[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
inline constexpr double gk15_wk[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
inline constexpr double gk15_wg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

template <typename F>
inline void gk15_panel(F& f, double a, double b, double& val, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double result_k = gk15_wk[7] * fc;
  double result_g = gk15_wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * gk15_x[i];
    const double fsum = f(c - dx) + f(c + dx);
    result_k += gk15_wk[i] * fsum;
    if (i % 2 == 1) result_g += gk15_wg[i / 2] * fsum;
  }
  val = result_k * h;
  err = std::abs(result_k - result_g) * h;
}

struct Panel {
  double a, b, val, err;
  bool operator<(const Panel& other) const { return err < other.err; }
};

}  // namespace detail

// Adaptive Gauss-Kronrod on [a, b]. Optional interior breakpoints seed the
// panel list (used to pre-split oscillatory integrands). Stops when the
// error estimate drops below max(abs_tol, rel_tol * |result|).
template <typename F>
QuadResult gauss_kronrod(F&& f, double a, double b, double abs_tol,
                         const std::vector<double>& breakpoints = {},
                         int max_panels = 20000, double rel_tol = 0.0) {
  std::vector<double> edges;
  edges.push_back(a);
  for (double x : breakpoints)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());

  std::priority_queue<detail::Panel> heap;
  double total = 0.0, total_err = 0.0;
  int evals = 0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    detail::Panel p{edges[i], edges[i + 1], 0.0, 0.0};
    detail::gk15_panel(f, p.a, p.b, p.val, p.err);
    evals += 15;
    total += p.val;
    total_err += p.err;
    heap.push(p);
  }
  int n_panels = static_cast<int>(edges.size()) - 1;
  auto target = [&] { return std::max(abs_tol, rel_tol * std::abs(total)); };
  while (total_err > target() && n_panels < max_panels) {
    detail::Panel worst = heap.top();
    heap.pop();
    total -= worst.val;
    total_err -= worst.err;
    const double mid = 0.5 * (worst.a + worst.b);
    for (const auto& [lo, hi] : {std::pair{worst.a, mid}, std::pair{mid, worst.b}}) {
      detail::Panel p{lo, hi, 0.0, 0.0};
      detail::gk15_panel(f, p.a, p.b, p.val, p.err);
      evals += 15;
      total += p.val;
      total_err += p.err;
      heap.push(p);
    }
    ++n_panels;
  }
  if (total_err > target())
    throw ConvergenceError("gauss_kronrod: panel budget exhausted, err=" +
                           std::to_string(total_err));
  return {total, total_err, evals};
}

// Trapezoid integral of uniformly sampled values with spacing h.
inline double sampled_trapezoid(const std::vector<double>& y, double h) {
  if (y.size() < 2) return 0.0;
  double sum = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) sum += y[i];
  return sum * h;
}

}  // namespace fermitrap

#endif  // FERMITRAP_QUADRATURE_HPP
