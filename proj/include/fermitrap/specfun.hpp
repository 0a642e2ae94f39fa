#ifndef FERMITRAP_SPECFUN_HPP
#define FERMITRAP_SPECFUN_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fermitrap {

// Table of normalized harmonic oscillator eigenfunctions at a fixed
// dimensionless coordinate x = alpha*z: values[n] = psi_n(z)*sqrt(l).
struct HermiteFunctionTable {
  int n_max = 0;
  double x = 0.0;
  std::vector<double> values;
};

// Upward three-term recurrence for the normalized oscillator functions,
//   psi_{n+1} = x sqrt(2/(n+1)) psi_n - sqrt(n/(n+1)) psi_{n-1},
// seeded by psi_0 = pi^{-1/4} exp(-x^2/2). The seed is carried as
// mantissa * 2^E so that coordinates far outside the classical region of
// low n (where exp(-x^2/2) underflows) still produce correct high-n values;
// entries whose true magnitude is below the double range come out as 0.
inline HermiteFunctionTable psi_row(int n_max, double x) {
  if (n_max < 0) throw std::invalid_argument("psi_row: n_max must be >= 0");
  if (!std::isfinite(x)) throw std::invalid_argument("psi_row: x must be finite");
  HermiteFunctionTable table;
  table.n_max = n_max;
  table.x = x;
  table.values.resize(n_max + 1);

  const double log_psi0 = -0.25 * std::log(M_PI) - 0.5 * x * x;
  int scale = static_cast<int>(std::floor(log_psi0 / M_LN2));
  double cur = std::exp(log_psi0 - scale * M_LN2);  // in [1, 2)
  double prev = 0.0;

  table.values[0] = std::ldexp(cur, scale);
  for (int n = 0; n < n_max; ++n) {
    double next = x * std::sqrt(2.0 / (n + 1)) * cur -
                  std::sqrt(static_cast<double>(n) / (n + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > 0x1p500) {
      cur = std::ldexp(cur, -600);
      prev = std::ldexp(prev, -600);
      scale += 600;
    }
    table.values[n + 1] = std::ldexp(cur, scale);
  }
  return table;
}

// Associated Laguerre polynomial L_m^{(Q)}(v) by the stable upward
// recurrence in the degree.
inline double laguerre_assoc(int m, int q_offset, double v) {
  if (m < 0) throw std::invalid_argument("laguerre_assoc: m must be >= 0");
  double lkm1 = 1.0;
  if (m == 0) return lkm1;
  double lk = 1.0 + q_offset - v;
  for (int k = 1; k < m; ++k) {
    const double lkp1 = ((2.0 * k + 1.0 + q_offset - v) * lk - (k + q_offset) * lkm1) / (k + 1.0);
    lkm1 = lk;
    lk = lkp1;
  }
  return lk;
}

namespace detail {

// Jacobi-Anger integral representations evaluated by the periodic
// trapezoid: the integrands extend to smooth 2pi-periodic functions, so the
// rule converges spectrally once the node count exceeds the Fourier
// bandwidth (~ |x| + order).
inline double bessel_i_integral(int p, double x) {
  const int n = static_cast<int>(std::ceil(1.1 * std::abs(x) + p + 60));
  const double h = M_PI / n;
  double sum = 0.5 * (std::exp(x) + std::exp(-x) * ((p % 2) ? -1.0 : 1.0));
  for (int j = 1; j < n; ++j) {
    const double th = j * h;
    sum += std::exp(x * std::cos(th)) * std::cos(p * th);
  }
  return sum / n;
}

inline double bessel_j_integral(int q, double x) {
  const int n = static_cast<int>(std::ceil(1.2 * std::abs(x) + q + 60));
  const double h = M_PI / n;
  // endpoint values: cos(q*0 - 0) = 1 and cos(q*pi - 0) = (-1)^q
  double sum = 0.5 * (1.0 + ((q % 2) ? -1.0 : 1.0));
  for (int j = 1; j < n; ++j) {
    const double th = j * h;
    sum += std::cos(q * th - x * std::sin(th));
  }
  return sum / n;
}

}  // namespace detail

// Modified Bessel function I_p(x) for integer p. Power series below the
// cancellation-free limit, integral representation beyond it.
inline double bessel_i(int p, double x) {
  p = std::abs(p);
  double sign = 1.0;
  if (x < 0) {
    x = -x;
    if (p % 2) sign = -1.0;
  }
  if (x == 0.0) return p == 0 ? 1.0 : 0.0;
  if (x <= 15.0) {
    const double x2 = 0.25 * x * x;
    double term = std::exp(p * std::log(0.5 * x) - std::lgamma(p + 1.0));
    double sum = term;
    for (int k = 1; k < 200; ++k) {
      term *= x2 / (static_cast<double>(k) * (k + p));
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return sign * sum;
  }
  return sign * detail::bessel_i_integral(p, x);
}

// Bessel function of the first kind J_q(x) for integer q >= 0.
inline double bessel_j(int q, double x) {
  if (q < 0) throw std::invalid_argument("bessel_j: order must be >= 0");
  double sign = 1.0;
  if (x < 0) {
    x = -x;
    if (q % 2) sign = -1.0;
  }
  if (x == 0.0) return q == 0 ? 1.0 : 0.0;
  if (x <= 8.0) {
    const double x2 = 0.25 * x * x;
    double term = std::exp(q * std::log(0.5 * x) - std::lgamma(q + 1.0));
    double sum = term;
    for (int k = 1; k < 200; ++k) {
      term *= -x2 / (static_cast<double>(k) * (k + q));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sign * sum;
  }
  return sign * detail::bessel_j_integral(q, x);
}

// Modified Bessel function K_1(x), x > 0, via the Laplace-type integral
// K_1(x) = Int_0^inf exp(-x cosh t) cosh t dt on a uniform t grid. The
// integrand is even in t with double-exponential decay, so the trapezoid
// rule is spectrally accurate.
inline double bessel_k1(double x) {
  if (x <= 0.0) throw std::domain_error("bessel_k1: requires x > 0");
  if (x > 740.0) return 0.0;     // below the double range
  if (x < 1e-8) return 1.0 / x;  // 1/x dominates to relative O(x^2 ln x)
  const double h = 0.12;
  double sum = 0.5 * std::exp(-x);
  for (int j = 1;; ++j) {
    const double ch = std::cosh(j * h);
    const double term = std::exp(-x * ch) * ch;
    sum += term;
    if (term < 1e-305 && j * h > 1.0) break;
  }
  return sum * h;
}

// sin(a s) / (2 sin(s/2)) with the removable singularity at s = 0; a is a
// half-integer M + 1/2 - N. Even in s.
inline double dirichlet_kernel(double a, double s) {
  if (std::abs(s) < 1e-5) {
    return a * (1.0 + s * s * (1.0 - 4.0 * a * a) / 24.0);
  }
  return std::sin(a * s) / (2.0 * std::sin(0.5 * s));
}

}  // namespace fermitrap

#endif  // FERMITRAP_SPECFUN_HPP
