#ifndef FERMITRAP_MATRIX_ELEMENTS_HPP
#define FERMITRAP_MATRIX_ELEMENTS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "fermitrap/constants.hpp"
#include "fermitrap/potentials.hpp"
#include "fermitrap/quadrature.hpp"
#include "fermitrap/specfun.hpp"
#include "fermitrap/trap.hpp"

namespace fermitrap {

enum class ElementMethod { exact, bessel_asymptotic, cosine_asymptotic };

// Four-fermion matrix element V(m,p;q,n) in units of hbar omega_l.
struct MatrixElement {
  int m = 0, p = 0, q = 0, n = 0;
  double value = 0.0;
  ElementMethod method = ElementMethod::exact;
  bool asymptotic_regime_ok = true;
};

namespace detail {

inline double hbar_omega(const TrapConfig& trap) { return constants::hbar * trap.omega_l; }

// i^{m+n+p+q} {(-1)^{q-p} + (-1)^{n-m}}: zero unless the total index sum is
// even, otherwise +-2.
inline double phase_prefactor(int m, int p, int q, int n) {
  const int parity_qp = (q - p) & 1, parity_nm = (n - m) & 1;
  if (parity_qp != parity_nm) return 0.0;
  const double branch = parity_qp ? -2.0 : 2.0;  // (-1)^{q-p} + (-1)^{n-m}
  const double ipow = (((m + n + p + q) / 2) % 2) ? -1.0 : 1.0;
  return ipow * branch;
}

}  // namespace detail

// Exact one-dimensional integral form of the matrix element: after the
// substitution v = w^2 the integrand is smooth,
//   2 e^{-w^2} w^{q-m+n-p} V_eff(alpha sqrt(2) w) L_m^{(q-m)}(w^2) L_p^{(n-p)}(w^2),
// pre-split at the Laguerre oscillation scale and refined adaptively.
inline MatrixElement matrix_element_exact(const PotentialSpec& pot, const TrapConfig& trap,
                                          int m, int p, int q, int n,
                                          double rel_tol = 1e-11) {
  MatrixElement el;
  el.m = m;
  el.p = p;
  el.q = q;
  el.n = n;
  el.method = ElementMethod::exact;
  if (m < 0 || p < 0 || q < 0 || n < 0)
    throw std::invalid_argument("matrix_element_exact: indices must be >= 0");

  if (q < m) std::swap(m, q);
  if (n < p) std::swap(p, n);

  const double phase = detail::phase_prefactor(m, p, q, n);
  if (phase == 0.0) return el;

  const double hw = detail::hbar_omega(trap);
  const double alpha = trap.alpha;
  const int dq = q - m, dn = n - p;
  const int wpow = dq + dn;  // v^{(wpow-1)/2} dv = 2 w^{wpow} dw

  auto integrand = [&](double w) {
    const double v = w * w;
    return 2.0 * std::exp(-v) * std::pow(w, wpow) *
           (pot.v_eff(alpha * std::sqrt(2.0) * w) / (hw / alpha)) *
           laguerre_assoc(m, dq, v) * laguerre_assoc(p, dn, v);
  };

  const double w_max = std::sqrt(2.0 * (m + p + q + n) + 80.0);
  const double dw = M_PI / (4.0 * std::sqrt(static_cast<double>(std::max(m, p)) + 1.0));
  std::vector<double> breaks;
  for (double w = dw; w < w_max; w += dw) breaks.push_back(w);
  auto res = gauss_kronrod(integrand, 0.0, w_max, 1e-15, breaks, 40000, rel_tol);

  const double log_fac = 0.5 * (std::lgamma(m + 1.0) + std::lgamma(p + 1.0) -
                                std::lgamma(n + 1.0) - std::lgamma(q + 1.0)) -
                         0.5 * M_LN2;
  el.value = phase * std::exp(log_fac) * res.value / (2.0 * M_PI);
  return el;
}

// Intermediate Bessel form (Laguerre asymptotics, before the large-argument
// cosine expansion), for cross-checking:
// phases * (alpha/2pi) Int dv v^{-1/2} e^{-v} V_eff J_Q(2 sqrt(m v)) J_R(2 sqrt(p v)).
inline MatrixElement matrix_element_bessel(const PotentialSpec& pot, const TrapConfig& trap,
                                           int m, int p, int q_off, int r_off,
                                           double rel_tol = 1e-9) {
  MatrixElement el;
  el.m = m;
  el.p = p;
  el.q = m + q_off;
  el.n = p + r_off;
  el.method = ElementMethod::bessel_asymptotic;
  el.asymptotic_regime_ok = (m >= 25 * q_off * q_off && p >= 25 * r_off * r_off);
  if ((q_off & 1) != (r_off & 1)) return el;

  const double hw = detail::hbar_omega(trap);
  const double alpha = trap.alpha;
  const double phase = (((r_off - q_off) / 2) % 2) ? -std::sqrt(2.0) : std::sqrt(2.0);

  const double rm = std::sqrt(static_cast<double>(m)), rp = std::sqrt(static_cast<double>(p));
  auto integrand = [&](double w) {
    return 2.0 * std::exp(-w * w) * (pot.v_eff(alpha * std::sqrt(2.0) * w) / (hw / alpha)) *
           bessel_j(q_off, 2.0 * rm * w) * bessel_j(r_off, 2.0 * rp * w);
  };
  const double w_max = 6.5;
  const double dw = M_PI / (2.0 * (rm + rp) + 2.0);
  std::vector<double> breaks;
  for (double w = dw; w < w_max; w += dw) breaks.push_back(w);
  auto res = gauss_kronrod(integrand, 0.0, w_max, 1e-15, breaks, 40000, rel_tol);
  el.value = phase * res.value / (2.0 * M_PI);
  return el;
}

// Cosine form with an order-unity lower cutoff (default 1):
//   (alpha/(pi^2 sqrt 2)) cos(pi dR/2) Int_a^inf (du/u) e^{-u^2/4}
//     V_eff(alpha u / sqrt 2) { cos(u(rm-rp)) + (-1)^Q sin(u(rm+rp)) }.
inline MatrixElement matrix_element_asymptotic(const PotentialSpec& pot,
                                               const TrapConfig& trap, int m, int p,
                                               int q_off, int delta_r,
                                               double lower_cutoff = 1.0,
                                               double rel_tol = 1e-9) {
  MatrixElement el;
  el.m = m;
  el.p = p;
  el.q = m + q_off;
  el.n = p + q_off + delta_r;
  el.method = ElementMethod::cosine_asymptotic;
  el.asymptotic_regime_ok = (m >= 25 * q_off * q_off && p >= 25 * q_off * q_off) &&
                            (q_off >= 1 || delta_r != 0);
  if (delta_r & 1) return el;  // cos(pi dR / 2) = 0

  const double hw = detail::hbar_omega(trap);
  const double alpha = trap.alpha;
  const double cos_dr = ((delta_r / 2) % 2) ? -1.0 : 1.0;
  const double qsign = (q_off % 2) ? -1.0 : 1.0;
  const double rm = std::sqrt(static_cast<double>(m)), rp = std::sqrt(static_cast<double>(p));

  auto integrand = [&](double u) {
    return std::exp(-0.25 * u * u) / u *
           (pot.v_eff(alpha * u / std::sqrt(2.0)) / (hw / alpha)) *
           (std::cos(u * (rm - rp)) + qsign * std::sin(u * (rm + rp)));
  };
  const double u_max = 14.0;
  const double du = M_PI / (2.0 * (rm + rp) + 2.0);
  std::vector<double> breaks;
  for (double u = lower_cutoff + du; u < u_max; u += du) breaks.push_back(u);
  auto res = gauss_kronrod(integrand, lower_cutoff, u_max, 1e-16, breaks, 40000, rel_tol);
  el.value = cos_dr * res.value / (M_PI * M_PI * std::sqrt(2.0));
  return el;
}

// Interaction-strength estimate for IM1: the square-bracket prefactor of
// hbar omega_l and the remaining u-integral, reported separately.
struct V1Estimate {
  double prefactor = 0.0;  // dimensionless, in units of hbar omega_l
  double integral = 0.0;   // "about unity" near the Fermi edge
  double value = 0.0;      // prefactor * integral
};

inline V1Estimate estimate_v1(const PotentialSpec& pot, const TrapConfig& trap, int m,
                              int p) {
  const double rm = std::sqrt(static_cast<double>(m)), rp = std::sqrt(static_cast<double>(p));
  if (std::abs(rm - rp) > 1.0)
    throw std::invalid_argument("estimate_v1: needs near-Fermi-edge indices, |sqrt m - sqrt p| <= 1");
  const double hw = detail::hbar_omega(trap);
  V1Estimate est;
  const double sl2 = std::sqrt(0.5 * pot.lambda);

  std::function<double(double)> integrand;
  if (pot.kind == PotentialKind::dipole) {
    est.prefactor = pot.strength * trap.alpha / (M_PI * M_PI * std::sqrt(2.0) * hw);
    integrand = [=](double u) {
      const double x = u * sl2;
      const double brace = (x < 1e-8) ? 1.0 / u : sl2 * bessel_k1(x);
      return brace * std::exp(-0.25 * u * u) * std::cos(u * (rm - rp));
    };
  } else if (pot.kind == PotentialKind::vdw) {
    est.prefactor = -(M_PI / 8.0) * (pot.strength / std::pow(pot.d, 5)) * trap.alpha /
                    (M_PI * M_PI * std::sqrt(2.0) * hw);
    integrand = [=](double u) {
      const double x = u * sl2;
      return std::exp(-0.25 * u * u - x) * (3.0 + 3.0 * x + x * x) *
             std::cos(u * (rm - rp)) / u;
    };
  } else {
    throw std::invalid_argument("estimate_v1: needs a dipole or vdw potential");
  }

  std::vector<double> breaks;
  for (double u = 2.0; u < 14.0; u += 1.0) breaks.push_back(u);
  est.integral = gauss_kronrod(integrand, 1.0, 14.0, 1e-13, breaks).value;
  est.value = est.prefactor * est.integral;
  return est;
}

// A dipolar species: magnetic moment [J/T], or electric dipole [C m] which
// enters with the magnetic-equivalent moment p*c.
struct DipoleSpecies {
  double moment = 0.0;
  bool electric = false;
  double mass = 0.0;  // kg
};

inline DipoleSpecies li6_species() {
  return {constants::mu_bohr, false, constants::mass_li6};
}
inline DipoleSpecies cr53_species() {
  return {6.0 * constants::mu_bohr, false, constants::mass_cr53};
}
// 1 Debye expressed as a0 e0 / 2.5
inline DipoleSpecies polar_molecule_species(double mass) {
  return {constants::a_bohr * constants::e_charge / 2.5, true, mass};
}

// V(1) scales as mu^2 m_A^{3/2}: relative enhancement of the candidate
// species over the reference.
inline double species_enhancement(const DipoleSpecies& reference,
                                  const DipoleSpecies& candidate) {
  const double mu_ref =
      reference.electric ? reference.moment * constants::c_light : reference.moment;
  const double mu_cand =
      candidate.electric ? candidate.moment * constants::c_light : candidate.moment;
  return (mu_cand / mu_ref) * (mu_cand / mu_ref) *
         std::pow(candidate.mass / reference.mass, 1.5);
}

}  // namespace fermitrap

#endif  // FERMITRAP_MATRIX_ELEMENTS_HPP
