#ifndef FERMITRAP_POTENTIALS_HPP
#define FERMITRAP_POTENTIALS_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

#include "fermitrap/constants.hpp"
#include "fermitrap/specfun.hpp"
#include "fermitrap/trap.hpp"

namespace fermitrap {

enum class PotentialKind { dipole, vdw, custom };

// Effective 1D pair potential through its Fourier transform V~(k) [J m],
// with the transverse cutoff d = sqrt(lambda)/alpha and the contact
// subtraction V_eff(k) = V~(k) - V~(inf).
struct PotentialSpec {
  PotentialKind kind = PotentialKind::custom;
  std::function<double(double)> fourier;     // k [1/m] -> V~(k) [J m]
  std::function<double(double)> real_space;  // z [m] -> V(z) [J], may be empty
  double v_infinity = 0.0;                   // V~(k = inf) [J m]
  double d = 0.0;                            // transverse cutoff length [m]
  double lambda = 0.0;                       // omega_l / omega_t
  double strength = 0.0;                     // V0 [J m] or A [J m^6]

  double v_eff(double k) const { return fourier(k) - v_infinity; }
};

// Longitudinally aligned magnetic dipoles, V(z) = -(mu0/2pi) mu^2 /
// (z^2+d^2)^{3/2}; V~(k) = V0 (sqrt(lambda) k / alpha) K1(same), V0 =
// -(mu0/pi) mu^2 alpha^2 / lambda. Attractive: V0 < 0.
inline PotentialSpec dipole_potential(double mu, const TrapConfig& trap, double lambda) {
  if (!(lambda > 0.0) || lambda > 1.0)
    throw std::invalid_argument("dipole_potential: lambda must be in (0, 1]");
  PotentialSpec pot;
  pot.kind = PotentialKind::dipole;
  pot.lambda = lambda;
  pot.d = std::sqrt(lambda) / trap.alpha;
  const double v0 = -(constants::mu0 / M_PI) * mu * mu * trap.alpha * trap.alpha / lambda;
  pot.strength = v0;
  const double scale = std::sqrt(lambda) / trap.alpha;
  pot.fourier = [v0, scale](double k) {
    const double x = scale * std::abs(k);
    if (x < 1e-8) return v0;  // x K1(x) -> 1
    return v0 * x * bessel_k1(x);
  };
  const double mu2 = mu * mu, d = pot.d;
  pot.real_space = [mu2, d](double z) {
    return -(constants::mu0 / (2.0 * M_PI)) * mu2 / std::pow(z * z + d * d, 1.5);
  };
  pot.v_infinity = 0.0;
  return pot;
}

// Reduced R^-6 potential, V(z) = -A/(z^2+d^2)^3; V~(k) =
// -(pi/8)(A/d^5) exp(-kd) (3 + 3kd + k^2 d^2).
inline PotentialSpec vdw_potential(double a_strength, const TrapConfig& trap, double lambda) {
  if (!(a_strength > 0.0)) throw std::invalid_argument("vdw_potential: A must be > 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("vdw_potential: lambda must be > 0");
  PotentialSpec pot;
  pot.kind = PotentialKind::vdw;
  pot.lambda = lambda;
  pot.d = std::sqrt(lambda) / trap.alpha;
  pot.strength = a_strength;
  const double d = pot.d;
  pot.fourier = [a_strength, d](double k) {
    const double kd = std::abs(k) * d;
    return -(M_PI / 8.0) * (a_strength / std::pow(d, 5)) * std::exp(-kd) *
           (3.0 + 3.0 * kd + kd * kd);
  };
  pot.real_space = [a_strength, d](double z) {
    return -a_strength / std::pow(z * z + d * d, 3);
  };
  pot.v_infinity = 0.0;
  return pot;
}

// A [J m^6] from the dimensionless C6 of the R^-6 literature convention,
// A = C6 e0^2 a0^5 / 2.
inline double vdw_strength_from_c6(double c6) {
  return 0.5 * c6 * constants::e0_sq * std::pow(constants::a_bohr, 5);
}

}  // namespace fermitrap

#endif  // FERMITRAP_POTENTIALS_HPP
