#ifndef FERMITRAP_TRAP_HPP
#define FERMITRAP_TRAP_HPP

#include <cmath>
#include <stdexcept>

#include "fermitrap/constants.hpp"

namespace fermitrap {

// Trap-scale quantities for N spinless fermions in a 1D harmonic trap.
// alpha^2 = m omega_l / hbar; l = 1/alpha; L_F = sqrt(2N-1)/alpha;
// eps_F = hbar omega_l (N - 1/2); k_F = alpha sqrt(2N-1).
struct TrapConfig {
  int N = 0;
  double omega_l = 0.0;  // rad/s
  double mass = 0.0;     // kg
  double alpha = 0.0;    // 1/m
  double l = 0.0;        // m
  double L_F = 0.0;      // m
  double eps_F = 0.0;    // J
  double k_F = 0.0;      // 1/m
};

inline TrapConfig derive_trap(int n_particles, double omega_l, double mass) {
  if (n_particles < 1) throw std::invalid_argument("derive_trap: N must be >= 1");
  if (!(omega_l > 0.0)) throw std::invalid_argument("derive_trap: omega_l must be > 0");
  if (!(mass > 0.0)) throw std::invalid_argument("derive_trap: mass must be > 0");
  TrapConfig t;
  t.N = n_particles;
  t.omega_l = omega_l;
  t.mass = mass;
  t.alpha = std::sqrt(mass * omega_l / constants::hbar);
  t.l = 1.0 / t.alpha;
  t.L_F = std::sqrt(2.0 * n_particles - 1.0) / t.alpha;
  t.eps_F = constants::hbar * omega_l * (n_particles - 0.5);
  t.k_F = t.alpha * std::sqrt(2.0 * n_particles - 1.0);
  return t;
}

// Convenience for solver-level work where only N matters; omega and mass
// are chosen so that alpha = 1 (dimensionless coordinates v = z).
inline TrapConfig unit_trap(int n_particles) {
  return derive_trap(n_particles, 1.0, constants::hbar);
}

}  // namespace fermitrap

#endif  // FERMITRAP_TRAP_HPP
