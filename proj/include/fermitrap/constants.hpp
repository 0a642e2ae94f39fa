#ifndef FERMITRAP_CONSTANTS_HPP
#define FERMITRAP_CONSTANTS_HPP

// Physical constants (CODATA 2018) and atomic data used by the couplings
// module. Everything is SI unless noted.

namespace fermitrap {
namespace constants {

inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double mu0 = 1.25663706212e-6;        // N A^-2
inline constexpr double c_light = 299792458.0;         // m s^-1
inline constexpr double mu_bohr = 9.2740100783e-24;    // J T^-1
inline constexpr double a_bohr = 5.29177210903e-11;    // m
inline constexpr double alpha_fs = 7.2973525693e-3;    // fine structure constant
inline constexpr double amu = 1.66053906660e-27;       // kg
inline constexpr double e_charge = 1.602176634e-19;    // C

// e0^2 in the Gaussian sense, e^2/(4 pi eps0) [J m]
inline constexpr double e0_sq = 2.3070775523e-28;

// 1 Debye [C m]; the quasi-1D estimates use p = a0*e0/2.5 which is 1 D
// to within 2%.
inline constexpr double debye = 3.33564095e-30;

inline constexpr double mass_li6 = 6.0151228874 * amu;  // kg
inline constexpr double mass_cr53 = 52.940648 * amu;    // kg

// Li2 triplet van der Waals coefficient in atomic units (C6 e0^2 a0^5 scale).
inline constexpr double c6_li = 1390.0;

}  // namespace constants
}  // namespace fermitrap

#endif  // FERMITRAP_CONSTANTS_HPP
