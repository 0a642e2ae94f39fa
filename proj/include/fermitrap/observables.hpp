#ifndef FERMITRAP_OBSERVABLES_HPP
#define FERMITRAP_OBSERVABLES_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fermitrap/occupations.hpp"
#include "fermitrap/specfun.hpp"
#include "fermitrap/trap.hpp"

namespace fermitrap {

enum class ProfileKind { density, momentum };

// Sampled dimensionless profile: density n(z)*l over v = z/l, or momentum
// density p(k)*alpha over kappa = k/alpha. Either way the trapezoid
// integral estimates the particle number.
struct Profile {
  ProfileKind kind = ProfileKind::density;
  int N = 0;
  std::string model_id;
  std::vector<double> grid;
  std::vector<double> values;
  double integral = 0.0;
  std::vector<std::string> warnings;
};

inline std::vector<double> default_grid(int n_particles, int points = 2048) {
  const double half = 1.5 * std::sqrt(2.0 * n_particles - 1.0);
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = -half + 2.0 * half * i / (points - 1);
  return g;
}

namespace detail {

inline Profile assemble_profile(ProfileKind kind, const OccupationMatrix& occ,
                                const std::vector<double>& grid) {
  Profile prof;
  prof.kind = kind;
  prof.N = occ.N;
  prof.model_id = occ.model_id;
  prof.grid = grid;
  prof.values.resize(grid.size());

  const double spacing = grid.size() > 1 ? grid[1] - grid[0] : 0.0;
  const double kf = std::sqrt(2.0 * occ.N - 1.0);
  if (spacing > M_PI / (4.0 * kf))
    prof.warnings.push_back("grid spacing does not resolve the 2 k_F oscillation");

  const bool alternate = (kind == ProfileKind::momentum);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto psi = psi_row(occ.M_max, grid[i]);
    double acc = 0.0;
    for (int m = 0; m <= occ.M_max; ++m) {
      acc += psi.values[m] * psi.values[m] * occ.at(m, 0);
      const int p_max = occ.p_count(m) - 1;
      for (int p = 1; p <= p_max; ++p) {
        const double sign = (alternate && (p % 2)) ? -1.0 : 1.0;
        acc += 2.0 * sign * psi.values[m - p] * psi.values[m + p] * occ.at(m, p);
      }
    }
    prof.values[i] = acc;
  }
  double most_negative = 0.0;
  for (double v : prof.values) most_negative = std::min(most_negative, v);
  if (most_negative < -1e-10)
    prof.warnings.push_back("negative values present, worst " +
                            std::to_string(most_negative));
  prof.integral = sampled_trapezoid(prof.values, spacing);
  return prof;
}

}  // namespace detail

// Real-space particle density assembled from the occupation table.
inline Profile density(const TrapConfig& trap, const OccupationMatrix& occ,
                       const std::vector<double>& grid) {
  (void)trap;
  return detail::assemble_profile(ProfileKind::density, occ, grid);
}

// Momentum density: the density formula with alternating sign on the odd
// off-diagonals.
inline Profile momentum(const TrapConfig& trap, const OccupationMatrix& occ,
                        const std::vector<double>& grid) {
  (void)trap;
  return detail::assemble_profile(ProfileKind::momentum, occ, grid);
}

struct DualityReport {
  double alpha1 = 0.0;
  double max_abs_deviation = 0.0;
  double tol = 1e-6;
  bool pass = false;
};

// IM1 duality: the momentum profile at coupling alpha1 equals the density
// profile at -alpha1 in dimensionless units, exactly.
inline DualityReport duality_check(const TrapConfig& trap, double alpha1,
                                   const std::vector<double>& grid, int m_max = -1,
                                   double tol = 1e-6) {
  if (m_max < 0) m_max = 2 * trap.N;
  auto occ_plus = occupation_matrix(trap, InteractionModel::im1_from_alpha(alpha1), m_max, 1e-9);
  auto occ_minus = occupation_matrix(trap, InteractionModel::im1_from_alpha(-alpha1), m_max, 1e-9);
  const auto mom = momentum(trap, occ_plus, grid);
  const auto dens = density(trap, occ_minus, grid);
  DualityReport rep;
  rep.alpha1 = alpha1;
  rep.tol = tol;
  for (std::size_t i = 0; i < grid.size(); ++i)
    rep.max_abs_deviation = std::max(rep.max_abs_deviation,
                                     std::abs(mom.values[i] - dens.values[i]));
  rep.pass = rep.max_abs_deviation <= tol;
  return rep;
}

struct FriedelMetrics {
  double amplitude = 0.0;
  double ratio_to_free = 1.0;
  double period_estimate = 0.0;
};

namespace detail {

// Peak-to-trough of the residual against a one-period moving average,
// measured over |v| < sqrt(2N-1)/2, plus the dominant period from the zero
// crossings of the residual.
inline std::pair<double, double> friedel_amplitude(const std::vector<double>& grid,
                                                   const std::vector<double>& values,
                                                   int n_particles) {
  const double h = grid[1] - grid[0];
  const double period = M_PI / std::sqrt(2.0 * n_particles - 1.0);
  const int halfwin = std::max(1, static_cast<int>(std::lround(0.5 * period / h)));
  const double window = 0.5 * std::sqrt(2.0 * n_particles - 1.0);

  std::vector<double> resid(grid.size(), 0.0);
  std::vector<bool> valid(grid.size(), false);
  for (std::size_t i = halfwin; i + halfwin < grid.size(); ++i) {
    double avg = 0.0;
    for (int j = -halfwin; j <= halfwin; ++j) avg += values[i + j];
    avg /= (2 * halfwin + 1);
    resid[i] = values[i] - avg;
    valid[i] = std::abs(grid[i]) < window;
  }
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!valid[i]) continue;
    lo = std::min(lo, resid[i]);
    hi = std::max(hi, resid[i]);
  }

  // period from mean zero-crossing spacing (two crossings per period)
  std::vector<double> crossings;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!valid[i - 1] || !valid[i]) continue;
    if ((resid[i - 1] < 0.0) != (resid[i] < 0.0)) {
      const double frac = resid[i - 1] / (resid[i - 1] - resid[i]);
      crossings.push_back(grid[i - 1] + frac * h);
    }
  }
  double period_est = 0.0;
  if (crossings.size() >= 2)
    period_est = 2.0 * (crossings.back() - crossings.front()) / (crossings.size() - 1);
  return {hi - lo, period_est};
}

}  // namespace detail

inline FriedelMetrics friedel_metrics(const Profile& profile, const TrapConfig& trap) {
  if (profile.grid.size() < 16)
    throw std::invalid_argument("friedel_metrics: grid too small");
  const double h = profile.grid[1] - profile.grid[0];
  if (h > M_PI / (4.0 * std::sqrt(2.0 * trap.N - 1.0)))
    throw std::invalid_argument("friedel_metrics: grid too coarse to resolve 2 k_F");

  auto [amp, period] = detail::friedel_amplitude(profile.grid, profile.values, trap.N);

  auto occ_free = occupation_matrix(trap, InteractionModel::free_model(), 2 * trap.N);
  auto free_prof = density(trap, occ_free, profile.grid);
  auto [amp_free, period_free] =
      detail::friedel_amplitude(free_prof.grid, free_prof.values, trap.N);
  (void)period_free;

  FriedelMetrics metrics;
  metrics.amplitude = amp;
  metrics.ratio_to_free = amp / amp_free;
  metrics.period_estimate = period;
  return metrics;
}

// Mass beyond the classical region |v| > sqrt(2N-1); interactions push
// spectral weight above the Fermi energy and enhance it.
inline double tail_mass(const Profile& profile, int n_particles) {
  const double edge = std::sqrt(2.0 * n_particles - 1.0);
  const double h = profile.grid[1] - profile.grid[0];
  double acc = 0.0;
  for (std::size_t i = 0; i < profile.grid.size(); ++i)
    if (std::abs(profile.grid[i]) > edge) acc += profile.values[i] * h;
  return acc;
}

}  // namespace fermitrap

#endif  // FERMITRAP_OBSERVABLES_HPP
