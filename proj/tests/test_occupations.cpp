#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>
#include <random>

#include "fermitrap/occupations.hpp"

using namespace fermitrap;

namespace {
const TrapConfig trap10 = unit_trap(10);
}

TEST_CASE("occ_im1 free limit reproduces the Fermi step") {
  auto free_m = InteractionModel::free_model();
  for (int M = 0; M <= 20; ++M) {
    const double expected = (M < 10) ? 1.0 : 0.0;
    CHECK(occ_im1(trap10, free_m, M, 0) == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
  }
  CHECK(occ_im1(trap10, free_m, 5, 3) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("occ_im1 sign flip under alpha1 -> -alpha1 is (-1)^p exact") {
  for (int p : {0, 1, 2, 3}) {
    const int M = 9;
    const double plus = occ_im1(trap10, InteractionModel::im1_from_alpha(0.7), M, p);
    const double minus = occ_im1(trap10, InteractionModel::im1_from_alpha(-0.7), M, p);
    CHECK(minus == ((p % 2) ? -plus : plus));
  }
}

TEST_CASE("occ_im1 agrees with the W-series path (Jacobi-Anger reduction)") {
  auto model = InteractionModel::im1_from_alpha(0.5);
  auto table = CouplingTable::from_model(model);
  REQUIRE(table.m_cut() == 1);
  for (auto [M, p] : std::vector<std::pair<int, int>>{{9, 1}, {10, 0}, {8, 2}, {12, 2}}) {
    const double closed = occ_im1(trap10, model, M, p, 1e-10);
    const double series = occ_general(trap10, table, M, p, 1e-9);
    CHECK(closed == doctest::Approx(series).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("occ_im1 rejects inconsistent models instead of returning NaN") {
  auto bad = InteractionModel::im1(-1.5);
  CHECK_THROWS_AS(occ_im1(trap10, bad, 9, 0), ModelInvalidError);
  CHECK_THROWS_AS(occ_im1(trap10, InteractionModel::im1(0.1), 3, 4), std::invalid_argument);
}

TEST_CASE("occ_im2 with gamma0 = 0 falls back to the free step") {
  auto model = InteractionModel::im2(0.0, 1, 0.3, 0.4);
  for (int M : {0, 5, 9, 10, 15}) {
    const double expected = (M < 10) ? 1.0 : 0.0;
    CHECK(occ_im2(trap10, model, M, 0) == doctest::Approx(expected).epsilon(1e-10).scale(1.0));
  }
  CHECK(occ_im2(trap10, model, 9, 3) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("occ_im2 diagonal reflection P(M) + P(2N-1-M) = 1 (reference rates)") {
  for (double a0 : {1.0, -1.0}) {
    auto model = InteractionModel::im2_from_alpha(a0, 0.3, 0.4);
    std::vector<std::pair<int, int>> pairs;
    for (int M = 0; M <= 19; ++M) pairs.emplace_back(M, 0);
    auto vals = occ_im2_entries(trap10, model, pairs, 1e-9);
    for (int M = 0; M <= 9; ++M) {
      CHECK(vals[M] + vals[19 - M] == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(vals[M] >= 0.0);
      CHECK(vals[M] <= 1.0);
    }
  }
}

TEST_CASE("occ_im2 agrees with the W-series path (log-series identity)") {
  auto model = InteractionModel::im2_from_alpha(-1.0, 0.3, 0.4);
  auto table = CouplingTable::from_model(model);
  CHECK(table.m_cut() > 50);
  const double closed = occ_im2(trap10, model, 8, 2, 1e-9);
  const double series = occ_general(trap10, table, 8, 2, 1e-8);
  CHECK(closed == doctest::Approx(series).epsilon(1e-6).scale(1.0));
}

TEST_CASE("log-series identity behind the IM2 closed form") {
  // sum_m exp(-r m) cos(m s)/m = -(1/2) ln(2 exp(-r) (cosh r - cos s))
  for (double r : {0.3, 0.2}) {
    const double q = std::exp(-r);
    for (double s : {0.0, 0.4, 1.7, 3.0}) {
      double series = 0.0;
      for (int m = 1; m <= 400; ++m) series += std::pow(q, m) * std::cos(m * s) / m;
      const double closed = -0.5 * std::log(1.0 - 2.0 * q * std::cos(s) + q * q);
      CHECK(series == doctest::Approx(closed).epsilon(1e-12).scale(1.0));
      // and the (cosh r - cos s) regrouping used by the Z constants
      const double regroup = -0.5 * std::log(2.0 * q * (std::cosh(r) - std::cos(s)));
      CHECK(closed == doctest::Approx(regroup).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("occ_im2 domain errors") {
  InteractionModel broken;
  broken.kind = ModelKind::IM2;
  broken.gamma0 = 0.5;
  broken.r_gamma = 0.0;
  broken.r_alpha = 0.4;
  CHECK_THROWS_AS(occ_im2(trap10, broken, 5, 0), std::domain_error);
}

TEST_CASE("occ_general with all couplings zero gives free occupations") {
  CouplingTable empty_table;
  for (int M : {3, 9, 10, 14}) {
    const double expected = (M < 10) ? 1.0 : 0.0;
    CHECK(occ_general(trap10, empty_table, M, 0) ==
          doctest::Approx(expected).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("odd index differences vanish identically (doubled-period cancellation)") {
  // With t = u+v the operator phase for <c^+_m c_n> carries frequency
  // (n-m)/2; for odd n-m the two pi-shifted halves of the doubled period
  // cancel against the 2pi-periodic exp(-W) exactly. Checked with an
  // asymmetric coupling table.
  CouplingTable table;
  table.gamma = {0.3, 0.1};
  table.alpha = {0.5, -0.2};
  WFunction w{table};
  for (double sigma : {0.7, 2.1}) {
    for (double p_half : {0.5, 1.5}) {
      double re = 0.0, im = 0.0;
      const int n = 4096;
      for (int i = 0; i < n; ++i) {
        const double t = 4.0 * M_PI * i / n;
        // W as a function of (t, sigma) in the rotated variables
        double wv = 0.0;
        for (int m = 1; m <= table.m_cut(); ++m)
          wv += 2.0 * (table.gamma[m - 1] - table.alpha[m - 1] * std::cos(m * t)) *
                (1.0 - std::cos(m * sigma)) / m;
        re += std::cos(p_half * t) * std::exp(-wv);
        im += std::sin(p_half * t) * std::exp(-wv);
      }
      CHECK(std::abs(re / n) < 1e-13);
      CHECK(std::abs(im / n) < 1e-13);
    }
  }
}

TEST_CASE("particle-hole antisymmetry for randomized coupling tables") {
  std::mt19937_64 rng(77123ULL);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 4; ++trial) {
    CouplingTable table;
    for (int m = 0; m < 6; ++m) {
      const double g = 0.4 * std::abs(u(rng));
      table.gamma.push_back(g);
      table.alpha.push_back(u(rng) * std::sqrt(g * (1.0 + g)) * 2.0);
    }
    for (auto [M, p] : std::vector<std::pair<int, int>>{{9, 0}, {8, 1}, {11, 2}}) {
      const double a = occ_general(trap10, table, M, p, 1e-9);
      const double b = occ_general(trap10, table, 19 - M, p, 1e-9);
      if (p == 0)
        CHECK(a + b == doctest::Approx(1.0).epsilon(1e-8));
      else
        CHECK(a + b == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("W function symmetries: even overall and u - v reversal") {
  CouplingTable table;
  table.gamma = {0.4, 0.15, 0.02};
  table.alpha = {0.6, -0.1, 0.05};
  WFunction w{table};
  for (auto [u, v] : std::vector<std::pair<double, double>>{
           {0.3, 1.1}, {-2.0, 0.7}, {2.9, -1.4}}) {
    CHECK(w(u, v) == doctest::Approx(w(v, u)).epsilon(1e-13));
    CHECK(w(u, v) == doctest::Approx(w(-u, -v)).epsilon(1e-13));
    CHECK(std::isfinite(w(u, v)));
  }
  CHECK(w(0.9, 0.9) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
}

TEST_CASE("occ_general truncation flag on a hard-cut slow tail") {
  auto model = InteractionModel::im2(1.0, 1, 0.002, 0.002);
  auto table = CouplingTable::from_model(model, 1e-12, 500);  // cap bites
  CHECK(table.flagged);
  CHECK(table.truncation_error > 1e-9);
}

TEST_CASE("occ_first_order values and finite-difference slope oracle") {
  CHECK(occ_first_order(trap10, 0.0, 4, 0) == 1.0);
  CHECK(occ_first_order(trap10, 0.0, 12, 0) == 0.0);
  CHECK(occ_first_order(trap10, 0.2, 9, 1) == doctest::Approx(0.05));
  CHECK(occ_first_order(trap10, 0.2, 10, 1) == doctest::Approx(-0.05));
  CHECK(occ_first_order(trap10, 0.2, 8, 1) == 0.0);
  CHECK(occ_first_order(trap10, 0.2, 9, 2) == 0.0);  // I_p(x) = O(x^p)

  // central finite difference of the full closed-form evaluation in alpha1;
  // d/d alpha1 = 2 d/d vb1 at vb1 = 0
  const double eps = 1e-5;
  for (int M = 1; M <= 19; ++M) {
    const double plus = occ_im1(trap10, InteractionModel::im1_from_alpha(eps), M, 1, 1e-12);
    const double minus = occ_im1(trap10, InteractionModel::im1_from_alpha(-eps), M, 1, 1e-12);
    const double fd = (plus - minus) / (2.0 * eps);
    const double expected = 2.0 * occ_first_order_slope(trap10, M, 1);
    CHECK(fd == doctest::Approx(expected).epsilon(1e-4).scale(0.5));
  }
}

TEST_CASE("occupation_matrix: free step, symmetry, sum rule") {
  auto occ_free = occupation_matrix(trap10, InteractionModel::free_model(), 20);
  for (int M = 0; M <= 20; ++M)
    CHECK(occ_free.at(M, 0) == ((M < 10) ? 1.0 : 0.0));
  CHECK(occ_free.occupation_sum() == doctest::Approx(10.0).epsilon(1e-14));

  auto model = InteractionModel::im2_from_alpha(1.0, 0.3, 0.4);
  auto occ = occupation_matrix(trap10, model, 20, 1e-9);
  CHECK(occ.meta.est_error <= 1e-9);
  CHECK(occ.occupation_sum() == doctest::Approx(10.0).epsilon(1e-7));
  // particle-hole antisymmetry for p != 0 within quadrature error
  for (int M = 0; M <= 19; ++M) {
    for (int p = 1; p <= std::min({M, 19 - M, occ.p_count(M) - 1}); ++p) {
      if (!occ.has(19 - M, p)) continue;
      CHECK(std::abs(occ.at(19 - M, p) + occ.at(M, p)) <= 2e-8);
    }
  }
  // diagonal entries are probabilities
  for (int M = 0; M <= 20; ++M) {
    CHECK(occ.at(M, 0) >= -1e-10);
    CHECK(occ.at(M, 0) <= 1.0 + 1e-10);
  }
}

TEST_CASE("Custom tabulated model goes through the series path and matches IM1") {
  auto im1 = InteractionModel::im1(0.9);
  auto custom = InteractionModel::custom({0.9}, {0.9});
  auto occ_custom = occupation_matrix(trap10, custom, 14, 1e-8);
  CHECK(occ_custom.meta.m_cut == 1);
  for (int m = 6; m <= 13; ++m) {
    for (int p = 0; p < std::min(occ_custom.p_count(m), 3); ++p) {
      const double closed = occ_im1(trap10, im1, m, p, 1e-10);
      CHECK(occ_custom.at(m, p) == doctest::Approx(closed).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("quadrature doubling changes results by less than the reported estimate") {
  auto model = InteractionModel::im1_from_alpha(0.8);
  QuadratureMeta meta;
  const double coarse = occ_im1(trap10, model, 9, 1, 1e-7, &meta);
  const double fine = occ_im1(trap10, model, 9, 1, 1e-13);
  CHECK(std::abs(coarse - fine) <= meta.est_error + 1e-15);
}

TEST_CASE("fermi_sum_identity_check: delta-sequence behavior") {
  auto rep = fermi_sum_identity_check(10, 60);
  REQUIRE(rep.rows.size() == 3);
  // f == 1 integrates exactly to (Q+1)/2 - N
  CHECK(rep.rows[0].abs_err < 1e-10);
  // f = cos s is exact as well, comfortably inside O(1/Q)
  CHECK(rep.rows[1].abs_err < 1.0 / rep.Q);
  CHECK(rep.rows[1].abs_err < 1e-10);
  // band-limited analytic test function: exact, and the bound keeps holding
  // as Q grows
  CHECK(rep.rows[2].abs_err < 1e-9);
  auto rep2 = fermi_sum_identity_check(10, 90);
  CHECK(rep2.rows[2].abs_err < 1e-9);

  // symmetric case Q = 2N carries weight 1/2
  auto sym = fermi_sum_identity_check(10, 20);
  CHECK(sym.rows[0].computed == doctest::Approx(0.5).epsilon(1e-10));
  CHECK_THROWS_AS(fermi_sum_identity_check(10, 19), std::invalid_argument);
}

TEST_CASE("summed Dirichlet kernel against the analytic partial-sum route") {
  // For f = Z/(1+Z - cos s) with Fourier coefficients c_0 = Z/sinh(r),
  // c_j = 2 Z rho^j / sinh(r), rho = exp(-r), the integral of f against
  // sum_{M=0}^{Q} D_{M+1/2-N} is
  //   c_0 ((Q+1)/2 - N)
  //   + (1/2)[ sum_{j=1}^{Q-N} (Q-N+1-j) c_j - sum_{j=1}^{N-1} (N-j) c_j ].
  const int n_part = 10, Q = 60;
  const double r = 0.25;
  const double z = std::cosh(r) - 1.0;
  const double rho = std::exp(-r);
  auto c = [&](int j) { return (j == 0 ? 1.0 : 2.0) * z * std::pow(rho, j) / std::sinh(r); };
  double expected = c(0) * (0.5 * (Q + 1.0) - n_part);
  for (int j = 1; j <= Q - n_part; ++j) expected += 0.5 * (Q - n_part + 1 - j) * c(j);
  for (int j = 1; j <= n_part - 1; ++j) expected -= 0.5 * (n_part - j) * c(j);

  const int nodes = 4 * (Q + 8);
  const double computed = periodic_trapezoid(
      [&](double s) {
        double acc = 0.0;
        for (int m = 0; m <= Q; ++m) acc += dirichlet_kernel(m + 0.5 - n_part, s);
        return acc * z / (z + 1.0 - std::cos(s));
      },
      nodes);
  CHECK(computed == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("IM1 matrix: occ_general cross-check at a strongly coupled point") {
  auto model = InteractionModel::im1_from_alpha(0.5);
  const double closed = occ_im1(trap10, model, 9, 1, 1e-10);
  const double series = occ_general(trap10, CouplingTable::from_model(model), 9, 1, 1e-9);
  CHECK(closed == doctest::Approx(series).epsilon(1e-7));
  // the entry is genuinely nonzero there
  CHECK(std::abs(closed) > 1e-3);
}
