#include <doctest.h>

#include <cmath>
#include <complex>

#include "lkl/errors.hpp"
#include "lkl/spectral.hpp"

using namespace lkl;
using cd = std::complex<double>;

namespace {
KernelSpec spec_for(int q, std::vector<AngularIndex> alphas, double e2 = 1.0) {
  KernelSpec s;
  s.q = q;
  s.alphas = std::move(alphas);
  s.params.e2 = e2;
  return s;
}
}  // namespace

TEST_CASE("f0 series agrees with direct quadrature") {
  FractionSeries f(f0_integrand());
  for (double z : {1.5, 2.0, 5.0}) {
    cd s = f.value(0.0, z), q = f.quadrature(0.0, z);
    CHECK(std::abs(s - q) < 1e-10 * std::abs(q));
  }
}

TEST_CASE("K10 parts agree with quadrature and continue below z = 1") {
  for (int w = 1; w <= 3; ++w) {
    FractionSeries f(k10_part_integrand(w));
    for (double rho : {0.5, 1.0, 2.0}) {
      cd s = f.value(rho, 2.0), q = f.quadrature(rho, 2.0);
      CHECK(std::abs(s - q) < 1e-8 * std::max(1.0, std::abs(q)));
    }
    CHECK(std::isfinite(std::abs(f.value(0.8, 0.5))));
  }
}

TEST_CASE("series error estimate bounds the quadrature difference") {
  FractionSeries f(k10_part_integrand(2));
  SeriesValue v = f.sum(1.0, 3.0);
  CHECK(v.terms > 0);
  CHECK(std::abs(v.value - f.quadrature(1.0, 3.0)) < std::max(v.error * 10, 1e-12));
}

TEST_CASE("K matrix series matches SU(2)-averaged quadrature") {
  KernelSpec s = spec_for(1, {{1, 0}});
  for (const auto& b : k_band(s, 0)) {
    cd a = k_matrix_element(s, 0, b, b, 1.0, 2.0), q = k_matrix_element_quadrature(s, 0, b, b, 1.0, 2.0);
    CHECK(std::abs(a - q) < 1e-8 * std::max(1.0, std::abs(q)));
  }
}

TEST_CASE("K vanishes for l0 = 1 and alpha = (1,0)") {
  KernelSpec s = spec_for(1, {{1, 0}});
  for (double rho : {0.3, 1.7})
    for (double z : {0.4, 2.2}) CHECK(k_matrix(s, 1, rho, z).entries.norm() < 1e-10);
}

TEST_CASE("K matrix is Hermitian with nonnegative trace on the real axis") {
  KernelSpec s = spec_for(2, {{1, 0}, {1, 1}});
  KMatrix k = k_matrix(s, 0, 0.8, 1.5);
  CHECK((k.entries - k.entries.adjoint()).norm() < 1e-9 * std::max(1.0, k.entries.norm()));
  CHECK(k.entries.trace().real() >= -1e-10);
}

TEST_CASE("pole of a series term raises PoleError") {
  FractionSeries f(k10_part_integrand(2));
  const double z = 0.5;
  int hits = 0;
  for (int j = -3; j <= 11; ++j) {
    cd rho(0.0, -(j + z));
    if (f.pole_distance(rho, z) > 1e-12) continue;
    ++hits;
    CHECK_THROWS_AS(f.sum(rho, z), PoleError);
  }
  CHECK(hits > 0);
}

TEST_CASE("Laurent coefficients match the contour oracle") {
  ExpPolyIntegrand g = projf_integrand(2, 2, 0);
  FractionSeries f(g);
  for (int m : {1, 3})
    for (int s = 1; s <= 2; ++s) {
      cd a = laurent_coefficient(g, m, s, 0.5), b = laurent_coefficient_contour(f, m, s, 0.5);
      CHECK(std::abs(a - b) < 1e-6 * std::max(1e-8, std::abs(b)));
    }
}

TEST_CASE("order identities hold exactly") {
  for (auto c : {OrderCase::Primed, OrderCase::DoublePrimed, OrderCase::Unprimed})
    for (int l = 1; l <= 3; ++l)
      for (int lp = l; lp <= 3; ++lp)
        for (const auto& id : order_identity_check(c, l, lp, 1)) CHECK(id.holds());
}

TEST_CASE("bound-state bracket and coefficients") {
  CHECK(bound_state_bracket_limit() == doctest::Approx(-4 * M_PI * (std::log(4.0) - 1)));
  CHECK(std::abs(bound_state_bracket_sum(200) - bound_state_bracket_limit()) < 0.05);
  for (int l = 1; l <= 4; ++l) CHECK(std::abs(bound_state_coefficient(l, 0.5, 1.0)) > 1e-12);
}

TEST_CASE("decomposition weight: supplementary component iff 0 < z < 1") {
  KernelSpec s = spec_for(0, {});
  DecompositionWeight low = decomposition_weight(s, 0, 1.0, 0.5);
  CHECK(low.has_supplementary);
  CHECK(low.supplementary > 0);
  CHECK(low.trace >= 0);
  DecompositionWeight high = decomposition_weight(s, 0, 1.0, 2.0);
  CHECK_FALSE(high.has_supplementary);
  CHECK(high.supplementary == 0.0);
}

TEST_CASE("cyclic residue closed form and series are both nonzero") {
  for (int l = 1; l <= 2; ++l) {
    cd a = cyclic_residue_closed(l, 1.5, 1.0, 1), b = cyclic_residue_series(l, 1.5, 1.0, 1);
    CHECK(std::abs(a) > 1e-10);
    CHECK(std::abs(b) > 1e-10);
  }
}
