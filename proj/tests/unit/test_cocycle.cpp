#include <doctest.h>

#include <cmath>
#include <random>

#include "lkl/cocycle.hpp"

using namespace lkl;

TEST_CASE("B component closed form matches its defining integral") {
  for (int l = 1; l <= 4; ++l)
    for (double lam : {0.0, 0.5, 1.5, 3.0}) {
      auto a = b_component_closed(l, lam), b = b_component_integral(l, lam);
      CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(b)));
      CHECK(std::abs(b_component_exact(l, lam) - b) < 1e-10 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("norm of B converges to 8 e^2 (lambda coth lambda - 1)") {
  for (double lam : {0.25, 0.5, 1.0})
    CHECK(std::abs(norm_b_squared(lam, 20) - norm_b_squared_closed(lam)) < 1e-6);
}

TEST_CASE("cocycle identity and inverse relation") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 4; ++t) {
    GroupElement g = random_element(rng, 0.8), h = random_element(rng, 0.8);
    CHECK(verify_cocycle(g, h, 20) < 1e-6);
    CHECK(verify_inverse_relation(g, 20) < 1e-6);
  }
}

TEST_CASE("B vanishes on SU(2)") {
  std::mt19937_64 rng(3);
  GroupElement k = GroupElement::from_matrix(random_su2(rng));
  CHECK(b_general(k, 10).norm() == 0.0);
}

TEST_CASE("exact coefficient tables satisfy the closed identities") {
  for (int l = 1; l <= 8; ++l) {
    BCoefficients c = coefficient_tables(l);
    CHECK(c.sum_b == c.sum_b_via_a0);
    CHECK(c.limit_from_table == c.limit_closed);
  }
  for (int l = 1; l <= 5; ++l) {
    FGIdentities f = fg_limit_identities(l);
    CHECK(f.p_f_lhs == f.p_f_rhs);
    CHECK(f.w_f_lhs == f.w_f_rhs);
    CHECK(f.p_g_lhs == f.p_g_rhs);
  }
}

TEST_CASE("charge parameter z") {
  ChargeParams p = ChargeParams::from_z(2.0, 3);
  CHECK(p.z() == doctest::Approx(2.0));
  CHECK(p.e2 == doctest::Approx(2.0 * M_PI / 9.0));
}
