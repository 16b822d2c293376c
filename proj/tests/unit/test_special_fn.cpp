#include <doctest.h>

#include <cmath>
#include <random>

#include "lkl/group_geom.hpp"
#include "lkl/special_fn.hpp"

using namespace lkl;

TEST_CASE("legendre polynomials match low-order closed forms") {
  for (double y : {-0.9, -0.3, 0.0, 0.4, 0.95}) {
    CHECK(legendre_p(0, 0, y) == doctest::Approx(1.0));
    CHECK(legendre_p(1, 0, y) == doctest::Approx(y));
    CHECK(legendre_p(2, 0, y) == doctest::Approx(0.5 * (3 * y * y - 1)));
    CHECK(legendre_p(3, 0, y) == doctest::Approx(0.5 * (5 * y * y * y - 3 * y)));
    CHECK(std::abs(legendre_p(2, 2, y)) == doctest::Approx(3 * (1 - y * y)));
  }
}

TEST_CASE("second-kind Legendre function") {
  for (double x : {1.1, 2.0, 5.0}) {
    double q0 = 0.5 * std::log((x + 1) / (x - 1));
    CHECK(legendre_q(0, x) == doctest::Approx(q0).epsilon(1e-12));
    CHECK(legendre_q(1, x) == doctest::Approx(x * q0 - 1).epsilon(1e-12));
  }
}

TEST_CASE("clebsch-gordan known values and exact agreement") {
  CHECK(clebsch_gordan(1, 0, 1, 0, 2, 0) == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(clebsch_gordan(1, 0, 1, 0, 0, 0) == doctest::Approx(-std::sqrt(1.0 / 3.0)));
  CHECK(clebsch_gordan(1, 1, 1, -1, 1, 0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(clebsch_gordan(1, 0, 1, 0, 1, 0) == doctest::Approx(0.0));
  for (int l1 = 0; l1 <= 3; ++l1)
    for (int l2 = 0; l2 <= 3; ++l2)
      for (int l = std::abs(l1 - l2); l <= l1 + l2; ++l)
        for (int m1 = -l1; m1 <= l1; ++m1)
          for (int m2 = -l2; m2 <= l2; ++m2) {
            if (std::abs(m1 + m2) > l) continue;
            double a = clebsch_gordan(l1, m1, l2, m2, l, m1 + m2);
            double b = clebsch_gordan_exact(l1, m1, l2, m2, l, m1 + m2).to_complex().real();
            CHECK(a == doctest::Approx(b).epsilon(1e-12));
          }
}

TEST_CASE("wigner matrices are unitary representations of SU(2)") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 5; ++t) {
    Mat2 a = random_su2(rng), b = random_su2(rng);
    for (int l = 0; l <= 4; ++l) {
      Eigen::MatrixXcd ta = wigner_t_matrix(l, a), tb = wigner_t_matrix(l, b), tab = wigner_t_matrix(l, a * b);
      int d = 2 * l + 1;
      CHECK((ta * ta.adjoint() - Eigen::MatrixXcd::Identity(d, d)).norm() < 1e-12);
      CHECK((ta * tb - tab).norm() < 1e-12);
    }
  }
  CHECK((wigner_t_matrix(3, Mat2::Identity()) - Eigen::MatrixXcd::Identity(7, 7)).norm() < 1e-14);
}

TEST_CASE("Peter-Weyl orthogonality") {
  CHECK(su2_peter_weyl_check(1, 1, 12) < 1e-12);
  CHECK(su2_peter_weyl_check(2, 3, 28) < 1e-10);
}
