#include <doctest.h>

#include <cmath>
#include <complex>

#include "lkl/reps.hpp"

using namespace lkl;
using cd = std::complex<double>;

TEST_CASE("spherical matrix element of the principal series") {
  for (double rho : {0.5, 1.0, 2.5})
    for (double lam : {0.3, 1.0, 2.0}) {
      double closed = std::sin(rho * lam) / (rho * std::sinh(lam));
      RepLabel lab = RepLabel::principal(0, rho);
      CHECK(std::abs(u_matrix_element_quadrature(lab, 0, 0, 0, 0, lam) - closed) < 1e-10);
      CHECK(std::abs(u_matrix_element_exact(lab, 0, 0, 0, lam) - closed) < 1e-12);
    }
  CHECK(std::abs(u_matrix_element_exact(RepLabel::principal(0, 1.0), 0, 0, 0, 1.0) - 0.71602291536043) < 1e-12);
}

TEST_CASE("exact, Legendre and quadrature matrix elements agree") {
  for (int l0 : {0, 1})
    for (int l = std::abs(l0); l <= 3; ++l)
      for (int lp = std::abs(l0); lp <= 3; ++lp)
        for (int m = -std::min(l, lp); m <= std::min(l, lp); ++m) {
          RepLabel lab = RepLabel::principal(l0, 1.3);
          cd q = u_matrix_element_quadrature(lab, l, m, lp, m, 0.8);
          CHECK(std::abs(u_matrix_element_exact(lab, l, m, lp, 0.8) - q) < 1e-9);
          if (l0 == 0) CHECK(std::abs(u_matrix_element_legendre(lab, l, m, lp, 0.8) - q) < 1e-9);
        }
}

TEST_CASE("catalogued closed forms match quadrature") {
  const int cases[][5] = {{0, 0, 0, 0, 0}, {0, 1, 0, 1, 0}, {1, 1, 0, 1, 0}, {1, 1, 1, 1, 1}};
  for (auto& c : cases) {
    REQUIRE(u_closed_catalogued(c[0], c[1], c[2], c[3], c[4]));
    RepLabel lab = RepLabel::principal(c[0], 0.9);
    for (double lam : {0.4, 1.7}) {
      cd a = u_matrix_element_closed(lab, c[1], c[2], c[3], c[4], lam);
      cd b = u_matrix_element_quadrature(lab, c[1], c[2], c[3], c[4], lam);
      CHECK(std::abs(a - b) < 1e-9 * std::max(1.0, std::abs(b)));
    }
  }
}

TEST_CASE("boost part A of the one-particle representation") {
  for (int m = -1; m <= 1; ++m) CHECK(rep_a_element(1, m, 1, m, 0.0) == doctest::Approx(1.0));
  CHECK(rep_a_element(2, 1, 3, 0, 0.7) == 0.0);
  for (double lam : {0.5, 1.5})
    for (int m = -1; m <= 1; ++m)
      CHECK(rep_a_element(1, m, 1, m, lam) == doctest::Approx(rep_a_element_closed(1, m, 1, m, lam)).epsilon(1e-9));
  Eigen::MatrixXd blk = rep_a_block(0, 4, 0.9);
  CHECK(blk.rows() == 4);
  CHECK(blk(1, 2) == doctest::Approx(rep_a_element(2, 0, 3, 0, 0.9)).epsilon(1e-9));
}
