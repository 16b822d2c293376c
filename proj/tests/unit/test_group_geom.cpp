#include <doctest.h>

#include <cmath>
#include <random>

#include "lkl/group_geom.hpp"

using namespace lkl;

TEST_CASE("boost and rotation generators") {
  Mat2 b = boost_matrix(0.7);
  CHECK(std::abs(b.determinant() - 1.0) < 1e-14);
  CHECK((boost_matrix(0.3) * boost_matrix(0.4) - b).norm() < 1e-14);
  for (Plane p : {Plane::P12, Plane::P13, Plane::P23}) {
    Mat2 r = rotation_matrix(p, 0.9);
    CHECK((r * r.adjoint() - Mat2::Identity()).norm() < 1e-14);
  }
}

TEST_CASE("coordinate decomposition round-trips") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    GroupElement g = random_element(rng, 3.0);
    Coords c = decompose(g);
    CHECK(c.lambda >= 0);
    CHECK((matrix_from_coords(c) - g.matrix).norm() < 1e-9);
  }
}

TEST_CASE("group law and inverse") {
  std::mt19937_64 rng(6);
  GroupElement g = random_element(rng, 2.0), h = random_element(rng, 2.0);
  CHECK(((g * g.inverse()).matrix - Mat2::Identity()).norm() < 1e-12);
  CHECK(relative_rapidity(g, g) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(relative_rapidity(g, h) == doctest::Approx(relative_rapidity(h, g)).epsilon(1e-10));
  CHECK(relative_rapidity(GroupElement(), boost(1.3)) == doctest::Approx(1.3).epsilon(1e-12));
}
