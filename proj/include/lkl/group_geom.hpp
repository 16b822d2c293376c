#pragma once

#include <optional>
#include <random>

#include "lkl/special_fn.hpp"

namespace lkl {

enum class Plane { P12, P13, P23 };

// (theta1, phi1, vartheta1, vartheta, phi, lambda) of
// g = a1(theta1, phi1, vartheta1)^* a2(vartheta, phi)^* g03(lambda) a2(vartheta, phi).
// theta1 runs over [0, 4pi) so that both preimages in SL(2,C) are reachable.
struct Coords {
  double theta1 = 0, phi1 = 0, vartheta1 = 0, vartheta = 0, phi = 0, lambda = 0;
};

struct GroupElement {
  Mat2 matrix = Mat2::Identity();
  std::optional<Coords> coords;

  static GroupElement from_matrix(const Mat2& m);
  static GroupElement from_coords(const Coords& c);
  GroupElement inverse() const;
};

GroupElement operator*(const GroupElement& a, const GroupElement& b);

Mat2 rotation_matrix(Plane plane, double angle);
Mat2 boost_matrix(double lambda);
GroupElement boost(double lambda);
GroupElement rotation(Plane plane, double angle);

// a2(vartheta, phi) = g13(phi) g12(vartheta).
Mat2 a2_matrix(double vartheta, double phi);
// a1(theta1, phi1, vartheta1)^* = g12(theta1) g13(phi1) g12(vartheta1).
Mat2 a1_star_matrix(double theta1, double phi1, double vartheta1);
Mat2 matrix_from_coords(const Coords& c);

// Euler angles of an SU(2) matrix u = g12(t) g13(p) g12(v); t in [0, 4pi).
void su2_euler(const Mat2& u, double& t, double& p, double& v);

Coords decompose(const Mat2& g);
inline Coords decompose(const GroupElement& g) { return decompose(g.matrix); }
double relative_rapidity(const GroupElement& g, const GroupElement& h);

// pi^2 sinh^2(lambda) sin(phi) sin(phi1) / (8 pi^2): density of the invariant measure.
double measure_weight(const Coords& c);

Mat2 random_su2(std::mt19937_64& rng);
GroupElement random_element(std::mt19937_64& rng, double max_lambda);

}  // namespace lkl
