#include "lkl/group_geom.hpp"

#include <cmath>

#include "lkl/errors.hpp"

namespace lkl {

namespace {
constexpr std::complex<double> I(0.0, 1.0);

double wrap(double a, double period) {
  double r = std::fmod(a, period);
  if (r < 0) r += period;
  if (r >= period) r -= period;
  return r;
}
}  // namespace

Mat2 rotation_matrix(Plane plane, double angle) {
  double c = std::cos(angle / 2), s = std::sin(angle / 2);
  Mat2 m;
  switch (plane) {
    case Plane::P12:
      m << std::exp(I * (angle / 2)), 0.0, 0.0, std::exp(-I * (angle / 2));
      break;
    case Plane::P13:
      m << c, I * s, I * s, c;
      break;
    case Plane::P23:
      m << c, s, -s, c;
      break;
  }
  return m;
}

Mat2 boost_matrix(double lambda) {
  Mat2 m;
  m << std::exp(lambda / 2), 0.0, 0.0, std::exp(-lambda / 2);
  return m;
}

GroupElement GroupElement::from_matrix(const Mat2& m) {
  if (std::abs(m.determinant() - 1.0) > 1e-10 * std::max(1.0, m.squaredNorm()))
    throw DomainError("matrix is not unimodular");
  GroupElement g;
  g.matrix = m;
  return g;
}

GroupElement GroupElement::from_coords(const Coords& c) {
  GroupElement g;
  g.matrix = matrix_from_coords(c);
  g.coords = c;
  return g;
}

GroupElement GroupElement::inverse() const {
  Mat2 inv;
  inv << matrix(1, 1), -matrix(0, 1), -matrix(1, 0), matrix(0, 0);
  GroupElement g;
  g.matrix = inv;
  return g;
}

GroupElement operator*(const GroupElement& a, const GroupElement& b) {
  GroupElement g;
  g.matrix = a.matrix * b.matrix;
  return g;
}

GroupElement boost(double lambda) {
  Coords c;
  c.lambda = lambda;
  GroupElement g;
  g.matrix = boost_matrix(lambda);
  if (lambda >= 0) g.coords = c;
  return g;
}

GroupElement rotation(Plane plane, double angle) {
  GroupElement g;
  g.matrix = rotation_matrix(plane, angle);
  return g;
}

Mat2 a2_matrix(double vartheta, double phi) {
  return rotation_matrix(Plane::P13, phi) * rotation_matrix(Plane::P12, vartheta);
}

Mat2 a1_star_matrix(double theta1, double phi1, double vartheta1) {
  return rotation_matrix(Plane::P12, theta1) * rotation_matrix(Plane::P13, phi1) *
         rotation_matrix(Plane::P12, vartheta1);
}

Mat2 matrix_from_coords(const Coords& c) {
  Mat2 a2 = a2_matrix(c.vartheta, c.phi);
  return a1_star_matrix(c.theta1, c.phi1, c.vartheta1) * a2.adjoint() * boost_matrix(c.lambda) * a2;
}

void su2_euler(const Mat2& u, double& t, double& p, double& v) {
  // u = [[c e^{i(t+v)/2}, i s e^{i(t-v)/2}], [i s e^{-i(t-v)/2}, c e^{-i(t+v)/2}]]
  double a = std::abs(u(0, 0)), b = std::abs(u(0, 1));
  p = 2 * std::atan2(b, a);
  const double eps = 1e-14;
  double sum = 0, diff = 0;
  if (a > eps) sum = 2 * std::arg(u(0, 0));
  if (b > eps) diff = 2 * std::arg(u(0, 1) / I);
  if (a <= eps) sum = diff;  // only t - v is defined
  if (b <= eps) diff = sum;  // only t + v is defined
  t = 0.5 * (sum + diff);
  v = 0.5 * (sum - diff);
  // v in [0, 2pi); the sign of u is carried by t in [0, 4pi).
  v = wrap(v, 2 * M_PI);
  t = wrap(t, 4 * M_PI);
  Mat2 r = a1_star_matrix(t, p, v);
  if ((r - u).norm() > (r + u).norm()) t = wrap(t + 2 * M_PI, 4 * M_PI);
}

Coords decompose(const Mat2& g) {
  double nrm = g.norm();
  if (!std::isfinite(nrm) || nrm > 1e150) throw PrecisionError("group element ill-conditioned", nrm);
  Mat2 h = g.adjoint() * g;  // = a2^* g03(2 lambda) a2
  double p = h(0, 0).real(), r = h(1, 1).real();
  std::complex<double> q = h(0, 1);
  double half = 0.5 * (p - r);
  double sh = std::sqrt(half * half + std::norm(q));
  Coords c;
  c.lambda = std::asinh(sh);
  if (c.lambda > 1e-13) {
    double emax = std::exp(c.lambda);
    // eigenvector of h for e^{lambda}
    std::complex<double> v1 = q, v2 = emax - p;
    std::complex<double> w1 = emax - r, w2 = std::conj(q);
    if (std::norm(w1) + std::norm(w2) > std::norm(v1) + std::norm(v2)) {
      v1 = w1;
      v2 = w2;
    }
    double nv = std::sqrt(std::norm(v1) + std::norm(v2));
    v1 /= nv;
    v2 /= nv;
    // first column of a2^* is (cos(phi/2) e^{-i vt/2}, -i sin(phi/2) e^{i vt/2})
    c.phi = 2 * std::atan2(std::abs(v2), std::abs(v1));
    if (std::abs(v1) > 1e-14 && std::abs(v2) > 1e-14)
      c.vartheta = wrap(std::arg(v2 / v1) + M_PI / 2, 2 * M_PI);
  }
  Mat2 a2 = a2_matrix(c.vartheta, c.phi);
  Mat2 k1 = g * a2.adjoint() * boost_matrix(-c.lambda) * a2;  // = a1^*
  su2_euler(k1, c.theta1, c.phi1, c.vartheta1);
  return c;
}

double relative_rapidity(const GroupElement& g, const GroupElement& h) {
  return decompose(g.inverse().matrix * h.matrix).lambda;
}

double measure_weight(const Coords& c) {
  double s = std::sinh(c.lambda);
  return s * s * std::sin(c.phi) * std::sin(c.phi1) / 8.0;
}

Mat2 random_su2(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  double q[4];
  double s = 0;
  for (double& x : q) {
    x = n(rng);
    s += x * x;
  }
  s = std::sqrt(s);
  std::complex<double> a(q[0] / s, q[1] / s), b(q[2] / s, q[3] / s);
  Mat2 m;
  m << a, b, -std::conj(b), std::conj(a);
  return m;
}

GroupElement random_element(std::mt19937_64& rng, double max_lambda) {
  std::uniform_real_distribution<double> u(0.0, max_lambda);
  GroupElement g;
  g.matrix = random_su2(rng) * boost_matrix(u(rng)) * random_su2(rng);
  return g;
}

}  // namespace lkl
