#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "lkl/exact.hpp"

namespace lkl {

using Mat2 = Eigen::Matrix2cd;

struct AngularIndex {
  int l = 0;
  int m = 0;
  bool valid() const { return l >= 0 && m >= -l && m <= l; }
  bool operator==(const AngularIndex& o) const { return l == o.l && m == o.m; }
  bool operator<(const AngularIndex& o) const { return l != o.l ? l < o.l : m < o.m; }
};

// Dense univariate polynomial with exact rational coefficients, indexed by degree.
struct RationalPoly {
  std::vector<Rational> c;
  RationalPoly() = default;
  explicit RationalPoly(std::vector<Rational> coeffs) : c(std::move(coeffs)) { trim(); }
  void trim();
  int degree() const { return static_cast<int>(c.size()) - 1; }
  Rational at(int k) const { return k >= 0 && k < static_cast<int>(c.size()) ? c[k] : Rational(0); }
  double eval(double y) const;
  RationalPoly& operator+=(const RationalPoly& o);
};

RationalPoly operator*(const RationalPoly& a, const RationalPoly& b);
RationalPoly operator*(const Rational& s, const RationalPoly& a);

// Coefficients of P_l (p_{l,k}).
RationalPoly legendre_poly(int l);
// Coefficients of sum_{k=1}^{l} P_{k-1} P_{l-k} / k, the polynomial part of Q_l (w_{l-1,k}).
RationalPoly legendre_w(int l);
// Polynomial R with P_{l,m}(y) = (1-y^2)^{m/2} R(y), m >= 0.
RationalPoly legendre_assoc_poly(int l, int m);

// Associated Legendre P_{l,m}(y) with Condon-Shortley phase; negative m by reflection.
double legendre_p(int l, int m, double y);
// Second-kind Legendre Q_l(x), |x| > 1.
double legendre_q(int l, double x);

// T^l_{m m'}(a) for doubled indices (l2 = 2l etc.), allowing half-integer weights.
std::complex<double> wigner_t2(int l2, int m2, int n2, const Mat2& a);
std::complex<double> wigner_t(int l, int m, int mp, const Mat2& a);
// Full (2l+1)x(2l+1) matrix, rows/cols ordered m = -l..l.
Eigen::MatrixXcd wigner_t_matrix(int l, const Mat2& a);
// T^l at the rotation with a11=a22=cos(phi/2), a12=a21=i sin(phi/2).
std::complex<double> jacobi_p(int l, int m, int n, double cos_phi);

// Condon-Shortley Clebsch-Gordan coefficient <l1 m1; l2 m2 | l m>.
double clebsch_gordan(int l1, int m1, int l2, int m2, int l, int m);
// Its exact square with sign, as a Surd.
Surd clebsch_gordan_exact(int l1, int m1, int l2, int m2, int l, int m);

// max |int conj(T^{l1}) T^{l2} da - delta/(2 l1 + 1)| by product Gauss quadrature.
double su2_peter_weyl_check(int l1, int l2, int quadrature_order);

}  // namespace lkl
