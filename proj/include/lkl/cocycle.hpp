#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "lkl/exppoly.hpp"
#include "lkl/group_geom.hpp"
#include "lkl/special_fn.hpp"

namespace lkl {

// Charge parameters; z = n^2 e^2 / pi.
struct ChargeParams {
  double e2 = 1.0 / 137.0;
  int n = 1;
  double z() const;
  // e2 chosen so that z(n) equals the given value.
  static ChargeParams from_z(double z, int n = 1);
};

// Flattened (l, m) index for l >= 1, m = -l..l; dimension L(L+2) up to weight L.
int lm_index(int l, int m);
int lm_dim(int L);

// Block-diagonal T^l(a), l = 1..L, on the (l, m) basis.
Eigen::MatrixXcd su2_block_matrix(const Mat2& a, int L);
// A(g03(lambda)) on the (l, m) basis; negative lambda via parity.
Eigen::MatrixXd boost_a_matrix(double lambda, int L);
// A(g) = T(a1* a2*) A(lambda) T(a2), truncated at weight L.
Eigen::MatrixXcd a_matrix(const GroupElement& g, int L);
// v A(g) without forming A(g).
Eigen::RowVectorXcd apply_a(const Eigen::RowVectorXcd& v, const GroupElement& g, int L);

// A_{1,0; l,0}(lambda) for l = 1..L.
Eigen::VectorXd a_first_row_m0(int L, double lambda);

// B_{l,0}(lambda) in units of e: i sqrt(8/3) int_0^lambda A_{1,0;l,0}.
std::complex<double> b_component_integral(int l, double lambda, double tol = 1e-12);
// All B_{l,0}(lambda), l = 1..L, by a fixed composite rule.
Eigen::VectorXcd b_boost_vector(double lambda, int L);
// Closed combination of F[k, lambda], G[k, lambda] and Legendre coefficients.
std::complex<double> b_component_closed(int l, double lambda);
// Exact exp-polynomial form over (1 - e^{-2 lambda})^{l+1}, units of e.
ExpPolyIntegrand b_exact(int l);
std::complex<double> b_component_exact(int l, double lambda);

// B(g)_{l,m} = (B(lambda) A(a2))_{l,m}, l = 1..L.
Eigen::RowVectorXcd b_general(const GroupElement& g, int L);
// Truncated sum_l |B_{l,0}(lambda)|^2 (units e^2) and its closed value 8(lambda coth lambda - 1).
double norm_b_squared(double lambda, int L);
double norm_b_squared_closed(double lambda);

// max |B(gh) - B(g)A(h) - B(h)| over entries with l <= L - 2.
double verify_cocycle(const GroupElement& g, const GroupElement& h, int L);
// max |B(g)A(g^-1) + B(g^-1)| over entries with l <= L - 2.
double verify_inverse_relation(const GroupElement& g, int L);

// F[k, lambda] = F_k(X) and G[k, lambda] = -2 lambda F_k(X) + Gt_k(X), X = 1/(1 - e^{-2 lambda}).
RationalPoly f_poly(int k);
RationalPoly g_tail_poly(int k);

// Limit identities for F[k], G[k]; each entry is (lhs, rhs).
struct FGIdentities {
  Rational p_f_lhs, p_f_rhs;
  Rational w_f_lhs, w_f_rhs;
  Rational p_g_lhs, p_g_rhs;
};
FGIdentities fg_limit_identities(int l);

// a_{l',l,0}: leading small-lambda coefficient of A between weights l' < l (product formula).
double a_leading_coefficient(int lp, int l);
// Leading coefficient a0 of the lambda-part numerator of A_{l,m;l',m}, exact.
Surd a0_exact(int l, int m, int lp);
// Closed a0 for A_{l,-1; l',-1}.
double a0_closed_minus1(int l, int lp);

// Coefficients of B_{l,0} in the cosh/sinh form and the associated identities (units of e).
struct BCoefficients {
  int l = 0;
  std::vector<Surd> frak_b;  // b_0.. (odd l) or b'_0.. (even l)
  Surd sum_b;                // sum of the lambda-multiplied coefficients
  Surd sum_b_via_a0;         // (-1)^l i sqrt(8/3) a0 / (l+1), a0 of A_{l,0;1,0}
  Rational sum_b_closed_im;  // imaginary part of -i 2^{l+2} C(l+1/2, l+1) l(l+1)/(2l+1)
  Surd limit_from_table;     // 2^l b_l (odd) or b'_l (even)
  Surd limit_closed;         // 2 i sqrt((2l+1)/(l(l+1)))
  Surd leading;              // coefficient of lambda^l in B_{l,0}
};
BCoefficients coefficient_tables(int l);

}  // namespace lkl
