#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "lkl/exppoly.hpp"
#include "lkl/special_fn.hpp"

namespace lkl {

// Irreducible representation (l0, l1); principal series has l1 = i rho.
struct RepLabel {
  int l0 = 0;
  std::complex<double> l1{0.0, 0.0};
  static RepLabel principal(int l0, double rho) { return {l0, {0.0, rho}}; }
  static RepLabel supplementary(double s) { return {0, {s, 0.0}}; }
  bool is_principal() const { return l1.real() == 0.0; }
  bool is_supplementary() const { return l0 == 0 && l1.imag() == 0.0 && std::abs(l1.real()) < 1; }
  // rho with l1 = i rho (complex in general).
  std::complex<double> rho() const { return l1 / std::complex<double>(0.0, 1.0); }
};

// Orthonormal associated Legendre values sqrt((2l+1)/2 (l-m)!/(l+m)!) P_{l,m}(y), l = |m|..L,
// from y and s = sqrt(1 - y^2) supplied separately for accuracy near the endpoints.
void legendre_normalized_column(int m, int L, double y, double s, std::vector<double>& out);

// A_{l,m; l',m}(lambda) by adaptive quadrature (zero when m != m').
double rep_a_element(int l, int m, int lp, int mp, double lambda, double tol = 1e-13);
// Block of A(lambda) at fixed m, rows and columns l = max(1,|m|)..L.
Eigen::MatrixXd rep_a_block(int m, int L, double lambda);

// U^{(l0,l1)}_{l,m; l',m'}(lambda) by adaptive quadrature (zero when m != m').
std::complex<double> u_matrix_element_quadrature(const RepLabel& label, int l, int m, int lp, int mp,
                                                 double lambda, double tol = 1e-12);
// Same element from the Legendre-only integral valid for l0 = 0.
std::complex<double> u_matrix_element_legendre(const RepLabel& label, int l, int m, int lp, double lambda,
                                               double tol = 1e-12);

// Exact forms over the common denominator (1 - e^{-2 lambda})^{l+l'+1}.
ExpPolyIntegrand rep_a_exact(int l, int m, int lp);
// U^{(l0, i rho)}_{l,m; l',m} with the rho-denominator prod_{d=-l}^{l'} (i rho + d).
ExpPolyIntegrand u_exact(int l0, int l, int m, int lp);
// Evaluation of u_exact at real lambda and complex rho.
std::complex<double> u_matrix_element_exact(const RepLabel& label, int l, int m, int lp, double lambda);

// Literal closed forms displayed for small indices; UnsupportedCase outside the catalogue.
std::complex<double> u_matrix_element_closed(const RepLabel& label, int l, int m, int lp, int mp,
                                             double lambda);
bool u_closed_catalogued(int l0, int l, int m, int lp, int mp);
// A_{1,0;1,0}, A_{1,1;1,1} closed forms (also reachable through rep_a_element_closed).
double rep_a_element_closed(int l, int m, int lp, int mp, double lambda);

// Monic Q(rho) of degree l + l' with purely imaginary roots.
struct MonicQ {
  std::vector<std::complex<double>> roots;
  int degree() const { return static_cast<int>(roots.size()); }
  std::complex<double> eval(std::complex<double> rho) const;
  // Roots as integer multiples k of i (root = k i).
  std::vector<int> root_multiples() const;
  SPoly poly() const;
};
MonicQ monic_q(int l, int lp);

// Leading small-lambda behaviour u0 * lambda^order of the element with row l, column l'.
struct SmallLambdaCoeff {
  int order = 0;
  std::complex<double> u0;
};
SmallLambdaCoeff u_small_lambda_coeff(const RepLabel& label, int lp, int m, int l);
// C_{l,m} entering the small-lambda coefficient.
std::complex<double> u_c_factor(int l, int m, int l0, std::complex<double> l1);

// Leading large-rho coefficients p^+_{jmax,jmax}, p^-_{jmax,jmax}.
struct LargeRhoLeading {
  std::complex<double> p_plus, p_minus;
  int rho_power = 1;  // envelope decays as rho^{-rho_power}
  int sinh_power = 1;
};
// Catalogue: (l0, m = -l0), (l0, m = +l0), (l0 = 1, m = 0), (l0 = 0, m = 0).
LargeRhoLeading u_large_rho_leading(int l0, int l, int lp, int m);
double c_llm(int l, int lp, int m);

}  // namespace lkl
