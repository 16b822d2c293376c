#pragma once

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lkl/exppoly.hpp"
#include "lkl/kernels.hpp"

namespace lkl {

// Factor of a K-matrix integrand summand; all are exact exp-polynomials in lambda.
enum class FactorKind { A, B, BConj, U, Sinh2 };

struct Factor {
  FactorKind kind = FactorKind::Sinh2;
  int l = 0, m = 0, lp = 0, l0 = 0;

  static Factor a(int l, int m, int lp) { return {FactorKind::A, l, m, lp, 0}; }
  static Factor b(int l) { return {FactorKind::B, l, 0, 0, 0}; }
  static Factor b_conj(int l) { return {FactorKind::BConj, l, 0, 0, 0}; }
  static Factor u(int l0, int l, int m, int lp) { return {FactorKind::U, l, m, lp, l0}; }
  static Factor sinh2() { return {FactorKind::Sinh2, 0, 0, 0, 0}; }

  // Catalogued exact form (memoized).
  const ExpPolyIntegrand& exact() const;
  std::complex<double> value(double lambda, std::complex<double> rho) const;
  std::string str() const;
  bool operator<(const Factor& o) const;
  bool operator==(const Factor& o) const;
};

// Product of the factors of one summand; exactly one U factor is required.
ExpPolyIntegrand integrand_from_factors(const std::vector<Factor>& factors, int common_l0);
// Every exponent shift j has the parity of l0 - 1.
bool j_parity_matches(const ExpPolyIntegrand& g, int l0);

// scale * weight(rho, z) * prod(factors), or scale * weight * direct when factors is empty.
struct Summand {
  std::vector<Factor> factors;
  SPoly weight = SPoly(1);
  std::complex<double> scale = 1.0;
  ExpPolyIntegrand direct;
};

struct SeriesValue {
  std::complex<double> value;
  double error = 0;   // quadrature estimate plus certified tail remainder
  long terms = 0;     // simple-fraction terms summed
};

struct SeriesOptions {
  double tol = 1e-13;
  double split = 2.0;        // lambda where the integral is split
  long max_terms = 1000000;  // budget
  double pole_radius = 1e-6;
};

// f(rho, z) = int_0^inf g(rho, z, lambda) e^{-z lambda coth lambda} d lambda and its continuation.
class FractionSeries {
 public:
  FractionSeries() = default;
  explicit FractionSeries(const ExpPolyIntegrand& g);
  explicit FractionSeries(std::vector<Summand> summands);

  const std::vector<Summand>& summands() const { return parts_; }
  // Union of the rho-denominator roots i*d over all summands.
  std::vector<int> rho_den_roots() const;

  // Single exact integrand; requires unit scales.
  bool has_exact_integrand() const;
  const ExpPolyIntegrand& exact_integrand() const;

  // b_{n,k}(rho, z) including the rho-denominator.
  std::complex<double> term(int n, int k, std::complex<double> rho, std::complex<double> z) const;
  // g(rho, z, lambda) e^{-z lambda coth lambda}.
  std::complex<double> integrand(double lambda, std::complex<double> rho, std::complex<double> z) const;

  SeriesValue sum(std::complex<double> rho, std::complex<double> z, const SeriesOptions& opt = {}) const;
  std::complex<double> value(std::complex<double> rho, std::complex<double> z) const { return sum(rho, z).value; }
  // Direct adaptive quadrature; needs real rho and Re z > 1 for convergence.
  std::complex<double> quadrature(double rho, double z, double tol = 1e-13) const;

  // Residue of h(rho) f(rho, z) at a pole rho0 of the series terms.
  std::complex<double> residue(std::complex<double> rho0, std::complex<double> z,
                               const std::function<std::complex<double>(std::complex<double>)>& h) const;

  // Distance from rho to the nearest pole of a nonzero term.
  double pole_distance(std::complex<double> rho, std::complex<double> z) const;

 private:
  SeriesValue sum_regular(std::complex<double> rho, std::complex<double> z, const SeriesOptions& opt) const;
  std::vector<Summand> parts_;
  mutable std::shared_ptr<ExpPolyIntegrand> exact_;
};

// Numerator coefficient data a^{+-}_{p,j}(rho) of an exact integrand at fixed z, rho-polynomials
// with the rho-denominator prod(i rho + d) dropped.
std::complex<double> laurent_coefficient(const ExpPolyIntegrand& g, int m, int s, std::complex<double> z,
                                         int digits = 0);
// Same coefficient from the trapezoid rule on a circle around rho = -i(m + z).
std::complex<double> laurent_coefficient_contour(const FractionSeries& f, int m, int s, std::complex<double> z,
                                                 double radius = 0.5, int points = 64);
// Leading form of the large-s expansion of L_{s^2, s}(z); returns log|.| to avoid overflow.
double laurent_asymptotic_log(const ExpPolyIntegrand& g, int s, double z);
// log|L_{s^2, s}(z)| evaluated exactly.
double laurent_coefficient_log(const ExpPolyIntegrand& g, int s, double z, int digits = 0);

// x^{n+q} N(x)/D(x) = O(x^{-2}) for the n-th slice, checked in exact arithmetic.
bool degree_condition_holds(const ExpPolyIntegrand& g, int n);

// Explicit integrands (no front factors).
ExpPolyIntegrand f0_integrand();
// [sum_n conj(A_{ln;l'n}) U_{ln;l'n} + (z/4)(-1)^l conj(B_l') B_l U_{l0;l'0}] sinh^2, units of e.
FractionSeries projf_series(int l, int lp, int l0);
ExpPolyIntegrand projf_integrand(int l, int lp, int l0);
// conj(B_l) U^{(0)}_{00;l0} sinh^2 and (-1)^l B_l U^{(0)}_{l0;00} sinh^2, units of e.
ExpPolyIntegrand cyclic_proj_integrand(int l);
ExpPolyIntegrand l_cyclic_proj_integrand(int l);
// Integrands of f1, f2, f3 entering K for alpha = (1, 0), l0 = 0.
ExpPolyIntegrand k10_part_integrand(int which);

// Front factor 4 pi^3 e^z (4 pi e^2)^q of the K-matrix.
std::complex<double> k_front_factor(int q, double e2, std::complex<double> z);
// Series for [K(l0, i rho; z)]_{beta gamma} without its front factor (memoized).
const FractionSeries& k_matrix_series(const KernelSpec& spec, int l0, const AngularIndex& beta,
                                      const AngularIndex& gamma);
bool k_index_in_band(const KernelSpec& spec, int l0, const AngularIndex& beta);
std::complex<double> k_matrix_element(const KernelSpec& spec, int l0, const AngularIndex& beta,
                                      const AngularIndex& gamma, std::complex<double> rho, std::complex<double> z);
// Direct quadrature of the same element (real rho, z > 1).
std::complex<double> k_matrix_element_quadrature(const KernelSpec& spec, int l0, const AngularIndex& beta,
                                                 const AngularIndex& gamma, double rho, double z);

struct KMatrix {
  int l0 = 0;
  std::complex<double> rho, z;
  std::vector<AngularIndex> index;
  Eigen::MatrixXcd entries;
};
std::vector<AngularIndex> k_band(const KernelSpec& spec, int l0);
KMatrix k_matrix(const KernelSpec& spec, int l0, std::complex<double> rho, std::complex<double> z);

// kappa(z) from the residues at rho = -+ i(1 - z); 0 < z < 1.
KMatrix residue_kappa(const KernelSpec& spec, double z);
// Closed value 2 e^2 pi e^z (1 - z)(3 - z)/(2 - z) for alpha with l = 1.
double kappa_closed_l1(double e2, double z);

enum class ProjectionKind { UToCl, ClToU, CalphaToCalpha };
struct ProjectionIndices {
  int l = 1, lp = 1, l0 = 0;
  double e2 = 1.0 / 137.0;
};
std::complex<double> projection_front_factor(ProjectionKind kind, const ProjectionIndices& idx,
                                             std::complex<double> z);
FractionSeries projection_series(ProjectionKind kind, const ProjectionIndices& idx);
std::complex<double> projection_function(ProjectionKind kind, const ProjectionIndices& idx, std::complex<double> rho,
                                         std::complex<double> z);
// Closed residue of the u -> c_l projection at rho = -i(z - 1) (sign = +1) or rho = i(z - 1) (sign = -1).
std::complex<double> cyclic_residue_closed(int l, double z, double e2, int sign);
// Same residue from the series terms.
std::complex<double> cyclic_residue_series(int l, double z, double e2, int sign);

// Moment sums sum_j a^+_{p,j,deg} j^k, k = 0..kmax, of the z-slice (0: unprimed/double primed, 1: primed).
enum class OrderCase { Primed, DoublePrimed, Unprimed };
struct OrderIdentity {
  int p = 0;
  int degree = 0;       // rho-degree of the coefficients used
  int threshold = 0;    // first k with a nonzero moment, as stated
  std::vector<Surd> moments;  // k = 0..threshold
  bool holds() const;
};
std::vector<OrderIdentity> order_identity_check(OrderCase c, int l, int lp, int l0);
// Left and right sides of the two closed moment identities, l0 = 1.
std::pair<Surd, Surd> suma_double_primed_1(int l, int lp);
std::pair<Surd, Surd> suma_primed_2(int l, int lp);

struct DecompositionWeight {
  double trace = 0;
  double supplementary = 0;
  bool has_supplementary = false;
};
DecompositionWeight decomposition_weight(const KernelSpec& spec, int l0, double rho, double z);

// z sum_{j=1}^l 4 pi (-1)^j / (j(j+1)) without the z.
double bound_state_bracket_sum(int l);
double bound_state_bracket_limit();
// Coefficient of sigma^l in <u, inf| U(sigma) c+_{l,0} |u>.
std::complex<double> bound_state_coefficient(int l, double z, double e2);

}  // namespace lkl
