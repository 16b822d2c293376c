#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "lkl/exact.hpp"

namespace lkl {

// lambda^p e^{-j lambda} e^{i phase rho lambda}
struct ExpKey {
  int p = 0;
  int j = 0;
  int phase = 0;
  bool operator<(const ExpKey& o) const {
    return std::tie(phase, j, p) < std::tie(o.phase, o.j, o.p);
  }
  bool operator==(const ExpKey& o) const { return p == o.p && j == o.j && phase == o.phase; }
};

// g(lambda) = sum_t P_t(rho, z) lambda^p e^{-j lambda} e^{i phase rho lambda}
//             / [ (1 - e^{-2 lambda})^{q+1} prod_{d in den} (i rho + d) ].
class ExpPolyIntegrand {
 public:
  ExpPolyIntegrand() = default;
  explicit ExpPolyIntegrand(int q) : q_(q) {}
  static ExpPolyIntegrand constant(const SPoly& c);

  int q() const { return q_; }
  const std::vector<int>& rho_den() const { return den_; }
  const std::map<ExpKey, SPoly>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int max_p() const;
  // Coefficients P_t with keys matching phase, as a map j -> p -> poly.
  void add_term(const ExpKey& k, const SPoly& c);
  void set_rho_den(std::vector<int> den);

  // Multiply the numerator by (1 - e^{-2 lambda})^k and raise q by k (value unchanged).
  ExpPolyIntegrand raised(int k) const;
  // Multiply numerator and denominator by the missing (i rho + d) factors.
  ExpPolyIntegrand with_den(const std::vector<int>& den) const;
  // Divide out common (1 - e^{-2 lambda}) and (i rho + d) factors where exact.
  ExpPolyIntegrand reduced() const;

  ExpPolyIntegrand operator-() const;
  ExpPolyIntegrand& operator+=(const ExpPolyIntegrand& o);
  ExpPolyIntegrand& operator*=(const SPoly& c);
  ExpPolyIntegrand times_lambda(int k = 1) const;
  ExpPolyIntegrand times_exp(int j_shift) const;  // multiply by e^{-j_shift lambda}
  // Value times sinh^2(lambda).
  ExpPolyIntegrand times_sinh2() const;
  // Complex conjugate at real rho, z, lambda.
  ExpPolyIntegrand conj() const;

  // Numerator Taylor coefficient of lambda^r as an exact polynomial in (rho, z).
  SPoly numerator_taylor(int r) const;
  // Smallest r with a nonzero numerator Taylor coefficient (up to limit).
  int numerator_order(int limit) const;

  // Denominator polynomial prod (i rho + d).
  SPoly den_poly() const;
  MpC eval(const Mpf& lambda, const MpC& rho, const MpC& z) const;
  // Evaluates with precision raised until cancellation is resolved.
  std::complex<double> eval(double lambda, std::complex<double> rho, std::complex<double> z) const;
  std::string str() const;

 private:
  int q_ = -1;
  std::vector<int> den_;
  std::map<ExpKey, SPoly> terms_;
};

ExpPolyIntegrand operator+(ExpPolyIntegrand a, const ExpPolyIntegrand& b);
ExpPolyIntegrand operator-(ExpPolyIntegrand a, const ExpPolyIntegrand& b);
ExpPolyIntegrand operator*(const ExpPolyIntegrand& a, const ExpPolyIntegrand& b);
ExpPolyIntegrand operator*(ExpPolyIntegrand a, const SPoly& c);

// Multiset union with maximal multiplicity.
std::vector<int> den_lcm(const std::vector<int>& a, const std::vector<int>& b);
// i*rho + d as an SPoly.
SPoly irho_plus(int d);

}  // namespace lkl
