#pragma once

#include <complex>
#include <map>
#include <string>
#include <utility>

#include <gmpxx.h>

#include "lkl/mpfloat.hpp"

namespace lkl {

using Rational = mpq_class;

Rational factorial(long n);
Rational binomial(long n, long k);
// a/b in canonical form.
Rational frac(long a, long b);
// Generalized binomial w(w-1)...(w-k+1)/k! for rational w.
Rational binomial(const Rational& w, long k);

// Gaussian rational re + i*im.
struct GaussQ {
  Rational re, im;
  GaussQ() = default;
  GaussQ(Rational r) : re(std::move(r)), im(0) {}  // NOLINT
  GaussQ(long r) : re(r), im(0) {}  // NOLINT
  GaussQ(int r) : re(r), im(0) {}  // NOLINT
  GaussQ(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  static GaussQ i() { return {0, 1}; }

  bool is_zero() const { return re == 0 && im == 0; }
  GaussQ conj() const { return {re, -im}; }
  GaussQ operator-() const { return {-re, -im}; }
  GaussQ& operator+=(const GaussQ& o);
  GaussQ& operator-=(const GaussQ& o);
  GaussQ& operator*=(const GaussQ& o);
  GaussQ& operator/=(const GaussQ& o);
  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
  MpC to_mpc() const { return {Mpf(re), Mpf(im)}; }
  std::string str() const;
};

GaussQ operator+(GaussQ a, const GaussQ& b);
GaussQ operator-(GaussQ a, const GaussQ& b);
GaussQ operator*(GaussQ a, const GaussQ& b);
GaussQ operator/(GaussQ a, const GaussQ& b);
bool operator==(const GaussQ& a, const GaussQ& b);
GaussQ ipow(long n);  // i^n

// Exact element of Q(i)(sqrt 2, sqrt 3, ...): sum over squarefree k of c_k*sqrt(k).
class Surd {
 public:
  Surd() = default;
  Surd(GaussQ c);  // NOLINT
  Surd(long c) : Surd(GaussQ(c)) {}  // NOLINT
  Surd(int c) : Surd(GaussQ(c)) {}  // NOLINT
  Surd(Rational c) : Surd(GaussQ(std::move(c))) {}  // NOLINT
  // sqrt(r); negative r gives i*sqrt(-r).
  static Surd sqrt_of(const Rational& r);

  bool is_zero() const { return terms_.empty(); }
  const std::map<mpz_class, GaussQ>& terms() const { return terms_; }
  // Value when free of irrational parts.
  bool is_gauss_rational() const;
  GaussQ gauss_rational() const;

  Surd conj() const;
  Surd operator-() const;
  Surd& operator+=(const Surd& o);
  Surd& operator-=(const Surd& o);
  Surd& operator*=(const Surd& o);
  Surd& operator*=(const GaussQ& c);

  std::complex<double> to_complex() const;
  MpC to_mpc() const;
  std::string str() const;

 private:
  void add_term(const mpz_class& k, const GaussQ& c);
  std::map<mpz_class, GaussQ> terms_;
};

Surd operator+(Surd a, const Surd& b);
Surd operator-(Surd a, const Surd& b);
Surd operator*(const Surd& a, const Surd& b);
Surd operator*(Surd a, const GaussQ& c);
Surd operator*(const GaussQ& c, Surd a);
bool operator==(const Surd& a, const Surd& b);

// Polynomial in (rho, z) with Surd coefficients, keyed by (deg rho, deg z).
class SPoly {
 public:
  using Key = std::pair<int, int>;
  SPoly() = default;
  SPoly(Surd c);  // NOLINT
  SPoly(long c) : SPoly(Surd(c)) {}  // NOLINT
  SPoly(int c) : SPoly(Surd(c)) {}  // NOLINT
  static SPoly monomial(int drho, int dz, const Surd& c = Surd(1));
  static SPoly rho() { return monomial(1, 0); }
  static SPoly z() { return monomial(0, 1); }

  bool is_zero() const { return terms_.empty(); }
  const std::map<Key, Surd>& terms() const { return terms_; }
  int deg_rho() const;
  int deg_z() const;
  Surd coeff(int drho, int dz) const;
  // Coefficient of z^dz as a polynomial in rho.
  SPoly z_slice(int dz) const;

  // Complex-conjugate coefficients; equals conj(P) for real rho and z.
  SPoly conj_coeffs() const;
  // P(-rho).
  SPoly reflect_rho() const;
  SPoly operator-() const;
  SPoly& operator+=(const SPoly& o);
  SPoly& operator-=(const SPoly& o);
  SPoly& operator*=(const SPoly& o);
  SPoly& operator*=(const Surd& c);
  void add_term(int drho, int dz, const Surd& c);

  MpC eval(const MpC& rho, const MpC& z) const;
  std::complex<double> eval(std::complex<double> rho, std::complex<double> z) const;
  // Exact value at Gaussian-rational (rho, z).
  Surd eval_exact(const GaussQ& rho, const GaussQ& z) const;
  std::string str() const;

 private:
  std::map<Key, Surd> terms_;
};

SPoly operator+(SPoly a, const SPoly& b);
SPoly operator-(SPoly a, const SPoly& b);
SPoly operator*(const SPoly& a, const SPoly& b);
SPoly operator*(SPoly a, const Surd& c);
bool operator==(const SPoly& a, const SPoly& b);

}  // namespace lkl
