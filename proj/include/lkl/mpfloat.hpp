#pragma once

#include <complex>
#include <string>

#include <gmpxx.h>
#include <mpfr.h>

namespace lkl {

// Precision (bits) used for values constructed without an explicit one.
mpfr_prec_t working_prec();
void set_working_prec(mpfr_prec_t bits);
mpfr_prec_t digits_to_bits(int digits);

class PrecGuard {
 public:
  explicit PrecGuard(mpfr_prec_t bits) : saved_(working_prec()) { set_working_prec(bits); }
  ~PrecGuard() { set_working_prec(saved_); }
  PrecGuard(const PrecGuard&) = delete;
  PrecGuard& operator=(const PrecGuard&) = delete;

 private:
  mpfr_prec_t saved_;
};

// Owning MPFR real; binary results take the larger operand precision.
class Mpf {
 public:
  Mpf() : Mpf(0.0) {}
  Mpf(double x);  // NOLINT(google-explicit-constructor)
  Mpf(int x) : Mpf(static_cast<long>(x)) {}  // NOLINT
  Mpf(long x);  // NOLINT
  explicit Mpf(const mpq_class& q);
  explicit Mpf(const mpz_class& q);
  Mpf(double x, mpfr_prec_t prec);
  static Mpf with_prec(mpfr_prec_t prec);

  Mpf(const Mpf& o);
  Mpf(Mpf&& o) noexcept;
  Mpf& operator=(const Mpf& o);
  Mpf& operator=(Mpf&& o) noexcept;
  ~Mpf();

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  long exponent() const;  // binary exponent, LONG_MIN for zero
  std::string to_string(int digits) const;

  Mpf& operator+=(const Mpf& o);
  Mpf& operator-=(const Mpf& o);
  Mpf& operator*=(const Mpf& o);
  Mpf& operator/=(const Mpf& o);
  Mpf operator-() const;

 private:
  struct NoInit {};
  Mpf(NoInit, mpfr_prec_t prec);
  mpfr_t v_;
};

Mpf operator+(const Mpf& a, const Mpf& b);
Mpf operator-(const Mpf& a, const Mpf& b);
Mpf operator*(const Mpf& a, const Mpf& b);
Mpf operator/(const Mpf& a, const Mpf& b);
bool operator<(const Mpf& a, const Mpf& b);
bool operator>(const Mpf& a, const Mpf& b);
bool operator<=(const Mpf& a, const Mpf& b);
bool operator>=(const Mpf& a, const Mpf& b);
bool operator==(const Mpf& a, const Mpf& b);

Mpf exp(const Mpf& x);
Mpf expm1(const Mpf& x);
Mpf log(const Mpf& x);
Mpf log1p(const Mpf& x);
Mpf sqrt(const Mpf& x);
Mpf abs(const Mpf& x);
Mpf sin(const Mpf& x);
Mpf cos(const Mpf& x);
Mpf sinh(const Mpf& x);
Mpf cosh(const Mpf& x);
Mpf tanh(const Mpf& x);
Mpf atan2(const Mpf& y, const Mpf& x);
Mpf pow(const Mpf& x, long n);
Mpf lgamma(const Mpf& x);
Mpf pi(mpfr_prec_t prec);
Mpf max(const Mpf& a, const Mpf& b);

// Complex MPFR value as a pair of reals.
struct MpC {
  Mpf re, im;
  MpC() = default;
  MpC(const Mpf& r) : re(r), im(Mpf::with_prec(r.prec())) {}  // NOLINT
  MpC(Mpf r, Mpf i) : re(std::move(r)), im(std::move(i)) {}
  MpC(double r) : re(r), im(0.0) {}  // NOLINT
  MpC(std::complex<double> c) : re(c.real()), im(c.imag()) {}  // NOLINT

  std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }
  mpfr_prec_t prec() const { return re.prec() > im.prec() ? re.prec() : im.prec(); }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }

  MpC& operator+=(const MpC& o);
  MpC& operator-=(const MpC& o);
  MpC& operator*=(const MpC& o);
  MpC& operator/=(const MpC& o);
  MpC operator-() const { return {-re, -im}; }
};

MpC operator+(const MpC& a, const MpC& b);
MpC operator-(const MpC& a, const MpC& b);
MpC operator*(const MpC& a, const MpC& b);
MpC operator/(const MpC& a, const MpC& b);
MpC operator*(const MpC& a, const Mpf& b);
MpC operator*(const Mpf& a, const MpC& b);

MpC conj(const MpC& a);
Mpf abs(const MpC& a);
Mpf norm(const MpC& a);
Mpf arg(const MpC& a);
MpC exp(const MpC& a);
MpC log(const MpC& a);
MpC pow(const MpC& a, long n);
MpC inv(const MpC& a);
MpC times_i(const MpC& a);

}  // namespace lkl
