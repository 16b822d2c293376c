#include "lkl/mpfloat.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <vector>

namespace lkl {

namespace {
thread_local mpfr_prec_t g_prec = 128;

mpfr_prec_t max_prec(const Mpf& a, const Mpf& b) { return std::max(a.prec(), b.prec()); }
}  // namespace

mpfr_prec_t working_prec() { return g_prec; }
void set_working_prec(mpfr_prec_t bits) { g_prec = std::max<mpfr_prec_t>(bits, MPFR_PREC_MIN); }
mpfr_prec_t digits_to_bits(int digits) {
  return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 8;
}

Mpf::Mpf(NoInit, mpfr_prec_t prec) { mpfr_init2(v_, prec); }

Mpf::Mpf(double x) : Mpf(NoInit{}, g_prec) { mpfr_set_d(v_, x, MPFR_RNDN); }
Mpf::Mpf(long x) : Mpf(NoInit{}, g_prec) { mpfr_set_si(v_, x, MPFR_RNDN); }
Mpf::Mpf(const mpq_class& q) : Mpf(NoInit{}, g_prec) { mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN); }
Mpf::Mpf(const mpz_class& q) : Mpf(NoInit{}, g_prec) { mpfr_set_z(v_, q.get_mpz_t(), MPFR_RNDN); }
Mpf::Mpf(double x, mpfr_prec_t prec) : Mpf(NoInit{}, prec) { mpfr_set_d(v_, x, MPFR_RNDN); }

Mpf Mpf::with_prec(mpfr_prec_t prec) { return Mpf(0.0, prec); }

Mpf::Mpf(const Mpf& o) : Mpf(NoInit{}, o.prec()) { mpfr_set(v_, o.v_, MPFR_RNDN); }
Mpf::Mpf(Mpf&& o) noexcept : Mpf(NoInit{}, MPFR_PREC_MIN) { mpfr_swap(v_, o.v_); }

Mpf& Mpf::operator=(const Mpf& o) {
  if (this != &o) {
    mpfr_set_prec(v_, o.prec());
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  return *this;
}

Mpf& Mpf::operator=(Mpf&& o) noexcept {
  mpfr_swap(v_, o.v_);
  return *this;
}

Mpf::~Mpf() { mpfr_clear(v_); }

long Mpf::exponent() const {
  if (mpfr_zero_p(v_)) return LONG_MIN;
  if (!mpfr_number_p(v_)) return LONG_MAX;
  return mpfr_get_exp(v_);
}

std::string Mpf::to_string(int digits) const {
  std::vector<char> buf(static_cast<size_t>(digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v_);
  return std::string(buf.data());
}

namespace {
template <class F>
Mpf binop(const Mpf& a, const Mpf& b, F f) {
  Mpf r = Mpf::with_prec(max_prec(a, b));
  f(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

template <class F>
Mpf unop(const Mpf& a, F f) {
  Mpf r = Mpf::with_prec(a.prec());
  f(r.get(), a.get(), MPFR_RNDN);
  return r;
}
}  // namespace

Mpf& Mpf::operator+=(const Mpf& o) { return *this = *this + o; }
Mpf& Mpf::operator-=(const Mpf& o) { return *this = *this - o; }
Mpf& Mpf::operator*=(const Mpf& o) { return *this = *this * o; }
Mpf& Mpf::operator/=(const Mpf& o) { return *this = *this / o; }
Mpf Mpf::operator-() const { return unop(*this, mpfr_neg); }

Mpf operator+(const Mpf& a, const Mpf& b) { return binop(a, b, mpfr_add); }
Mpf operator-(const Mpf& a, const Mpf& b) { return binop(a, b, mpfr_sub); }
Mpf operator*(const Mpf& a, const Mpf& b) { return binop(a, b, mpfr_mul); }
Mpf operator/(const Mpf& a, const Mpf& b) { return binop(a, b, mpfr_div); }
bool operator<(const Mpf& a, const Mpf& b) { return mpfr_less_p(a.get(), b.get()) != 0; }
bool operator>(const Mpf& a, const Mpf& b) { return mpfr_greater_p(a.get(), b.get()) != 0; }
bool operator<=(const Mpf& a, const Mpf& b) { return mpfr_lessequal_p(a.get(), b.get()) != 0; }
bool operator>=(const Mpf& a, const Mpf& b) { return mpfr_greaterequal_p(a.get(), b.get()) != 0; }
bool operator==(const Mpf& a, const Mpf& b) { return mpfr_equal_p(a.get(), b.get()) != 0; }

Mpf exp(const Mpf& x) { return unop(x, mpfr_exp); }
Mpf expm1(const Mpf& x) { return unop(x, mpfr_expm1); }
Mpf log(const Mpf& x) { return unop(x, mpfr_log); }
Mpf log1p(const Mpf& x) { return unop(x, mpfr_log1p); }
Mpf sqrt(const Mpf& x) { return unop(x, mpfr_sqrt); }
Mpf abs(const Mpf& x) { return unop(x, mpfr_abs); }
Mpf sin(const Mpf& x) { return unop(x, mpfr_sin); }
Mpf cos(const Mpf& x) { return unop(x, mpfr_cos); }
Mpf sinh(const Mpf& x) { return unop(x, mpfr_sinh); }
Mpf cosh(const Mpf& x) { return unop(x, mpfr_cosh); }
Mpf tanh(const Mpf& x) { return unop(x, mpfr_tanh); }
Mpf atan2(const Mpf& y, const Mpf& x) { return binop(y, x, mpfr_atan2); }

Mpf pow(const Mpf& x, long n) {
  Mpf r = Mpf::with_prec(x.prec());
  mpfr_pow_si(r.get(), x.get(), n, MPFR_RNDN);
  return r;
}

Mpf lgamma(const Mpf& x) {
  Mpf r = Mpf::with_prec(x.prec());
  int sgn = 0;
  mpfr_lgamma(r.get(), &sgn, x.get(), MPFR_RNDN);
  return r;
}

Mpf pi(mpfr_prec_t prec) {
  Mpf r = Mpf::with_prec(prec);
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}

Mpf max(const Mpf& a, const Mpf& b) { return a < b ? b : a; }

MpC& MpC::operator+=(const MpC& o) { return *this = *this + o; }
MpC& MpC::operator-=(const MpC& o) { return *this = *this - o; }
MpC& MpC::operator*=(const MpC& o) { return *this = *this * o; }
MpC& MpC::operator/=(const MpC& o) { return *this = *this / o; }

MpC operator+(const MpC& a, const MpC& b) { return {a.re + b.re, a.im + b.im}; }
MpC operator-(const MpC& a, const MpC& b) { return {a.re - b.re, a.im - b.im}; }
MpC operator*(const MpC& a, const MpC& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
MpC operator/(const MpC& a, const MpC& b) { return a * inv(b); }
MpC operator*(const MpC& a, const Mpf& b) { return {a.re * b, a.im * b}; }
MpC operator*(const Mpf& a, const MpC& b) { return {a * b.re, a * b.im}; }

MpC conj(const MpC& a) { return {a.re, -a.im}; }
Mpf norm(const MpC& a) { return a.re * a.re + a.im * a.im; }
Mpf abs(const MpC& a) {
  Mpf r = Mpf::with_prec(a.prec());
  mpfr_hypot(r.get(), a.re.get(), a.im.get(), MPFR_RNDN);
  return r;
}
Mpf arg(const MpC& a) { return atan2(a.im, a.re); }

MpC inv(const MpC& a) {
  Mpf d = norm(a);
  return {a.re / d, -a.im / d};
}

MpC times_i(const MpC& a) { return {-a.im, a.re}; }

MpC exp(const MpC& a) {
  Mpf m = exp(a.re);
  return {m * cos(a.im), m * sin(a.im)};
}

MpC log(const MpC& a) { return {log(abs(a)), arg(a)}; }

MpC pow(const MpC& a, long n) {
  if (n < 0) return pow(inv(a), -n);
  MpC result(Mpf(1.0, a.prec()));
  MpC base = a;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n > 0) base *= base;
  }
  return result;
}

}  // namespace lkl
