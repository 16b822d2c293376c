#include "lkl/exact.hpp"

#include <sstream>
#include <vector>

#include "lkl/errors.hpp"

namespace lkl {

Rational frac(long a, long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

Rational factorial(long n) {
  if (n < 0) throw DomainError("factorial of negative integer");
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return Rational(r);
}

Rational binomial(long n, long k) {
  if (k < 0) return 0;
  if (n >= 0) {
    if (k > n) return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rational(r);
  }
  return binomial(Rational(n), k);
}

Rational binomial(const Rational& w, long k) {
  if (k < 0) return 0;
  Rational r = 1;
  for (long i = 0; i < k; ++i) r *= (w - i) / Rational(i + 1);
  return r;
}

GaussQ& GaussQ::operator+=(const GaussQ& o) {
  re += o.re;
  im += o.im;
  return *this;
}

GaussQ& GaussQ::operator-=(const GaussQ& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

GaussQ& GaussQ::operator*=(const GaussQ& o) {
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

GaussQ& GaussQ::operator/=(const GaussQ& o) {
  Rational d = o.re * o.re + o.im * o.im;
  if (d == 0) throw DomainError("division by zero Gaussian rational");
  *this *= o.conj();
  re /= d;
  im /= d;
  return *this;
}

std::string GaussQ::str() const {
  std::ostringstream os;
  os << "(" << re.get_str() << "," << im.get_str() << ")";
  return os.str();
}

GaussQ operator+(GaussQ a, const GaussQ& b) { return a += b; }
GaussQ operator-(GaussQ a, const GaussQ& b) { return a -= b; }
GaussQ operator*(GaussQ a, const GaussQ& b) { return a *= b; }
GaussQ operator/(GaussQ a, const GaussQ& b) { return a /= b; }
bool operator==(const GaussQ& a, const GaussQ& b) { return a.re == b.re && a.im == b.im; }

GaussQ ipow(long n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

namespace {

const std::vector<unsigned long>& small_primes() {
  static const std::vector<unsigned long> primes = [] {
    const unsigned long limit = 20000;
    std::vector<bool> sieve(limit + 1, true);
    std::vector<unsigned long> out;
    for (unsigned long p = 2; p <= limit; ++p) {
      if (!sieve[p]) continue;
      out.push_back(p);
      for (unsigned long q = p * p; q <= limit; q += p) sieve[q] = false;
    }
    return out;
  }();
  return primes;
}

// n = s^2 * k with k squarefree (assuming no large repeated prime factor).
void split_square(mpz_class n, mpz_class& s, mpz_class& k) {
  s = 1;
  k = 1;
  for (unsigned long p : small_primes()) {
    if (n == 1) break;
    unsigned long e = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      n /= p;
      ++e;
    }
    for (unsigned long i = 0; i < e / 2; ++i) s *= p;
    if (e % 2) k *= p;
  }
  if (n != 1) {
    if (mpz_perfect_square_p(n.get_mpz_t())) {
      mpz_class r;
      mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
      s *= r;
    } else {
      k *= n;
    }
  }
}

}  // namespace

Surd::Surd(GaussQ c) {
  if (!c.is_zero()) terms_.emplace(mpz_class(1), std::move(c));
}

Surd Surd::sqrt_of(const Rational& r) {
  if (r == 0) return {};
  Rational a = r < 0 ? Rational(-r) : r;
  mpz_class n = a.get_num() * a.get_den();
  mpz_class s, k;
  split_square(n, s, k);
  Rational c(s, a.get_den());
  c.canonicalize();
  Surd out;
  out.terms_.emplace(k, r < 0 ? GaussQ(0, c) : GaussQ(c));
  return out;
}

bool Surd::is_gauss_rational() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 1);
}

GaussQ Surd::gauss_rational() const {
  if (!is_gauss_rational()) throw DomainError("surd has irrational part");
  return terms_.empty() ? GaussQ() : terms_.begin()->second;
}

void Surd::add_term(const mpz_class& k, const GaussQ& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(k);
  if (it == terms_.end()) {
    terms_.emplace(k, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

Surd Surd::conj() const {
  Surd out;
  for (const auto& [k, c] : terms_) out.terms_.emplace(k, c.conj());
  return out;
}

Surd Surd::operator-() const {
  Surd out;
  for (const auto& [k, c] : terms_) out.terms_.emplace(k, -c);
  return out;
}

Surd& Surd::operator+=(const Surd& o) {
  for (const auto& [k, c] : o.terms_) add_term(k, c);
  return *this;
}

Surd& Surd::operator-=(const Surd& o) {
  for (const auto& [k, c] : o.terms_) add_term(k, -c);
  return *this;
}

Surd& Surd::operator*=(const Surd& o) { return *this = *this * o; }

Surd& Surd::operator*=(const GaussQ& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, v] : terms_) v *= c;
  return *this;
}

std::complex<double> Surd::to_complex() const {
  std::complex<double> s = 0;
  for (const auto& [k, c] : terms_) s += c.to_complex() * std::sqrt(k.get_d());
  return s;
}

MpC Surd::to_mpc() const {
  MpC s(0.0);
  for (const auto& [k, c] : terms_) s += c.to_mpc() * sqrt(Mpf(k));
  return s;
}

std::string Surd::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c.str();
    if (k != 1) os << "*sqrt(" << k.get_str() << ")";
  }
  return os.str();
}

Surd operator+(Surd a, const Surd& b) { return a += b; }
Surd operator-(Surd a, const Surd& b) { return a -= b; }

Surd operator*(const Surd& a, const Surd& b) {
  Surd out;
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), ka.get_mpz_t(), kb.get_mpz_t());
      mpz_class k = (ka / g) * (kb / g);
      out += Surd::sqrt_of(Rational(k)) * (ca * cb * GaussQ(Rational(g)));
    }
  }
  return out;
}

Surd operator*(Surd a, const GaussQ& c) { return a *= c; }
Surd operator*(const GaussQ& c, Surd a) { return a *= c; }

bool operator==(const Surd& a, const Surd& b) { return (a - b).is_zero(); }

SPoly::SPoly(Surd c) {
  if (!c.is_zero()) terms_.emplace(Key{0, 0}, std::move(c));
}

SPoly SPoly::monomial(int drho, int dz, const Surd& c) {
  SPoly p;
  p.add_term(drho, dz, c);
  return p;
}

int SPoly::deg_rho() const {
  int d = -1;
  for (const auto& [k, c] : terms_) d = std::max(d, k.first);
  return d;
}

int SPoly::deg_z() const {
  int d = -1;
  for (const auto& [k, c] : terms_) d = std::max(d, k.second);
  return d;
}

Surd SPoly::coeff(int drho, int dz) const {
  auto it = terms_.find({drho, dz});
  return it == terms_.end() ? Surd() : it->second;
}

SPoly SPoly::z_slice(int dz) const {
  SPoly out;
  for (const auto& [k, c] : terms_)
    if (k.second == dz) out.add_term(k.first, 0, c);
  return out;
}

void SPoly::add_term(int drho, int dz, const Surd& c) {
  if (c.is_zero()) return;
  auto it = terms_.find({drho, dz});
  if (it == terms_.end()) {
    terms_.emplace(Key{drho, dz}, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

SPoly SPoly::conj_coeffs() const {
  SPoly out;
  for (const auto& [k, c] : terms_) out.terms_.emplace(k, c.conj());
  return out;
}

SPoly SPoly::reflect_rho() const {
  SPoly out;
  for (const auto& [k, c] : terms_) out.terms_.emplace(k, k.first % 2 ? -c : c);
  return out;
}

SPoly SPoly::operator-() const {
  SPoly out;
  for (const auto& [k, c] : terms_) out.terms_.emplace(k, -c);
  return out;
}

SPoly& SPoly::operator+=(const SPoly& o) {
  for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, c);
  return *this;
}

SPoly& SPoly::operator-=(const SPoly& o) {
  for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, -c);
  return *this;
}

SPoly& SPoly::operator*=(const SPoly& o) { return *this = *this * o; }

SPoly& SPoly::operator*=(const Surd& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  std::map<Key, Surd> out;
  for (auto& [k, v] : terms_) {
    Surd p = v * c;
    if (!p.is_zero()) out.emplace(k, std::move(p));
  }
  terms_ = std::move(out);
  return *this;
}

MpC SPoly::eval(const MpC& rho, const MpC& z) const {
  int dr = deg_rho(), dz = deg_z();
  if (dr < 0) return MpC(Mpf::with_prec(rho.prec()));
  std::vector<MpC> rp(static_cast<size_t>(dr) + 1), zp(static_cast<size_t>(dz) + 1);
  rp[0] = MpC(Mpf(1.0, rho.prec()));
  zp[0] = MpC(Mpf(1.0, z.prec()));
  for (int i = 1; i <= dr; ++i) rp[i] = rp[i - 1] * rho;
  for (int i = 1; i <= dz; ++i) zp[i] = zp[i - 1] * z;
  MpC s(Mpf::with_prec(rho.prec()));
  for (const auto& [k, c] : terms_) s += c.to_mpc() * rp[k.first] * zp[k.second];
  return s;
}

std::complex<double> SPoly::eval(std::complex<double> rho, std::complex<double> z) const {
  std::complex<double> s = 0;
  for (const auto& [k, c] : terms_)
    s += c.to_complex() * std::pow(rho, k.first) * std::pow(z, k.second);
  return s;
}

Surd SPoly::eval_exact(const GaussQ& rho, const GaussQ& z) const {
  Surd s;
  for (const auto& [k, c] : terms_) {
    GaussQ m(1);
    for (int i = 0; i < k.first; ++i) m *= rho;
    for (int i = 0; i < k.second; ++i) m *= z;
    s += c * m;
  }
  return s;
}

std::string SPoly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "[" << c.str() << "]*rho^" << k.first << "*z^" << k.second;
  }
  return os.str();
}

SPoly operator+(SPoly a, const SPoly& b) { return a += b; }
SPoly operator-(SPoly a, const SPoly& b) { return a -= b; }

SPoly operator*(const SPoly& a, const SPoly& b) {
  SPoly out;
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [kb, cb] : b.terms())
      out.add_term(ka.first + kb.first, ka.second + kb.second, ca * cb);
  return out;
}

SPoly operator*(SPoly a, const Surd& c) { return a *= c; }
bool operator==(const SPoly& a, const SPoly& b) { return (a - b).is_zero(); }

}  // namespace lkl
