#include "lkl/exppoly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lkl/errors.hpp"

namespace lkl {

SPoly irho_plus(int d) { return SPoly::monomial(1, 0, Surd(GaussQ::i())) + SPoly(d); }

std::vector<int> den_lcm(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<int, int> ca, cb;
  for (int d : a) ++ca[d];
  for (int d : b) ++cb[d];
  for (auto [d, n] : cb) ca[d] = std::max(ca[d], n);
  std::vector<int> out;
  for (auto [d, n] : ca)
    for (int i = 0; i < n; ++i) out.push_back(d);
  return out;
}

namespace {
// Quotient of P by (rho - root) in rho, or false if the remainder is nonzero.
bool divide_linear(const SPoly& p, const GaussQ& root, SPoly& quotient) {
  int deg = p.deg_rho();
  quotient = SPoly();
  if (deg < 0) return true;
  // Horner over rho with z-polynomial coefficients.
  SPoly carry;
  for (int k = deg; k >= 0; --k) {
    SPoly ck = carry;
    for (const auto& [key, c] : p.terms())
      if (key.first == k) ck.add_term(0, key.second, c);
    if (k == 0) return ck.is_zero();
    for (const auto& [key, c] : ck.terms()) quotient.add_term(k - 1, key.second, c);
    carry = ck * Surd(root);
  }
  return true;
}
}  // namespace

ExpPolyIntegrand ExpPolyIntegrand::constant(const SPoly& c) {
  ExpPolyIntegrand e(-1);
  e.add_term({0, 0, 0}, c);
  return e;
}

int ExpPolyIntegrand::max_p() const {
  int m = 0;
  for (const auto& [k, c] : terms_) m = std::max(m, k.p);
  return m;
}

void ExpPolyIntegrand::add_term(const ExpKey& k, const SPoly& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(k);
  if (it == terms_.end()) {
    terms_.emplace(k, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

void ExpPolyIntegrand::set_rho_den(std::vector<int> den) {
  std::sort(den.begin(), den.end());
  den_ = std::move(den);
}

ExpPolyIntegrand ExpPolyIntegrand::raised(int k) const {
  if (k < 0) throw DomainError("raised: negative power");
  ExpPolyIntegrand out(q_ + k);
  out.den_ = den_;
  for (const auto& [key, c] : terms_)
    for (int i = 0; i <= k; ++i) {
      Rational b = binomial(k, i) * (i % 2 ? -1 : 1);
      out.add_term({key.p, key.j + 2 * i, key.phase}, c * Surd(b));
    }
  return out;
}

ExpPolyIntegrand ExpPolyIntegrand::with_den(const std::vector<int>& den) const {
  std::map<int, int> have;
  for (int d : den_) ++have[d];
  SPoly factor(1);
  for (int d : den) {
    if (have[d] > 0) {
      --have[d];
      continue;
    }
    factor *= irho_plus(d);
  }
  for (auto [d, n] : have)
    if (n > 0) throw DomainError("with_den: target denominator is not a multiple");
  ExpPolyIntegrand out(q_);
  out.set_rho_den(den);
  for (const auto& [key, c] : terms_) out.add_term(key, c * factor);
  return out;
}

ExpPolyIntegrand ExpPolyIntegrand::reduced() const {
  ExpPolyIntegrand cur = *this;
  // (1 - x) factors, x = e^{-2 lambda}, grouped by (p, phase, parity of j)
  while (cur.q_ >= 0 && !cur.terms_.empty()) {
    std::map<std::tuple<int, int, int>, std::map<int, SPoly>> groups;
    for (const auto& [k, c] : cur.terms_) {
      int par = ((k.j % 2) + 2) % 2;
      groups[{k.p, k.phase, par}][(k.j - par) / 2] = c;
    }
    bool divisible = true;
    for (const auto& [g, poly] : groups) {
      SPoly s;
      for (const auto& [i, c] : poly) s += c;
      if (!s.is_zero()) {
        divisible = false;
        break;
      }
    }
    if (!divisible) break;
    ExpPolyIntegrand next(cur.q_ - 1);
    next.den_ = cur.den_;
    for (const auto& [g, poly] : groups) {
      auto [p, phase, par] = g;
      // N(x) = (1 - x) M(x): M_i = sum_{t <= i} N_t
      SPoly acc;
      int lo = poly.begin()->first, hi = poly.rbegin()->first;
      for (int i = lo; i < hi; ++i) {
        auto it = poly.find(i);
        if (it != poly.end()) acc += it->second;
        next.add_term({p, 2 * i + par, phase}, acc);
      }
    }
    cur = next;
  }
  // (i rho + d) factors
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t idx = 0; idx < cur.den_.size(); ++idx) {
      int d = cur.den_[idx];
      GaussQ root(0, d);  // i rho + d = i (rho - i d)
      std::map<ExpKey, SPoly> q;
      bool ok = true;
      for (const auto& [k, c] : cur.terms_) {
        SPoly quo;
        if (!divide_linear(c, root, quo)) {
          ok = false;
          break;
        }
        q.emplace(k, quo * Surd(GaussQ(0, -1)));  // divide by i
      }
      if (!ok) continue;
      ExpPolyIntegrand next(cur.q_);
      std::vector<int> den = cur.den_;
      den.erase(den.begin() + static_cast<long>(idx));
      next.den_ = den;
      for (const auto& [k, c] : q) next.add_term(k, c);
      cur = next;
      changed = true;
      break;
    }
  }
  return cur;
}

ExpPolyIntegrand ExpPolyIntegrand::operator-() const {
  ExpPolyIntegrand out(q_);
  out.den_ = den_;
  for (const auto& [k, c] : terms_) out.terms_.emplace(k, -c);
  return out;
}

ExpPolyIntegrand& ExpPolyIntegrand::operator+=(const ExpPolyIntegrand& o) {
  if (o.terms_.empty()) return *this;
  if (terms_.empty()) return *this = o;
  int q = std::max(q_, o.q_);
  std::vector<int> den = den_lcm(den_, o.den_);
  ExpPolyIntegrand a = raised(q - q_).with_den(den);
  ExpPolyIntegrand b = o.raised(q - o.q_).with_den(den);
  for (const auto& [k, c] : b.terms_) a.add_term(k, c);
  return *this = a;
}

ExpPolyIntegrand& ExpPolyIntegrand::operator*=(const SPoly& c) {
  ExpPolyIntegrand out(q_);
  out.den_ = den_;
  for (const auto& [k, v] : terms_) out.add_term(k, v * c);
  return *this = out;
}

ExpPolyIntegrand ExpPolyIntegrand::times_lambda(int k) const {
  ExpPolyIntegrand out(q_);
  out.den_ = den_;
  for (const auto& [key, c] : terms_) out.add_term({key.p + k, key.j, key.phase}, c);
  return out;
}

ExpPolyIntegrand ExpPolyIntegrand::times_exp(int j_shift) const {
  ExpPolyIntegrand out(q_);
  out.den_ = den_;
  for (const auto& [key, c] : terms_) out.add_term({key.p, key.j + j_shift, key.phase}, c);
  return out;
}

ExpPolyIntegrand ExpPolyIntegrand::times_sinh2() const {
  // sinh^2 = e^{2 lambda} (1 - e^{-2 lambda})^2 / 4
  ExpPolyIntegrand out(q_);
  out.den_ = den_;
  Surd quarter(Rational(1, 4));
  for (const auto& [key, c] : terms_) {
    SPoly cq = c * quarter;
    out.add_term({key.p, key.j - 2, key.phase}, cq);
    out.add_term({key.p, key.j, key.phase}, cq * Surd(-2));
    out.add_term({key.p, key.j + 2, key.phase}, cq);
  }
  return out;
}

ExpPolyIntegrand ExpPolyIntegrand::conj() const {
  // conj(1/(i rho + d)) = 1/(d - i rho) = -1/(i rho - d)
  ExpPolyIntegrand out(q_);
  std::vector<int> den;
  for (int d : den_) den.push_back(-d);
  out.set_rho_den(den);
  Surd sign(den_.size() % 2 ? -1 : 1);
  for (const auto& [k, c] : terms_) out.add_term({k.p, k.j, -k.phase}, c.conj_coeffs() * sign);
  return out;
}

SPoly ExpPolyIntegrand::numerator_taylor(int r) const {
  SPoly out;
  for (const auto& [k, c] : terms_) {
    if (r < k.p) continue;
    int e = r - k.p;
    // (-j + i phase rho)^e / e!
    SPoly base = SPoly(-k.j) + SPoly::monomial(1, 0, Surd(GaussQ(0, k.phase)));
    SPoly pw(1);
    for (int i = 0; i < e; ++i) pw *= base;
    out += c * pw * Surd(Rational(1) / factorial(e));
  }
  return out;
}

int ExpPolyIntegrand::numerator_order(int limit) const {
  for (int r = 0; r <= limit; ++r)
    if (!numerator_taylor(r).is_zero()) return r;
  return limit + 1;
}

SPoly ExpPolyIntegrand::den_poly() const {
  SPoly d(1);
  for (int v : den_) d *= irho_plus(v);
  return d;
}

MpC ExpPolyIntegrand::eval(const Mpf& lambda, const MpC& rho, const MpC& z) const {
  mpfr_prec_t prec = std::max(lambda.prec(), rho.prec());
  PrecGuard guard(prec);
  MpC num(Mpf::with_prec(prec));
  std::map<int, Mpf> lam_pow;
  for (const auto& [k, c] : terms_) {
    auto it = lam_pow.find(k.p);
    if (it == lam_pow.end()) it = lam_pow.emplace(k.p, pow(lambda, k.p)).first;
    MpC e = exp(MpC(Mpf(-k.j) * lambda, Mpf(0.0)) + times_i(rho) * Mpf(static_cast<long>(k.phase)) * lambda);
    num += c.eval(rho, z) * e * it->second;
  }
  Mpf base = -expm1(Mpf(-2.0) * lambda);
  MpC den(pow(base, q_ + 1));
  for (int d : den_) den *= times_i(rho) + MpC(Mpf(static_cast<long>(d)));
  return num / den;
}

std::complex<double> ExpPolyIntegrand::eval(double lambda, std::complex<double> rho,
                                             std::complex<double> z) const {
  if (lambda <= 0) throw DomainError("exp-poly evaluation needs lambda > 0");
  double lost = std::max(0.0, -std::log2(lambda)) * (q_ + 1) + 2.0 * std::abs(rho.imag()) * lambda;
  mpfr_prec_t bits = 96 + static_cast<mpfr_prec_t>(lost) + 4 * static_cast<mpfr_prec_t>(q_ + 1);
  for (int attempt = 0; attempt < 6; ++attempt) {
    PrecGuard g(bits);
    std::complex<double> a = eval(Mpf(lambda), MpC(rho), MpC(z)).to_complex();
    PrecGuard g2(bits + 64);
    std::complex<double> b = eval(Mpf(lambda), MpC(rho), MpC(z)).to_complex();
    if (std::abs(a - b) <= 1e-17 * std::abs(b) || (a == b)) return b;
    bits *= 2;
  }
  throw PrecisionError("exp-poly evaluation did not stabilize", 0);
}

std::string ExpPolyIntegrand::str() const {
  std::ostringstream os;
  os << "q=" << q_ << " den=[";
  for (int d : den_) os << d << " ";
  os << "]\n";
  for (const auto& [k, c] : terms_)
    os << "  p=" << k.p << " j=" << k.j << " ph=" << k.phase << " : " << c.str() << "\n";
  return os.str();
}

ExpPolyIntegrand operator+(ExpPolyIntegrand a, const ExpPolyIntegrand& b) { return a += b; }
ExpPolyIntegrand operator-(ExpPolyIntegrand a, const ExpPolyIntegrand& b) { return a += -b; }

ExpPolyIntegrand operator*(const ExpPolyIntegrand& a, const ExpPolyIntegrand& b) {
  ExpPolyIntegrand out(a.q() + b.q() + 1);
  std::vector<int> den = a.rho_den();
  den.insert(den.end(), b.rho_den().begin(), b.rho_den().end());
  out.set_rho_den(den);
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [kb, cb] : b.terms())
      out.add_term({ka.p + kb.p, ka.j + kb.j, ka.phase + kb.phase}, ca * cb);
  return out;
}

ExpPolyIntegrand operator*(ExpPolyIntegrand a, const SPoly& c) { return a *= c; }

}  // namespace lkl
