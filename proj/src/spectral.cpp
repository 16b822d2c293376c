#include "lkl/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <sstream>

#include "lkl/cocycle.hpp"
#include "lkl/errors.hpp"
#include "lkl/mpfloat.hpp"
#include "lkl/quadrature.hpp"
#include "lkl/reps.hpp"

namespace lkl {

namespace {

using cd = std::complex<double>;
const cd I(0.0, 1.0);

cd ipow_c(int n) {
  static const cd v[4] = {1.0, I, -1.0, -I};
  return v[((n % 4) + 4) % 4];
}

double lambda_coth(double lambda) {
  if (lambda < 1e-4) return 1 + lambda * lambda / 3;
  return lambda / std::tanh(lambda);
}

int precision_digits(int digits) {
  if (digits > 0) return digits;
  if (const char* env = std::getenv("LKL_PRECISION_DIGITS")) {
    int d = std::atoi(env);
    if (d > 0) return d;
  }
  return 60;
}

// Numeric form of one summand at fixed (rho, z): sum_t a_t lambda^p e^{-j lambda} e^{i ph rho lambda}
// over (1 - e^{-2 lambda})^{q+1} prod(i rho + d).
struct NumTerm {
  int p, j, phase;
  cd a;
};
struct NumForm {
  int q = -1;
  std::vector<int> den;
  std::vector<NumTerm> terms;
};

NumForm numeric_form(const ExpPolyIntegrand& g, cd rho, cd z) {
  NumForm f;
  f.q = g.q();
  f.den = g.rho_den();
  for (const auto& [k, c] : g.terms()) f.terms.push_back({k.p, k.j, k.phase, c.eval(rho, z)});
  return f;
}

NumForm numeric_product(const NumForm& a, const NumForm& b) {
  NumForm out;
  out.q = a.q + b.q + 1;
  out.den = a.den;
  out.den.insert(out.den.end(), b.den.begin(), b.den.end());
  std::map<std::tuple<int, int, int>, cd> acc;
  for (const auto& s : a.terms)
    for (const auto& t : b.terms) acc[{s.p + t.p, s.j + t.j, s.phase + t.phase}] += s.a * t.a;
  for (const auto& [k, v] : acc)
    if (v != 0.0) out.terms.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), v});
  return out;
}

cd den_value(const std::vector<int>& den, cd rho) {
  cd d = 1;
  for (int x : den) d *= I * rho + double(x);
  return d;
}

NumForm summand_form(const Summand& s, cd rho, cd z) {
  if (s.factors.empty()) return numeric_form(s.direct, rho, z);
  NumForm f = numeric_form(s.factors[0].exact(), rho, z);
  for (size_t i = 1; i < s.factors.size(); ++i) f = numeric_product(f, numeric_form(s.factors[i].exact(), rho, z));
  return f;
}

// int_L^inf lambda^m e^{-c lambda} d lambda = e^{-cL} sum_i m!/i! L^i / c^{m-i+1}.
cd upper_gamma_integral(int m, cd c, double L) {
  // terms m!/i! L^i / c^{m-i+1} from i = m downwards
  cd inv = 1.0 / c;
  cd term = std::pow(L, m) * inv;
  cd acc = term;
  for (int i = m - 1; i >= 0; --i) {
    term *= double(i + 1) / L * inv;
    acc += term;
  }
  return std::exp(-c * L) * acc;
}

double pochhammer_up(int n, int p) {
  double r = 1;
  for (int i = 1; i <= p; ++i) r *= n + i;
  return r;
}

double binom_d(int top, int bottom) {
  if (bottom < 0) return bottom == -1 && top == -1 ? 1.0 : 0.0;
  if (top < bottom) return 0.0;
  return std::exp(std::lgamma(top + 1.0) - std::lgamma(bottom + 1.0) - std::lgamma(top - bottom + 1.0));
}

// Binomial C(k + N, N) with C(k - 1, -1) = delta_{k0}.
double binom_kn(int k, int N) {
  if (N == -1) return k == 0 ? 1.0 : 0.0;
  return std::round(binom_d(k + N, N));
}

}  // namespace

// ---------------------------------------------------------------- factors

const ExpPolyIntegrand& Factor::exact() const {
  static std::mutex mu;
  static std::map<Factor, ExpPolyIntegrand> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(*this);
    if (it != cache.end()) return it->second;
  }
  ExpPolyIntegrand e;
  switch (kind) {
    case FactorKind::A:
      e = rep_a_exact(l, m, lp);
      break;
    case FactorKind::B:
      e = b_exact(l);
      break;
    case FactorKind::BConj:
      e = b_exact(l).conj();
      break;
    case FactorKind::U:
      e = u_exact(l0, l, m, lp);
      break;
    case FactorKind::Sinh2:
      e = ExpPolyIntegrand::constant(SPoly(1)).times_sinh2();
      break;
  }
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(*this, std::move(e)).first->second;
}

cd Factor::value(double lambda, cd rho) const {
  if (kind == FactorKind::Sinh2) {
    double s = std::sinh(lambda);
    return s * s;
  }
  return exact().eval(lambda, rho, 0.0);
}

std::string Factor::str() const {
  std::ostringstream os;
  switch (kind) {
    case FactorKind::A:
      os << "A(" << l << "," << m << ";" << lp << ")";
      break;
    case FactorKind::B:
      os << "B(" << l << ")";
      break;
    case FactorKind::BConj:
      os << "Bbar(" << l << ")";
      break;
    case FactorKind::U:
      os << "U" << l0 << "(" << l << "," << m << ";" << lp << ")";
      break;
    case FactorKind::Sinh2:
      os << "sinh2";
      break;
  }
  return os.str();
}

bool Factor::operator<(const Factor& o) const {
  return std::tie(kind, l, m, lp, l0) < std::tie(o.kind, o.l, o.m, o.lp, o.l0);
}
bool Factor::operator==(const Factor& o) const {
  return kind == o.kind && l == o.l && m == o.m && lp == o.lp && l0 == o.l0;
}

ExpPolyIntegrand integrand_from_factors(const std::vector<Factor>& factors, int common_l0) {
  int nu = 0;
  for (const auto& f : factors)
    if (f.kind == FactorKind::U) {
      ++nu;
      if (f.l0 != common_l0) throw DomainError("integrand_from_factors: U factor with a different l0");
    }
  if (nu != 1) throw UnsupportedCase("integrand_from_factors: need exactly one U factor per summand");
  ExpPolyIntegrand out = factors[0].exact();
  for (size_t i = 1; i < factors.size(); ++i) out = out * factors[i].exact();
  return out;
}

bool j_parity_matches(const ExpPolyIntegrand& g, int l0) {
  int want = (((l0 - 1) % 2) + 2) % 2;
  for (const auto& [k, c] : g.terms())
    if ((((k.j % 2) + 2) % 2) != want) return false;
  return true;
}

// ---------------------------------------------------------------- series

namespace {

// Numerator value at lambda in double precision; false when cancellation would cost more than ~3 digits.
bool eval_form_fast(const NumForm& f, double lam, cd rho, cd& out) {
  cd acc = 0;
  double mag = 0;
  for (const auto& t : f.terms) {
    cd v = t.a * std::pow(lam, t.p) * std::exp(-double(t.j) * lam + I * double(t.phase) * rho * lam);
    acc += v;
    mag += std::abs(v);
  }
  if (mag != 0 && std::abs(acc) < 1e-3 * mag) return false;
  out = acc / std::pow(-std::expm1(-2 * lam), f.q + 1) / den_value(f.den, rho);
  return true;
}

// Numerator coefficients at fixed (rho, z) in MPFR, for lambda where double evaluation cancels.
struct MpForm {
  mpfr_prec_t prec = 0;
  int q = -1;
  std::vector<int> den;
  std::vector<std::tuple<int, int, int, MpC>> terms;

  MpForm(const ExpPolyIntegrand& g, cd rho, cd z) : q(g.q()), den(g.rho_den()) {
    // enough for lambda >= 2^-40 plus the growth of e^{i rho lambda} on the head interval
    prec = 128 + 40 * (q + 1) + static_cast<mpfr_prec_t>(8 * std::abs(rho.imag()));
    PrecGuard guard(prec);
    MpC r(rho), zz(z);
    for (const auto& [k, c] : g.terms()) terms.emplace_back(k.p, k.j, k.phase, c.eval(r, zz));
  }

  cd eval(double lam, cd rho) const {
    PrecGuard guard(prec);
    Mpf l(lam, prec);
    Mpf e = exp(-l), einv = exp(l);
    MpC w = exp(times_i(MpC(rho)) * l), winv = inv(w);
    std::map<int, Mpf> epow;
    std::map<int, Mpf> lpow;
    MpC acc(Mpf::with_prec(prec));
    for (const auto& [p, j, ph, c] : terms) {
      auto ie = epow.find(j);
      if (ie == epow.end()) ie = epow.emplace(j, pow(j >= 0 ? e : einv, std::abs(j))).first;
      auto il = lpow.find(p);
      if (il == lpow.end()) il = lpow.emplace(p, pow(l, p)).first;
      MpC t = c * (ie->second * il->second);
      if (ph > 0) t = t * pow(w, ph);
      if (ph < 0) t = t * pow(winv, -ph);
      acc += t;
    }
    Mpf base = -expm1(Mpf(-2.0) * l);
    acc = acc * (Mpf(1.0) / pow(base, q + 1));
    return acc.to_complex() / den_value(den, rho);
  }
};

// g(rho, z, lambda) e^{-z lambda coth lambda} at fixed (rho, z), reusing numeric coefficients.
class HeadIntegrand {
 public:
  HeadIntegrand(const std::vector<Summand>& parts, cd rho, cd z) : parts_(parts), rho_(rho), z_(z) {
    for (const auto& s : parts) {
      weights_.push_back(s.scale * s.weight.eval(rho, z));
      if (s.factors.empty()) {
        direct_.push_back(numeric_form(s.direct, rho, z));
      } else {
        direct_.emplace_back();
        for (const auto& f : s.factors)
          if (f.kind != FactorKind::Sinh2 && !forms_.count(f)) forms_.emplace(f, numeric_form(f.exact(), rho, 0.0));
      }
    }
  }
  cd operator()(double lam) const {
    std::map<Factor, cd> vals;
    cd g = 0;
    for (size_t i = 0; i < parts_.size(); ++i) {
      const Summand& s = parts_[i];
      cd v;
      if (s.factors.empty()) {
        if (!eval_form_fast(direct_[i], lam, rho_, v)) v = mp_direct(i).eval(lam, rho_);
      } else {
        v = 1;
        for (const auto& f : s.factors) {
          auto it = vals.find(f);
          if (it == vals.end()) it = vals.emplace(f, factor_value(f, lam)).first;
          v *= it->second;
        }
      }
      g += weights_[i] * v;
    }
    return g * std::exp(-z_ * lambda_coth(lam));
  }

 private:
  cd factor_value(const Factor& f, double lam) const {
    if (f.kind == FactorKind::Sinh2) {
      double sh = std::sinh(lam);
      return sh * sh;
    }
    cd v;
    if (eval_form_fast(forms_.at(f), lam, rho_, v)) return v;
    auto it = mp_factor_.find(f);
    if (it == mp_factor_.end()) it = mp_factor_.emplace(f, MpForm(f.exact(), rho_, 0.0)).first;
    return it->second.eval(lam, rho_);
  }
  const MpForm& mp_direct(size_t i) const {
    auto it = mp_direct_.find(i);
    if (it == mp_direct_.end()) it = mp_direct_.emplace(i, MpForm(parts_[i].direct, rho_, z_)).first;
    return it->second;
  }
  mutable std::map<Factor, MpForm> mp_factor_;
  mutable std::map<size_t, MpForm> mp_direct_;
  const std::vector<Summand>& parts_;
  cd rho_, z_;
  std::vector<cd> weights_;
  std::vector<NumForm> direct_;
  std::map<Factor, NumForm> forms_;
};

}  // namespace


FractionSeries::FractionSeries(const ExpPolyIntegrand& g) {
  Summand s;
  s.direct = g;
  parts_.push_back(std::move(s));
}

FractionSeries::FractionSeries(std::vector<Summand> summands) : parts_(std::move(summands)) {}

std::vector<int> FractionSeries::rho_den_roots() const {
  std::vector<int> out;
  for (const auto& s : parts_) {
    if (s.factors.empty()) {
      out.insert(out.end(), s.direct.rho_den().begin(), s.direct.rho_den().end());
    } else {
      for (const auto& f : s.factors) {
        const auto& d = f.exact().rho_den();
        out.insert(out.end(), d.begin(), d.end());
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool FractionSeries::has_exact_integrand() const {
  for (const auto& s : parts_)
    if (s.scale != 1.0) return false;
  return true;
}

const ExpPolyIntegrand& FractionSeries::exact_integrand() const {
  if (auto p = std::atomic_load(&exact_)) return *p;
  if (!has_exact_integrand()) throw UnsupportedCase("series: summands carry numeric weights");
  ExpPolyIntegrand acc;
  for (const auto& s : parts_) {
    ExpPolyIntegrand g = s.factors.empty() ? s.direct : s.factors[0].exact();
    for (size_t i = 1; i < s.factors.size(); ++i) g = g * s.factors[i].exact();
    acc += g * s.weight;
  }
  std::shared_ptr<ExpPolyIntegrand> expected;
  std::atomic_compare_exchange_strong(&exact_, &expected, std::make_shared<ExpPolyIntegrand>(acc));
  return *std::atomic_load(&exact_);
}

cd FractionSeries::term(int n, int k, cd rho, cd z) const {
  cd total = 0;
  for (const auto& s : parts_) {
    NumForm f = summand_form(s, rho, z);
    cd w = s.scale * s.weight.eval(rho, z) / den_value(f.den, rho);
    cd acc = 0;
    for (const auto& t : f.terms) {
      cd c = double(2 * k + 2 * n + t.j) + z - I * double(t.phase) * rho;
      acc += t.a * pochhammer_up(n, t.p) / std::pow(c, n + t.p + 1);
    }
    total += w * std::pow(-2.0 * z, n) * binom_kn(k, n + f.q) * acc;
  }
  return total;
}

cd FractionSeries::integrand(double lambda, cd rho, cd z) const {
  std::map<Factor, cd> vals;
  cd g = 0;
  for (const auto& s : parts_) {
    cd v;
    if (s.factors.empty()) {
      v = s.direct.eval(lambda, rho, z);
    } else {
      v = 1;
      for (const auto& f : s.factors) {
        auto it = vals.find(f);
        if (it == vals.end()) it = vals.emplace(f, f.value(lambda, rho)).first;
        v *= it->second;
      }
    }
    g += s.scale * s.weight.eval(rho, z) * v;
  }
  return g * std::exp(-z * lambda_coth(lambda));
}

double FractionSeries::pole_distance(cd rho, cd z) const {
  double best = HUGE_VAL;
  for (const auto& s : parts_) {
    NumForm f = summand_form(s, rho, z);
    for (const auto& t : f.terms) {
      if (t.a == 0.0) continue;
      // poles where 2k + 2n + j + z - i ph rho = 0, i.e. rho = -i ph (M + z), M >= j, M = j mod 2
      cd target = I * double(t.phase) * rho - z;  // equals M at the pole
      double mr = std::max<double>(t.j, std::round((target.real() - t.j) / 2) * 2 + t.j);
      for (double M : {mr - 2, mr, mr + 2}) {
        if (M < t.j) continue;
        best = std::min(best, std::abs(target - M));
      }
    }
  }
  return best;
}

SeriesValue FractionSeries::sum(cd rho, cd z, const SeriesOptions& opt) const {
  double pd = pole_distance(rho, z);
  if (pd < opt.pole_radius) {
    // nearest pole location for the report
    throw PoleError("series term pole at evaluation point", rho);
  }
  // Removable roots of the rho-denominator: mean value over a small circle.
  double near_root = HUGE_VAL;
  for (int d : rho_den_roots()) near_root = std::min(near_root, std::abs(rho - I * double(d)));
  if (near_root < 0.02) {
    double r = std::min(0.05, 0.5 * pd);
    const int npt = 32;
    SeriesValue acc{0.0, 0.0, 0};
    for (int i = 0; i < npt; ++i) {
      cd pt = rho + r * std::exp(I * (2 * M_PI * (i + 0.5) / npt));
      SeriesValue v = sum_regular(pt, z, opt);
      acc.value += v.value / double(npt);
      acc.error = std::max(acc.error, v.error);
      acc.terms += v.terms;
    }
    return acc;
  }
  return sum_regular(rho, z, opt);
}

SeriesValue FractionSeries::sum_regular(cd rho, cd z, const SeriesOptions& opt) const {
  const double L = opt.split;
  SeriesValue out{0.0, 0.0, 0};

  // Head: int_0^L by composite Gauss-Legendre, two orders for the estimate.
  HeadIntegrand f(parts_, rho, z);
  int panels = std::max(4, static_cast<int>(std::ceil((std::abs(rho.real()) + std::abs(z.imag())) * L / 3.0)));
  cd head = 0, head_lo = 0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    head = 0;
    head_lo = 0;
    double h = L / panels;
    for (int pnl = 0; pnl < panels; ++pnl) {
      double a = pnl * h, b = a + h;
      head += gauss_panel<cd>(f, a, b, 20);
      head_lo += gauss_panel<cd>(f, a, b, 12);
    }
    if (std::abs(head - head_lo) <= opt.tol * std::max(1.0, std::abs(head))) break;
    panels *= 2;
  }
  double head_err = std::abs(head - head_lo);

  // Tail: sum over (n, k) of the lambda > L part of each simple fraction.
  const double x = std::exp(-2 * L);
  cd tail = 0;
  double tail_err = 0;
  long nterms = 0;
  for (const auto& s : parts_) {
    NumForm f = summand_form(s, rho, z);
    cd w = s.scale * s.weight.eval(rho, z) / den_value(f.den, rho);
    if (f.terms.empty() || w == 0.0) continue;
    double wabs = std::abs(w);
    int pmax = 0;
    for (const auto& t : f.terms) pmax = std::max(pmax, t.p);
    cd part = 0;
    double zn = 1;  // (2|z|)^n / n!
    cd zfac = 1;    // (-2z)^n / n!
    double part_tol = opt.tol * std::max(1.0, std::abs(head)) / (10.0 * parts_.size());
    for (int n = 0;; ++n) {
      if (n > 0) {
        zfac *= -2.0 * z / double(n);
        zn *= 2 * std::abs(z) / n;
      }
      int N = n + f.q;
      for (const auto& t : f.terms) {
        int m = n + t.p;
        double cre0 = 2 * n + t.j + z.real() + t.phase * rho.imag();
        double bk = 1;  // C(k + N, N)
        for (int k = 0;; ++k) {
          if (k > 0) bk *= double(k + N) / k;
          if (bk == 0) break;
          cd c = double(2 * k + 2 * n + t.j) + z - I * double(t.phase) * rho;
          part += zfac * bk * t.a * upper_gamma_integral(m, c, L);
          ++nterms;
          double cre = cre0 + 2 * k;
          if (cre - m / L < 1) continue;
          // remainder over k' > k of the majorant C(k'+N,N) L^m e^{-Re c' L}/(Re c' - m/L)
          double r = double(k + 2 + N) / (k + 2) * x;
          if (r >= 0.5) continue;
          double next = bk * double(k + 1 + N) / (k + 1) * std::pow(L, m) * std::exp(-(cre + 2) * L) /
                        (cre + 2 - m / L);
          double rem = zn * std::abs(t.a) * next / (1 - r);
          if (rem * wabs < part_tol * 1e-2 / f.terms.size()) {
            tail_err += rem * wabs;
            break;
          }
          if (k > 100000) throw BudgetError("series: k-loop budget exhausted");
        }
      }
      if (nterms > opt.max_terms) throw BudgetError("series: term budget exhausted");
      // remainder over n' > n: slab majorants decay with ratio r_n
      double rn = 2 * std::abs(z) * L * x / ((n + 2) * (1 - x));
      bool ok = rn < 0.5;
      double slab = 0;
      if (ok) {
        int n1 = n + 1;
        double zn1 = zn * 2 * std::abs(z) / n1;
        for (const auto& t : f.terms) {
          int m = n1 + t.p;
          double cre = 2 * n1 + t.j + z.real() + t.phase * rho.imag();
          if (cre - m / L < 1) {
            ok = false;
            break;
          }
          slab += zn1 * std::abs(t.a) * std::pow(L, m) * std::exp(-cre * L) / (cre - m / L) *
                  std::pow(1 - x, -(n1 + f.q + 1));
        }
      }
      if (ok) {
        double rem = slab / (1 - rn) * wabs;
        if (rem < part_tol) {
          tail_err += rem;
          break;
        }
      }
      if (n > 2000) throw BudgetError("series: n-loop budget exhausted");
    }
    tail += w * part;
  }
  out.value = head + tail;
  out.error = head_err + tail_err;
  out.terms = nterms;
  return out;
}

cd FractionSeries::quadrature(double rho, double z, double tol) const {
  auto f = [&](double lam) { return integrand(lam, cd(rho, 0), cd(z, 0)); };
  cd head = integrate<cd>(f, 1e-300, 2.0, tol);
  return head + integrate_to_infinity<cd>(f, 2.0, tol, 2.0);
}

cd FractionSeries::residue(cd rho0, cd z, const std::function<cd(cd)>& h) const {
  double near = HUGE_VAL;
  for (int d : rho_den_roots()) near = std::min(near, std::abs(rho0 - I * double(d)));
  const double r = std::min(0.25, 0.5 * near);
  const int npt = 48;
  cd total = 0;
  for (const auto& s : parts_) {
    NumForm f0 = summand_form(s, rho0, z);
    // terms whose fraction is singular at rho0
    struct Hit {
      size_t idx;
      int n, k;
    };
    std::vector<Hit> hits;
    for (size_t ti = 0; ti < f0.terms.size(); ++ti) {
      const auto& t = f0.terms[ti];
      cd target = I * double(t.phase) * rho0 - z;
      double M = std::round(target.real());
      if (std::abs(target - M) > 1e-9 || M < t.j || (static_cast<long>(M - t.j) % 2) != 0) continue;
      int half = static_cast<int>(M - t.j) / 2;
      for (int n = 0; n <= half; ++n) hits.push_back({ti, n, half - n});
    }
    if (hits.empty()) continue;
    // Taylor coefficients of h * w * a_t / D around rho0 by the Cauchy formula
    std::vector<std::vector<cd>> samples(npt);
    std::vector<cd> pts(npt);
    for (int i = 0; i < npt; ++i) {
      pts[i] = rho0 + r * std::exp(I * (2 * M_PI * i / npt));
      NumForm fi = summand_form(s, pts[i], z);
      cd w = h(pts[i]) * s.scale * s.weight.eval(pts[i], z) / den_value(fi.den, pts[i]);
      std::vector<cd> a(f0.terms.size(), 0.0);
      for (const auto& t : fi.terms)
        for (size_t ti = 0; ti < f0.terms.size(); ++ti)
          if (f0.terms[ti].p == t.p && f0.terms[ti].j == t.j && f0.terms[ti].phase == t.phase) a[ti] = w * t.a;
      samples[i] = a;
    }
    for (const auto& hit : hits) {
      const auto& t = f0.terms[hit.idx];
      int m = hit.n + t.p;
      cd taylor = 0;
      for (int i = 0; i < npt; ++i)
        taylor += samples[i][hit.idx] * std::exp(-I * double(m) * (2 * M_PI * i / npt));
      taylor /= double(npt) * std::pow(r, m);
      double fact_ratio = std::exp(std::lgamma(m + 1.0) - std::lgamma(hit.n + 1.0));
      cd zf = std::pow(-2.0 * z, hit.n);
      total += zf * fact_ratio * binom_kn(hit.k, hit.n + f0.q) * std::pow(I * double(t.phase), m + 1) * taylor;
    }
  }
  return total;
}

// ---------------------------------------------------------------- Laurent coefficients

cd laurent_coefficient(const ExpPolyIntegrand& g, int m, int s, cd z, int digits) {
  if (s < 1) throw DomainError("laurent: order must be >= 1");
  PrecGuard guard(digits_to_bits(precision_digits(digits)));
  MpC zz(z);
  MpC rho0 = MpC(Mpf(0.0), -(Mpf(static_cast<long>(m)) + zz.re)) + MpC(zz.im, Mpf(0.0));  // -i(m + z)
  const int q = g.q();
  MpC total(Mpf(0.0));
  for (const auto& [key, poly] : g.terms()) {
    if (key.phase != 1 || key.j > m || ((m - key.j) % 2) != 0) continue;
    int half = (m - key.j) / 2;
    int deg = poly.deg_rho();
    for (int ell = 0; ell <= deg; ++ell) {
      MpC a(Mpf(0.0));
      for (const auto& [k2, c] : poly.terms())
        if (k2.first == ell) {
          MpC zp(Mpf(1.0));
          for (int e = 0; e < k2.second; ++e) zp = zp * zz;
          a += c.to_mpc() * zp;
        }
      if (a.is_zero()) continue;
      for (int r = 0; r <= ell; ++r) {
        int n = s + r - key.p - 1;
        if (n < 0 || n > half) continue;
        int k = half - n;
        Rational bin_kn = (n + q == -1) ? Rational(k == 0 ? 1 : 0) : binomial(k + n + q, n + q);
        if (bin_kn == 0) continue;
        Rational poch = 1;
        for (int i = 1; i <= key.p; ++i) poch *= n + i;
        MpC term = a * Mpf(Rational(binomial(ell, r) * bin_kn * poch));
        for (int e = 0; e < ell - r; ++e) term = term * rho0;
        MpC m2z = MpC(Mpf(-2.0)) * zz;
        for (int e = 0; e < n; ++e) term = term * m2z;
        cd ph = ipow_c(n + key.p + 1);
        term = term * MpC(ph);
        total += term;
      }
    }
  }
  return total.to_complex();
}

cd laurent_coefficient_contour(const FractionSeries& f, int m, int s, cd z, double radius, int points) {
  cd rho0 = -I * (double(m) + z);
  cd acc = 0;
  for (int i = 0; i < points; ++i) {
    double th = 2 * M_PI * (i + 0.5) / points;
    cd pt = rho0 + radius * std::exp(I * th);
    cd num = f.value(pt, z) * den_value(f.exact_integrand().rho_den(), pt);
    acc += num * std::pow(radius * std::exp(I * th), s);
  }
  return acc / double(points);
}

namespace {

// Coefficients a^+_{p,j,ell} at fixed z as complex doubles.
std::map<std::tuple<int, int, int>, cd> plus_coefficients(const ExpPolyIntegrand& g, cd z) {
  std::map<std::tuple<int, int, int>, cd> out;
  for (const auto& [key, poly] : g.terms()) {
    if (key.phase != 1) continue;
    for (const auto& [k2, c] : poly.terms()) out[{key.p, key.j, k2.first}] += c.to_complex() * std::pow(z, k2.second);
  }
  return out;
}

}  // namespace

double laurent_asymptotic_log(const ExpPolyIntegrand& g, int s, double z) {
  const int m = s * s;
  const int q = g.q();
  auto coef = plus_coefficients(g, z);
  std::map<std::pair<int, int>, std::vector<std::pair<int, cd>>> by_pl;  // (p, ell) -> (j, a)
  for (const auto& [k, a] : coef) {
    auto [p, j, ell] = k;
    if (((m - j) % 2 + 2) % 2 != 0) continue;
    by_pl[{p, ell}].push_back({j, a});
  }
  const double sd = s;
  const double corr = -2.0 / (3 * sd) - 2.0 / (3 * sd * sd) - 4.0 / (5 * sd * sd * sd) - 16.0 / (15 * std::pow(sd, 4));
  // common log-scale: log[(e s/2)^s / (e sqrt(2 pi s))] + corr
  const double base = sd * std::log(M_E * sd / 2) - 1 - 0.5 * std::log(2 * M_PI * sd) + corr;
  cd total = 0;
  for (const auto& [pl, list] : by_pl) {
    auto [p, ell] = pl;
    // leading nonvanishing moment sum_j a (-j)^k / (k! s^k)
    double scale = 0;
    for (const auto& [j, a] : list) scale = std::max(scale, std::abs(a) * std::pow(std::max(1, std::abs(j)), 12));
    cd lead = 0;
    for (int k = 0; k <= 40; ++k) {
      cd mom = 0;
      for (const auto& [j, a] : list) mom += a * std::pow(-double(j), k);
      if (std::abs(mom) > 1e-11 * std::max(1.0, scale)) {
        lead = mom / (std::tgamma(k + 1.0) * std::pow(sd, k));
        break;
      }
    }
    if (lead == 0.0) continue;
    // prefactor i^{1+p} (-2iz)^{s-1-p} (s/2)^{q-1-p}, relative to exp(base)
    cd pre = ipow_c(1 + p) * std::pow(-2.0 * I * z, s - 1 - p) * std::pow(sd / 2, q - 1 - p);
    cd rsum = 0;
    for (int r = 0; r <= ell; ++r) {
      double poch = 1;
      for (int i = 1; i <= p; ++i) poch *= r + s - i;
      rsum += double(binomial(ell, r).get_d()) * std::pow(-I * (sd * sd + z), ell - r) * std::pow(-I * z * sd, r) * poch;
    }
    total += pre * rsum * lead;
  }
  if (total == 0.0) return -HUGE_VAL;
  return base + std::log(std::abs(total));
}

double laurent_coefficient_log(const ExpPolyIntegrand& g, int s, double z, int digits) {
  cd v = laurent_coefficient(g, s * s, s, z, digits);
  return std::log(std::abs(v));
}

bool degree_condition_holds(const ExpPolyIntegrand& g, int n) {
  const int q = g.q();
  // coefficient of x^{-r}: sum_t a_t (n+1)_p C(-(n+p+1), r-n-p-1) c_t^{r-n-p-1}, c_t = j + z - i ph rho
  for (int r = 1; r <= n + q + 1; ++r) {
    SPoly acc;
    for (const auto& [key, a] : g.terms()) {
      int e = r - n - key.p - 1;
      if (e < 0) continue;
      Rational poch = 1;
      for (int i = 1; i <= key.p; ++i) poch *= n + i;
      Rational bin = binomial(n + key.p + e, e) * ((e % 2) ? -1 : 1);
      SPoly c = SPoly(key.j) + SPoly::z() + SPoly::monomial(1, 0, Surd(GaussQ(Rational(0), Rational(-key.phase))));
      SPoly ce(1);
      for (int i = 0; i < e; ++i) ce *= c;
      acc += a * ce * Surd(poch * bin);
    }
    if (!acc.is_zero()) return false;
  }
  return true;
}

// ---------------------------------------------------------------- explicit integrands

ExpPolyIntegrand f0_integrand() { return ExpPolyIntegrand::constant(SPoly(1)); }

namespace {

std::vector<Summand> projf_summands(int l, int lp, int l0) {
  std::vector<Summand> out;
  if (std::abs(l0) > std::min(l, lp)) return out;
  for (int n = -std::min(l, lp); n <= std::min(l, lp); ++n) {
    Summand s;
    s.factors = {Factor::a(l, n, lp), Factor::u(l0, l, n, lp), Factor::sinh2()};
    out.push_back(s);
  }
  Summand b;
  b.factors = {Factor::b_conj(lp), Factor::b(l), Factor::u(l0, l, 0, lp), Factor::sinh2()};
  b.weight = SPoly::monomial(0, 1, Surd(Rational(l % 2 ? -1 : 1, 4)));
  out.push_back(b);
  return out;
}

// Exp-polynomial helpers with denominator 1 (q = -1).
ExpPolyIntegrand ep_exp(int a, const SPoly& c = SPoly(1)) {
  ExpPolyIntegrand e(-1);
  e.add_term({0, -a, 0}, c);
  return e;
}
ExpPolyIntegrand ep_sinh() { return ep_exp(1, Surd(Rational(1, 2))) + ep_exp(-1, Surd(Rational(-1, 2))); }
ExpPolyIntegrand ep_cosh() { return ep_exp(1, Surd(Rational(1, 2))) + ep_exp(-1, Surd(Rational(1, 2))); }
ExpPolyIntegrand ep_lambda() { return ep_exp(0).times_lambda(); }
ExpPolyIntegrand ep_phase(int ph, const SPoly& c) {
  ExpPolyIntegrand e(-1);
  e.add_term({0, 0, ph}, c);
  return e;
}
// sin(rho lambda) and cos(rho lambda)
ExpPolyIntegrand ep_sin() {
  return ep_phase(1, Surd(GaussQ(0, Rational(-1, 2)))) + ep_phase(-1, Surd(GaussQ(0, Rational(1, 2))));
}
ExpPolyIntegrand ep_cos() { return ep_phase(1, Surd(Rational(1, 2))) + ep_phase(-1, Surd(Rational(1, 2))); }

// numerator / (rho sinh^power lambda) as an integrand with q = power - 1.
ExpPolyIntegrand over_rho_sinh_power(const ExpPolyIntegrand& num, int power) {
  // 1/sinh^k = 2^k e^{-k lambda} / (1 - e^{-2 lambda})^k; 1/rho = i/(i rho)
  ExpPolyIntegrand out(power - 1);
  out.set_rho_den({0});
  Surd c(GaussQ(Rational(0), Rational(1 << power)));
  for (const auto& [k, v] : num.terms()) out.add_term({k.p, k.j + power, k.phase}, v * c);
  return out;
}

}  // namespace

FractionSeries projf_series(int l, int lp, int l0) { return FractionSeries(projf_summands(l, lp, l0)); }

ExpPolyIntegrand projf_integrand(int l, int lp, int l0) {
  auto parts = projf_summands(l, lp, l0);
  if (parts.empty()) return ExpPolyIntegrand();
  return FractionSeries(parts).exact_integrand();
}

ExpPolyIntegrand cyclic_proj_integrand(int l) {
  return Factor::b_conj(l).exact() * Factor::u(0, 0, 0, l).exact() * Factor::sinh2().exact();
}

ExpPolyIntegrand l_cyclic_proj_integrand(int l) {
  return Factor::b(l).exact() * Factor::u(0, l, 0, 0).exact() * Factor::sinh2().exact() * SPoly(l % 2 ? -1 : 1);
}

ExpPolyIntegrand k10_part_integrand(int which) {
  ExpPolyIntegrand sh = ep_sinh(), ch = ep_cosh(), lam = ep_lambda();
  ExpPolyIntegrand sh2l = ep_exp(2, Surd(Rational(1, 2))) + ep_exp(-2, Surd(Rational(-1, 2)));  // sinh 2 lambda
  ExpPolyIntegrand s2m = sh2l - lam * SPoly(2);
  SPoly rho = SPoly::rho();
  if (which == 1) {
    // (sinh 2l - 2l)(cosh sin - rho sinh cos) / (rho sinh^4)
    ExpPolyIntegrand num = s2m * (ch * ep_sin() - sh * ep_cos() * rho);
    return over_rho_sinh_power(num, 4);
  }
  // bracket * sinh = (rho^2+1) sinh^2 sin + 2 rho cosh sinh cos - 2 cosh^2 sin
  ExpPolyIntegrand br = sh * sh * ep_sin() * (rho * rho + SPoly(1)) + ch * sh * ep_cos() * (rho * SPoly(2)) -
                        ch * ch * ep_sin() * SPoly(2);
  if (which == 2) {
    // bracket (lambda coth - 1)/(rho sinh^2) = br (lambda cosh - sinh)/(rho sinh^4)
    return over_rho_sinh_power(br * (lam * ch - sh), 4);
  }
  if (which == 3) return over_rho_sinh_power(br * s2m * s2m, 5);
  throw DomainError("k10_part_integrand: which must be 1, 2 or 3");
}

// ---------------------------------------------------------------- K-matrix

std::complex<double> k_front_factor(int q, double e2, cd z) {
  return 4 * std::pow(M_PI, 3) * std::exp(z) * std::pow(4 * M_PI * e2, q);
}

namespace {

struct Su2Grid {
  std::vector<Mat2> nodes;
  std::vector<double> w;
};

// Product rule exact for matrix-element products of total weight <= D.
Su2Grid su2_grid(int D) {
  Su2Grid g;
  int na = D + 1;
  int nb = D / 2 + 2;
  const GaussRule& gl = gauss_legendre(nb);
  for (int ia = 0; ia < na; ++ia) {
    double al = 2 * M_PI * ia / na;
    for (int ib = 0; ib < nb; ++ib) {
      double cb = gl.x[ib];
      double half = 0.5 * std::acos(std::max(-1.0, std::min(1.0, cb)));
      for (int ig = 0; ig < na; ++ig) {
        double ga = 2 * M_PI * ig / na;
        Mat2 ra, rb, rg;
        ra << std::exp(I * (al / 2)), 0, 0, std::exp(-I * (al / 2));
        rb << std::cos(half), I * std::sin(half), I * std::sin(half), std::cos(half);
        rg << std::exp(I * (ga / 2)), 0, 0, std::exp(-I * (ga / 2));
        g.nodes.push_back(ra * rb * rg);
        g.w.push_back(gl.w[ib] * 0.5 / (double(na) * na));
      }
    }
  }
  return g;
}

struct Matching {
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> left_free, right_free;
};

void enumerate_matchings(int i, int q, std::vector<int>& used, std::vector<std::pair<int, int>>& pairs,
                         std::vector<int>& lfree, std::vector<Matching>& out) {
  if (i == q) {
    Matching m;
    m.pairs = pairs;
    m.left_free = lfree;
    for (int j = 0; j < q; ++j)
      if (!used[j]) m.right_free.push_back(j);
    out.push_back(m);
    return;
  }
  for (int j = 0; j < q; ++j) {
    if (used[j]) continue;
    used[j] = 1;
    pairs.push_back({i, j});
    enumerate_matchings(i + 1, q, used, pairs, lfree, out);
    pairs.pop_back();
    used[j] = 0;
  }
  lfree.push_back(i);
  enumerate_matchings(i + 1, q, used, pairs, lfree, out);
  lfree.pop_back();
}

std::string spec_key(const KernelSpec& spec, int l0, const AngularIndex& b, const AngularIndex& c) {
  std::ostringstream os;
  os << spec.q << ":";
  for (const auto& a : spec.alphas) os << a.l << "," << a.m << ";";
  os << "|" << l0 << "|" << b.l << "," << b.m << "|" << c.l << "," << c.m;
  return os.str();
}

FractionSeries build_k_series(const KernelSpec& spec, int l0, const AngularIndex& beta, const AngularIndex& gamma) {
  const int q = spec.q;
  std::vector<Summand> parts;
  if (q == 0) {
    if (l0 == 0 && beta.l == 0 && gamma.l == 0) {
      Summand s;
      s.factors = {Factor::u(0, 0, 0, 0), Factor::sinh2()};
      parts.push_back(s);
    }
    return FractionSeries(parts);
  }
  int lsum = 0;
  for (const auto& a : spec.alphas) lsum += a.l;
  Su2Grid grid = su2_grid(lsum + std::max(beta.l, gamma.l) + 1);
  // matrices per node and weight
  std::map<int, std::vector<Eigen::MatrixXcd>> T;
  auto need = [&](int l) {
    if (T.count(l)) return;
    auto& v = T[l];
    for (const auto& u : grid.nodes) v.push_back(wigner_t_matrix(l, u));
  };
  for (const auto& a : spec.alphas) need(a.l);
  need(beta.l);
  need(gamma.l);

  std::vector<Matching> matchings;
  std::vector<int> used(q, 0), lfree;
  std::vector<std::pair<int, int>> pairs;
  enumerate_matchings(0, q, used, pairs, lfree, matchings);

  std::map<std::pair<std::vector<Factor>, int>, cd> grouped;
  const auto& al = spec.alphas;
  const int kmax = std::min(beta.l, gamma.l);
  if (std::abs(l0) > kmax) return FractionSeries(parts);
  for (const auto& mt : matchings) {
    int np = static_cast<int>(mt.pairs.size());
    std::vector<int> smax(np), s(np);
    for (int a = 0; a < np; ++a) smax[a] = std::min(al[mt.pairs[a].first].l, al[mt.pairs[a].second].l);
    for (int a = 0; a < np; ++a) s[a] = -smax[a];
    int sign = 1;
    for (int j : mt.right_free)
      if (al[j].l % 2) sign = -sign;
    int w = static_cast<int>(mt.left_free.size());
    while (true) {
      for (int k = -kmax; k <= kmax; ++k) {
        cd I1 = 0, I2 = 0;
        for (size_t nd = 0; nd < grid.nodes.size(); ++nd) {
          cd p1 = grid.w[nd] * T[beta.l][nd](beta.m + beta.l, k + beta.l);
          cd p2 = grid.w[nd] * T[gamma.l][nd](k + gamma.l, gamma.m + gamma.l);
          for (int a = 0; a < np; ++a) {
            const auto& ai = al[mt.pairs[a].first];
            const auto& aj = al[mt.pairs[a].second];
            p1 *= std::conj(T[ai.l][nd](ai.m + ai.l, s[a] + ai.l));
            p2 *= std::conj(T[aj.l][nd](s[a] + aj.l, aj.m + aj.l));
          }
          for (int j : mt.right_free) p1 *= std::conj(T[al[j].l][nd](al[j].m + al[j].l, al[j].l));
          for (int i : mt.left_free) p2 *= std::conj(T[al[i].l][nd](al[i].l, al[i].m + al[i].l));
          I1 += p1;
          I2 += p2;
        }
        cd wt = I1 * I2 * double(sign);
        if (std::abs(wt) < 1e-13) continue;
        std::vector<Factor> fs;
        for (int a = 0; a < np; ++a)
          fs.push_back(Factor::a(al[mt.pairs[a].first].l, s[a], al[mt.pairs[a].second].l));
        for (int i : mt.left_free) fs.push_back(Factor::b_conj(al[i].l));
        for (int j : mt.right_free) fs.push_back(Factor::b(al[j].l));
        fs.push_back(Factor::u(l0, beta.l, k, gamma.l));
        fs.push_back(Factor::sinh2());
        std::sort(fs.begin(), fs.end());
        grouped[{fs, w}] += wt;
      }
      int a = 0;
      while (a < np && s[a] == smax[a]) s[a] = -smax[a], ++a;
      if (a == np) break;
      ++s[a];
    }
  }
  for (const auto& [key, wt] : grouped) {
    if (std::abs(wt) < 1e-13) continue;
    Summand sm;
    sm.factors = key.first;
    sm.weight = SPoly::monomial(0, key.second, Surd(Rational(1, 1 << (2 * key.second))));
    // snap weights that are rational to within rounding
    sm.scale = wt;
    parts.push_back(sm);
  }
  return FractionSeries(parts);
}

}  // namespace

bool k_index_in_band(const KernelSpec& spec, int l0, const AngularIndex& beta) {
  if (!beta.valid()) return false;
  int lmax = spec.q == 0 ? 0 : kernel_l_max(spec.alphas);
  int lmin = spec.q == 0 ? 0 : kernel_l_min(spec.alphas);
  return beta.l >= std::max(lmin, std::abs(l0)) && beta.l <= lmax;
}

std::vector<AngularIndex> k_band(const KernelSpec& spec, int l0) {
  std::vector<AngularIndex> out;
  int lmax = spec.q == 0 ? 0 : kernel_l_max(spec.alphas);
  for (int l = 0; l <= lmax; ++l)
    for (int m = -l; m <= l; ++m)
      if (k_index_in_band(spec, l0, {l, m})) out.push_back({l, m});
  return out;
}

const FractionSeries& k_matrix_series(const KernelSpec& spec, int l0, const AngularIndex& beta,
                                      const AngularIndex& gamma) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<FractionSeries>> cache;
  std::string key = spec_key(spec, l0, beta, gamma);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  auto fs = std::make_unique<FractionSeries>(build_k_series(spec, l0, beta, gamma));
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[key];
  if (!slot) slot = std::move(fs);
  return *slot;
}

cd k_matrix_element(const KernelSpec& spec, int l0, const AngularIndex& beta, const AngularIndex& gamma, cd rho,
                    cd z) {
  spec.validate();
  if (!k_index_in_band(spec, l0, beta) || !k_index_in_band(spec, l0, gamma)) return 0.0;
  const FractionSeries& fs = k_matrix_series(spec, l0, beta, gamma);
  if (fs.summands().empty()) return 0.0;
  return k_front_factor(spec.q, spec.params.e2, z) * fs.value(rho, z);
}

cd k_matrix_element_quadrature(const KernelSpec& spec, int l0, const AngularIndex& beta, const AngularIndex& gamma,
                               double rho, double z) {
  spec.validate();
  if (!(z > 1)) throw DomainError("quadrature of K needs z > 1");
  if (!k_index_in_band(spec, l0, beta) || !k_index_in_band(spec, l0, gamma)) return 0.0;
  const FractionSeries& fs = k_matrix_series(spec, l0, beta, gamma);
  if (fs.summands().empty()) return 0.0;
  return k_front_factor(spec.q, spec.params.e2, z) * fs.quadrature(rho, z);
}

KMatrix k_matrix(const KernelSpec& spec, int l0, cd rho, cd z) {
  KMatrix km;
  km.l0 = l0;
  km.rho = rho;
  km.z = z;
  km.index = k_band(spec, l0);
  const int n = static_cast<int>(km.index.size());
  km.entries = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) km.entries(i, j) = k_matrix_element(spec, l0, km.index[i], km.index[j], rho, z);
  return km;
}

KMatrix residue_kappa(const KernelSpec& spec, double z) {
  if (!(z > 0 && z < 1)) throw DomainError("residue_kappa: supplementary component needs 0 < z < 1");
  spec.validate();
  KMatrix km;
  km.l0 = 0;
  km.rho = cd(0, -(1 - z));
  km.z = z;
  km.index = k_band(spec, 0);
  const int n = static_cast<int>(km.index.size());
  km.entries = Eigen::MatrixXcd::Zero(n, n);
  const cd front = k_front_factor(spec.q, spec.params.e2, z);
  auto h = [&](cd r) { return r * r / (2 * std::pow(M_PI, 4)) * front; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const FractionSeries& fs = k_matrix_series(spec, 0, km.index[i], km.index[j]);
      if (fs.summands().empty()) continue;
      cd r_lo = fs.residue(cd(0, -(1 - z)), z, h);
      cd r_hi = fs.residue(cd(0, 1 - z), z, h);
      km.entries(i, j) = 0.5 * 2 * M_PI * I * r_lo - 0.5 * 2 * M_PI * I * r_hi;
    }
  return km;
}

double kappa_closed_l1(double e2, double z) { return 2 * e2 * M_PI * std::exp(z) * (1 - z) * (3 - z) / (2 - z); }

// ---------------------------------------------------------------- projection functions

cd projection_front_factor(ProjectionKind kind, const ProjectionIndices& idx, cd z) {
  const double e = std::sqrt(idx.e2);
  switch (kind) {
    case ProjectionKind::UToCl:
    case ProjectionKind::ClToU:
      return 4 * std::pow(M_PI, 3.5) * std::sqrt(z) * std::exp(z) / double(2 * idx.l + 1) * e;
    case ProjectionKind::CalphaToCalpha:
      return std::pow(4 * M_PI * e, 2) * std::exp(z) * M_PI * M_PI / double((2 * idx.l + 1) * (2 * idx.lp + 1));
  }
  return 0.0;
}

FractionSeries projection_series(ProjectionKind kind, const ProjectionIndices& idx) {
  std::vector<Summand> parts;
  Summand s;
  switch (kind) {
    case ProjectionKind::UToCl:
      s.factors = {Factor::b_conj(idx.l), Factor::u(0, 0, 0, idx.l), Factor::sinh2()};
      parts.push_back(s);
      return FractionSeries(parts);
    case ProjectionKind::ClToU:
      s.factors = {Factor::b(idx.l), Factor::u(0, idx.l, 0, 0), Factor::sinh2()};
      s.weight = SPoly(idx.l % 2 ? -1 : 1);
      parts.push_back(s);
      return FractionSeries(parts);
    case ProjectionKind::CalphaToCalpha:
      if (idx.l > idx.lp) throw DomainError("projection: needs l <= l'");
      return projf_series(idx.l, idx.lp, idx.l0);
  }
  return FractionSeries();
}

cd projection_function(ProjectionKind kind, const ProjectionIndices& idx, cd rho, cd z) {
  if (idx.l < 1 || idx.lp < 1) throw DomainError("projection: weights must be >= 1");
  FractionSeries fs = projection_series(kind, idx);
  if (fs.summands().empty()) return 0.0;
  return projection_front_factor(kind, idx, z) * fs.value(rho, z);
}

cd cyclic_residue_closed(int l, double z, double e2, int sign) {
  const double e = std::sqrt(e2);
  cd den = 1;
  for (int s = 0; s <= l; ++s) den *= -I * (sign > 0 ? (s + z - 1) : (s - z + 1));
  double prod = 1;
  for (int j = 2; j <= l + 1; ++j) prod *= z - j;
  double base = std::pow(M_PI, 3.5) * std::sqrt(z) * std::exp(z) / std::sqrt(double(l) * (l + 1)) * e;
  if (sign > 0) return 32 * base * ipow_c(l + 1) / den * prod;
  return -8 * base * ipow_c(l) / den * prod;
}

cd cyclic_residue_series(int l, double z, double e2, int sign) {
  ProjectionIndices idx{l, l, 0, e2};
  FractionSeries fs = projection_series(ProjectionKind::UToCl, idx);
  cd front = projection_front_factor(ProjectionKind::UToCl, idx, z);
  cd rho0 = sign > 0 ? cd(0, -(z - 1)) : cd(0, z - 1);
  return fs.residue(rho0, z, [&](cd) { return front; });
}

// ---------------------------------------------------------------- order identities

namespace {

// Integrand in the normalisation of the order identities: q fixed, monic rho-denominator.
ExpPolyIntegrand normalised(const ExpPolyIntegrand& g, int q_target) {
  ExpPolyIntegrand r = g.reduced();
  r = r.with_den(g.rho_den());
  if (r.q() > q_target) throw UnsupportedCase("order identity: integrand does not reduce to the stated q");
  r = r.raised(q_target - r.q());
  // prod(i rho + d) = i^D prod(rho - i d)
  r *= SPoly(Surd(ipow(-static_cast<long>(g.rho_den().size()))));
  return r;
}

// a^+_{p,j,deg} for the requested z-power.
std::map<int, Surd> plus_slice(const ExpPolyIntegrand& g, int p, int deg, int zpow) {
  std::map<int, Surd> out;
  for (const auto& [k, c] : g.terms()) {
    if (k.phase != 1 || k.p != p) continue;
    Surd v = c.coeff(deg, zpow);
    if (!v.is_zero()) out[k.j] = v;
  }
  return out;
}

std::vector<Surd> moments(const std::map<int, Surd>& a, int kmax) {
  std::vector<Surd> out;
  for (int k = 0; k <= kmax; ++k) {
    Surd s;
    for (const auto& [j, v] : a) {
      mpz_class jp = 1;
      for (int i = 0; i < k; ++i) jp *= j;
      s += v * Surd(Rational(jp));
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

bool OrderIdentity::holds() const {
  if (static_cast<int>(moments.size()) != threshold + 1) return false;
  for (int k = 0; k < threshold; ++k)
    if (!moments[k].is_zero()) return false;
  return !moments[threshold].is_zero();
}

std::vector<OrderIdentity> order_identity_check(OrderCase c, int l, int lp, int l0) {
  std::vector<OrderIdentity> out;
  if (c == OrderCase::Unprimed) {
    ExpPolyIntegrand g = normalised(cyclic_proj_integrand(l), 2 * l - 1);
    for (int p = 0; p <= 1; ++p) {
      OrderIdentity id;
      id.p = p;
      id.degree = l;
      id.threshold = p == 0 ? l + 1 : l;
      id.moments = moments(plus_slice(g, p, l, 0), id.threshold);
      out.push_back(id);
    }
    return out;
  }
  ExpPolyIntegrand g = normalised(projf_integrand(l, lp, l0), 2 * (l + lp));
  if (c == OrderCase::Primed) {
    int jm = l + lp - l0;
    for (int p = 0; p <= 2; ++p) {
      OrderIdentity id;
      id.p = p;
      id.degree = jm;
      id.threshold = jm + 2 - p;
      id.moments = moments(plus_slice(g, p, jm, 1), id.threshold);
      out.push_back(id);
    }
  } else {
    int jm = l + lp;
    for (int p = 0; p <= 1; ++p) {
      OrderIdentity id;
      id.p = p;
      id.degree = jm;
      id.threshold = jm + 2 - p;
      id.moments = moments(plus_slice(g, p, jm, 0), id.threshold);
      out.push_back(id);
    }
  }
  return out;
}

std::pair<Surd, Surd> suma_double_primed_1(int l, int lp) {
  ExpPolyIntegrand g = normalised(projf_integrand(l, lp, 1), 2 * (l + lp));
  int d = l + lp;
  auto mom = moments(plus_slice(g, 1, d, 0), d + 1);
  Surd lhs = mom[d + 1] * Surd(Rational((d + 1) % 2 ? -1 : 1) / factorial(d + 1));
  // (1/i) 2^{3l+4l'} (-1)^{2l+l'} l l' (2l+1)(2l'+1)/(l'+1)! C(l+l'-1/2, l+l') C(l'-1/2, l')
  //   prod_{j<l'} (l+j+1)/(2(l+j)+1) prod_{r<=l'-2} (l+l'-r)
  Rational r = Rational(mpz_class(1) << (3 * l + 4 * lp)) * (lp % 2 ? -1 : 1) * l * lp * (2 * l + 1) * (2 * lp + 1) /
               factorial(lp + 1) * binomial(Rational(2 * (l + lp) - 1, 2), l + lp) *
               binomial(Rational(2 * lp - 1, 2), lp);
  for (int j = 0; j <= lp - 1; ++j) r *= Rational(l + j + 1, 2 * (l + j) + 1);
  for (int q = 0; q <= lp - 2; ++q) r *= l + lp - q;
  Surd rhs = Surd(GaussQ(0, -r));
  return {lhs, rhs};
}

std::pair<Surd, Surd> suma_primed_2(int l, int lp) {
  const int l0 = 1;
  ExpPolyIntegrand g = normalised(projf_integrand(l, lp, l0), 2 * (l + lp));
  int d = l + lp - l0;
  auto mom = moments(plus_slice(g, 2, d, 1), d);
  Surd lhs = mom[d] * Surd(Rational(d % 2 ? -1 : 1) / factorial(d));
  Rational r = Rational(mpz_class(1) << (4 * l + 2 * lp + 1)) * ((lp + 1) % 2 ? -1 : 1) * l * (l + 1) * lp *
               (lp + 1) * binomial(Rational(2 * lp + 1, 2), lp + 1) * binomial(Rational(2 * l + 1, 2), l + 1);
  return {lhs, Surd(r)};
}

// ---------------------------------------------------------------- decomposition and bound state

DecompositionWeight decomposition_weight(const KernelSpec& spec, int l0, double rho, double z) {
  if (rho < 0) throw DomainError("decomposition_weight: rho must be >= 0");
  DecompositionWeight dw;
  for (const auto& b : k_band(spec, l0)) dw.trace += k_matrix_element(spec, l0, b, b, rho, z).real();
  if (l0 == 0 && z > 0 && z < 1) {
    KMatrix kap = residue_kappa(spec, z);
    dw.supplementary = kap.entries.trace().real();
    dw.has_supplementary = true;
  }
  return dw;
}

double bound_state_bracket_sum(int l) {
  double s = 0;
  for (int j = 1; j <= l; ++j) s += 4 * M_PI * (j % 2 ? -1 : 1) / (double(j) * (j + 1));
  return s;
}

double bound_state_bracket_limit() { return -4 * M_PI * (std::log(4.0) - 1); }

cd bound_state_coefficient(int l, double z, double e2) {
  cd b = coefficient_tables(l).leading.to_complex() * std::sqrt(e2);
  return std::sqrt(M_PI) * std::sqrt(z) * (1 - z) * b * (z * bound_state_bracket_sum(l) - 1);
}

}  // namespace lkl
