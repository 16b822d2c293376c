#include "lkl/reps.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "lkl/errors.hpp"
#include "lkl/quadrature.hpp"

namespace lkl {

namespace {

using cd = std::complex<double>;
constexpr cd I(0.0, 1.0);

// log cosh without overflow
double log_cosh(double x) {
  double a = std::abs(x);
  return a + std::log1p(std::exp(-2 * a)) - M_LN2;
}

// Sum of adaptive panels of unit width over [a, b]; tol is the absolute total target.
template <class T, class F>
T integrate_line(F&& f, double a, double b, double tol, double& err) {
  int n = std::max(1, static_cast<int>(std::ceil(b - a)));
  double h = (b - a) / n;
  T s{};
  err = 0;
  for (int k = 0; k < n; ++k) {
    QuadResult info;
    s += integrate<T>(f, a + k * h, a + (k + 1) * h, tol / n, &info);
    err += info.error;
  }
  return s;
}

// T^l_{m n} at the rotation a = [[c, i s], [i s, c]].
cd gelfand_t(int l, int m, int n, double c, double s) {
  Mat2 a;
  a << c, cd(0, s), cd(0, s), c;
  return wigner_t(l, m, n, a);
}

// Bivariate Laurent polynomial in (w, E) with Gaussian-rational coefficients.
struct LWE {
  std::map<std::pair<int, int>, GaussQ> t;
  static LWE mono(int w, int e, GaussQ c = GaussQ(1)) {
    LWE r;
    if (!c.is_zero()) r.t[{w, e}] = c;
    return r;
  }
  LWE& operator+=(const LWE& o) {
    for (const auto& [k, c] : o.t) {
      auto it = t.find(k);
      if (it == t.end()) {
        t.emplace(k, c);
      } else {
        it->second += c;
        if (it->second.is_zero()) t.erase(it);
      }
    }
    return *this;
  }
  LWE operator*(const LWE& o) const {
    LWE r;
    for (const auto& [ka, ca] : t)
      for (const auto& [kb, cb] : o.t) r += mono(ka.first + kb.first, ka.second + kb.second, ca * cb);
    return r;
  }
  LWE scaled(const GaussQ& c) const {
    LWE r;
    for (const auto& [k, v] : t) r += mono(k.first, k.second, v * c);
    return r;
  }
};

LWE lwe_pow(const LWE& a, int n) {
  LWE r = LWE::mono(0, 0);
  for (int i = 0; i < n; ++i) r = r * a;
  return r;
}

const Rational kHalf(1, 2);
LWE lwe_cosh() { return LWE::mono(0, 1, kHalf) += LWE::mono(0, -1, kHalf); }
LWE lwe_sinh() { return LWE::mono(0, 1, kHalf) += LWE::mono(0, -1, GaussQ(-kHalf)); }

}  // namespace

void legendre_normalized_column(int m, int L, double y, double s, std::vector<double>& out) {
  int am = std::abs(m);
  out.assign(static_cast<size_t>(std::max(L, 0)) + 1, 0.0);
  if (am > L) return;
  double p = 1.0 / std::sqrt(2.0);
  for (int k = 1; k <= am; ++k) p *= -std::sqrt((2.0 * k + 1) / (2.0 * k)) * s;
  out[am] = p;
  if (am + 1 > L) return;
  double p1 = std::sqrt(2.0 * am + 3) * y * p;
  out[am + 1] = p1;
  double p0 = p;
  for (int l = am + 2; l <= L; ++l) {
    double l2 = static_cast<double>(l) * l, m2 = static_cast<double>(am) * am;
    double a = std::sqrt((4 * l2 - 1) / (l2 - m2));
    double lm1 = l - 1.0;
    double b = std::sqrt((lm1 * lm1 - m2) / (4 * lm1 * lm1 - 1));
    double p2 = a * (y * p1 - b * p0);
    out[l] = p2;
    p0 = p1;
    p1 = p2;
  }
}

double rep_a_element(int l, int m, int lp, int mp, double lambda, double tol) {
  if (l < 1 || lp < 1 || std::abs(m) > l || std::abs(mp) > lp)
    throw DomainError("rep_a_element: need l, l' >= 1 and |m| <= l");
  if (m != mp) return 0.0;
  int L = std::max(l, lp);
  auto f = [&](double mu) {
    thread_local std::vector<double> cy, cx;
    double y = std::tanh(mu), sy = 1 / std::cosh(mu);
    double x = std::tanh(mu + lambda), sx = 1 / std::cosh(mu + lambda);
    legendre_normalized_column(m, L, y, sy, cy);
    legendre_normalized_column(m, L, x, sx, cx);
    return cy[l] * cx[lp] * sy * sy;
  };
  double err;
  double lim = 38 + std::abs(lambda);
  double v = integrate_line<double>(f, -lim, lim, tol, err);
  if (err > 100 * tol) throw PrecisionError("rep_a_element: quadrature did not converge", err);
  return std::sqrt(l * (l + 1.0) / (lp * (lp + 1.0))) * v;
}

Eigen::MatrixXd rep_a_block(int m, int L, double lambda) {
  int l_lo = std::max(1, std::abs(m));
  int n = L - l_lo + 1;
  if (n <= 0) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  const GaussRule& r = gauss_legendre(20);
  const double width = 0.5, lim = 38 + std::abs(lambda);
  int panels = static_cast<int>(std::ceil(2 * lim / width));
  std::vector<double> cy, cx;
  Eigen::VectorXd vy(n), vx(n);
  for (int p = 0; p < panels; ++p) {
    double a = -lim + p * width, c = a + 0.5 * width;
    for (size_t i = 0; i < r.x.size(); ++i) {
      double mu = c + 0.5 * width * r.x[i];
      double w = 0.5 * width * r.w[i];
      double y = std::tanh(mu), sy = 1 / std::cosh(mu);
      double x = std::tanh(mu + lambda), sx = 1 / std::cosh(mu + lambda);
      legendre_normalized_column(m, L, y, sy, cy);
      legendre_normalized_column(m, L, x, sx, cx);
      for (int k = 0; k < n; ++k) {
        vy(k) = cy[l_lo + k];
        vx(k) = cx[l_lo + k];
      }
      acc.noalias() += (w * sy * sy) * vy * vx.transpose();
    }
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double la = l_lo + a, lb = l_lo + b;
      acc(a, b) *= std::sqrt(la * (la + 1) / (lb * (lb + 1)));
    }
  return acc;
}

cd u_matrix_element_quadrature(const RepLabel& label, int l, int m, int lp, int mp, double lambda,
                               double tol) {
  int l0 = label.l0;
  if (std::abs(m) > std::min(l, lp) || std::abs(l0) > std::min(l, lp))
    throw DomainError("u_matrix_element: need |m|, |l0| <= min(l, l')");
  if (lambda < 0) throw DomainError("u_matrix_element: lambda must be non-negative");
  if (m != mp) return 0.0;
  cd e = label.l1 - 1.0;
  auto f = [&](double mu) {
    double ratio = log_cosh(mu - lambda) - log_cosh(mu);
    double cy = 1 / std::sqrt(1 + std::exp(-2 * mu)), sy = 1 / std::sqrt(1 + std::exp(2 * mu));
    double nu = mu - lambda;
    double cx = 1 / std::sqrt(1 + std::exp(-2 * nu)), sx = 1 / std::sqrt(1 + std::exp(2 * nu));
    double sech = 1 / std::cosh(mu);
    return std::exp(e * ratio) * std::conj(gelfand_t(lp, l0, m, cy, sy)) * gelfand_t(l, l0, m, cx, sx) *
           (sech * sech);
  };
  double err;
  double lim = 38 + std::abs(lambda) * (1 + std::abs(e.real()));
  cd v = integrate_line<cd>(f, -lim, lim, tol, err);
  if (err > 100 * tol) throw PrecisionError("u_matrix_element: quadrature did not converge", err);
  return 0.5 * std::sqrt((2.0 * l + 1) * (2.0 * lp + 1)) * v;
}

cd u_matrix_element_legendre(const RepLabel& label, int l, int m, int lp, double lambda, double tol) {
  if (label.l0 != 0) throw DomainError("Legendre form needs l0 = 0");
  if (std::abs(m) > std::min(l, lp)) throw DomainError("u_matrix_element_legendre: |m| too large");
  int L = std::max(l, lp);
  cd e = label.l1 - 1.0;
  auto f = [&](double mu) {
    thread_local std::vector<double> cy, cx;
    double y = std::tanh(mu), sy = 1 / std::cosh(mu);
    double x = std::tanh(mu + lambda), sx = 1 / std::cosh(mu + lambda);
    legendre_normalized_column(m, L, y, sy, cy);
    legendre_normalized_column(m, L, x, sx, cx);
    double ratio = log_cosh(mu + lambda) - log_cosh(mu);
    return std::exp(e * ratio) * (cy[lp] * cx[l] * sy * sy);
  };
  double err;
  double lim = 38 + std::abs(lambda) * (1 + std::abs(e.real()));
  cd v = integrate_line<cd>(f, -lim, lim, tol, err);
  if (err > 100 * tol) throw PrecisionError("u_matrix_element_legendre: no convergence", err);
  return ((l + lp) % 2 ? -1.0 : 1.0) * v;
}

ExpPolyIntegrand rep_a_exact(int l, int m, int lp) {
  int am = std::abs(m);
  if (l < 1 || lp < 1 || am > std::min(l, lp)) throw DomainError("rep_a_exact: index out of range");
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, ExpPolyIntegrand> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({l, am, lp});
    if (it != cache.end()) return it->second;
  }
  RationalPoly r = legendre_assoc_poly(l, am), rp = legendre_assoc_poly(lp, am);
  LWE C = lwe_cosh(), S = lwe_sinh();
  LWE Y = LWE::mono(1, 0);  // (w - C)
  Y += C.scaled(GaussQ(-1));
  LWE X = LWE::mono(-1, 0, GaussQ(-1));                                     // (Cw - 1)/w
  X += C;
  // R(y) S^{l-m} and R'(x) S^{l'-m}
  LWE py, px;
  for (int a = 0; a <= r.degree(); ++a)
    py += (lwe_pow(Y, a) * lwe_pow(S, l - am - a)).scaled(GaussQ(r.at(a)));
  for (int b = 0; b <= rp.degree(); ++b)
    px += (lwe_pow(X, b) * lwe_pow(S, lp - am - b)).scaled(GaussQ(rp.at(b)));
  // [(E - w)(w - 1/E)]^m / w^m
  LWE f1 = LWE::mono(0, 1) += LWE::mono(1, 0, GaussQ(-1));
  LWE f2 = LWE::mono(1, 0) += LWE::mono(0, -1, GaussQ(-1));
  LWE num = py * px * lwe_pow(f1 * f2 * LWE::mono(-1, 0), am);
  // integrate dw over [1/E, E]
  std::map<std::pair<int, int>, GaussQ> res;  // (p, E exponent)
  for (const auto& [k, c] : num.t) {
    int wk = k.first, ek = k.second;
    if (wk == -1) {
      res[{1, ek}] += c * GaussQ(2);
    } else {
      GaussQ cc = c * GaussQ(Rational(1) / Rational(wk + 1));
      res[{0, ek + wk + 1}] += cc;
      res[{0, ek - wk - 1}] -= cc;
    }
  }
  int n = l + lp + 1;
  Rational two_n = Rational(mpz_class(1) << n);
  Rational nsq = Rational(l * (l + 1) * (2 * l + 1) * (2 * lp + 1)) * factorial(l - am) *
                 factorial(lp - am) / (Rational(lp * (lp + 1) * 4) * factorial(l + am) * factorial(lp + am));
  Surd norm = Surd::sqrt_of(nsq) * GaussQ(two_n);
  ExpPolyIntegrand out(n - 1);
  for (const auto& [k, c] : res)
    if (!c.is_zero()) out.add_term({k.first, n - k.second, 0}, SPoly(Surd(c) * norm));
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(std::make_tuple(l, am, lp), out);
  return out;
}

ExpPolyIntegrand u_exact(int l0, int l, int m, int lp) {
  if (std::abs(m) > std::min(l, lp) || std::abs(l0) > std::min(l, lp) || l < 0 || lp < 0)
    throw DomainError("u_exact: need |m|, |l0| <= min(l, l')");
  static std::mutex mu;
  static std::map<std::tuple<int, int, int, int>, ExpPolyIntegrand> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({l0, l, m, lp});
    if (it != cache.end()) return it->second;
  }
  LWE f1 = LWE::mono(0, 1) += LWE::mono(1, 0, GaussQ(-1));   // E - w
  LWE f2 = LWE::mono(1, 0) += LWE::mono(0, -1, GaussQ(-1));  // w - 1/E
  LWE sum;
  int a_lo = std::max(0, -l0 - m);
  for (int al = a_lo; al <= std::min(l - l0, l - m); ++al) {
    Rational ka = binomial(l - m, al) * binomial(l + m, l - l0 - al);
    if (ka == 0) continue;
    int A2 = l0 + m + 2 * al, B2 = 2 * l - l0 - m - 2 * al;
    for (int be = a_lo; be <= std::min(lp - l0, lp - m); ++be) {
      Rational kb = binomial(lp - m, be) * binomial(lp + m, lp - l0 - be);
      if (kb == 0) continue;
      int A1 = l0 + m + 2 * be, B1 = 2 * lp - l0 - m - 2 * be;
      GaussQ ph = ipow(B2) * ipow(3 * B1);  // i^{B2} (-i)^{B1}
      GaussQ c = ph * GaussQ(ka * kb);
      int pa = (A1 + A2) / 2, pb = (B1 + B2) / 2;
      LWE term = lwe_pow(f1, pa) * lwe_pow(f2, pb) * LWE::mono(-l, l - l0 - m - 2 * al, c);
      sum += term;
    }
  }
  // sum = sum_k c_k(E) w^{k-l}; integrate w^{i rho - 1 + d}
  int n = l + lp + 1;
  std::vector<int> den;
  for (int d = -l; d <= lp; ++d) den.push_back(d);
  Rational sq = Rational((2 * l + 1) * (2 * lp + 1)) * factorial(l - l0) * factorial(l + l0) *
                factorial(lp - l0) * factorial(lp + l0) /
                (factorial(l - m) * factorial(l + m) * factorial(lp - m) * factorial(lp + m));
  Surd norm = Surd::sqrt_of(sq);
  ExpPolyIntegrand out(n - 1);
  out.set_rho_den(den);
  for (const auto& [k, c] : sum.t) {
    int d = k.first, e = k.second;
    if (d < -l || d > lp) throw DomainError("u_exact: internal exponent out of range");
    SPoly others(1);
    for (int dd : den)
      if (dd != d) others *= irho_plus(dd);
    SPoly coef = others * (Surd(c) * norm);
    // E^{d} e^{i rho lambda} - E^{-d} e^{-i rho lambda}, times E^{e - n}
    out.add_term({0, n - e - d, 1}, coef);
    out.add_term({0, n - e + d, -1}, -coef);
  }
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(std::make_tuple(l0, l, m, lp), out);
  return out;
}

namespace {
// Mean over a small circle around rho, for points near a removable singularity.
template <class F>
cd eval_near_removable(F&& f, cd rho, const std::vector<int>& den) {
  double near = 1e300;
  for (int d : den) near = std::min(near, std::abs(rho - cd(0, d)));
  if (near > 1e-3) return f(rho);
  const int N = 32;
  const double r = 0.05;
  cd s = 0;
  for (int k = 0; k < N; ++k) s += f(rho + r * std::exp(cd(0, 2 * M_PI * k / N)));
  return s / static_cast<double>(N);
}
}  // namespace

cd u_matrix_element_exact(const RepLabel& label, int l, int m, int lp, double lambda) {
  if (lambda < 0) throw DomainError("u_matrix_element_exact: lambda must be non-negative");
  if (lambda == 0) return (l == lp) ? 1.0 : 0.0;
  ExpPolyIntegrand u = u_exact(label.l0, l, m, lp);
  auto f = [&](cd rho) { return u.eval(lambda, rho, 0.0); };
  return eval_near_removable(f, label.rho(), u.rho_den());
}

bool u_closed_catalogued(int l0, int l, int m, int lp, int mp) {
  if (m != mp) return false;
  if (l0 == 0 && l == 0 && m == 0) return lp >= 0;
  if (l == 1 && lp == 1) {
    if (l0 == 0) return std::abs(m) <= 1;
    if (l0 == 1) return std::abs(m) <= 1;
  }
  return false;
}

cd u_matrix_element_closed(const RepLabel& label, int l, int m, int lp, int mp, double lambda) {
  int l0 = label.l0;
  if (!u_closed_catalogued(l0, l, m, lp, mp))
    throw UnsupportedCase("no catalogued closed form for this matrix element");
  if (lambda <= 0) throw DomainError("closed forms need lambda > 0");
  cd rho = label.rho();
  cd sn = std::sin(rho * lambda), cs = std::cos(rho * lambda);
  double sh = std::sinh(lambda), ch = std::cosh(lambda);
  if (l0 == 0 && l == 0) {
    // (0,0) x (l',0)
    int L = lp;
    RationalPoly p = legendre_poly(L);
    cd prod_all = 1;
    for (int s = 0; s <= L; ++s) prod_all *= (-I * static_cast<double>(s) + rho);
    cd sum = 0;
    for (int k = 0; k <= L; ++k) {
      double pk = p.at(k).get_d();
      if (pk == 0) continue;
      for (int j = 1; j <= k + 1; ++j) {
        cd prod = 1;
        for (int s = j; s <= L; ++s) prod *= (-I * static_cast<double>(s) + rho);
        double fk = std::exp(std::lgamma(k + 1.0) - std::lgamma(k - j + 2.0));
        cd ij = std::pow(I, j);
        cd plus = std::pow(sh, L + 1 - j) * std::pow(ch + sh, j - 1) * prod * std::exp(I * rho * lambda);
        cd minus = std::pow(sh, L + 1 - j) * std::pow(ch - sh, j - 1) * ((k - j + 1) % 2 ? -1.0 : 1.0) *
                   prod * std::exp(-I * rho * lambda);
        sum += pk * ij * fk * (plus - minus);
      }
    }
    double sgn = (L + 1) % 2 ? -1.0 : 1.0;
    return std::sqrt(2.0 * L + 1) * sgn / (2.0 * prod_all * std::pow(sh, L + 1)) * sum;
  }
  if (l0 == 0) {
    if (m == 0)
      return 6 * ch / (rho * (rho * rho + 1.0)) *
             ((rho * rho + 1.0) * sn / std::sinh(2 * lambda) + rho * cs / (sh * sh) - (ch / sh) * sn / (sh * sh));
    return 3 * ch * sn / ((rho * rho * rho + rho) * sh * sh * sh) - 3.0 * cs / ((rho * rho + 1.0) * sh * sh);
  }
  int mm = m;
  double th = std::tanh(lambda);
  if (mm == 0)
    return 3.0 / (ch * ch) *
           (sn / (rho * (rho * rho + 1.0) * th * th * th) - th * cs / ((rho * rho + 1.0) * th * th * th));
  double s2 = std::sinh(2 * lambda);
  if (mm == 1)
    return 3.0 * (-2.0 * sn + (2.0 * I * rho * rho * sh * sh + rho * s2) * std::exp(-I * rho * lambda)) /
           (4.0 * rho * (rho * rho + 1.0) * sh * sh * sh);
  return 3.0 * (-2.0 * sn + (-2.0 * I * rho * rho * sh * sh + rho * s2) * std::exp(I * rho * lambda)) /
         (4.0 * rho * (rho * rho + 1.0) * sh * sh * sh);
}

double rep_a_element_closed(int l, int m, int lp, int mp, double lambda) {
  if (l != 1 || lp != 1 || m != mp) throw UnsupportedCase("closed A only for l = l' = 1");
  if (lambda <= 0) throw DomainError("closed forms need lambda > 0");
  double sh = std::sinh(lambda), ch = std::cosh(lambda);
  if (m == 0) return 3 * (lambda * ch / sh - 1) / (sh * sh);
  return 3 * (sh * ch - lambda) / (2 * sh * sh * sh);
}

cd MonicQ::eval(cd rho) const {
  cd v = 1;
  for (cd r : roots) v *= (rho - r);
  return v;
}

std::vector<int> MonicQ::root_multiples() const {
  std::vector<int> k;
  for (cd r : roots) k.push_back(static_cast<int>(std::lround(r.imag())));
  return k;
}

SPoly MonicQ::poly() const {
  SPoly p(1);
  for (int k : root_multiples()) p *= SPoly::rho() - SPoly(Surd(GaussQ(0, k)));
  return p;
}

MonicQ monic_q(int l, int lp) {
  if (l < 0 || lp < 0) throw DomainError("monic_q: negative weight");
  MonicQ q;
  int lo = std::min(l, lp), hi = std::max(l, lp);
  for (int k = 1; k <= lo; ++k) {
    q.roots.emplace_back(0, k);
    q.roots.emplace_back(0, -k);
  }
  for (int k = lo + 1; k <= hi; ++k) q.roots.emplace_back(0, l > lp ? -k : k);
  return q;
}

cd u_c_factor(int l, int m, int l0, cd l1) {
  double ll = static_cast<double>(l) * l;
  return std::sqrt(ll - static_cast<double>(m) * m) / static_cast<double>(l) *
         std::sqrt((ll - static_cast<double>(l0) * l0) * (ll - l1 * l1) / (4 * ll - 1));
}

SmallLambdaCoeff u_small_lambda_coeff(const RepLabel& label, int lp, int m, int l) {
  if (std::abs(m) > std::min(l, lp)) throw DomainError("u_small_lambda_coeff: |m| too large");
  // Coefficient of the element with row l, column l'. The modulus is the product of C factors;
  // the phase of each factor is that of (k + l1) going down in l and (k - l1) going up.
  SmallLambdaCoeff r;
  r.order = std::abs(l - lp);
  cd u = 1;
  int lo = std::min(l, lp), hi = std::max(l, lp);
  for (int k = lo + 1; k <= hi; ++k) {
    cd ph = (l > lp) ? (static_cast<double>(k) + label.l1) : (static_cast<double>(k) - label.l1);
    double a = std::abs(ph);
    u *= u_c_factor(k, m, label.l0, label.l1) * (a > 0 ? ph / a : cd(1.0));
  }
  if (l > lp && (l - lp) % 2) u = -u;
  r.u0 = u / std::exp(std::lgamma(hi - lo + 1.0));
  return r;
}

double c_llm(int l, int lp, int m) {
  return std::sqrt((2.0 * l + 1) * (2.0 * lp + 1) * std::exp(std::lgamma(l - m + 1.0) + std::lgamma(lp - m + 1.0) -
                                                             std::lgamma(l + m + 1.0) - std::lgamma(lp + m + 1.0)) /
                   4.0);
}

LargeRhoLeading u_large_rho_leading(int l0, int l, int lp, int m) {
  LargeRhoLeading r;
  double c = c_llm(l, lp, 0);
  double par = (l + lp) % 2 ? -1.0 : 1.0;
  if (l0 > 0 && m == -l0) {
    r.p_plus = par * c / I;
    r.p_minus = 0;
  } else if (l0 > 0 && m == l0) {
    r.p_plus = 0;
    r.p_minus = -c / I;
  } else if (l0 == 1 && m == 0) {
    double s = std::sqrt(l * (l + 1.0) * lp * (lp + 1.0));
    r.p_plus = -par * c * s / 2;
    r.p_minus = -c * s / 2;
    r.rho_power = 2;
    r.sinh_power = 2;
  } else if (l0 == 0 && m == 0) {
    r.p_plus = par * c / I;
    r.p_minus = -c / I;
  } else {
    throw UnsupportedCase("large-rho leading coefficient not catalogued");
  }
  return r;
}

}  // namespace lkl
