#include "lkl/special_fn.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "lkl/errors.hpp"
#include "lkl/group_geom.hpp"
#include "lkl/quadrature.hpp"

namespace lkl {

namespace {
std::complex<double> cpow(std::complex<double> z, int n) {
  std::complex<double> r = 1;
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}
}  // namespace

void RationalPoly::trim() {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

double RationalPoly::eval(double y) const {
  double s = 0;
  for (int k = degree(); k >= 0; --k) s = s * y + c[k].get_d();
  return s;
}

RationalPoly& RationalPoly::operator+=(const RationalPoly& o) {
  if (o.c.size() > c.size()) c.resize(o.c.size());
  for (size_t k = 0; k < o.c.size(); ++k) c[k] += o.c[k];
  trim();
  return *this;
}

RationalPoly operator*(const RationalPoly& a, const RationalPoly& b) {
  if (a.c.empty() || b.c.empty()) return {};
  std::vector<Rational> out(a.c.size() + b.c.size() - 1);
  for (size_t i = 0; i < a.c.size(); ++i)
    for (size_t j = 0; j < b.c.size(); ++j) out[i + j] += a.c[i] * b.c[j];
  return RationalPoly(std::move(out));
}

RationalPoly operator*(const Rational& s, const RationalPoly& a) {
  std::vector<Rational> out = a.c;
  for (auto& v : out) v *= s;
  return RationalPoly(std::move(out));
}

RationalPoly legendre_poly(int l) { return legendre_assoc_poly(l, 0); }

RationalPoly legendre_w(int l) {
  RationalPoly w;
  for (int k = 1; k <= l; ++k)
    w += Rational(1, k) * (legendre_poly(k - 1) * legendre_poly(l - k));
  return w;
}

RationalPoly legendre_assoc_poly(int l, int m) {
  if (l < 0 || m < 0 || m > l) throw DomainError("legendre index out of range");
  static std::mutex mu;
  static std::map<std::pair<int, int>, RationalPoly> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({l, m});
    if (it != cache.end()) return it->second;
  }
  // (-1)^m 2^l sum_{k=m}^{l} k!/(k-m)! C(l,k) C((l+k-1)/2, l) y^{k-m}
  std::vector<Rational> c(static_cast<size_t>(l - m) + 1);
  Rational front = (m % 2 ? -1 : 1) * Rational(mpz_class(1) << l);
  for (int k = m; k <= l; ++k)
    c[k - m] = front * factorial(k) / factorial(k - m) * binomial(l, k) *
               binomial(Rational(l + k - 1, 2), l);
  RationalPoly p(std::move(c));
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(std::make_pair(l, m), p);
  return p;
}

double legendre_p(int l, int m, double y) {
  if (l < 0 || std::abs(m) > l) throw DomainError("legendre_p: need |m| <= l");
  if (!(y >= -1.0 && y <= 1.0)) throw DomainError("legendre_p: y outside [-1,1]");
  if (m < 0) {
    int a = -m;
    double f = std::exp(std::lgamma(l - a + 1.0) - std::lgamma(l + a + 1.0));
    return (a % 2 ? -1.0 : 1.0) * f * legendre_p(l, a, y);
  }
  if (l <= 12) {
    double s = std::pow(1 - y * y, 0.5 * m);
    return s * legendre_assoc_poly(l, m).eval(y);
  }
  // upward recurrence in l at fixed m
  double s = std::sqrt((1 - y) * (1 + y));
  double pmm = 1;
  for (int i = 1; i <= m; ++i) pmm *= -(2 * i - 1) * s;
  if (l == m) return pmm;
  double p1 = y * (2 * m + 1) * pmm;
  double p0 = pmm;
  for (int k = m + 2; k <= l; ++k) {
    double p2 = (y * (2 * k - 1) * p1 - (k + m - 1) * p0) / (k - m);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double legendre_q(int l, double x) {
  if (l < 0) throw DomainError("legendre_q: negative l");
  if (!(std::abs(x) > 1.0)) throw DomainError("legendre_q: need |x| > 1");
  double p = legendre_poly(l).eval(x);
  return p * 0.5 * std::log((x + 1) / (x - 1)) - legendre_w(l).eval(x);
}

std::complex<double> wigner_t2(int l2, int m2, int n2, const Mat2& a) {
  if (l2 < 0 || std::abs(m2) > l2 || std::abs(n2) > l2 || (l2 - m2) % 2 || (l2 - n2) % 2)
    throw DomainError("wigner_t: index out of range");
  Mat2 check = a * a.adjoint() - Mat2::Identity();
  if (check.norm() > 1e-9 || std::abs(a.determinant() - 1.0) > 1e-9)
    throw DomainError("wigner_t: matrix not in SU(2)");
  int lm = (l2 - m2) / 2, lp = (l2 + m2) / 2;    // l-m, l+m
  int lmp = (l2 - n2) / 2, lpp = (l2 + n2) / 2;  // l-m', l+m'
  int mm = (m2 + n2) / 2;                        // m+m'
  double pref = std::sqrt(std::exp(std::lgamma(lm + 1.0) + std::lgamma(lp + 1.0) -
                                   std::lgamma(lmp + 1.0) - std::lgamma(lpp + 1.0)));
  if ((l2 - mm) % 2) pref = -pref;  // (-1)^{2l-m-m'}
  std::complex<double> s = 0;
  for (int al = std::max(0, -mm); al <= std::min(lm, lmp); ++al) {
    double b = binomial(lmp, al).get_d() * binomial(lpp, lm - al).get_d();
    if (b == 0) continue;
    s += b * cpow(a(0, 0), al) * cpow(a(0, 1), lm - al) * cpow(a(1, 0), lmp - al) *
         cpow(a(1, 1), mm + al);
  }
  return pref * s;
}

std::complex<double> wigner_t(int l, int m, int mp, const Mat2& a) {
  return wigner_t2(2 * l, 2 * m, 2 * mp, a);
}

Eigen::MatrixXcd wigner_t_matrix(int l, const Mat2& a) {
  Eigen::MatrixXcd t(2 * l + 1, 2 * l + 1);
  for (int m = -l; m <= l; ++m)
    for (int n = -l; n <= l; ++n) t(m + l, n + l) = wigner_t(l, m, n, a);
  return t;
}

std::complex<double> jacobi_p(int l, int m, int n, double cos_phi) {
  double c = std::sqrt(std::max(0.0, 0.5 * (1 + cos_phi)));
  double s = std::sqrt(std::max(0.0, 0.5 * (1 - cos_phi)));
  Mat2 a;
  a << c, std::complex<double>(0, s), std::complex<double>(0, s), c;
  return wigner_t(l, m, n, a);
}

Surd clebsch_gordan_exact(int l1, int m1, int l2, int m2, int l, int m) {
  if (m1 + m2 != m || l < std::abs(l1 - l2) || l > l1 + l2 || std::abs(m1) > l1 ||
      std::abs(m2) > l2 || std::abs(m) > l)
    return {};
  // Racah formula
  Rational pre = Rational(2 * l + 1) * factorial(l1 + l2 - l) * factorial(l1 - l2 + l) *
                 factorial(-l1 + l2 + l) / factorial(l1 + l2 + l + 1) * factorial(l + m) *
                 factorial(l - m) * factorial(l1 - m1) * factorial(l1 + m1) * factorial(l2 - m2) *
                 factorial(l2 + m2);
  Rational sum = 0;
  int kmin = std::max({0, l2 - l - m1, l1 + m2 - l});
  int kmax = std::min({l1 + l2 - l, l1 - m1, l2 + m2});
  for (int k = kmin; k <= kmax; ++k) {
    Rational d = factorial(k) * factorial(l1 + l2 - l - k) * factorial(l1 - m1 - k) *
                 factorial(l2 + m2 - k) * factorial(l - l2 + m1 + k) * factorial(l - l1 - m2 + k);
    sum += (k % 2 ? -1 : 1) / d;
  }
  return Surd::sqrt_of(pre) * GaussQ(sum);
}

double clebsch_gordan(int l1, int m1, int l2, int m2, int l, int m) {
  return clebsch_gordan_exact(l1, m1, l2, m2, l, m).to_complex().real();
}

double su2_peter_weyl_check(int l1, int l2, int quadrature_order) {
  const GaussRule& r = gauss_legendre(quadrature_order);
  int n1 = 2 * l1 + 1, n2 = 2 * l2 + 1;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n1 * n1, n2 * n2);
  // Haar measure sin(p) dt dp dv / (8 pi^2) over t, v in [0, 2pi), p in [0, pi]
  for (size_t i = 0; i < r.x.size(); ++i) {
    double t = M_PI * (r.x[i] + 1), wt = M_PI * r.w[i];
    for (size_t j = 0; j < r.x.size(); ++j) {
      double p = 0.5 * M_PI * (r.x[j] + 1), wp = 0.5 * M_PI * r.w[j];
      for (size_t k = 0; k < r.x.size(); ++k) {
        double v = M_PI * (r.x[k] + 1), wv = M_PI * r.w[k];
        double w = wt * wp * wv * std::sin(p) / (8 * M_PI * M_PI);
        Mat2 a = a1_star_matrix(t, p, v);
        Eigen::MatrixXcd t1 = wigner_t_matrix(l1, a), t2 = wigner_t_matrix(l2, a);
        for (int a1 = 0; a1 < n1 * n1; ++a1)
          for (int b1 = 0; b1 < n2 * n2; ++b1)
            acc(a1, b1) += w * std::conj(t1(a1 / n1, a1 % n1)) * t2(b1 / n2, b1 % n2);
      }
    }
  }
  double dev = 0;
  for (int a1 = 0; a1 < n1 * n1; ++a1)
    for (int b1 = 0; b1 < n2 * n2; ++b1) {
      double expect = (l1 == l2 && a1 == b1) ? 1.0 / (2 * l1 + 1) : 0.0;
      dev = std::max(dev, std::abs(acc(a1, b1) - expect));
    }
  return dev;
}

}  // namespace lkl
