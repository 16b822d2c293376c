#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "lkl/errors.hpp"

namespace lkl {

struct GaussRule {
  std::vector<double> x, w;  // nodes and weights on [-1,1]
};

// Gauss-Legendre rule with n nodes (memoized, thread-safe).
const GaussRule& gauss_legendre(int n);

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(std::complex<double> v) { return std::abs(v); }

template <class T, class F>
T gauss_panel(F&& f, double a, double b, int n) {
  const GaussRule& r = gauss_legendre(n);
  double h = 0.5 * (b - a), c = 0.5 * (b + a);
  T s{};
  for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(c + h * r.x[i]);
  return s * h;
}

struct QuadResult {
  double error = 0;  // estimated absolute error
  int panels = 0;
};

namespace detail {
template <class T, class F>
T adapt(F& f, double a, double b, T whole, double tol, int n, int depth, QuadResult& info) {
  double m = 0.5 * (a + b);
  T left = gauss_panel<T>(f, a, m, n), right = gauss_panel<T>(f, m, b, n);
  double err = magnitude(left + right - whole);
  if (err <= tol || depth <= 0) {
    info.error += err;
    info.panels += 2;
    return left + right;
  }
  return adapt<T>(f, a, m, left, 0.5 * tol, n, depth - 1, info) +
         adapt<T>(f, m, b, right, 0.5 * tol, n, depth - 1, info);
}
}  // namespace detail

// Adaptive Gauss-Legendre with interval bisection; tol is absolute.
template <class T, class F>
T integrate(F&& f, double a, double b, double tol, QuadResult* info = nullptr, int n = 20,
            int max_depth = 30) {
  QuadResult local;
  if (a == b) return T{};
  T whole = gauss_panel<T>(f, a, b, n);
  T r = detail::adapt<T>(f, a, b, whole, tol, n, max_depth, local);
  if (info) *info = local;
  return r;
}

// Integral over [a, inf) by unit panels until the panel contribution is negligible.
template <class T, class F>
T integrate_to_infinity(F&& f, double a, double tol, double panel = 1.0, QuadResult* info = nullptr,
                        int max_panels = 4000) {
  T total{};
  QuadResult acc;
  int quiet = 0;
  for (int k = 0; k < max_panels; ++k) {
    double lo = a + k * panel, hi = lo + panel;
    QuadResult pi;
    T part = integrate<T>(f, lo, hi, tol * 1e-2, &pi);
    total += part;
    acc.error += pi.error;
    acc.panels += pi.panels;
    if (magnitude(part) <= tol * 1e-3 * (1.0 + magnitude(total))) {
      if (++quiet >= 3) break;
    } else {
      quiet = 0;
    }
  }
  if (info) *info = acc;
  return total;
}

}  // namespace lkl
