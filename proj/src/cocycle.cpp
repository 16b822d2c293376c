#include "lkl/cocycle.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "lkl/errors.hpp"
#include "lkl/quadrature.hpp"
#include "lkl/reps.hpp"

namespace lkl {

namespace {

using cd = std::complex<double>;

constexpr double kPanel = 0.5;
constexpr int kNodes = 20;

struct Frame {
  Mat2 left, right;
  double lambda;
};

Frame frame_of(const GroupElement& g) {
  Coords c = g.coords ? *g.coords : decompose(g.matrix);
  Frame f;
  f.right = a2_matrix(c.vartheta, c.phi);
  f.left = a1_star_matrix(c.theta1, c.phi1, c.vartheta1) * f.right.adjoint();
  f.lambda = c.lambda;
  return f;
}

Eigen::RowVectorXcd apply_su2(const Eigen::RowVectorXcd& v, const Mat2& a, int L) {
  Eigen::RowVectorXcd out(v.size());
  for (int l = 1; l <= L; ++l) {
    int off = lm_index(l, -l);
    out.segment(off, 2 * l + 1) = v.segment(off, 2 * l + 1) * wigner_t_matrix(l, a);
  }
  return out;
}

Eigen::RowVectorXcd apply_boost(const Eigen::RowVectorXcd& v, double lambda, int L) {
  Eigen::RowVectorXcd out = Eigen::RowVectorXcd::Zero(v.size());
  for (int m = 0; m <= L; ++m) {
    Eigen::MatrixXd blk = rep_a_block(m, L, lambda);
    int lo = std::max(1, m), n = L - lo + 1;
    for (int s : {1, -1}) {
      if (m == 0 && s < 0) break;
      Eigen::RowVectorXcd w(n);
      for (int k = 0; k < n; ++k) w(k) = v(lm_index(lo + k, s * m));
      Eigen::RowVectorXcd r = w * blk;
      for (int k = 0; k < n; ++k) out(lm_index(lo + k, s * m)) = r(k);
    }
  }
  return out;
}

double inner_max_abs(const Eigen::RowVectorXcd& v, int L) {
  int n = lm_dim(std::max(L - 2, 0));
  return n > 0 ? v.head(n).cwiseAbs().maxCoeff() : 0.0;
}

const Surd& sqrt_8_3_i() {
  static const Surd s = Surd::sqrt_of(Rational(8, 3)) * GaussQ::i();
  return s;
}

// Closed B as prefactor * (lambda * lam(X) + con(X)).
struct BClosed {
  RationalPoly lam, con;
  double pref;  // imaginary prefactor
};

RationalPoly shift_sum(const RationalPoly& coeffs, int shift, int kmin, int kmax, const Rational& scale,
                       const std::vector<RationalPoly>& basis) {
  RationalPoly out;
  for (int k = kmin; k <= kmax; ++k) {
    Rational c = coeffs.at(k - shift);
    if (c == 0) continue;
    if (k % 2) c = -c;
    out += (scale * c) * basis[k];
  }
  return out;
}

const BClosed& b_closed_data(int l) {
  static std::mutex mu;
  static std::map<int, BClosed> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(l);
  if (it != cache.end()) return it->second;
  std::vector<RationalPoly> F, Gt;
  for (int k = 0; k <= l + 2; ++k) {
    F.push_back(f_poly(k));
    Gt.push_back(g_tail_poly(k));
  }
  Rational a(l + 1, 2 * l + 1), b(l, 2 * l + 1);
  RationalPoly pl = legendre_poly(l), pl1 = legendre_poly(l + 1);
  RationalPoly plm = l >= 1 ? legendre_poly(l - 1) : RationalPoly();
  auto p_comb = [&](const std::vector<RationalPoly>& basis) {
    RationalPoly s = shift_sum(pl, 0, 0, l, Rational(1), basis);
    s += shift_sum(pl1, 1, 1, l + 2, -a, basis);
    s += shift_sum(plm, 1, 1, l, -b, basis);
    return s;
  };
  RationalPoly wl1 = legendre_w(l), wl = legendre_w(l + 1), wl2 = legendre_w(l - 1);
  RationalPoly s2 = shift_sum(wl1, 0, 0, l - 1, Rational(-2), F);
  s2 += shift_sum(wl, 1, 1, l + 1, 2 * a, F);
  s2 += shift_sum(wl2, 1, 1, l - 1, 2 * b, F);
  BClosed d;
  d.lam = Rational(-2) * p_comb(F);
  d.con = p_comb(Gt);
  d.con += s2;
  d.con += RationalPoly({frac(-4, l * (l + 1))});
  d.pref = std::sqrt(l * (l + 1.0) * (2 * l + 1)) * ((l + 1) % 2 ? -0.5 : 0.5);
  return cache.emplace(l, std::move(d)).first->second;
}

Mpf eval_poly(const RationalPoly& p, const Mpf& x) {
  Mpf s = Mpf::with_prec(x.prec());
  for (int k = p.degree(); k >= 0; --k) {
    s *= x;
    s += Mpf(p.at(k));
  }
  return s;
}

}  // namespace

double ChargeParams::z() const { return n * n * e2 / M_PI; }

ChargeParams ChargeParams::from_z(double z, int n) {
  if (z < 0 || n == 0) throw DomainError("ChargeParams: need z >= 0 and n != 0");
  ChargeParams p;
  p.n = n;
  p.e2 = z * M_PI / (static_cast<double>(n) * n);
  return p;
}

int lm_index(int l, int m) { return l * l - 1 + (m + l); }
int lm_dim(int L) { return L * (L + 2); }

Eigen::MatrixXcd su2_block_matrix(const Mat2& a, int L) {
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(lm_dim(L), lm_dim(L));
  for (int l = 1; l <= L; ++l) {
    int off = lm_index(l, -l);
    M.block(off, off, 2 * l + 1, 2 * l + 1) = wigner_t_matrix(l, a);
  }
  return M;
}

Eigen::MatrixXd boost_a_matrix(double lambda, int L) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(lm_dim(L), lm_dim(L));
  for (int m = 0; m <= L; ++m) {
    Eigen::MatrixXd blk = rep_a_block(m, L, lambda);
    int lo = std::max(1, m), n = L - lo + 1;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        M(lm_index(lo + a, m), lm_index(lo + b, m)) = blk(a, b);
        M(lm_index(lo + a, -m), lm_index(lo + b, -m)) = blk(a, b);
      }
  }
  return M;
}

Eigen::MatrixXcd a_matrix(const GroupElement& g, int L) {
  Frame f = frame_of(g);
  return su2_block_matrix(f.left, L) * boost_a_matrix(f.lambda, L).cast<cd>() * su2_block_matrix(f.right, L);
}

Eigen::RowVectorXcd apply_a(const Eigen::RowVectorXcd& v, const GroupElement& g, int L) {
  if (v.size() != lm_dim(L)) throw DomainError("apply_a: vector size does not match L");
  Frame f = frame_of(g);
  return apply_su2(apply_boost(apply_su2(v, f.left, L), f.lambda, L), f.right, L);
}

Eigen::VectorXd a_first_row_m0(int L, double lambda) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(L);
  if (L < 1) return acc;
  const GaussRule& r = gauss_legendre(kNodes);
  const double lim = 38 + std::abs(lambda);
  int panels = static_cast<int>(std::ceil(2 * lim / kPanel));
  std::vector<double> cx;
  const double p1 = std::sqrt(1.5);
  for (int p = 0; p < panels; ++p) {
    double c = -lim + (p + 0.5) * kPanel;
    for (size_t i = 0; i < r.x.size(); ++i) {
      double mu = c + 0.5 * kPanel * r.x[i];
      double sy = 1 / std::cosh(mu);
      double w = 0.5 * kPanel * r.w[i] * sy * sy * p1 * std::tanh(mu);
      legendre_normalized_column(0, L, std::tanh(mu + lambda), 1 / std::cosh(mu + lambda), cx);
      for (int l = 1; l <= L; ++l) acc(l - 1) += w * cx[l];
    }
  }
  for (int l = 1; l <= L; ++l) acc(l - 1) *= std::sqrt(2.0 / (l * (l + 1.0)));
  return acc;
}

cd b_component_integral(int l, double lambda, double tol) {
  if (l < 1) throw DomainError("b_component: need l >= 1");
  if (lambda == 0) return 0.0;
  auto f = [&](double t) { return rep_a_element(1, 0, l, 0, t, tol * 1e-2); };
  QuadResult info;
  double v = integrate<double>(f, 0.0, lambda, tol, &info);
  if (info.error > 100 * tol) throw PrecisionError("b_component_integral: no convergence", info.error);
  return cd(0, std::sqrt(8.0 / 3.0) * v);
}

Eigen::VectorXcd b_boost_vector(double lambda, int L) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(L);
  if (lambda != 0 && L >= 1) {
    const GaussRule& r = gauss_legendre(kNodes);
    int panels = std::max(1, static_cast<int>(std::ceil(std::abs(lambda) / kPanel)));
    double h = lambda / panels;
    for (int p = 0; p < panels; ++p) {
      double c = (p + 0.5) * h;
      for (size_t i = 0; i < r.x.size(); ++i) acc += (0.5 * h * r.w[i]) * a_first_row_m0(L, c + 0.5 * h * r.x[i]);
    }
  }
  return acc.cast<cd>() * cd(0, std::sqrt(8.0 / 3.0));
}

RationalPoly f_poly(int k) {
  std::vector<Rational> c(static_cast<size_t>(std::max(k, 1)) + 1);
  for (int s = 2; s <= k; ++s) c[s - 1] += Rational(1) / Rational(s - 1);
  for (int j = 1; j <= k - 1; ++j)
    for (int s = 0; s <= j - 1; ++s)
      c[k - s - 1] += binomial(k, j) * binomial(j - 1, s) * Rational(s % 2 ? -1 : 1) / Rational(k - s - 1);
  for (int s = 0; s <= k - 2; ++s)
    c[k - s - 1] += binomial(k - 1, s) * Rational(s % 2 ? -1 : 1) / Rational(k - s - 1);
  return RationalPoly(std::move(c));
}

RationalPoly g_tail_poly(int k) {
  std::vector<Rational> c(static_cast<size_t>(std::max(k, 1)) + 1);
  for (int s = 2; s <= k; ++s)
    for (int r = 2; r <= s - 1; ++r) c[r - 1] -= Rational(1) / Rational((s - 1) * (r - 1));
  for (int j = 1; j <= k - 1; ++j)
    for (int s = 0; s <= j - 1; ++s) {
      Rational f = binomial(k, j) * binomial(j - 1, s) * Rational(s % 2 ? -1 : 1);
      for (int r = 2; r <= k - s - 1; ++r) c[r - 1] -= f / Rational((k - s - 1) * (r - 1));
    }
  for (int s = 0; s <= k - 2; ++s) {
    Rational f = binomial(k - 1, s) * Rational(s % 2 ? -1 : 1);
    for (int r = 2; r <= k - s - 1; ++r) c[r - 1] -= f / Rational((k - s - 1) * (r - 1));
  }
  return RationalPoly(std::move(c));
}

cd b_component_closed(int l, double lambda) {
  if (l < 1) throw DomainError("b_component_closed: need l >= 1");
  if (lambda == 0) return 0.0;
  if (lambda < 0) return ((l % 2) ? -1.0 : 1.0) * b_component_closed(l, -lambda);
  const BClosed& d = b_closed_data(l);
  int deg = std::max(d.lam.degree(), d.con.degree());
  double X = -1 / std::expm1(-2 * lambda);
  mpfr_prec_t bits = 80 + static_cast<mpfr_prec_t>((deg + 2) * std::max(0.0, std::log2(X)));
  PrecGuard guard(bits);
  Mpf lam(lambda, bits);
  Mpf x = -Mpf(1) / expm1(Mpf(-2) * lam);
  Mpf v = lam * eval_poly(d.lam, x) + eval_poly(d.con, x);
  return cd(0, d.pref * v.to_double());
}

ExpPolyIntegrand b_exact(int l) {
  if (l < 1) throw DomainError("b_exact: need l >= 1");
  static std::mutex mu;
  static std::map<int, ExpPolyIntegrand> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(l);
    if (it != cache.end()) return it->second;
  }
  ExpPolyIntegrand a = rep_a_exact(1, 0, l);
  const int M = l + 1;
  if (a.q() != M) a = a.raised(M - a.q());
  int jmax = 0;
  for (const auto& [k, c] : a.terms()) jmax = std::max(jmax, k.j);
  int J = std::max(jmax, 2 * M + 2) + 4;
  std::vector<Surd> R0(J + 1), R1(J + 1), u(J + 1), v(J + 1);
  for (const auto& [k, c] : a.terms()) {
    if (k.phase != 0 || k.p > 1 || k.j < 0) throw DomainError("b_exact: unexpected term");
    (k.p ? R1 : R0)[k.j] += c.coeff(0, 0);
  }
  if (!R1[0].is_zero()) throw DomainError("b_exact: inconsistent leading term");
  auto at = [](const std::vector<Surd>& s, int j) { return j >= 0 ? s[j] : Surd(); };
  for (int j = 0; j <= J; ++j) {
    if (j == 0) {
      v[0] = R0[0];
      continue;
    }
    GaussQ inv(Rational(1) / Rational(j));
    Surd f(GaussQ(j - 2 - 2 * M));
    v[j] = (f * at(v, j - 2) - R1[j]) * inv;
    u[j] = (v[j] + f * at(u, j - 2) - at(v, j - 2) - R0[j]) * inv;
  }
  if (!u[J].is_zero() || !v[J].is_zero() || !u[J - 1].is_zero() || !v[J - 1].is_zero())
    throw DomainError("b_exact: series did not terminate");
  ExpPolyIntegrand n(M - 1);
  for (int j = 0; j <= J; ++j) {
    if (!u[j].is_zero()) n.add_term({0, j, 0}, SPoly(u[j]));
    if (!v[j].is_zero()) n.add_term({1, j, 0}, SPoly(v[j]));
  }
  // fix the free multiple of (1 - x)^M by B(0) = 0
  Surd c = n.numerator_taylor(M).coeff(0, 0) * GaussQ(Rational(1) / Rational(mpz_class(1) << M));
  for (int i = 0; i <= M; ++i) {
    Surd t = c * GaussQ(binomial(M, i) * Rational(i % 2 ? 1 : -1));
    if (!t.is_zero()) n.add_term({0, 2 * i, 0}, SPoly(t));
  }
  n *= SPoly(sqrt_8_3_i());
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(l, n);
  return n;
}

cd b_component_exact(int l, double lambda) {
  if (lambda == 0) return 0.0;
  if (lambda < 0) return ((l % 2) ? -1.0 : 1.0) * b_component_exact(l, -lambda);
  return b_exact(l).eval(lambda, 0.0, 0.0);
}

Eigen::RowVectorXcd b_general(const GroupElement& g, int L) {
  Frame f = frame_of(g);
  Eigen::VectorXcd b = b_boost_vector(f.lambda, L);
  Eigen::RowVectorXcd out(lm_dim(L));
  for (int l = 1; l <= L; ++l)
    for (int m = -l; m <= l; ++m) out(lm_index(l, m)) = b(l - 1) * wigner_t(l, 0, m, f.right);
  return out;
}

double norm_b_squared(double lambda, int L) { return b_boost_vector(lambda, L).squaredNorm(); }

double norm_b_squared_closed(double lambda) {
  if (std::abs(lambda) < 1e-4) return 8 * lambda * lambda / 3;
  return 8 * (lambda / std::tanh(lambda) - 1);
}

double verify_cocycle(const GroupElement& g, const GroupElement& h, int L) {
  Eigen::RowVectorXcd d = b_general(g * h, L) - apply_a(b_general(g, L), h, L) - b_general(h, L);
  return inner_max_abs(d, L);
}

double verify_inverse_relation(const GroupElement& g, int L) {
  GroupElement gi = g.inverse();
  Eigen::RowVectorXcd d = apply_a(b_general(g, L), gi, L) + b_general(gi, L);
  return inner_max_abs(d, L);
}

FGIdentities fg_limit_identities(int l) {
  if (l < 1) throw DomainError("fg_limit_identities: need l >= 1");
  std::vector<Rational> Fk, Gk;
  for (int k = 0; k <= l + 2; ++k) {
    RationalPoly f = f_poly(k), g = g_tail_poly(k);
    Rational fs, gs;
    for (const auto& c : f.c) fs += c;
    for (const auto& c : g.c) gs += c;
    Fk.push_back(-fs);
    Gk.push_back(gs);
  }
  Rational a(l + 1, 2 * l + 1), b(l, 2 * l + 1);
  auto comb = [&](const RationalPoly& p, int shift, int kmin, int kmax, const std::vector<Rational>& v) {
    Rational s;
    for (int k = kmin; k <= kmax; ++k) s += p.at(k - shift) * Rational(k % 2 ? -1 : 1) * v[k];
    return s;
  };
  RationalPoly pl = legendre_poly(l), pl1 = legendre_poly(l + 1), plm = legendre_poly(l - 1);
  RationalPoly wl1 = legendre_w(l), wl = legendre_w(l + 1), wl2 = legendre_w(l - 1);
  FGIdentities r;
  Rational rhs = frac(4 * ((-1) - ((l + 1) % 2 ? -1 : 1)), l * (l + 1));
  r.p_f_lhs = comb(pl, 0, 0, l, Fk) - a * comb(pl1, 1, 1, l + 2, Fk) - b * comb(plm, 1, 1, l, Fk);
  r.p_f_rhs = 0;
  r.w_f_lhs = -comb(wl1, 0, 0, l - 1, Fk) + a * comb(wl, 1, 1, l + 1, Fk) + b * comb(wl2, 1, 1, l - 1, Fk);
  r.w_f_rhs = rhs;
  r.p_g_lhs = comb(pl, 0, 0, l, Gk) - a * comb(pl1, 1, 1, l + 2, Gk) - b * comb(plm, 1, 1, l, Gk);
  r.p_g_rhs = rhs;
  return r;
}

double a_leading_coefficient(int lp, int l) {
  if (lp == l) return 1.0;
  if (lp > l) return (((l + lp) % 2) ? -1.0 : 1.0) * a_leading_coefficient(l, lp);
  double p = 1;
  for (int j = 0; j <= l - lp - 1; ++j) {
    double k = l - j;
    p *= k * std::sqrt((k * k - 1) / (4 * k * k - 1));
  }
  return ((l - lp) % 2 ? -1.0 : 1.0) * p / std::exp(std::lgamma(l - lp + 1.0));
}

Surd a0_exact(int l, int m, int lp) {
  ExpPolyIntegrand a = rep_a_exact(l, m, lp);
  Surd s;
  for (const auto& [k, c] : a.terms())
    if (k.p == 1) s += c.coeff(0, 0);
  return s * GaussQ(Rational(1) / Rational(mpz_class(1) << (a.q() + 1)));
}

double a0_closed_minus1(int l, int lp) {
  double v = ((l % 2) ? -1.0 : 1.0) * l * lp * std::ldexp(1.0, l + 2 * lp) *
             std::sqrt((2.0 * l + 1) * (2.0 * lp + 1)) / std::exp(std::lgamma(l + 2.0));
  v *= binomial(Rational(2 * (l + lp) - 1, 2), l + lp).get_d() * binomial(Rational(2 * lp - 1, 2), lp).get_d();
  for (int j = 0; j <= lp - 1; ++j) v *= (l + j + 1.0) / (2.0 * (l + j) + 1);
  for (int r = 0; r <= lp - 2; ++r) v *= (l + lp - r);
  return v;
}

BCoefficients coefficient_tables(int l) {
  if (l < 1 || l > 12) throw DomainError("coefficient_tables: need 1 <= l <= 12");
  BCoefficients out;
  out.l = l;
  ExpPolyIntegrand b = b_exact(l);
  const int M = l + 1;
  // numerator of B sinh^M: N E^M / 2^M, keyed by E power
  std::map<int, Surd> lam_part, con_part;
  GaussQ scale(Rational(1) / Rational(mpz_class(1) << M));
  for (const auto& [k, c] : b.terms()) (k.p ? lam_part : con_part)[M - k.j] += c.coeff(0, 0) * scale;
  auto get = [](std::map<int, Surd>& m, int e) { return m.count(e) ? m[e] : Surd(); };
  if (l % 2) {
    int k = (l - 1) / 2;
    out.frak_b.resize(2 * k + 2);
    out.frak_b[0] = get(lam_part, 0);
    for (int j = 1; j <= k; ++j) out.frak_b[j] = get(lam_part, 2 * j) * GaussQ(2);
    for (int j = 1; j <= k + 1; ++j) out.frak_b[k + j] = get(con_part, 2 * j) * GaussQ(2);
    for (int j = 0; j <= k; ++j) out.sum_b += out.frak_b[j];
    out.limit_from_table = out.frak_b[l] * GaussQ(Rational(mpz_class(1) << l));
  } else {
    int k = l / 2;
    out.frak_b.resize(2 * k + 1);
    // peel cosh^{2j+1} (lambda part) and sinh^{2j+1} from the top E power
    auto peel = [&](std::map<int, Surd> part, int jmax, int sgn, int offset) {
      for (int j = jmax; j >= 0; --j) {
        int n = 2 * j + 1;
        Surd c = get(part, n) * GaussQ(Rational(mpz_class(1) << n));
        out.frak_b[offset + j] = c;
        for (int i = 0; i <= n; ++i) {
          Rational f = binomial(n, i) / Rational(mpz_class(1) << n);
          if (sgn < 0 && i % 2) f = -f;
          part[n - 2 * i] -= c * GaussQ(f);
        }
      }
    };
    peel(lam_part, k - 1, 1, 0);
    peel(con_part, k, -1, k);
    for (int j = 0; j <= k - 1; ++j) out.sum_b += out.frak_b[j];
    out.limit_from_table = out.frak_b[l];
  }
  Surd a0 = a0_exact(l, 0, 1);
  out.sum_b_via_a0 = a0 * sqrt_8_3_i() * GaussQ(Rational((l % 2) ? -1 : 1, l + 1));
  out.sum_b_closed_im = -Rational(mpz_class(1) << (l + 2)) * binomial(Rational(2 * l + 1, 2), l + 1) *
                        Rational(l * (l + 1), 2 * l + 1);
  out.limit_closed = Surd::sqrt_of(Rational(2 * l + 1, l * (l + 1))) * GaussQ(0, 2);
  out.leading = b.numerator_taylor(l + M).coeff(0, 0) * scale;
  return out;
}

}  // namespace lkl
