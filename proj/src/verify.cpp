#include "lkl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "lkl/cocycle.hpp"
#include "lkl/errors.hpp"
#include "lkl/kernels.hpp"
#include "lkl/reps.hpp"
#include "lkl/spectral.hpp"

namespace lkl {

namespace {

using cd = std::complex<double>;
const cd I(0.0, 1.0);

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

double rel(cd a, cd b, double floor = 1e-6) { return std::abs(a - b) / std::max(std::abs(b), floor); }

Check below(const std::string& name, const std::string& anchor, double residual, double tol) {
  Check c;
  c.name = name;
  c.anchor = anchor;
  c.residual = residual;
  c.tolerance = tol;
  c.relation = "<";
  c.pass = std::isfinite(residual) && residual < tol;
  return c;
}

Check above(const std::string& name, const std::string& anchor, double residual, double tol) {
  Check c = below(name, anchor, residual, tol);
  c.relation = ">";
  c.pass = std::isfinite(residual) && residual > tol;
  return c;
}

// Runs fn, converting library errors into a failed check.
void guarded(std::vector<Check>& out, const std::string& name, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    Check c = below(name + " [" + e.what() + "]", "error", HUGE_VAL, 0);
    out.push_back(c);
  }
}

double surd_gap(const Surd& a, const Surd& b) { return std::abs((a - b).to_complex()); }

// ---------------------------------------------------------------- criteria

std::vector<Check> c1_closed_forms() {
  std::vector<Check> out;
  const auto rhos = linspace(0.2, 5.0, 10);
  const auto lams = linspace(0.2, 4.0, 10);
  double eb = 0, ea10 = 0, ea11 = 0;
  for (double lam : lams) {
    eb = std::max(eb, rel(b_component_closed(1, lam), b_component_integral(1, lam)));
    ea10 = std::max(ea10, rel(rep_a_element_closed(1, 0, 1, 0, lam), rep_a_element(1, 0, 1, 0, lam)));
    ea11 = std::max(ea11, rel(rep_a_element_closed(1, 1, 1, 1, lam), rep_a_element(1, 1, 1, 1, lam)));
  }
  out.push_back(below("B_1,0 closed vs quadrature", "closed B(l=1)", eb, 1e-9));
  out.push_back(below("A_10;10 closed vs quadrature", "closed A(1,0)", ea10, 1e-9));
  out.push_back(below("A_11;11 closed vs quadrature", "closed A(1,1)", ea11, 1e-9));
  struct U {
    int l0, l, m;
  };
  for (U u : {U{0, 0, 0}, U{0, 1, 0}, U{0, 1, 1}, U{1, 1, 0}, U{1, 1, 1}}) {
    double e = 0;
    for (double rho : rhos)
      for (double lam : lams) {
        RepLabel lab = RepLabel::principal(u.l0, rho);
        e = std::max(e, rel(u_matrix_element_closed(lab, u.l, u.m, u.l, u.m, lam),
                            u_matrix_element_quadrature(lab, u.l, u.m, u.l, u.m, lam)));
      }
    std::ostringstream os;
    os << "U(" << u.l0 << ")_" << u.l << u.m << ";" << u.l << u.m << " closed vs quadrature";
    out.push_back(below(os.str(), "closed U", e, 1e-9));
  }
  return out;
}

std::vector<Check> c2_consistency() {
  std::vector<Check> out;
  std::mt19937_64 rng(20240611);
  double cocyc = 0, inv = 0, su2 = 0;
  for (int i = 0; i < 50; ++i) {
    GroupElement g = random_element(rng, 2.0), h = random_element(rng, 2.0);
    cocyc = std::max(cocyc, verify_cocycle(g, h, 24));
    inv = std::max(inv, verify_inverse_relation(g, 24));
    GroupElement k = GroupElement::from_matrix(random_su2(rng));
    su2 = std::max(su2, b_general(k, 24).cwiseAbs().maxCoeff());
  }
  out.push_back(below("cocycle residual, 50 random pairs, L=24", "B(gh)=B(g)A(h)+B(h)", cocyc, 1e-6));
  out.push_back(below("inverse relation residual, L=24", "B(g)A(g^-1)=-B(g^-1)", inv, 1e-6));
  out.push_back(below("B on SU(2)", "B vanishes on SU(2)", su2, 1e-14));
  return out;
}

std::vector<Check> c3_norm() {
  double e = 0;
  for (double lam : linspace(0.0, 4.0, 17)) e = std::max(e, std::abs(norm_b_squared(lam, 20) - norm_b_squared_closed(lam)));
  return {below("sum |B_l0|^2 vs 8(lambda coth lambda - 1), L=20, lambda in [0,4]", "norm of B", e, 1e-6)};
}

cd k10_from_parts(double rho, double z) {
  static const FractionSeries f1(k10_part_integrand(1)), f2(k10_part_integrand(2)), f3(k10_part_integrand(3));
  const double p4 = std::pow(M_PI, 4), ez = std::exp(z);
  return (8 * p4 * ez * f1.value(rho, z) + 16 * p4 * ez * f2.value(rho, z) - 2 * p4 * z * ez * f3.value(rho, z)) /
         (rho * rho + 1);
}

std::vector<Check> c4_series() {
  std::vector<Check> out;
  FractionSeries f0(f0_integrand());
  for (double z : {1.5, 2.0, 5.0}) {
    std::ostringstream os;
    os << "f0 series vs quadrature z=" << z;
    out.push_back(below(os.str(), "f0 series", rel(f0.value(0.5, z), f0.quadrature(0.5, z)), 1e-10));
  }
  KernelSpec s1;
  s1.q = 1;
  s1.alphas = {{1, 0}};
  KernelSpec s0;
  const AngularIndex a10{1, 0}, a00{0, 0};
  double ek = 0, eh = 0, ea = 0;
  for (double rho : {0.5, 1.0, 2.0}) {
    cd quad = k_matrix_element_quadrature(s1, 0, a10, a10, rho, 2.0);
    ek = std::max(ek, rel(k10_from_parts(rho, 2.0) * s1.params.e2, quad));
    eh = std::max(eh, rel(k_matrix_element(s1, 0, a10, a10, rho, 2.0), quad));
    ea = std::max(ea, rel(k_matrix_element(s0, 0, a00, a00, rho, 2.0),
                          k_matrix_element_quadrature(s0, 0, a00, a00, rho, 2.0)));
  }
  out.push_back(below("K10 from f1,f2,f3 series vs quadrature, z=2", "K10", ek, 1e-8));
  out.push_back(below("K(alpha=(1,0)) assembled series vs quadrature, z=2", "K alpha alpha", eh, 1e-8));
  out.push_back(below("q=0 weight series vs quadrature, z=2", "q=0 weight", ea, 1e-8));
  return out;
}

std::vector<Check> c5_vanishing() {
  KernelSpec s1;
  s1.q = 1;
  s1.alphas = {{1, 0}};
  double mx = 0;
  for (double rho : linspace(0.25, 4.0, 8))
    for (double z : linspace(0.25, 4.0, 8)) {
      KMatrix k = k_matrix(s1, 1, rho, z);
      mx = std::max(mx, k.entries.cwiseAbs().maxCoeff());
    }
  return {below("max |K(l0=1)| for alpha=(1,0), 8x8 (rho,z) grid", "K(1, i rho) = 0", mx, 1e-10)};
}

// Residue of the u -> c_l projection by a contour integral of its series value.
cd cyclic_residue_contour(int l, double z, double e2, int sign) {
  ProjectionIndices idx{l, l, 0, e2};
  cd rho0 = sign > 0 ? cd(0, -(z - 1)) : cd(0, z - 1);
  const int n = 64;
  const double r = 0.2;
  cd acc = 0;
  for (int i = 0; i < n; ++i) {
    cd e = std::exp(I * (2 * M_PI * (i + 0.5) / n));
    acc += projection_function(ProjectionKind::UToCl, idx, rho0 + r * e, z) * r * e;
  }
  return acc / double(n);
}

std::vector<Check> c6_residues() {
  std::vector<Check> out;
  KernelSpec s1;
  s1.q = 1;
  s1.alphas = {{1, 0}};
  for (double z : {0.25, 0.5, 0.75}) {
    KMatrix k = residue_kappa(s1, z);
    std::ostringstream os;
    os << "kappa_alpha alpha vs closed coefficient z=" << z;
    out.push_back(below(os.str(), "kappa closed form", rel(k.entries(1, 1), kappa_closed_l1(s1.params.e2, z)), 1e-8));
  }
  const double e2 = s1.params.e2;
  for (int sign : {1, -1}) {
    double gap_contour = 0, min_closed = HUGE_VAL, spread = 0;
    cd ref = 0;
    for (int l = 1; l <= 3; ++l)
      for (double z : {1.5, 2.5}) {
        cd closed = cyclic_residue_closed(l, z, e2, sign);
        cd series = cyclic_residue_series(l, z, e2, sign);
        gap_contour = std::max(gap_contour, rel(series, cyclic_residue_contour(l, z, e2, sign)));
        min_closed = std::min(min_closed, std::abs(closed));
        cd ratio = series / closed;
        if (ref == 0.0) ref = ratio;
        spread = std::max(spread, std::abs(ratio - ref) / std::abs(ref));
      }
    std::ostringstream tag;
    tag << (sign > 0 ? "rho=-i(z-1)" : "rho=i(z-1)");
    char buf[96];
    std::snprintf(buf, sizeof buf, " (series/closed = %.6g%+.6gi)", ref.real(), ref.imag());
    out.push_back(below("cyclic residue series vs contour oracle " + tag.str(), "residue values", gap_contour, 1e-8));
    out.push_back(above("cyclic residue closed product nonzero " + tag.str(), "residue values", min_closed, 1e-12));
    out.push_back(below("cyclic residue closed/series ratio independent of l, z " + tag.str() + buf,
                        "residue values", spread, 1e-8));
  }
  return out;
}

ExpPolyIntegrand normalised_projf(int l, int lp, int l0) {
  ExpPolyIntegrand g = projf_integrand(l, lp, l0);
  ExpPolyIntegrand r = g.reduced().with_den(g.rho_den());
  return r.raised(2 * (l + lp) - r.q());
}

std::vector<Check> c7_laurent() {
  std::vector<Check> out;
  double worst = 0;
  for (int l0 : {0, 1}) {
    ExpPolyIntegrand g = projf_integrand(2, 2, l0);
    FractionSeries f(g);
    for (int m = (l0 == 0 ? 1 : 2); m <= 5; m += 2)
      for (int s = 1; s <= 2; ++s) {
        cd a = laurent_coefficient(g, m, s, 0.5);
        cd b = laurent_coefficient_contour(f, m, s, 0.5);
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-8));
      }
  }
  out.push_back(below("Laurent coefficient vs contour oracle, alpha=(2,0), m<=5, s<=2", "Laurent coefficient",
                      worst, 1e-6));
  double asym = 0;
  for (int s = 6; s <= 12; ++s) {
    int l0 = (s % 2 == 0) ? 1 : 0;
    ExpPolyIntegrand g = normalised_projf(2, 2, l0);
    double a = laurent_asymptotic_log(g, s, 0.7), b = laurent_coefficient_log(g, s, 0.7);
    asym = std::max(asym, std::abs(a - b) / std::abs(b));
  }
  out.push_back(below("log|L_{s^2,s}| leading form vs exact, s=6..12, z=0.7", "Laurent asymptotics", asym, 0.1));
  return out;
}

std::vector<Check> c8_order() {
  std::vector<Check> out;
  int bad = 0, total = 0;
  for (int l = 1; l <= 4; ++l) {
    for (auto& id : order_identity_check(OrderCase::Unprimed, l, l, 0)) bad += !id.holds(), ++total;
    for (int lp = l; lp <= 4; ++lp)
      for (int l0 = 0; l0 <= std::min(l, lp); ++l0)
        for (OrderCase c : {OrderCase::Primed, OrderCase::DoublePrimed})
          for (auto& id : order_identity_check(c, l, lp, l0)) bad += !id.holds(), ++total;
  }
  out.push_back(below("order identities violated (of " + std::to_string(total) + "), l,l'<=4", "moment orders",
                      bad, 0.5));
  for (auto [l, lp] : {std::pair{2, 2}, std::pair{2, 3}}) {
    auto a = suma_double_primed_1(l, lp);
    auto b = suma_primed_2(l, lp);
    std::string tag = "(" + std::to_string(l) + "," + std::to_string(lp) + ")";
    out.push_back(below("closed a'' moment sum " + tag, "closed moment sums", surd_gap(a.first, a.second), 1e-30));
    out.push_back(below("closed a' moment sum " + tag, "closed moment sums", surd_gap(b.first, b.second), 1e-30));
  }
  double gap_via_a0 = 0, gap_closed = 0;
  for (int l = 1; l <= 8; ++l) {
    BCoefficients t = coefficient_tables(l);
    gap_via_a0 = std::max(gap_via_a0, surd_gap(t.sum_b, t.sum_b_via_a0));
    gap_closed = std::max(gap_closed, surd_gap(t.sum_b, Surd(GaussQ(Rational(0), t.sum_b_closed_im))));
  }
  out.push_back(below("sum of b-coefficients vs a0 form, l<=8", "sum(b)", gap_via_a0, 1e-30));
  out.push_back(below("sum of b-coefficients vs rational closed form, l<=8", "sum(b)", gap_closed, 1e-30));
  return out;
}

std::vector<Check> c9_nonvanishing() {
  std::vector<Check> out;
  const auto rhos = linspace(0.25, 3.0, 8);
  const double e2 = 1.0 / 137.0;
  double min_generic = HUGE_VAL, max_exceptional = 0, min_k = HUGE_VAL;
  for (double z : {0.5, 2.0})
    for (int l = 1; l <= 3; ++l)
      for (int lp = l; lp <= 3; ++lp)
        for (int l0 = 0; l0 <= std::min(l, lp); ++l0) {
          double mx = 0;
          for (double rho : rhos)
            mx = std::max(mx, std::abs(projection_function(ProjectionKind::CalphaToCalpha, {l, lp, l0, e2}, rho, z)));
          bool exceptional = l0 == 1 && (l == 1 || lp == 1);
          if (exceptional)
            max_exceptional = std::max(max_exceptional, mx);
          else
            min_generic = std::min(min_generic, mx);
          if (l == lp && !exceptional) {
            KernelSpec s;
            s.q = 1;
            s.alphas = {{l, 0}};
            double mk = 0;
            for (double rho : rhos) mk = std::max(mk, std::abs(k_matrix_element(s, l0, {l, 0}, {l, 0}, rho, z)));
            min_k = std::min(min_k, mk);
          }
        }
  out.push_back(above("min over generic (l,l',l0) of max_rho |ProjF|", "ProjF nonzero", min_generic, 1e-8));
  out.push_back(above("min over generic (l,l0) of max_rho |K_alpha alpha|", "ProjF nonzero", min_k, 1e-8));
  out.push_back(below("max |ProjF| for l0=1 and l or l' = 1", "ProjF zero", max_exceptional, 1e-10));
  return out;
}

std::vector<Check> c10_bound_state() {
  std::vector<Check> out;
  out.push_back(below("|bracket sum(l=200) - (-4 pi (log 4 - 1))|", "bound-state bracket",
                      std::abs(bound_state_bracket_sum(200) - bound_state_bracket_limit()), 0.05));
  double mn = HUGE_VAL;
  for (int l = 1; l <= 8; ++l)
    for (double z : {0.1, 0.5, 0.9}) mn = std::min(mn, std::abs(bound_state_coefficient(l, z, 1.0 / 137.0)));
  out.push_back(above("min |lowest sigma-coefficient|, l<=8", "bound-state overlap", mn, 1e-12));
  return out;
}

std::vector<KernelSpec> positivity_specs(double z) {
  std::vector<KernelSpec> v(3);
  for (auto& s : v) s.params = ChargeParams::from_z(z);
  v[1].q = 1;
  v[1].alphas = {{1, 0}};
  v[2].q = 2;
  v[2].alphas = {{1, 0}, {1, 1}};
  return v;
}

std::vector<Check> c11_positivity() {
  std::vector<Check> out;
  std::mt19937_64 rng(777);
  for (double z : {0.5, 2.0})
    for (const auto& spec : positivity_specs(z)) {
      std::vector<GroupElement> sample;
      for (int i = 0; i < 12; ++i) sample.push_back(random_element(rng, 2.0));
      std::ostringstream os;
      os << "Gram min eigenvalue q=" << spec.q << " z=" << z;
      out.push_back(above(os.str(), "kernel positivity", gram_positivity(spec, sample), -1e-9));
    }
  double mn = HUGE_VAL;
  KernelSpec s0, s1, s2;
  s1.q = 1;
  s1.alphas = {{1, 0}};
  s2.q = 1;
  s2.alphas = {{2, 0}};
  for (double z : {0.5, 2.0})
    for (double rho : linspace(0.25, 3.0, 6)) {
      mn = std::min(mn, decomposition_weight(s0, 0, rho, z).trace);
      mn = std::min(mn, decomposition_weight(s1, 0, rho, z).trace);
      for (int l0 = 0; l0 <= 2; ++l0) mn = std::min(mn, decomposition_weight(s2, l0, rho, z).trace);
    }
  out.push_back(above("min Tr K over sampled (kernel, l0, rho, z)", "Tr K positivity", mn, -1e-10));
  return out;
}

std::vector<Check> c12_table() {
  std::vector<Check> out;
  KernelSpec s1;
  s1.q = 1;
  s1.alphas = {{1, 0}};
  double mn = HUGE_VAL;
  for (double z : {0.25, 0.5, 0.75}) {
    DecompositionWeight w = decomposition_weight(s1, 0, 1.0, z);
    mn = std::min(mn, w.has_supplementary ? w.supplementary : -HUGE_VAL);
  }
  out.push_back(above("min supplementary weight, z in {0.25,0.5,0.75}", "supplementary component", mn, 0));
  double absent = 0, cont = 0;
  for (double z : {1.5, 3.0}) {
    DecompositionWeight w = decomposition_weight(s1, 0, 1.0, z);
    absent = std::max(absent, w.has_supplementary ? std::abs(w.supplementary) + 1 : 0.0);
    for (double rho : {0.5, 1.0, 2.0}) {
      cd series = k_matrix_element(s1, 0, {1, 0}, {1, 0}, rho, z);
      cd quad = k_matrix_element_quadrature(s1, 0, {1, 0}, {1, 0}, rho, z);
      cont = std::max(cont, rel(series, quad));
    }
  }
  out.push_back(below("supplementary weight for z in {1.5,3}", "no supplementary component", absent, 1e-10));
  out.push_back(below("continued Tr K equals direct integral, z in {1.5,3}", "no supplementary component", cont,
                      1e-10));
  return out;
}

}  // namespace

std::string criterion_title(int id) {
  static const char* titles[] = {"",
                                 "closed forms vs quadrature",
                                 "cocycle consistency",
                                 "norm identity",
                                 "series engine",
                                 "vanishing of K(l0=1)",
                                 "residues",
                                 "Laurent coefficients",
                                 "order identities",
                                 "nonvanishing of projections",
                                 "bound-state bracket",
                                 "positivity",
                                 "decomposition table"};
  if (id < 1 || id > 12) throw DomainError("criterion id must be 1..12");
  return titles[id];
}

CriterionResult run_criterion(int id) {
  CriterionResult r;
  r.id = id;
  r.title = criterion_title(id);
  using Fn = std::vector<Check> (*)();
  static const Fn fns[] = {nullptr,          c1_closed_forms, c2_consistency, c3_norm,
                           c4_series,        c5_vanishing,    c6_residues,    c7_laurent,
                           c8_order,         c9_nonvanishing, c10_bound_state, c11_positivity,
                           c12_table};
  guarded(r.checks, r.title, [&] { r.checks = fns[id](); });
  r.pass = !r.checks.empty();
  for (auto& c : r.checks) {
    c.criterion = id;
    r.pass = r.pass && c.pass;
  }
  return r;
}

std::vector<std::string> suite_names() { return {"consistency", "kernels", "series", "residues", "laurent", "all"}; }

bool is_suite(const std::string& name) {
  auto v = suite_names();
  return std::find(v.begin(), v.end(), name) != v.end();
}

std::vector<int> suite_criteria(const std::string& name) {
  if (name == "consistency") return {1, 2, 3};
  if (name == "kernels") return {5, 11};
  if (name == "series") return {4, 12};
  if (name == "residues") return {6, 10};
  if (name == "laurent") return {7, 8, 9};
  if (name == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  throw DomainError("unknown suite: " + name);
}

std::vector<Check> run_suite(const std::string& name) {
  std::vector<Check> out;
  for (int id : suite_criteria(name)) {
    for (auto c : run_criterion(id).checks) {
      c.suite = name;
      out.push_back(c);
    }
  }
  return out;
}

std::string format_check_line(const Check& c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", c.residual);
  std::ostringstream os;
  os << "suite=" << c.suite << "\tcheck=" << c.name << "\tanchor=" << c.anchor << "\tresidual=" << buf
     << "\tstatus=" << (c.pass ? "PASS" : "FAIL");
  return os.str();
}

}  // namespace lkl
