#include "lkl/kernels.hpp"

#include <cmath>
#include <string>

#include "lkl/errors.hpp"
#include "lkl/reps.hpp"

namespace lkl {

namespace {

using cd = std::complex<double>;

struct Split {
  Mat2 left, right;
  double lambda;
};

Split split_of(const GroupElement& g) {
  Coords c = g.coords ? *g.coords : decompose(g.matrix);
  Split s;
  s.right = a2_matrix(c.vartheta, c.phi);
  s.left = a1_star_matrix(c.theta1, c.phi1, c.vartheta1) * s.right.adjoint();
  s.lambda = c.lambda;
  return s;
}

cd a_from_split(const Split& s, const AngularIndex& a, const AngularIndex& b) {
  cd acc = 0;
  int kmax = std::min(a.l, b.l);
  for (int k = -kmax; k <= kmax; ++k) {
    double ab = rep_a_element(a.l, k, b.l, k, s.lambda);
    if (ab == 0) continue;
    acc += wigner_t(a.l, a.m, k, s.left) * ab * wigner_t(b.l, k, b.m, s.right);
  }
  return acc;
}

cd b_from_split(const Split& s, const AngularIndex& a) {
  return b_component_exact(a.l, s.lambda) * wigner_t(a.l, 0, a.m, s.right);
}

double lambda_coth_minus_one(double lambda) {
  double x = std::abs(lambda);
  if (x < 1e-4) return x * x / 3;
  return x / std::tanh(x) - 1;
}

// Sum over partial matchings of left indices i to right indices sigma(i); unmatched ones carry B factors.
void matchings(int i, int q, std::vector<int>& used, cd prod, int w, const std::vector<std::vector<cd>>& abar,
               const std::vector<cd>& bbar, const std::vector<cd>& bfwd, std::vector<cd>& by_w) {
  if (i == q) {
    cd p = prod;
    int nr = 0;
    for (int j = 0; j < q; ++j)
      if (!used[j]) {
        p *= bfwd[j];
        ++nr;
      }
    if (nr != w) return;
    by_w[w] += p;
    return;
  }
  for (int j = 0; j < q; ++j) {
    if (used[j]) continue;
    used[j] = 1;
    matchings(i + 1, q, used, prod * abar[i][j], w, abar, bbar, bfwd, by_w);
    used[j] = 0;
  }
  matchings(i + 1, q, used, prod * bbar[i], w + 1, abar, bbar, bfwd, by_w);
}

}  // namespace

void KernelSpec::validate() const {
  if (q < 0 || q > 2) throw DomainError("kernel: q must be 0, 1 or 2");
  if (static_cast<int>(alphas.size()) != q) throw DomainError("kernel: need exactly q angular indices");
  for (const auto& a : alphas)
    if (a.l < 1 || !a.valid()) throw DomainError("kernel: angular index needs l >= 1 and |m| <= l");
}

int kernel_l_max(const std::vector<AngularIndex>& alphas) {
  int s = 0;
  for (const auto& a : alphas) s += a.l;
  return s;
}

int kernel_l_min(const std::vector<AngularIndex>& alphas) {
  int lo = 0, hi = 0;
  for (const auto& a : alphas) {
    int nlo = a.l < lo ? lo - a.l : (a.l > hi ? a.l - hi : 0);
    lo = nlo;
    hi += a.l;
  }
  return lo;
}

cd a_element(const GroupElement& g, const AngularIndex& alpha, const AngularIndex& beta) {
  return a_from_split(split_of(g), alpha, beta);
}

cd b_element(const GroupElement& g, const AngularIndex& alpha) { return b_from_split(split_of(g), alpha); }

cd kernel_value(const KernelSpec& spec, const GroupElement& g, const GroupElement& h) {
  spec.validate();
  GroupElement d = g.inverse() * h;
  Split s = split_of(d);
  const double z = spec.params.z();
  const double damp = std::exp(-z * lambda_coth_minus_one(s.lambda));
  const int q = spec.q;
  if (q == 0) return damp;

  Split si = split_of(d.inverse());
  std::vector<std::vector<cd>> abar(q, std::vector<cd>(q));
  std::vector<cd> bbar(q), bfwd(q);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) abar[i][j] = std::conj(a_from_split(s, spec.alphas[i], spec.alphas[j]));
    bbar[i] = std::conj(b_from_split(s, spec.alphas[i]));
    bfwd[i] = b_from_split(si, spec.alphas[i]);
  }
  std::vector<cd> by_w(q + 1, 0.0);
  std::vector<int> used(q, 0);
  matchings(0, q, used, 1.0, 0, abar, bbar, bfwd, by_w);
  cd total = 0;
  double zw = 1;
  for (int w = 0; w <= q; ++w, zw *= z / 4) total += zw * by_w[w];
  return std::pow(4 * M_PI * spec.params.e2, q) * total * damp;
}

double gram_positivity(const KernelSpec& spec, const std::vector<GroupElement>& sample) {
  const int n = static_cast<int>(sample.size());
  Eigen::MatrixXcd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = kernel_value(spec, sample[i], sample[j]);
  Eigen::MatrixXcd H = 0.5 * (G + G.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double kernel_hermiticity(const KernelSpec& spec, const GroupElement& g, const GroupElement& h) {
  return std::abs(kernel_value(spec, g, h) - std::conj(kernel_value(spec, h, g)));
}

}  // namespace lkl
