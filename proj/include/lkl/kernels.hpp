#pragma once

#include <complex>
#include <vector>

#include "lkl/cocycle.hpp"
#include "lkl/group_geom.hpp"

namespace lkl {

// Cyclic vector c+_{alpha_1} ... c+_{alpha_q} e^{-inS(u)}|0>.
struct KernelSpec {
  int q = 0;
  std::vector<AngularIndex> alphas;
  ChargeParams params;
  void validate() const;
};

// Weight range of T^{l(alpha_1)} x ... x T^{l(alpha_q)}.
int kernel_l_max(const std::vector<AngularIndex>& alphas);
int kernel_l_min(const std::vector<AngularIndex>& alphas);

// A_{alpha beta}(g) for an arbitrary element, without truncation.
std::complex<double> a_element(const GroupElement& g, const AngularIndex& alpha, const AngularIndex& beta);
// B_alpha(g) in units of e.
std::complex<double> b_element(const GroupElement& g, const AngularIndex& alpha);

// <g|h> including the front factor (4 pi e^2)^q.
std::complex<double> kernel_value(const KernelSpec& spec, const GroupElement& g, const GroupElement& h);
// Smallest eigenvalue of the Hermitian part of [<g_i|g_j>].
double gram_positivity(const KernelSpec& spec, const std::vector<GroupElement>& sample);
// |<g|h> - conj(<h|g>)|.
double kernel_hermiticity(const KernelSpec& spec, const GroupElement& g, const GroupElement& h);

}  // namespace lkl
