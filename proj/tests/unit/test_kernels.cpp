#include <doctest.h>

#include <random>

#include "lkl/errors.hpp"
#include "lkl/kernels.hpp"

using namespace lkl;

namespace {
KernelSpec spec_for(int q, std::vector<AngularIndex> alphas, double z) {
  KernelSpec s;
  s.q = q;
  s.alphas = std::move(alphas);
  s.params = ChargeParams::from_z(z);
  return s;
}
}  // namespace

TEST_CASE("kernel spec validation") {
  CHECK_NOTHROW(spec_for(0, {}, 1.0).validate());
  CHECK_NOTHROW(spec_for(1, {{1, 0}}, 1.0).validate());
  CHECK_THROWS(spec_for(1, {}, 1.0).validate());
  CHECK_THROWS(spec_for(1, {{0, 0}}, 1.0).validate());
  CHECK_THROWS(spec_for(3, {{1, 0}, {1, 0}, {1, 0}}, 1.0).validate());
}

TEST_CASE("kernels are Hermitian and positive definite") {
  std::mt19937_64 rng(777);
  std::vector<GroupElement> pts;
  for (int i = 0; i < 8; ++i) pts.push_back(random_element(rng, 1.5));
  for (double z : {0.5, 2.0}) {
    std::vector<KernelSpec> specs = {spec_for(0, {}, z), spec_for(1, {{1, 0}}, z), spec_for(2, {{1, 0}, {1, 1}}, z)};
    for (const auto& s : specs) {
      CHECK(kernel_hermiticity(s, pts[0], pts[1]) < 1e-10);
      CHECK(gram_positivity(s, pts) > -1e-9);
    }
  }
}

TEST_CASE("q = 0 kernel depends only on relative rapidity") {
  KernelSpec s = spec_for(0, {}, 1.5);
  std::mt19937_64 rng(8);
  GroupElement g = random_element(rng, 1.0), h = random_element(rng, 1.0), k = random_element(rng, 1.0);
  CHECK(std::abs(kernel_value(s, k * g, k * h) - kernel_value(s, g, h)) < 1e-10);
  CHECK(std::abs(kernel_value(s, g, g) - 1.0) < 1e-12);
}
