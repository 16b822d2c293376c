#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "lkl/verify.hpp"

// Prints one PASS/FAIL line per acceptance criterion, followed by its checks.
// Exit status is 1 when any criterion fails.
int main(int argc, char** argv) {
  int first = 1, last = 12;
  if (argc > 1) first = last = std::atoi(argv[1]);
  int failed = 0;
  for (int id = first; id <= last; ++id) {
    auto t0 = std::chrono::steady_clock::now();
    lkl::CriterionResult r = lkl::run_criterion(id);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("CRITERION %2d %s: %s (%.1f s)\n", id, r.pass ? "PASS" : "FAIL", r.title.c_str(), secs);
    for (const auto& c : r.checks)
      std::printf("    [%s] %s: %.6g %s %.3g\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.residual,
                  c.relation.c_str(), c.tolerance);
    failed += !r.pass;
  }
  std::printf("SUMMARY: %d of %d criteria FAIL\n", failed, last - first + 1);
  return failed ? 1 : 0;
}
