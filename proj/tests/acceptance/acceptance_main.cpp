// Runs every acceptance criterion at desk scale and prints one verdict line
// per criterion. Exit status is 0 only if all pass.

#include <cstdio>
#include <iostream>

#include "axivort/verify.hpp"

int main() {
  using namespace axivort::verify;
  Context ctx(Scale{}, &std::cerr);
  const SuiteReport rep = run_suite(Suite::all, ctx);
  for (const auto& c : rep.criteria)
    std::printf("criterion %2d %-24s %s  %s  [%.1f s]\n", c.id, c.title.c_str(), c.passed ? "PASS" : "FAIL",
                c.detail.c_str(), c.seconds);
  std::printf("acceptance: %s (%.1f s)\n", rep.passed() ? "PASS" : "FAIL", rep.seconds);
  return rep.passed() ? 0 : 1;
}
