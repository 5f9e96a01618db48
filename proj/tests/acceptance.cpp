// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "rmt/verify.hpp"

int main(int argc, char** argv) {
  rmt::VerifyOptions opts;
  int only = 0;
  bool verbose = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--scale" && i + 1 < argc) {
      const std::string v = argv[++i];
      if (v == "paper") {
        opts.scale = rmt::Scale::Paper;
      } else if (v != "desk") {
        std::cerr << "unknown scale " << v << '\n';
        return 2;
      }
    } else if (a == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
      if (only < 1 || only > 9) {
        std::cerr << "criterion must be 1-9\n";
        return 2;
      }
    } else if (a == "--verbose" || a == "-v") {
      verbose = true;
    } else {
      std::cerr << "usage: rmt_acceptance [--scale desk|paper] [--criterion N] [--verbose]\n";
      return 2;
    }
  }
  int failures = 0, ran = 0;
  for (int id = 1; id <= 9; ++id) {
    if (only != 0 && id != only) continue;
    ++ran;
    const rmt::CriterionResult r = rmt::run_criterion(id, opts);
    std::printf("[%s] criterion %d: %s (%zu checks, %.2f s)\n", r.passed() ? "PASS" : "FAIL", id, r.title.c_str(),
                r.checks.size(), r.seconds);
    for (const auto& c : r.checks) {
      if (verbose || !c.passed) {
        std::printf("       %s %s: value %.6g, tolerance %.6g%s%s\n", c.passed ? "ok  " : "FAIL", c.name.c_str(),
                    c.value, c.tolerance, c.detail.empty() ? "" : "  ", c.detail.c_str());
      }
    }
    if (!r.passed()) ++failures;
  }
  std::printf("%d of %d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
