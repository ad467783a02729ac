#include <cstdio>
#include <cstdlib>
#include <string>

#include "ncvar/verify.hpp"

// Runs the ten acceptance criteria (or the ids given on the command line) and
// prints one pass/fail line per criterion, followed by any failing checks.
int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) {
    for (int i = 1; i <= 10; ++i) ids.push_back(i);
  }
  int failed = 0;
  for (int id : ids) {
    ncvar::CriterionResult r = ncvar::run_criterion(id);
    std::printf("criterion %2d: %s  %s  (%zu checks, %.1f s)\n", r.id, r.passed ? "PASS" : "FAIL", r.title.c_str(),
                r.checks.size(), r.seconds);
    for (const auto& c : r.checks) {
      if (c.passed) continue;
      std::printf("    failed: %s  observed %.12g  expected %.12g  tol %.3g  %s\n", c.name.c_str(), c.observed,
                  c.expected, c.tol, c.note.c_str());
    }
    failed += !r.passed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(ids.size()) - failed, ids.size());
  return failed == 0 ? 0 : 1;
}
