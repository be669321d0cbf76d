// Acceptance suite runner: one pass/fail line per criterion, nonzero exit on
// any failure.  Level and threads come from the environment so ctest and the
// command line can tune the budget (SLIPSTOKES_LEVEL, SLIPSTOKES_THREADS).
#include <cstdlib>
#include <iostream>

#include "slipstokes/runner.hpp"

int main() {
  int level = 2, threads = 2;
  if (const char* e = std::getenv("SLIPSTOKES_LEVEL")) level = std::atoi(e);
  if (const char* e = std::getenv("SLIPSTOKES_THREADS")) threads = std::atoi(e);
  std::cout << "acceptance suite (level " << level << ", threads " << threads << ")\n";
  auto results = slipstokes::run_acceptance(level, "runs/acceptance", threads);
  bool all = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.name
              << "\n      " << r.detail << "\n";
    all = all && r.pass;
  }
  std::cout << (all ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED") << "\n";
  return all ? 0 : 1;
}
