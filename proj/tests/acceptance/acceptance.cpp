// One line per reproduction criterion; exits nonzero if any fails.

#include <iostream>

#include "anderkit/checks.hpp"

int main() {
  int failed = 0;
  for (const anderkit::CheckResult& r : anderkit::run_checks()) {
    std::cout << anderkit::format_check(r) << std::endl;
    if (!r.passed) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << '\n';
  return failed == 0 ? 0 : 1;
}
