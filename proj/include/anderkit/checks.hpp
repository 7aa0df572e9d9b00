#pragma once

#include <string>
#include <vector>

namespace anderkit {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the reproduction and invariant suite in order. Later checks read
/// what earlier ones recorded (the step invariants cover checks 1-5).
std::vector<CheckResult> run_checks();

/// "PASS  3  bratu ordering  (1.234 s)  detail"
std::string format_check(const CheckResult& result);

}  // namespace anderkit
