#pragma once

// Fast built-in consistency checks against closed-form references. Used by
// `uwfd selftest`; runs in a few seconds.

#include <string>
#include <vector>

namespace uwfd {

struct SelfTestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<SelfTestResult> run_selftest();

}  // namespace uwfd
