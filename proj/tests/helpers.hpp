#ifndef OWRTE_TESTS_HELPERS_HPP
#define OWRTE_TESTS_HELPERS_HPP

#include <functional>

#include "owrte/common.hpp"

namespace owrte_tests {

// Runs f and reports which error code it threw (ok when it did not throw).
inline owrte::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const owrte::Error& e) {
    return e.code();
  }
  return owrte::ErrorCode::ok;
}

inline double rel_dev(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace owrte_tests

#endif
