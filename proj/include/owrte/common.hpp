#ifndef OWRTE_COMMON_HPP
#define OWRTE_COMMON_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace owrte {

// Transverse vectors are stored as fixed 2-vectors; for d = 1 the y component
// is identically zero, so norms and dot products can be taken without
// dispatching on the dimension.
using Vec = Eigen::Vector2d;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Error taxonomy shared by the C++ core and the C binding.  Codes are stable:
// the C header mirrors them one-to-one.
enum class ErrorCode : int {
  ok = 0,
  invalid_argument = 1,   // malformed input (sizes, NaN, bad enum, ...)
  domain = 2,             // parameter outside the physical domain (|kappa|>=1, ...)
  range = 3,              // query outside tabulated/representable range
  tolerance = 4,          // quadrature or iteration failed to reach tolerance
  instability = 5,        // solver produced non-physical output (negativity, blow-up)
  unsupported = 6,        // feature not available for this model/dimension
  config = 7,             // bad run configuration (CLI layer)
  io = 8,                 // file read/write failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace owrte

#endif
