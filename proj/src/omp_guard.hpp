#ifndef OWRTE_SRC_OMP_GUARD_HPP
#define OWRTE_SRC_OMP_GUARD_HPP

#include <atomic>
#include <exception>

namespace owrte {

// Exceptions must not unwind out of an OpenMP region (that terminates the
// process), so loop bodies run through this guard: the first exception is
// kept, later iterations turn into no-ops, and rethrow() fires after the
// region joins.
class OmpGuard {
 public:
  template <typename Fn>
  void run(Fn&& fn) noexcept {
    if (failed_.load(std::memory_order_relaxed)) return;
    try {
      fn();
    } catch (...) {
      bool expected = false;
      if (failed_.compare_exchange_strong(expected, true)) {
        eptr_ = std::current_exception();
      }
    }
  }

  void rethrow() const {
    if (eptr_) std::rethrow_exception(eptr_);
  }

 private:
  std::atomic<bool> failed_{false};
  std::exception_ptr eptr_;
};

}  // namespace owrte

#endif
