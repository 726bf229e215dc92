#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <random>

namespace mhcl {

/// Simulated time and all protocol intervals use integer microseconds.
using Duration = std::chrono::microseconds;
using Rng = std::mt19937_64;

/// Multipliers on the base interval I = 2^dio_min_exp ms. A timer built
/// with multiplier sp starts in (I/2, I] and caps at sp * I.
struct StabilizationParams {
  unsigned sp_child = 2;   // preferred-parent timer
  unsigned sp_parent = 4;  // children-counter timer
  unsigned sp_leaf = 4;    // aggregation timer, non-root
  unsigned sp_root = 8;    // aggregation timer, root
  unsigned dio_min_exp = 6;

  Duration base_interval() const {
    return std::chrono::milliseconds(std::int64_t{1} << dio_min_exp);
  }
  /// Throws InvalidArgument if any multiplier is 0 or the exponent is huge.
  void validate() const;
};

/// Trickle-style stabilization timer. Each quiet expiry doubles the
/// interval up to the cap; an expiry that sees a change draws a fresh
/// interval in (I/2, I]; a quiet expiry while already at the cap means the
/// watched quantity is stable.
class StabilizationTimer {
 public:
  enum class Expiry { Reset, Doubled, AtMax };

  StabilizationTimer() = default;
  StabilizationTimer(Duration base, unsigned multiplier)
      : base_(base), max_(base * multiplier), current_(base) {}

  Duration reset(Rng& rng) {
    std::uniform_int_distribution<std::int64_t> pick(base_.count() / 2 + 1, base_.count());
    current_ = Duration(pick(rng));
    return current_;
  }

  /// Advances the timer for one expiry; current() is the next interval.
  Expiry expire(bool changed, Rng& rng) {
    if (changed) {
      reset(rng);
      return Expiry::Reset;
    }
    if (current_ < max_) {
      current_ = std::min(current_ * 2, max_);
      return Expiry::Doubled;
    }
    return Expiry::AtMax;
  }

  Duration current() const { return current_; }
  Duration max() const { return max_; }
  Duration base() const { return base_; }

 private:
  Duration base_{};
  Duration max_{};
  Duration current_{};
};

}  // namespace mhcl
