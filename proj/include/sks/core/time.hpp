#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>

namespace sks {

/// Simulated clock. Nothing in the library reads wall-clock time.
struct SimClock {
  using duration = std::chrono::microseconds;
  using rep = duration::rep;
  using period = duration::period;
  using time_point = std::chrono::time_point<SimClock, duration>;
  static constexpr bool is_steady = true;
};

using SimDuration = SimClock::duration;
using SimTime = SimClock::time_point;

inline constexpr SimDuration kInfiniteDuration = SimDuration::max();
inline constexpr SimTime kSimEpoch{};
inline constexpr SimDuration kOneWeek = std::chrono::duration_cast<SimDuration>(std::chrono::weeks{1});

inline SimDuration from_seconds(double s) {
  if (!std::isfinite(s) || s >= 9.0e12) return kInfiniteDuration;
  return SimDuration{static_cast<std::int64_t>(std::llround(s * 1e6))};
}

inline SimDuration from_millis(double ms) { return from_seconds(ms / 1000.0); }

inline double to_seconds(SimDuration d) {
  if (d == kInfiniteDuration) return std::numeric_limits<double>::infinity();
  return static_cast<double>(d.count()) / 1e6;
}

inline double to_millis(SimDuration d) { return to_seconds(d) * 1000.0; }

inline SimTime at_seconds(double s) { return kSimEpoch + from_seconds(s); }

/// a * k with saturation at kInfiniteDuration.
inline SimDuration scale_budget(SimDuration a, std::int64_t k) {
  if (k <= 0) return SimDuration::zero();
  if (a == kInfiniteDuration) return kInfiniteDuration;
  if (a.count() > std::numeric_limits<SimDuration::rep>::max() / k) return kInfiniteDuration;
  return a * k;
}

/// t + d, saturating to the far future for infinite budgets.
inline SimTime add_saturating(SimTime t, SimDuration d) {
  if (d == kInfiniteDuration || t.time_since_epoch() > SimDuration::max() - d) return SimTime{SimDuration::max()};
  return t + d;
}

}  // namespace sks
