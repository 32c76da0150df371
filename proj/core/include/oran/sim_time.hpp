#pragma once

#include <cmath>
#include <cstdint>

namespace oran {

/// Simulation clock in integer microseconds. Periodic events are scheduled on
/// exact multiples of their period so report cadence never drifts.
using SimTime = std::int64_t;

inline constexpr SimTime kMicrosPerSecond = 1'000'000;

inline SimTime from_seconds(double s) {
    return static_cast<SimTime>(std::llround(s * static_cast<double>(kMicrosPerSecond)));
}

inline constexpr double to_seconds(SimTime t) {
    return static_cast<double>(t) / static_cast<double>(kMicrosPerSecond);
}

}  // namespace oran
