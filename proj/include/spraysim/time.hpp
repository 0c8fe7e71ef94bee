#pragma once
#include <cstdint>

namespace spraysim {

// Simulation clock in integer picoseconds. At 100/400/800 Gbps every whole
// number of bytes serializes to a whole number of picoseconds, so link events
// never round.
using SimTime = int64_t;

constexpr SimTime kNoTime = -1;

constexpr SimTime from_ns(int64_t ns) { return ns * 1000; }
constexpr SimTime from_us(int64_t us) { return us * 1'000'000; }
constexpr SimTime from_ms(int64_t ms) { return ms * 1'000'000'000; }

constexpr int64_t to_ns(SimTime t) { return t / 1000; }
constexpr double to_us_f(SimTime t) { return (double)t * 1e-6; }
constexpr double to_sec(SimTime t) { return (double)t * 1e-12; }

// Store-and-forward serialization delay of `bytes` at `bps`.
constexpr SimTime serialization_ps(uint64_t bytes, uint64_t bps) {
    return (SimTime)((__int128)bytes * 8u * 1'000'000'000'000ull / bps);
}

} // namespace spraysim
