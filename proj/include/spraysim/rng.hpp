#pragma once
#include <cstdint>

namespace spraysim {

// Splittable stream keyed by (global seed, entity id, purpose tag).
// Same lineage => same sequence. Pure 64-bit integer arithmetic, so sequences
// are identical on every platform.
class RngStream {
public:
    RngStream() : _state(0) {}
    RngStream(uint64_t global_seed, uint64_t entity_id, uint64_t purpose_tag);

    uint64_t next_u64();
    uint32_t next_u32() { return (uint32_t)(next_u64() >> 32); }

    // Unbiased draw in [0, bound), bound >= 1.
    uint64_t below(uint64_t bound);

    // [0, 1) with 53 random bits.
    double next_double() { return (double)(next_u64() >> 11) * 0x1.0p-53; }

    static uint64_t mix(uint64_t x);

private:
    uint64_t _state;
};

// Purpose tags for stream derivation. Parameterized purposes (for example a
// per-destination shuffle stream) pack their argument into the high bits.
enum RngPurpose : uint64_t {
    kRngShuffle = 1,   // + (dst_leaf << 8)
    kRngRedMark = 2,
    kRngArTieBreak = 3,
    kRngControlEv = 4,
    kRngBalancer = 5,
    kRngScenario = 6,
};

constexpr uint64_t rng_purpose(RngPurpose p, uint64_t arg = 0) {
    return (uint64_t)p | (arg << 8);
}

} // namespace spraysim
