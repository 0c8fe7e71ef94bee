#pragma once
#include "spraysim/rng.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace spraysim {

// Multi-part entropy value. Part i selects the uplink index at the tier-(i+1)
// switch a packet crosses on its way up; a topology with T tiers uses T-1
// parts. Two parts cover every topology this simulator builds.
struct MpEv {
    std::array<uint8_t, 2> part{};
    uint8_t nparts = 0;

    bool operator==(const MpEv&) const = default;
};

// Fisher-Yates, in place.
void shuffle_in_place(std::span<uint8_t> values, RngStream& rng);

// Packet-header layout of the concatenated MP-EV: part 0 in the low bits,
// each part ceil(log2(count)) bits wide, from the nominal uplink counts.
// Also provides the dense mixed-radix path index used to key the congestion
// history: index = sum part_i * prod_{j<i} count_j, a bijection onto
// [0, prod count_i).
struct EvLayout {
    int nparts = 0;
    std::array<int, 2> count{};  // nominal uplink count per part
    std::array<int, 2> width{};  // header bits per part
    std::array<int, 2> shift{};

    static EvLayout from_counts(std::span<const int> uplink_counts);

    uint16_t encode(const MpEv& ev) const;
    MpEv decode(uint16_t field) const;
    // bit-slice one part out of the header field (what a tier-(part+1)
    // switch does on the fast path)
    int slice(uint16_t field, int part) const;

    uint32_t path_index(const MpEv& ev) const;
    MpEv from_path_index(uint32_t index) const;
    uint32_t n_paths() const;
};

// Pseudo-randomized round-robin generator. Each part owns a permutation of
// its candidate uplink indices plus a cursor; a call reads the values at the
// cursors, then advances the lowest-order cursor. A cursor that wraps
// reshuffles its own permutation and carries into the next part (odometer).
// The randomized variant instead advances one cursor picked uniformly at
// random per call, with no carry.
class EvGenerator {
public:
    EvGenerator(std::vector<std::vector<uint8_t>> candidates, RngStream rng,
                bool randomized = false);

    // dense candidate sets 0..count-1 per part
    static EvGenerator dense(std::span<const int> uplink_counts, RngStream rng,
                             bool randomized = false);

    MpEv next();

    int nparts() const { return (int)_parts.size(); }
    int part_size(int i) const { return (int)_parts[i].ports.size(); }
    // number of distinct MP-EVs this generator can emit
    uint32_t space_size() const;
    const std::vector<uint8_t>& part_candidates(int i) const { return _parts[i].ports; }

private:
    struct Part {
        std::vector<uint8_t> ports;  // permutation of candidate uplink indices
        uint32_t cursor = 0;
    };

    void advance_odometer();
    void advance_randomized();

    std::vector<Part> _parts;
    RngStream _rng;
    bool _randomized;
};

} // namespace spraysim
