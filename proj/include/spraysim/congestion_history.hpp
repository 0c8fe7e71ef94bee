#pragma once
#include <cstdint>
#include <span>
#include <vector>

namespace spraysim {

// Per-path penalty table, one entry per full-path EV index. ECN penalizes a
// clear path once (no multi-penalization), NACK overwrites unconditionally
// with the larger penalty, and every send decays all nonzero entries by a
// fixed step so stale signals age out.
class CongestionHistory {
public:
    CongestionHistory(uint32_t n_paths, int k_bits, uint32_t p_ecn, uint32_t p_nack,
                      uint32_t decay_step);

    void on_ecn(uint32_t path_index);
    void on_nack(uint32_t path_index);
    void decay();

    bool is_clear(uint32_t path_index) const { return _penalty[path_index] == 0; }
    uint32_t penalty(uint32_t path_index) const { return _penalty[path_index]; }

    // argmin over candidates; ties broken by scan order (first encountered)
    uint32_t least_penalized(std::span<const uint32_t> candidates) const;

    uint32_t size() const { return (uint32_t)_penalty.size(); }
    uint32_t max_penalty() const { return _cap; }
    uint32_t p_ecn() const { return _p_ecn; }
    uint32_t p_nack() const { return _p_nack; }
    uint32_t decay_step() const { return _decay_step; }
    uint64_t decay_calls() const { return _decay_calls; }
    // footprint of the table itself: k bits per path
    uint64_t memory_bits() const { return (uint64_t)_penalty.size() * _k_bits; }

private:
    std::vector<uint16_t> _penalty;
    int _k_bits;
    uint32_t _cap;
    uint32_t _p_ecn;
    uint32_t _p_nack;
    uint32_t _decay_step;
    uint32_t _nonzero = 0;
    uint64_t _decay_calls = 0;
};

} // namespace spraysim
