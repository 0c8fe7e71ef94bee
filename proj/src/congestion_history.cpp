#include "spraysim/congestion_history.hpp"

#include <cassert>

namespace spraysim {

CongestionHistory::CongestionHistory(uint32_t n_paths, int k_bits, uint32_t p_ecn,
                                     uint32_t p_nack, uint32_t decay_step)
    : _penalty(n_paths, 0),
      _k_bits(k_bits),
      _cap((uint32_t)((1u << k_bits) - 1)),
      _p_ecn(p_ecn),
      _p_nack(p_nack),
      _decay_step(decay_step) {
    assert(k_bits >= 1 && k_bits <= 16);
    assert(p_nack > p_ecn && p_ecn >= 1);
    assert(decay_step >= 1);
    if (_p_ecn > _cap)
        _p_ecn = _cap;
    if (_p_nack > _cap)
        _p_nack = _cap;
}

void CongestionHistory::on_ecn(uint32_t path_index) {
    uint16_t& e = _penalty[path_index];
    if (e != 0)
        return;  // already penalized; re-penalizing would over-avoid the path
    e = (uint16_t)_p_ecn;
    ++_nonzero;
}

void CongestionHistory::on_nack(uint32_t path_index) {
    uint16_t& e = _penalty[path_index];
    if (e == 0)
        ++_nonzero;
    e = (uint16_t)_p_nack;
}

void CongestionHistory::decay() {
    ++_decay_calls;
    if (_nonzero == 0)
        return;
    for (uint16_t& e : _penalty) {
        if (e == 0)
            continue;
        if (e <= _decay_step) {
            e = 0;
            --_nonzero;
        } else {
            e = (uint16_t)(e - _decay_step);
        }
    }
}

uint32_t CongestionHistory::least_penalized(std::span<const uint32_t> candidates) const {
    assert(!candidates.empty());
    uint32_t best = candidates[0];
    uint32_t best_p = _penalty[best];
    for (size_t i = 1; i < candidates.size(); ++i) {
        uint32_t p = _penalty[candidates[i]];
        if (p < best_p) {
            best = candidates[i];
            best_p = p;
        }
    }
    return best;
}

} // namespace spraysim
