#include "spraysim/entropy.hpp"

#include <cassert>
#include <numeric>

namespace spraysim {

void shuffle_in_place(std::span<uint8_t> values, RngStream& rng) {
    for (size_t i = values.size(); i > 1; --i) {
        size_t j = rng.below(i);
        std::swap(values[i - 1], values[j]);
    }
}

static int bits_for(int count) {
    int w = 0;
    while ((1 << w) < count)
        ++w;
    return w;
}

EvLayout EvLayout::from_counts(std::span<const int> uplink_counts) {
    EvLayout l;
    l.nparts = (int)uplink_counts.size();
    assert(l.nparts >= 1 && l.nparts <= 2);
    int sh = 0;
    for (int i = 0; i < l.nparts; ++i) {
        assert(uplink_counts[i] >= 1);
        l.count[i] = uplink_counts[i];
        l.width[i] = bits_for(uplink_counts[i]);
        l.shift[i] = sh;
        sh += l.width[i];
    }
    assert(sh <= 16);
    return l;
}

uint16_t EvLayout::encode(const MpEv& ev) const {
    uint16_t f = 0;
    for (int i = 0; i < nparts; ++i)
        f |= (uint16_t)(ev.part[i] << shift[i]);
    return f;
}

MpEv EvLayout::decode(uint16_t field) const {
    MpEv ev;
    ev.nparts = (uint8_t)nparts;
    for (int i = 0; i < nparts; ++i)
        ev.part[i] = (uint8_t)slice(field, i);
    return ev;
}

int EvLayout::slice(uint16_t field, int part) const {
    return (field >> shift[part]) & ((1 << width[part]) - 1);
}

uint32_t EvLayout::path_index(const MpEv& ev) const {
    uint32_t idx = 0, radix = 1;
    for (int i = 0; i < nparts; ++i) {
        assert(ev.part[i] < count[i]);
        idx += ev.part[i] * radix;
        radix *= count[i];
    }
    return idx;
}

MpEv EvLayout::from_path_index(uint32_t index) const {
    MpEv ev;
    ev.nparts = (uint8_t)nparts;
    for (int i = 0; i < nparts; ++i) {
        ev.part[i] = (uint8_t)(index % count[i]);
        index /= count[i];
    }
    assert(index == 0);
    return ev;
}

uint32_t EvLayout::n_paths() const {
    uint32_t n = 1;
    for (int i = 0; i < nparts; ++i)
        n *= count[i];
    return n;
}

EvGenerator::EvGenerator(std::vector<std::vector<uint8_t>> candidates, RngStream rng,
                         bool randomized)
    : _rng(rng), _randomized(randomized) {
    assert(!candidates.empty() && candidates.size() <= 2);
    for (auto& c : candidates) {
        assert(!c.empty());
        Part p;
        p.ports = std::move(c);
        shuffle_in_place(p.ports, _rng);
        _parts.push_back(std::move(p));
    }
}

EvGenerator EvGenerator::dense(std::span<const int> uplink_counts, RngStream rng,
                               bool randomized) {
    std::vector<std::vector<uint8_t>> cands;
    for (int n : uplink_counts) {
        assert(n >= 1);
        std::vector<uint8_t> c(n);
        std::iota(c.begin(), c.end(), (uint8_t)0);
        cands.push_back(std::move(c));
    }
    return EvGenerator(std::move(cands), rng, randomized);
}

MpEv EvGenerator::next() {
    MpEv ev;
    ev.nparts = (uint8_t)_parts.size();
    for (size_t i = 0; i < _parts.size(); ++i)
        ev.part[i] = _parts[i].ports[_parts[i].cursor];
    if (_randomized)
        advance_randomized();
    else
        advance_odometer();
    return ev;
}

void EvGenerator::advance_odometer() {
    for (size_t i = 0; i < _parts.size(); ++i) {
        Part& p = _parts[i];
        if (++p.cursor < p.ports.size())
            break;
        // wraparound: reshuffle before the next cycle, carry into part i+1
        shuffle_in_place(p.ports, _rng);
        p.cursor = 0;
    }
}

void EvGenerator::advance_randomized() {
    size_t i = _parts.size() == 1 ? 0 : (size_t)_rng.below(_parts.size());
    Part& p = _parts[i];
    if (++p.cursor >= p.ports.size()) {
        shuffle_in_place(p.ports, _rng);
        p.cursor = 0;
    }
}

uint32_t EvGenerator::space_size() const {
    uint32_t n = 1;
    for (auto& p : _parts)
        n *= (uint32_t)p.ports.size();
    return n;
}

} // namespace spraysim
