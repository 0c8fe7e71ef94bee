#include "spraysim/rng.hpp"

namespace spraysim {

// splitmix64 finalizer
uint64_t RngStream::mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

RngStream::RngStream(uint64_t global_seed, uint64_t entity_id, uint64_t purpose_tag) {
    uint64_t h = mix(global_seed);
    h = mix(h ^ mix(entity_id + 0x5851f42d4c957f2dull));
    h = mix(h ^ mix(purpose_tag + 0x14057b7ef767814full));
    _state = h;
}

uint64_t RngStream::next_u64() {
    _state += 0x9e3779b97f4a7c15ull;
    uint64_t x = _state;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

uint64_t RngStream::below(uint64_t bound) {
    if (bound <= 1)
        return 0;
    // rejection sampling on the top of the range keeps the draw exactly uniform
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % bound;
}

} // namespace spraysim
