#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spraysim/congestion_history.hpp"

#include <vector>

using namespace spraysim;

TEST_CASE("fresh table is clear everywhere") {
    CongestionHistory h(64, 8, 8, 62, 1);
    CHECK(h.size() == 64);
    CHECK(h.max_penalty() == 255);
    for (uint32_t i = 0; i < 64; ++i) {
        CHECK(h.is_clear(i));
        CHECK(h.penalty(i) == 0);
    }
}

TEST_CASE("ecn penalizes a clear path exactly once") {
    CongestionHistory h(8, 8, 8, 62, 1);
    h.on_ecn(3);
    CHECK(h.penalty(3) == 8);
    h.on_ecn(3);
    h.on_ecn(3);
    CHECK(h.penalty(3) == 8);  // no stacking while the entry is nonzero
    CHECK(h.is_clear(2));
}

TEST_CASE("nack overwrites unconditionally") {
    CongestionHistory h(8, 8, 8, 62, 1);
    h.on_ecn(1);
    h.on_nack(1);
    CHECK(h.penalty(1) == 62);
    h.on_nack(1);
    CHECK(h.penalty(1) == 62);
    h.on_nack(5);
    CHECK(h.penalty(5) == 62);
}

TEST_CASE("ecn does not dilute an existing nack penalty") {
    CongestionHistory h(8, 8, 8, 62, 1);
    h.on_nack(2);
    h.on_ecn(2);
    CHECK(h.penalty(2) == 62);
}

TEST_CASE("decay steps every nonzero entry toward zero and stops there") {
    CongestionHistory h(8, 8, 8, 62, 1);
    h.on_ecn(0);
    h.on_nack(1);
    for (int i = 0; i < 8; ++i)
        h.decay();
    CHECK(h.is_clear(0));
    CHECK(h.penalty(1) == 62 - 8);
    for (int i = 0; i < 100; ++i)
        h.decay();
    CHECK(h.is_clear(1));
    CHECK(h.penalty(1) == 0);
    CHECK(h.decay_calls() == 108);
}

TEST_CASE("decay honors a larger step") {
    CongestionHistory h(4, 8, 8, 62, 5);
    h.on_ecn(0);
    h.decay();
    CHECK(h.penalty(0) == 3);
    h.decay();
    CHECK(h.penalty(0) == 0);  // clamps, never wraps
}

TEST_CASE("penalties saturate at the k-bit cap") {
    CongestionHistory h(4, 4, 3, 100, 1);
    CHECK(h.max_penalty() == 15);
    h.on_nack(0);
    CHECK(h.penalty(0) == 15);
    CHECK(h.p_nack() == 15);
}

TEST_CASE("least_penalized takes the first minimum in scan order") {
    CongestionHistory h(8, 8, 8, 62, 1);
    h.on_nack(0);
    h.on_ecn(1);
    std::vector<uint32_t> cands{0, 1, 4, 6};
    CHECK(h.least_penalized(cands) == 4);
    h.on_ecn(4);
    h.on_ecn(6);
    // all penalized: 1, 4, 6 tie at p_ecn, scan order picks 1
    CHECK(h.least_penalized(cands) == 1);
    std::vector<uint32_t> only0{0};
    CHECK(h.least_penalized(only0) == 0);
}

TEST_CASE("frozen trace replays to the expected table") {
    // hand-computed with p_ecn 8, p_nack 62, step 1
    CongestionHistory h(4, 8, 8, 62, 1);
    h.on_ecn(0);   // [8 0 0 0]
    h.decay();     // [7 0 0 0]
    h.on_nack(1);  // [7 62 0 0]
    h.decay();     // [6 61 0 0]
    h.on_ecn(1);   // blocked, entry nonzero
    h.decay();     // [5 60 0 0]
    h.on_ecn(2);   // [5 60 8 0]
    h.on_nack(0);  // [62 60 8 0]
    h.decay();     // [61 59 7 0]
    CHECK(h.penalty(0) == 61);
    CHECK(h.penalty(1) == 59);
    CHECK(h.penalty(2) == 7);
    CHECK(h.penalty(3) == 0);
}

TEST_CASE("memory footprint is k bits per path") {
    CongestionHistory big(256, 8, 8, 62, 1);
    CHECK(big.memory_bits() == 2048);  // 256 B for a 256-path fabric
    CongestionHistory small(64, 4, 3, 14, 1);
    CHECK(small.memory_bits() == 256);
}

TEST_CASE("decay on an all-clear table is cheap and harmless") {
    CongestionHistory h(16, 8, 8, 62, 1);
    for (int i = 0; i < 1000; ++i)
        h.decay();
    for (uint32_t i = 0; i < 16; ++i)
        CHECK(h.is_clear(i));
}
