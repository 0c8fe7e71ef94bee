#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spraysim/entropy.hpp"
#include "spraysim/rng.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

using namespace spraysim;

TEST_CASE("shuffle_in_place produces a permutation") {
    RngStream rng(1, 1, kRngShuffle);
    std::vector<uint8_t> v(8);
    std::iota(v.begin(), v.end(), (uint8_t)0);
    for (int trial = 0; trial < 50; ++trial) {
        shuffle_in_place(v, rng);
        std::vector<uint8_t> s = v;
        std::sort(s.begin(), s.end());
        for (int i = 0; i < 8; ++i)
            REQUIRE(s[i] == i);
    }
}

TEST_CASE("shuffle_in_place is uniform over permutations") {
    RngStream rng(99, 0, kRngShuffle);
    std::map<std::vector<uint8_t>, int> hist;
    const int trials = 24000;
    for (int t = 0; t < trials; ++t) {
        std::vector<uint8_t> v{0, 1, 2, 3};
        shuffle_in_place(v, rng);
        ++hist[v];
    }
    REQUIRE(hist.size() == 24);
    // chi-square, 23 dof; 41.6 is the 99th percentile
    double chi2 = 0;
    for (auto& [perm, c] : hist) {
        double d = c - 1000.0;
        chi2 += d * d / 1000.0;
    }
    CHECK(chi2 < 41.6);
}

TEST_CASE("layout packs parts low-first at ceil(log2) widths") {
    int counts[2] = {8, 8};
    EvLayout l = EvLayout::from_counts(counts);
    CHECK(l.nparts == 2);
    CHECK(l.width[0] == 3);
    CHECK(l.width[1] == 3);
    CHECK(l.shift[0] == 0);
    CHECK(l.shift[1] == 3);
    CHECK(l.n_paths() == 64);

    MpEv ev;
    ev.nparts = 2;
    ev.part[0] = 5;
    ev.part[1] = 2;
    uint16_t f = l.encode(ev);
    CHECK(f == (5 | (2 << 3)));
    CHECK(l.slice(f, 0) == 5);
    CHECK(l.slice(f, 1) == 2);
    CHECK(l.decode(f) == ev);
}

TEST_CASE("encode and path_index are bijections that agree for power-of-two counts") {
    int counts[2] = {8, 8};
    EvLayout l = EvLayout::from_counts(counts);
    std::set<uint16_t> fields;
    std::set<uint32_t> indices;
    for (int a = 0; a < 8; ++a) {
        for (int b = 0; b < 8; ++b) {
            MpEv ev;
            ev.nparts = 2;
            ev.part[0] = (uint8_t)a;
            ev.part[1] = (uint8_t)b;
            uint16_t f = l.encode(ev);
            uint32_t idx = l.path_index(ev);
            CHECK(f == idx);  // dense iff widths are exact
            CHECK(l.decode(f) == ev);
            CHECK(l.from_path_index(idx) == ev);
            fields.insert(f);
            indices.insert(idx);
        }
    }
    CHECK(fields.size() == 64);
    CHECK(indices.size() == 64);
}

TEST_CASE("path_index is dense for non-power-of-two counts where encode is not") {
    int counts[2] = {7, 5};
    EvLayout l = EvLayout::from_counts(counts);
    CHECK(l.n_paths() == 35);
    CHECK(l.width[0] == 3);
    CHECK(l.width[1] == 3);
    std::set<uint32_t> indices;
    for (int a = 0; a < 7; ++a) {
        for (int b = 0; b < 5; ++b) {
            MpEv ev;
            ev.nparts = 2;
            ev.part[0] = (uint8_t)a;
            ev.part[1] = (uint8_t)b;
            uint32_t idx = l.path_index(ev);
            REQUIRE(idx < 35);
            CHECK(l.from_path_index(idx) == ev);
            indices.insert(idx);
        }
    }
    CHECK(indices.size() == 35);  // no holes: table needs no padding
}

TEST_CASE("odometer covers each part without repeats inside an aligned cycle") {
    int counts[2] = {4, 4};
    EvGenerator gen = EvGenerator::dense(counts, RngStream(5, 1, kRngBalancer));
    for (int window = 0; window < 40; ++window) {
        std::set<int> seen;
        int held = -1;
        for (int i = 0; i < 4; ++i) {
            MpEv ev = gen.next();
            seen.insert(ev.part[0]);
            // the higher part advances only when the lower one wraps
            if (held < 0)
                held = ev.part[1];
            REQUIRE(ev.part[1] == held);
        }
        REQUIRE(seen.size() == 4);
    }
}

TEST_CASE("odometer covers the full pair space once per aligned window") {
    int counts[2] = {4, 4};
    EvGenerator gen = EvGenerator::dense(counts, RngStream(5, 2, kRngBalancer));
    CHECK(gen.space_size() == 16);
    for (int window = 0; window < 20; ++window) {
        std::set<std::pair<int, int>> seen;
        for (int i = 0; i < 16; ++i) {
            MpEv ev = gen.next();
            seen.emplace(ev.part[0], ev.part[1]);
        }
        REQUIRE(seen.size() == 16);
    }
}

TEST_CASE("odometer draw counts are exactly balanced over aligned horizons") {
    int counts[2] = {4, 4};
    EvGenerator gen = EvGenerator::dense(counts, RngStream(5, 3, kRngBalancer));
    std::array<int, 4> c0{}, c1{};
    std::map<std::pair<int, int>, int> pairs;
    for (int i = 0; i < 10000; ++i) {  // 625 aligned windows of 16
        MpEv ev = gen.next();
        ++c0[ev.part[0]];
        ++c1[ev.part[1]];
        ++pairs[{ev.part[0], ev.part[1]}];
    }
    for (int v = 0; v < 4; ++v) {
        CHECK(c0[v] == 2500);
        CHECK(c1[v] == 2500);
    }
    REQUIRE(pairs.size() == 16);
    for (auto& [p, c] : pairs)
        CHECK(c == 625);
}

TEST_CASE("single-part generator cycles permutations") {
    int counts[1] = {7};
    EvGenerator gen = EvGenerator::dense(counts, RngStream(11, 0, kRngBalancer));
    CHECK(gen.nparts() == 1);
    CHECK(gen.space_size() == 7);
    std::array<int, 7> total{};
    for (int window = 0; window < 1000; ++window) {
        std::set<int> seen;
        for (int i = 0; i < 7; ++i) {
            MpEv ev = gen.next();
            REQUIRE(ev.nparts == 1);
            seen.insert(ev.part[0]);
            ++total[ev.part[0]];
        }
        REQUIRE(seen.size() == 7);
    }
    for (int v = 0; v < 7; ++v)
        CHECK(total[v] == 1000);
}

TEST_CASE("randomized advance stays near uniform without the odometer guarantee") {
    int counts[2] = {4, 4};
    EvGenerator gen = EvGenerator::dense(counts, RngStream(5, 4, kRngBalancer), true);
    std::array<int, 4> c0{}, c1{};
    for (int i = 0; i < 10000; ++i) {
        MpEv ev = gen.next();
        ++c0[ev.part[0]];
        ++c1[ev.part[1]];
    }
    for (int v = 0; v < 4; ++v) {
        CHECK(c0[v] > 2000);
        CHECK(c0[v] < 3000);
        CHECK(c1[v] > 2000);
        CHECK(c1[v] < 3000);
    }
}

TEST_CASE("sparse candidate sets restrict the emitted values") {
    std::vector<std::vector<uint8_t>> cands = {{1, 3, 6}, {0, 2}};
    EvGenerator gen(cands, RngStream(7, 7, kRngBalancer));
    CHECK(gen.space_size() == 6);
    CHECK(gen.part_size(0) == 3);
    CHECK(gen.part_size(1) == 2);
    for (int i = 0; i < 600; ++i) {
        MpEv ev = gen.next();
        bool ok0 = ev.part[0] == 1 || ev.part[0] == 3 || ev.part[0] == 6;
        bool ok1 = ev.part[1] == 0 || ev.part[1] == 2;
        REQUIRE(ok0);
        REQUIRE(ok1);
    }
}

TEST_CASE("two generators with different lineage decorrelate") {
    int counts[2] = {8, 8};
    EvGenerator a = EvGenerator::dense(counts, RngStream(5, 100, kRngBalancer));
    EvGenerator b = EvGenerator::dense(counts, RngStream(5, 101, kRngBalancer));
    int same = 0;
    for (int i = 0; i < 1000; ++i) {
        if (a.next() == b.next())
            ++same;
    }
    // expected collision rate 1/64
    CHECK(same < 60);
}
