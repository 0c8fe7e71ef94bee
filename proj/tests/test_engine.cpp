#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spraysim/engine.hpp"

#include <vector>

using namespace spraysim;

namespace {

struct Recorder : EventSource {
    std::vector<std::pair<SimTime, uint64_t>> log;
    void on_event(SimTime now, uint64_t tag) override { log.emplace_back(now, tag); }
};

struct Chainer : EventSource {
    Engine* eng;
    std::vector<uint64_t> order;
    void on_event(SimTime now, uint64_t tag) override {
        order.push_back(tag);
        if (tag == 1) {
            // same-time events born during dispatch run after everything
            // already queued for this instant
            eng->schedule(now, this, 100);
        }
    }
};

} // namespace

TEST_CASE("events fire in time order regardless of insertion order") {
    Engine eng(1);
    Recorder r;
    eng.schedule(300, &r, 3);
    eng.schedule(100, &r, 1);
    eng.schedule(200, &r, 2);
    eng.run_until(1000);
    REQUIRE(r.log.size() == 3);
    CHECK(r.log[0] == std::pair<SimTime, uint64_t>{100, 1});
    CHECK(r.log[1] == std::pair<SimTime, uint64_t>{200, 2});
    CHECK(r.log[2] == std::pair<SimTime, uint64_t>{300, 3});
}

TEST_CASE("ties dispatch in insertion order") {
    Engine eng(1);
    Recorder r;
    for (uint64_t t = 0; t < 50; ++t)
        eng.schedule(500, &r, t);
    eng.schedule(400, &r, 999);
    eng.run_until(1000);
    REQUIRE(r.log.size() == 51);
    CHECK(r.log[0].second == 999);
    for (uint64_t t = 0; t < 50; ++t)
        CHECK(r.log[t + 1].second == t);
}

TEST_CASE("events scheduled during dispatch at the same instant run last") {
    Engine eng(1);
    Chainer c;
    c.eng = &eng;
    eng.schedule(10, &c, 1);
    eng.schedule(10, &c, 2);
    eng.schedule(10, &c, 3);
    eng.run_until(10);
    REQUIRE(c.order == std::vector<uint64_t>{1, 2, 3, 100});
}

TEST_CASE("run_until stops the clock at the deadline") {
    Engine eng(1);
    Recorder r;
    eng.schedule(100, &r, 1);
    eng.schedule(900, &r, 2);
    SimTime t = eng.run_until(500);
    CHECK(t == 500);
    CHECK(eng.now() == 500);
    CHECK(r.log.size() == 1);
    CHECK(eng.pending() == 1);
    t = eng.run_until(2000);
    CHECK(t == 900);  // queue drained before the deadline
    CHECK(r.log.size() == 2);
    CHECK(eng.empty());
}

TEST_CASE("run_one dispatches exactly one event") {
    Engine eng(1);
    Recorder r;
    eng.schedule(5, &r, 1);
    eng.schedule(6, &r, 2);
    CHECK(eng.run_one());
    CHECK(r.log.size() == 1);
    CHECK(eng.now() == 5);
    CHECK(eng.run_one());
    CHECK_FALSE(eng.run_one());
    CHECK(eng.dispatched() == 2);
}

TEST_CASE("identical runs produce identical dispatch traces") {
    auto trace = [] {
        Engine eng(42);
        Recorder r;
        RngStream rng = eng.derive_rng(7, 1);
        for (int i = 0; i < 200; ++i)
            eng.schedule((SimTime)rng.below(1000), &r, (uint64_t)i);
        eng.run_until(1000);
        return r.log;
    };
    CHECK(trace() == trace());
}

TEST_CASE("derive_rng is a pure function of lineage") {
    Engine a(42), b(42), c(43);
    CHECK(a.derive_rng(3, 1).next_u64() == b.derive_rng(3, 1).next_u64());
    CHECK(a.derive_rng(3, 1).next_u64() != c.derive_rng(3, 1).next_u64());
    CHECK(a.derive_rng(3, 1).next_u64() != a.derive_rng(4, 1).next_u64());
    CHECK(a.derive_rng(3, 1).next_u64() != a.derive_rng(3, 2).next_u64());
}
