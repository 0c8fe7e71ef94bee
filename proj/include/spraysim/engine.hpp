#pragma once
#include "spraysim/rng.hpp"
#include "spraysim/time.hpp"

#include <cstdint>
#include <vector>

namespace spraysim {

class EventSource {
public:
    virtual ~EventSource() = default;
    virtual void on_event(SimTime now, uint64_t tag) = 0;
};

// Single-threaded event loop. Dispatch order is total: (fire time, insertion
// sequence), so a run is a pure function of (global seed, scenario).
class Engine {
public:
    explicit Engine(uint64_t global_seed) : _seed(global_seed) {}

    void schedule(SimTime fire_at, EventSource* target, uint64_t tag = 0);

    // Dispatches everything with fire_at <= deadline. Returns the clock at
    // stop: the deadline, or the last dispatch time if the queue emptied.
    SimTime run_until(SimTime deadline);

    // Dispatches a single event. Returns false if the queue is empty.
    bool run_one();

    SimTime now() const { return _now; }
    bool empty() const { return _heap.empty(); }
    size_t pending() const { return _heap.size(); }
    uint64_t dispatched() const { return _dispatched; }
    uint64_t global_seed() const { return _seed; }

    RngStream derive_rng(uint64_t entity_id, uint64_t purpose_tag) const {
        return RngStream(_seed, entity_id, purpose_tag);
    }

private:
    struct Item {
        SimTime at;
        uint64_t seq;
        EventSource* target;
        uint64_t tag;
        bool operator<(const Item& o) const {
            // std::push_heap builds a max-heap; invert for earliest-first
            if (at != o.at)
                return at > o.at;
            return seq > o.seq;
        }
    };

    std::vector<Item> _heap;
    SimTime _now = 0;
    uint64_t _next_seq = 0;
    uint64_t _dispatched = 0;
    uint64_t _seed;
};

} // namespace spraysim
