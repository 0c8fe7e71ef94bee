#include "spraysim/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

namespace spraysim {

void Engine::schedule(SimTime fire_at, EventSource* target, uint64_t tag) {
    if (fire_at < _now) {
        // contract violation: the past is immutable
        std::fprintf(stderr, "engine: schedule at t=%lld before now=%lld\n",
                     (long long)fire_at, (long long)_now);
        std::abort();
    }
    _heap.push_back(Item{fire_at, _next_seq++, target, tag});
    std::push_heap(_heap.begin(), _heap.end());
}

bool Engine::run_one() {
    if (_heap.empty())
        return false;
    std::pop_heap(_heap.begin(), _heap.end());
    Item it = _heap.back();
    _heap.pop_back();
    _now = it.at;
    ++_dispatched;
    it.target->on_event(_now, it.tag);
    return true;
}

SimTime Engine::run_until(SimTime deadline) {
    while (!_heap.empty() && _heap.front().at <= deadline)
        run_one();
    if (_heap.empty())
        return _now;
    _now = deadline;
    return _now;
}

} // namespace spraysim
