#include "spraysim/balancer.hpp"

#include <cassert>
#include <stdexcept>

namespace spraysim {

BalancerKind balancer_from_name(const std::string& name) {
    if (name == "prime")
        return BalancerKind::kPrime;
    if (name == "co_prime")
        return BalancerKind::kCoPrime;
    if (name == "reps")
        return BalancerKind::kReps;
    if (name == "rps")
        return BalancerKind::kRps;
    if (name == "ecmp")
        return BalancerKind::kEcmp;
    if (name == "ar")
        return BalancerKind::kAr;
    throw std::invalid_argument("unknown balancer: " + name);
}

const char* balancer_name(BalancerKind kind) {
    switch (kind) {
    case BalancerKind::kPrime: return "prime";
    case BalancerKind::kCoPrime: return "co_prime";
    case BalancerKind::kReps: return "reps";
    case BalancerKind::kRps: return "rps";
    case BalancerKind::kEcmp: return "ecmp";
    case BalancerKind::kAr: return "ar";
    }
    return "?";
}

namespace {

class NullBalancer : public Balancer {
public:
    MpEv select(bool) override { return MpEv{}; }
};

class PrimeBalancer : public Balancer {
public:
    PrimeBalancer(BalancerEnv env, bool aware) : _env(std::move(env)), _aware(aware) {
        assert(_env.shared_gen);
        _limit = _env.steady_draw_limit > 0 ? _env.steady_draw_limit
                                            : (int)_env.shared_gen->space_size();
        if (_aware)
            assert(_env.history);
    }

    MpEv select(bool explore) override {
        EvGenerator& gen = *_env.shared_gen;
        if (!_aware || explore)
            return gen.next();
        MpEv ev = gen.next();
        if (_env.history->is_clear(index_of(ev))) {
            _env.history->decay();
            return ev;
        }
        _drawn.clear();
        _drawn.push_back(index_of(ev));
        for (int i = 1; i < _limit; ++i) {
            ev = gen.next();
            uint32_t idx = index_of(ev);
            if (_env.history->is_clear(idx)) {
                _env.history->decay();
                return ev;
            }
            _drawn.push_back(idx);
        }
        // every draw penalized: fall back to the least-bad one
        uint32_t idx = _env.history->least_penalized(_drawn);
        _env.history->decay();
        return _env.route_layout.from_path_index(idx);
    }

    void on_ack(uint16_t echoed_ev, bool ecn) override {
        if (_aware && ecn)
            _env.history->on_ecn(index_of_field(echoed_ev));
    }

    void on_nack(uint16_t echoed_ev) override {
        if (_aware)
            _env.history->on_nack(index_of_field(echoed_ev));
    }

private:
    uint32_t index_of(const MpEv& ev) const { return _env.route_layout.path_index(ev); }
    uint32_t index_of_field(uint16_t field) const {
        return index_of(_env.route_layout.decode(field));
    }

    BalancerEnv _env;
    bool _aware;
    int _limit;
    std::vector<uint32_t> _drawn;
};

class RepsBalancer : public Balancer {
public:
    explicit RepsBalancer(BalancerEnv env) : _env(std::move(env)) {
        _salt = RngStream::mix(_env.global_seed ^ (0x9e3779b97f4a7c15ull * (_env.flow_id + 1)));
    }

    MpEv select(bool) override {
        if (!_recycle.empty()) {
            uint16_t field = _recycle.front();
            _recycle.pop_front();
            return _env.route_layout.decode(field);
        }
        // fresh entropy: hash of (flow, packet counter), mapped per part
        uint64_t h = RngStream::mix(_salt + _counter++);
        MpEv ev;
        ev.nparts = (uint8_t)_env.candidates.size();
        for (size_t i = 0; i < _env.candidates.size(); ++i) {
            const auto& c = _env.candidates[i];
            ev.part[i] = c[(h >> (16 * i)) % c.size()];
        }
        return ev;
    }

    void on_ack(uint16_t echoed_ev, bool ecn) override {
        if (ecn)
            return;  // only positive feedback recycles a path
        if (_recycle.size() >= _env.recycle_bound)
            _recycle.pop_front();
        _recycle.push_back(echoed_ev);
    }

    void on_nack(uint16_t) override {}

private:
    BalancerEnv _env;
    uint64_t _salt;
    uint64_t _counter = 0;
    std::deque<uint16_t> _recycle;
};

class RpsBalancer : public Balancer {
public:
    explicit RpsBalancer(BalancerEnv env) : _env(std::move(env)) {}

    MpEv select(bool) override {
        MpEv ev;
        ev.nparts = (uint8_t)_env.candidates.size();
        for (size_t i = 0; i < _env.candidates.size(); ++i) {
            const auto& c = _env.candidates[i];
            ev.part[i] = c[_env.rng.below(c.size())];
        }
        return ev;
    }

protected:
    BalancerEnv _env;
};

class EcmpBalancer : public Balancer {
public:
    explicit EcmpBalancer(BalancerEnv env) {
        uint64_t h = RngStream::mix(env.global_seed ^ (0xbf58476d1ce4e5b9ull * (env.flow_id + 1)));
        _pinned.nparts = (uint8_t)env.candidates.size();
        for (size_t i = 0; i < env.candidates.size(); ++i) {
            const auto& c = env.candidates[i];
            _pinned.part[i] = c[(h >> (16 * i)) % c.size()];
        }
    }

    MpEv select(bool) override { return _pinned; }

private:
    MpEv _pinned;
};

} // namespace

std::unique_ptr<Balancer> make_balancer(BalancerKind kind, BalancerEnv env) {
    if (env.candidates.empty())
        return std::make_unique<NullBalancer>();  // same-leaf route
    switch (kind) {
    case BalancerKind::kPrime:
        return std::make_unique<PrimeBalancer>(std::move(env), true);
    case BalancerKind::kCoPrime:
        return std::make_unique<PrimeBalancer>(std::move(env), false);
    case BalancerKind::kReps:
        return std::make_unique<RepsBalancer>(std::move(env));
    case BalancerKind::kRps:
    case BalancerKind::kAr:  // host stamps random; switches override upward
        return std::make_unique<RpsBalancer>(std::move(env));
    case BalancerKind::kEcmp:
        return std::make_unique<EcmpBalancer>(std::move(env));
    }
    throw std::invalid_argument("unhandled balancer kind");
}

} // namespace spraysim
