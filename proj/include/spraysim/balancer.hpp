#pragma once
#include "spraysim/congestion_history.hpp"
#include "spraysim/entropy.hpp"
#include "spraysim/rng.hpp"

#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <vector>

namespace spraysim {

enum class BalancerKind : uint8_t { kPrime, kCoPrime, kReps, kRps, kEcmp, kAr };

BalancerKind balancer_from_name(const std::string& name);  // throws std::invalid_argument
const char* balancer_name(BalancerKind kind);

// Everything a per-flow selector may need. Generators and history are owned
// by the host (shared across its flows); the rest is per flow.
struct BalancerEnv {
    EvLayout route_layout;  // layout over this route's parts only
    std::vector<std::vector<uint8_t>> candidates;
    EvGenerator* shared_gen = nullptr;     // PRIME / CO-PRIME
    CongestionHistory* history = nullptr;  // PRIME
    int steady_draw_limit = 0;             // 0 = live path count
    uint32_t flow_id = 0;
    uint64_t global_seed = 0;
    uint32_t recycle_bound = 1;  // REPS, window in packets
    RngStream rng;               // RPS / AR stamping
};

// Per-flow path selection policy. select() runs once per DATA send;
// feedback hooks run once per ACK/NACK received.
class Balancer {
public:
    virtual ~Balancer() = default;
    virtual MpEv select(bool explore) = 0;
    virtual void on_ack(uint16_t echoed_ev, bool ecn) { (void)echoed_ev, (void)ecn; }
    virtual void on_nack(uint16_t echoed_ev) { (void)echoed_ev; }
};

// kind + env -> concrete balancer; same-leaf flows (no candidates) get a
// null balancer stamping EV 0
std::unique_ptr<Balancer> make_balancer(BalancerKind kind, BalancerEnv env);

} // namespace spraysim
