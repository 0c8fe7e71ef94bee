#pragma once
#include "spraysim/sim.hpp"
#include "spraysim/topology.hpp"

#include <string>
#include <vector>

namespace spraysim {

enum class TrafficPattern : uint8_t { kPermutation, kSingle, kLeafPair, kMixed };

const char* pattern_name(TrafficPattern p);

struct ImpairmentSpec {
    int fail_uplinks = 0;           // random fabric links, seeded selection
    bool oracle_notify = true;      // false: balancers must learn failures from feedback
    double degrade_fraction = 0.0;  // random fabric links served at to_bps
    uint64_t degrade_to_bps = 0;
    int leaf = -1;  // named single-uplink degradation (leaf-pair fixture)
    int uplink = -1;
    double d = 0.0;  // service cut: serve_fraction = 1 - d
};

struct Scenario {
    int version = 1;
    std::string name;
    Topology::Params topo;
    TrafficPattern pattern = TrafficPattern::kPermutation;
    uint64_t flow_bytes = 8ull << 20;
    int n_flows = 0;             // leaf-pair (18) and mixed (1024) defaults applied
    double ecmp_fraction = 0.0;  // mixed
    ImpairmentSpec impair;
    NetworkConfig net;  // balancer, scheduler, transport knobs
    SimTime sample_interval = from_us(10);
    bool record_port_flow_bytes = false;
    SimTime sim_deadline = 0;  // 0 = run until all flows finish
};

struct FlowSpec {
    uint32_t id;
    int src;
    int dst;
    uint64_t bytes;
    SimTime start;
    BalancerKind kind;
    uint8_t cls;
};

// Parse / serialize the versioned JSON schema. Parse errors and validation
// violations throw std::invalid_argument naming the offending field.
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& s);
void validate_scenario(const Scenario& s);

// Seeded and pure: same (scenario, seed) always yields the same flows and
// the same impaired links.
std::vector<FlowSpec> build_flows(const Scenario& s, const Topology& topo, uint64_t seed);
void apply_impairments(Topology& topo, const ImpairmentSpec& spec, uint64_t seed);

} // namespace spraysim
