#pragma once
#include "spraysim/host.hpp"
#include "spraysim/net.hpp"
#include "spraysim/switch.hpp"

#include <memory>
#include <vector>

namespace spraysim {

// Constants the transport and fabric hang off the topology: worst-case rtt,
// the bandwidth-delay product at that rtt, and the queue thresholds.
struct DerivedParams {
    SimTime rtt = 0;
    uint64_t bdp_bytes = 0;
    uint32_t bdp_pkts = 0;
    uint64_t window_bytes = 0;
    uint32_t explore_pkts = 0;
    SimTime rto = 0;
    uint64_t trim_bytes = 0;
    uint64_t control_cap_bytes = 0;
    uint64_t kmin_bytes = 0;
    uint64_t kmax_bytes = 0;
};

DerivedParams derive_params(const Topology& topo, SimTime flush_timeout = from_us(50));

// lower bound on one transfer: line-rate serialization, wire delays, and
// store-and-forward of one mtu per intermediate switch
SimTime ideal_fct(uint64_t bytes, const Topology::PathProfile& pp, uint64_t bps);

struct NetworkConfig {
    BalancerKind balancer = BalancerKind::kPrime;
    SchedPolicy policy = SchedPolicy::kFifo;
    int wrr_ecmp_percent = 50;
    uint64_t window_bytes = 0;  // 0 = derive
    uint32_t explore_pkts = 0;  // 0 = derive
    uint32_t coalesce_n = 4;
    SimTime flush_timeout = from_us(50);
    int k_bits = 8;
    uint32_t p_ecn = 0;   // 0 = derive
    uint32_t p_nack = 0;  // 0 = derive
    uint32_t decay_step = 1;
    int steady_draw_limit = 0;
    bool randomized_advance = false;
    // when false, hosts keep failed uplinks in their sprayed space and only
    // switch folds plus per-path feedback move load off them
    bool oracle_notify = true;
    // coalesced ACKs echo every (EV, mark) pair instead of last-EV + OR
    bool echo_all = false;
};

// The assembled fabric: an egress port and a pipe per directed link, a
// forwarding node per switch, a transport endpoint per host. Impairments
// must be applied to the topology before construction so hosts see the
// post-impairment path sets.
class Network {
public:
    Network(uint64_t seed, Topology topo, const NetworkConfig& cfg, int max_flows);

    Engine& engine() { return _eng; }
    const Topology& topology() const { return _topo; }
    Metrics& metrics() { return *_metrics; }
    HostNode& host(int h) { return *_hosts[h]; }
    SwitchNode& switch_node(int s) { return *_switches[s]; }
    EgressPort& port(int link) { return *_ports[link]; }
    const DerivedParams& params() const { return _params; }
    const NetworkConfig& config() const { return _cfg; }

    // registers both endpoints and the flow record
    void add_flow(uint32_t flow_id, int src, int dst, uint64_t bytes, SimTime start,
                  BalancerKind kind, uint8_t cls);
    void add_flow(uint32_t flow_id, int src, int dst, uint64_t bytes, SimTime start) {
        add_flow(flow_id, src, dst, bytes, start, _cfg.balancer, kClassSprayed);
    }

    bool all_done() const;
    uint64_t total_ev_remaps() const;

private:
    Engine _eng;
    Topology _topo;
    NetworkConfig _cfg;
    DerivedParams _params;
    HostConfig _host_cfg;
    std::unique_ptr<Metrics> _metrics;
    std::vector<std::unique_ptr<Pipe>> _pipes;
    std::vector<std::unique_ptr<EgressPort>> _ports;
    std::vector<std::unique_ptr<SwitchNode>> _switches;
    std::vector<std::unique_ptr<HostNode>> _hosts;
};

// Records per-class depth of every switch egress link on a fixed cadence;
// zero-depth rows are skipped.
class QueueSampler : public EventSource {
public:
    QueueSampler(Engine& eng, const Topology& topo, Metrics& metrics, SimTime interval);
    void on_event(SimTime now, uint64_t tag) override;

private:
    Engine& _eng;
    Metrics& _metrics;
    SimTime _interval;
    std::vector<int> _links;
};

} // namespace spraysim
