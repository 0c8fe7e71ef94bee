#pragma once
#include "spraysim/balancer.hpp"
#include "spraysim/congestion_history.hpp"
#include "spraysim/engine.hpp"
#include "spraysim/entropy.hpp"
#include "spraysim/metrics.hpp"
#include "spraysim/net.hpp"
#include "spraysim/topology.hpp"

#include <map>
#include <memory>
#include <vector>

namespace spraysim {

struct HostConfig {
    uint64_t window_bytes = 0;  // fixed per-flow cap on bytes in flight
    uint64_t bdp_bytes = 0;
    uint32_t explore_pkts = 1;  // sends before congestion history kicks in
    uint32_t coalesce_n = 4;
    SimTime flush_timeout = from_us(50);
    SimTime rto = 0;
    int k_bits = 8;
    uint32_t p_ecn = 0;   // 0 = derive from bdp and the route's path count
    uint32_t p_nack = 0;  // 0 = derive from bdp
    uint32_t decay_step = 1;
    int steady_draw_limit = 0;  // 0 = live path count per route
    bool randomized_advance = false;
    bool oracle_notify = true;  // false: failed uplinks stay in the sprayed space
    bool echo_all = false;      // ACKs echo every coalesced (EV, mark) pair
    BalancerKind kind = BalancerKind::kPrime;
};

// One end host: NIC-attached sender flows and receiver-side reassembly plus
// feedback generation. Sender windows are ACK/NACK-clocked with an RTO
// backstop; receivers coalesce ACKs and NACK trimmed packets immediately.
class HostNode : public EventSource, public PacketSink {
public:
    HostNode(Engine& eng, const Topology& topo, int host, EgressPort* nic,
             const HostConfig& cfg, Metrics& metrics);

    // src of the flow must be this host; start is scheduled on the engine
    void add_tx_flow(uint32_t flow_id, int dst, uint64_t bytes, SimTime start,
                     BalancerKind kind, uint8_t cls);
    void add_rx_flow(uint32_t flow_id, int src, uint64_t bytes);

    void receive(Packet pkt, int via_link) override;
    void on_event(SimTime now, uint64_t tag) override;

    // introspection for tests
    const CongestionHistory* history(int nparts) const;
    uint64_t steady_decays(int nparts) const;
    bool all_tx_done() const;
    uint64_t acks_rx() const { return _acks_rx; }

private:
    enum class SeqState : uint8_t { kUnsent, kInFlight, kRtxPending, kAcked };

    struct FlowTx {
        uint32_t id = 0;
        int32_t dst = -1;
        uint64_t total_bytes = 0;
        uint64_t n_pkts = 0;
        uint64_t next_new = 0;  // lowest never-sent seq
        uint64_t cum_ack = 0;
        uint64_t sent_data = 0;
        uint64_t in_flight = 0;  // bytes
        std::vector<SeqState> st;
        std::vector<uint64_t> rtx;  // seqs pending retransmit, FIFO
        std::unique_ptr<Balancer> balancer;
        uint8_t cls = kClassSprayed;
        bool started = false;
        bool done = false;
        SimTime last_progress = 0;
        SimTime rto_at = kNoTime;
    };

    struct FlowRx {
        uint32_t id = 0;
        int32_t src = -1;
        uint64_t total_bytes = 0;
        uint64_t n_pkts = 0;
        std::vector<bool> got;
        uint64_t distinct = 0;
        uint64_t cum = 0;
        uint32_t batch_pkts = 0;
        uint32_t batch_bytes = 0;
        uint16_t last_ev = 0;
        bool batch_ecn = false;
        uint8_t echo_n = 0;  // per-receipt echo staging (echo_all mode)
        std::array<uint16_t, kMaxEcho> echo_ev{};
        std::array<uint8_t, kMaxEcho> echo_ecn{};
        SimTime flush_at = kNoTime;
        bool finished = false;
    };

    uint32_t pkt_size(const FlowTx& f, uint64_t seq) const {
        return seq + 1 == f.n_pkts ? (uint32_t)(f.total_bytes - (f.n_pkts - 1) * kMtuBytes)
                                   : kMtuBytes;
    }

    void try_send(FlowTx& f, SimTime now);
    void send_data(FlowTx& f, uint64_t seq, bool is_rtx, SimTime now);
    void on_feedback(Packet& pkt, SimTime now);
    void on_data(Packet& pkt, SimTime now);
    void emit_ack(FlowRx& r, SimTime now);
    void arm_rto(FlowTx& f, SimTime now);
    EvGenerator& generator_for(int dst_leaf);
    CongestionHistory* history_for(int nparts);

    Engine& _eng;
    const Topology& _topo;
    int _host;
    EgressPort* _nic;
    HostConfig _cfg;
    Metrics& _metrics;

    std::vector<FlowTx> _tx;
    std::vector<FlowRx> _rx;
    std::map<uint32_t, int> _tx_by_id;
    std::map<uint32_t, int> _rx_by_id;
    std::map<int, EvGenerator> _gen;               // keyed by dst leaf
    std::unique_ptr<CongestionHistory> _hist[2];   // keyed by route part count - 1
    uint64_t _unknown_feedback = 0;
    uint64_t _acks_rx = 0;
};

} // namespace spraysim
