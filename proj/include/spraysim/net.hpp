#pragma once
#include "spraysim/engine.hpp"
#include "spraysim/metrics.hpp"
#include "spraysim/packet.hpp"
#include "spraysim/rng.hpp"
#include "spraysim/topology.hpp"

#include <deque>

namespace spraysim {

class PacketSink {
public:
    virtual ~PacketSink() = default;
    virtual void receive(Packet pkt, int via_link) = 0;
};

// Propagation stage of one directed link. All packets on a link share one
// delay, so arrival order equals injection order and a single deque suffices.
class Pipe : public EventSource {
public:
    Pipe(Engine& eng, const Topology& topo, int link_id, PacketSink* sink)
        : _eng(eng), _topo(topo), _link(link_id), _sink(sink) {}

    // assembly runs in passes: pipes first, endpoints later
    void set_sink(PacketSink* sink) { _sink = sink; }

    void inject(Packet pkt);
    void on_event(SimTime now, uint64_t tag) override;

private:
    Engine& _eng;
    const Topology& _topo;
    int _link;
    PacketSink* _sink;
    std::deque<Packet> _inflight;
};

enum class SchedPolicy : uint8_t { kFifo, kSp, kWrr };

struct PortConfig {
    uint64_t trim_threshold_bytes = 0;  // 0 disables trimming (host NICs)
    uint64_t control_cap_bytes = 0;     // 0 = uncapped
    uint64_t kmin_bytes = 0;            // RED thresholds; kmax 0 disables marking
    uint64_t kmax_bytes = 0;
    SchedPolicy policy = SchedPolicy::kFifo;
    int wrr_ecmp_percent = 50;
};

// Serialization stage of one directed link: per-class FIFOs, trim-instead-of-
// drop for data, RED marking at dequeue, control strictly first. One packet
// is in service at a time; its bytes are not counted in any queue.
class EgressPort : public EventSource {
public:
    EgressPort(Engine& eng, const Topology& topo, int link_id, Pipe* out,
               const PortConfig& cfg, Metrics* metrics);

    void enqueue(Packet pkt, SimTime now);
    void on_event(SimTime now, uint64_t tag) override;

    uint64_t queued_data_bytes() const { return _qbytes[kClassSprayed] + _qbytes[kClassEcmp]; }
    uint64_t queued_bytes(int cls) const { return _qbytes[cls]; }
    uint32_t queued_pkts(int cls) const { return _qpkts[cls]; }
    bool busy() const { return _busy; }

private:
    int pick_class();
    int pick_wrr();
    void start_service(SimTime now);
    void account(int cls, int dpkts, int64_t dbytes, SimTime now);

    Engine& _eng;
    const Topology& _topo;
    int _link;
    Pipe* _out;
    PortConfig _cfg;
    Metrics* _metrics;
    RngStream _red_rng;

    std::deque<Packet> _q[kClassCount];
    uint64_t _qbytes[kClassCount] = {0, 0, 0};
    uint32_t _qpkts[kClassCount] = {0, 0, 0};
    bool _busy = false;
    Packet _in_service;

    // deficit round-robin between the two data classes
    int64_t _deficit[2] = {0, 0};
    int64_t _quantum[2] = {0, 0};
    int _wrr_cur = 0;      // 0 = sprayed, 1 = ecmp
    bool _fresh_turn = true;
};

} // namespace spraysim
