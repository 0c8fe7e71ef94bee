#pragma once
#include "spraysim/net.hpp"
#include "spraysim/topology.hpp"

#include <vector>

namespace spraysim {

// Forwarding logic of one switch. Downward routes are deterministic; upward
// forwarding reads this tier's MP-EV slice, or in AR mode picks the emptiest
// live uplink locally. Queueing itself lives in the per-port EgressPort.
class SwitchNode : public PacketSink {
public:
    SwitchNode(Engine& eng, const Topology& topo, int sw_idx,
               std::vector<EgressPort*> port_by_link, bool ar_mode, Metrics* metrics);

    void receive(Packet pkt, int via_link) override;

    // exposed for tests
    int pick_egress(const Packet& pkt);
    uint64_t ev_remaps() const { return _ev_remaps; }

private:
    int up_port_by_ev(uint16_t field, int dst);
    int up_port_adaptive();
    void refresh_live();

    Engine& _eng;
    const Topology& _topo;
    int _idx;
    std::vector<EgressPort*> _ports;  // indexed by link id
    bool _ar_mode;
    Metrics* _metrics;
    RngStream _tie_rng;
    int _ev_part;  // which MP-EV slice this tier consumes

    std::vector<uint8_t> _live;  // live nominal uplink indices
    uint64_t _live_epoch = (uint64_t)-1;
    uint64_t _ev_remaps = 0;
};

} // namespace spraysim
