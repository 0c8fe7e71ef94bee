#include "spraysim/switch.hpp"

#include <cassert>

namespace spraysim {

SwitchNode::SwitchNode(Engine& eng, const Topology& topo, int sw_idx,
                       std::vector<EgressPort*> port_by_link, bool ar_mode, Metrics* metrics)
    : _eng(eng),
      _topo(topo),
      _idx(sw_idx),
      _ports(std::move(port_by_link)),
      _ar_mode(ar_mode),
      _metrics(metrics),
      _tie_rng(eng.derive_rng((uint64_t)sw_idx, kRngArTieBreak)),
      _ev_part(topo.sw(sw_idx).tier - 1) {}

void SwitchNode::refresh_live() {
    if (_live_epoch == _topo.impairment_epoch())
        return;
    _live.clear();
    const SwitchSpec& s = _topo.sw(_idx);
    for (int v = 0; v < (int)s.uplink_port.size(); ++v) {
        if (_topo.link(_topo.uplink_link(_idx, v)).health != LinkHealth::Failed)
            _live.push_back((uint8_t)v);
    }
    _live_epoch = _topo.impairment_epoch();
}

int SwitchNode::up_port_by_ev(uint16_t field, int dst) {
    const SwitchSpec& s = _topo.sw(_idx);
    int v = _topo.ev_layout().slice(field, _ev_part);
    if (v >= (int)s.uplink_port.size() ||
        _topo.link(_topo.uplink_link(_idx, v)).health == LinkHealth::Failed) {
        // EV names a dead port: fold it onto a surviving uplink that can
        // still deliver, so every fold stays deterministic and loss-free
        refresh_live();
        assert(!_live.empty());
        std::vector<uint8_t> ok;
        for (uint8_t w : _live)
            if (_topo.up_value_viable(_idx, w, dst))
                ok.push_back(w);
        const std::vector<uint8_t>& pool = ok.empty() ? _live : ok;
        v = pool[v % pool.size()];
        ++_ev_remaps;
        if (_metrics)
            _metrics->count_ev_remap();
    }
    return s.uplink_port[v];
}

int SwitchNode::up_port_adaptive() {
    refresh_live();
    assert(!_live.empty());
    uint64_t best = UINT64_MAX;
    int n_best = 0;
    uint8_t pick = _live[0];
    for (uint8_t v : _live) {
        uint64_t occ = _ports[_topo.uplink_link(_idx, v)]->queued_data_bytes();
        if (occ < best) {
            best = occ;
            n_best = 1;
            pick = v;
        } else if (occ == best) {
            // reservoir draw keeps ties uniform without a candidate list
            ++n_best;
            if (_tie_rng.below((uint64_t)n_best) == 0)
                pick = v;
        }
    }
    return _topo.sw(_idx).uplink_port[pick];
}

int SwitchNode::pick_egress(const Packet& pkt) {
    int down = _topo.route_down(_idx, pkt.dst);
    if (down >= 0)
        return down;
    if (_ar_mode && pkt.type == PktType::kData && !pkt.trimmed)
        return up_port_adaptive();
    return up_port_by_ev(pkt.ev, pkt.dst);
}

void SwitchNode::receive(Packet pkt, int) {
    int port = pick_egress(pkt);
    int link = _topo.sw(_idx).port_link[port];
    _ports[link]->enqueue(pkt, _eng.now());
}

} // namespace spraysim
