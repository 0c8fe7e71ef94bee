#include "spraysim/sim.hpp"

namespace spraysim {

DerivedParams derive_params(const Topology& topo, SimTime flush_timeout) {
    DerivedParams d;
    uint64_t bps = topo.bandwidth_bps();
    Topology::PathProfile lp = topo.longest_path_profile();
    // forward data and reverse control each serialize once per hop
    d.rtt = 2 * lp.delay_sum +
            lp.links_oneway * (serialization_ps(kMtuBytes, bps) +
                               serialization_ps(kControlBytes, bps));
    d.bdp_bytes = (uint64_t)((__int128)bps * d.rtt / (8 * (__int128)1'000'000'000'000ll));
    d.bdp_pkts = (uint32_t)((d.bdp_bytes + kMtuBytes - 1) / kMtuBytes);
    // slack beyond one bdp keeps the pipe full across ack coalescing gaps
    d.window_bytes = d.bdp_bytes + 4 * kMtuBytes;
    d.explore_pkts = d.bdp_pkts;
    SimTime lazy_ack = flush_timeout + 2 * d.rtt;
    d.rto = 3 * d.rtt > lazy_ack ? 3 * d.rtt : lazy_ack;
    d.trim_bytes = d.bdp_bytes;
    d.control_cap_bytes = 2 * d.bdp_bytes;
    d.kmin_bytes = d.bdp_bytes / 4;
    d.kmax_bytes = 3 * d.bdp_bytes / 4;
    return d;
}

SimTime ideal_fct(uint64_t bytes, const Topology::PathProfile& pp, uint64_t bps) {
    return serialization_ps(bytes, bps) + pp.delay_sum +
           (SimTime)pp.intermediate_switches * serialization_ps(kMtuBytes, bps);
}

Network::Network(uint64_t seed, Topology topo, const NetworkConfig& cfg, int max_flows)
    : _eng(seed), _topo(std::move(topo)), _cfg(cfg) {
    _params = derive_params(_topo, cfg.flush_timeout);
    _metrics = std::make_unique<Metrics>(_topo.n_links(), max_flows);

    _host_cfg.window_bytes = cfg.window_bytes ? cfg.window_bytes : _params.window_bytes;
    _host_cfg.bdp_bytes = _params.bdp_bytes;
    _host_cfg.explore_pkts = cfg.explore_pkts ? cfg.explore_pkts : _params.explore_pkts;
    _host_cfg.coalesce_n = cfg.coalesce_n;
    _host_cfg.flush_timeout = cfg.flush_timeout;
    _host_cfg.rto = _params.rto;
    _host_cfg.k_bits = cfg.k_bits;
    _host_cfg.p_ecn = cfg.p_ecn;
    _host_cfg.p_nack = cfg.p_nack;
    _host_cfg.decay_step = cfg.decay_step;
    _host_cfg.steady_draw_limit = cfg.steady_draw_limit;
    _host_cfg.randomized_advance = cfg.randomized_advance;
    _host_cfg.oracle_notify = cfg.oracle_notify;
    _host_cfg.echo_all = cfg.echo_all;
    _host_cfg.kind = cfg.balancer;

    PortConfig fabric;
    fabric.trim_threshold_bytes = _params.trim_bytes;
    fabric.control_cap_bytes = _params.control_cap_bytes;
    fabric.kmin_bytes = _params.kmin_bytes;
    fabric.kmax_bytes = _params.kmax_bytes;
    fabric.policy = cfg.policy;
    fabric.wrr_ecmp_percent = cfg.wrr_ecmp_percent;
    PortConfig nic;  // no trim, no marking; the window bounds nic backlog

    int n_links = _topo.n_links();
    _pipes.reserve(n_links);
    _ports.reserve(n_links);
    for (int l = 0; l < n_links; ++l)
        _pipes.push_back(std::make_unique<Pipe>(_eng, _topo, l, nullptr));
    for (int l = 0; l < n_links; ++l) {
        const PortConfig& pc = _topo.link(l).from_is_host ? nic : fabric;
        _ports.push_back(
            std::make_unique<EgressPort>(_eng, _topo, l, _pipes[l].get(), pc, _metrics.get()));
    }

    bool ar = cfg.balancer == BalancerKind::kAr;
    for (int s = 0; s < _topo.n_switches(); ++s) {
        std::vector<EgressPort*> by_link(n_links, nullptr);
        for (int32_t l : _topo.sw(s).port_link)
            by_link[l] = _ports[l].get();
        _switches.push_back(
            std::make_unique<SwitchNode>(_eng, _topo, s, std::move(by_link), ar, _metrics.get()));
    }
    for (int h = 0; h < _topo.n_hosts(); ++h)
        _hosts.push_back(std::make_unique<HostNode>(
            _eng, _topo, h, _ports[_topo.host_access_link(h)].get(), _host_cfg, *_metrics));

    for (int l = 0; l < n_links; ++l) {
        const Link& lk = _topo.link(l);
        _pipes[l]->set_sink(lk.to_is_host ? (PacketSink*)_hosts[lk.to].get()
                                          : (PacketSink*)_switches[lk.to].get());
    }
}

void Network::add_flow(uint32_t flow_id, int src, int dst, uint64_t bytes, SimTime start,
                       BalancerKind kind, uint8_t cls) {
    FlowRecord& r = _metrics->rec(flow_id);
    r.flow = flow_id;
    r.cls = cls;
    r.src = src;
    r.dst = dst;
    r.bytes = bytes;
    r.ideal_fct = ideal_fct(bytes, _topo.path_profile(src, dst), _topo.bandwidth_bps());
    _hosts[src]->add_tx_flow(flow_id, dst, bytes, start, kind, cls);
    _hosts[dst]->add_rx_flow(flow_id, src, bytes);
}

bool Network::all_done() const {
    for (const auto& h : _hosts)
        if (!h->all_tx_done())
            return false;
    return true;
}

uint64_t Network::total_ev_remaps() const {
    uint64_t n = 0;
    for (const auto& s : _switches)
        n += s->ev_remaps();
    return n;
}

QueueSampler::QueueSampler(Engine& eng, const Topology& topo, Metrics& metrics,
                           SimTime interval)
    : _eng(eng), _metrics(metrics), _interval(interval) {
    for (int l = 0; l < topo.n_links(); ++l)
        if (!topo.link(l).from_is_host)
            _links.push_back(l);
    _eng.schedule(_interval, this);
}

void QueueSampler::on_event(SimTime now, uint64_t) {
    for (int l : _links) {
        for (int cls = 0; cls < kClassCount; ++cls) {
            uint32_t pkts = _metrics.depth_pkts(l, cls);
            if (pkts == 0)
                continue;
            _metrics.add_sample({now, l, (uint8_t)cls, pkts, _metrics.depth_bytes(l, cls)});
        }
    }
    _eng.schedule(now + _interval, this);
}

} // namespace spraysim
