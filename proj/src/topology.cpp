#include "spraysim/topology.hpp"

#include <cassert>
#include <stdexcept>

namespace spraysim {

int Topology::add_link(bool fh, int from, int fport, bool th, int to) {
    Link l;
    l.id = (int)_links.size();
    l.from_is_host = fh;
    l.from = from;
    l.from_port = (int16_t)fport;
    l.to_is_host = th;
    l.to = to;
    l.nominal_bps = _params.bandwidth_bps;
    l.effective_bps = _params.bandwidth_bps;
    l.delay = _params.link_delay;
    _links.push_back(l);
    if (!fh)
        _switches[from].port_link[fport] = l.id;
    return l.id;
}

void Topology::pair_twins(int a, int b) {
    _links[a].twin = b;
    _links[b].twin = a;
}

Topology Topology::build(const Params& p) {
    Topology t;
    t._params = p;
    t._tiers = p.tiers;
    t._n_hosts = p.hosts;
    if (p.hosts < 2)
        throw std::invalid_argument("topology: need at least 2 hosts");
    if (p.bandwidth_bps == 0)
        throw std::invalid_argument("topology: bandwidth must be positive");
    if (p.tiers == 2) {
        if (p.override_leaves > 0 || p.override_spines > 0) {
            if (p.override_leaves <= 0 || p.override_spines <= 0)
                throw std::invalid_argument("topology: override needs both leaves and spines");
            t.build_2tier_custom();
        } else {
            t.build_2tier_regular();
        }
    } else if (p.tiers == 3) {
        if (p.override_leaves > 0 || p.override_spines > 0)
            throw std::invalid_argument("topology: shape override is 2-tier only");
        t.build_3tier();
    } else {
        throw std::invalid_argument("topology: tiers must be 2 or 3");
    }
    return t;
}

void Topology::build_2tier_regular() {
    const Params& p = _params;
    if (p.switch_ports < 2 || p.switch_ports % 2 != 0)
        throw std::invalid_argument("topology: switch_ports must be even and >= 2");
    int half = p.switch_ports / 2;
    int hpl = half * p.oversubscription;  // hosts per leaf
    if (p.hosts % hpl != 0)
        throw std::invalid_argument("topology: hosts must divide evenly across leaves");
    int leaves = p.hosts / hpl;
    int spines = half;
    if (leaves < 2)
        throw std::invalid_argument("topology: need at least 2 leaves");
    if (leaves > p.switch_ports)
        throw std::invalid_argument("topology: spine radix exceeded (leaves > switch_ports)");

    _n_leaves = leaves;
    _switches.resize(leaves + spines);
    for (int l = 0; l < leaves; ++l) {
        _switches[l].tier = 1;
        _switches[l].n_down = hpl;
        _switches[l].port_link.assign(hpl + spines, -1);
        for (int v = 0; v < spines; ++v)
            _switches[l].uplink_port.push_back((int16_t)(hpl + v));
    }
    for (int s = 0; s < spines; ++s) {
        SwitchSpec& sp = _switches[leaves + s];
        sp.tier = 2;
        sp.n_down = leaves;
        sp.port_link.assign(leaves, -1);
    }

    _host_leaf.resize(p.hosts);
    _host_uplink.resize(p.hosts);
    for (int h = 0; h < p.hosts; ++h) {
        int l = h / hpl;
        _host_leaf[h] = l;
        int up = add_link(true, h, -1, false, l);
        int down = add_link(false, l, h % hpl, true, h);
        pair_twins(up, down);
        _host_uplink[h] = up;
    }
    for (int l = 0; l < leaves; ++l) {
        for (int v = 0; v < spines; ++v) {
            int up = add_link(false, l, hpl + v, false, leaves + v);
            int down = add_link(false, leaves + v, l, false, l);
            pair_twins(up, down);
        }
    }
    int counts[1] = {spines};
    _ev_layout = EvLayout::from_counts(counts);
}

void Topology::build_2tier_custom() {
    const Params& p = _params;
    int leaves = p.override_leaves;
    int spines = p.override_spines;
    if (leaves < 2)
        throw std::invalid_argument("topology: override needs >= 2 leaves");
    if (p.hosts < leaves)
        throw std::invalid_argument("topology: fewer hosts than leaves");

    _n_leaves = leaves;
    int base = p.hosts / leaves;
    int extra = p.hosts % leaves;

    _switches.resize(leaves + spines);
    _host_leaf.resize(p.hosts);
    _host_uplink.resize(p.hosts);

    int h = 0;
    for (int l = 0; l < leaves; ++l) {
        int n = base + (l < extra ? 1 : 0);
        SwitchSpec& sw = _switches[l];
        sw.tier = 1;
        sw.n_down = n;
        sw.port_link.assign(n + spines, -1);
        for (int v = 0; v < spines; ++v)
            sw.uplink_port.push_back((int16_t)(n + v));
        for (int i = 0; i < n; ++i, ++h) {
            _host_leaf[h] = l;
            int up = add_link(true, h, -1, false, l);
            int down = add_link(false, l, i, true, h);
            pair_twins(up, down);
            _host_uplink[h] = up;
        }
    }
    for (int s = 0; s < spines; ++s) {
        SwitchSpec& sp = _switches[leaves + s];
        sp.tier = 2;
        sp.n_down = leaves;
        sp.port_link.assign(leaves, -1);
    }
    for (int l = 0; l < leaves; ++l) {
        int ndown = _switches[l].n_down;
        for (int v = 0; v < spines; ++v) {
            int up = add_link(false, l, ndown + v, false, leaves + v);
            int down = add_link(false, leaves + v, l, false, l);
            pair_twins(up, down);
        }
    }
    int counts[1] = {spines};
    _ev_layout = EvLayout::from_counts(counts);
}

void Topology::build_3tier() {
    const Params& p = _params;
    int k = p.switch_ports;
    if (k < 4 || k % 2 != 0)
        throw std::invalid_argument("topology: 3-tier needs even switch_ports >= 4");
    int half = k / 2;
    if (p.hosts != k * k * k / 4)
        throw std::invalid_argument("topology: 3-tier hosts must equal switch_ports^3/4");
    if (p.oversubscription != 1)
        throw std::invalid_argument("topology: 3-tier builder is 1:1 only");

    _half = half;
    int pods = k;
    int edges = pods * half;   // tier 1
    int aggs = pods * half;    // tier 2
    int cores = half * half;   // tier 3
    _n_leaves = edges;

    _switches.resize(edges + aggs + cores);
    auto edge_idx = [&](int pod, int i) { return pod * half + i; };
    auto agg_idx = [&](int pod, int j) { return edges + pod * half + j; };
    auto core_idx = [&](int c) { return edges + aggs + c; };

    for (int pod = 0; pod < pods; ++pod) {
        for (int i = 0; i < half; ++i) {
            SwitchSpec& e = _switches[edge_idx(pod, i)];
            e.tier = 1;
            e.pod = pod;
            e.n_down = half;
            e.port_link.assign(k, -1);
            for (int v = 0; v < half; ++v)
                e.uplink_port.push_back((int16_t)(half + v));
        }
        for (int j = 0; j < half; ++j) {
            SwitchSpec& a = _switches[agg_idx(pod, j)];
            a.tier = 2;
            a.pod = pod;
            a.n_down = half;
            a.port_link.assign(k, -1);
            for (int v = 0; v < half; ++v)
                a.uplink_port.push_back((int16_t)(half + v));
        }
    }
    for (int c = 0; c < cores; ++c) {
        SwitchSpec& co = _switches[core_idx(c)];
        co.tier = 3;
        co.pod = c / half;  // core group = agg row it serves
        co.n_down = pods;
        co.port_link.assign(pods, -1);
    }

    _host_leaf.resize(p.hosts);
    _host_uplink.resize(p.hosts);
    for (int h = 0; h < p.hosts; ++h) {
        int pod = h / (half * half);
        int i = (h / half) % half;
        int e = edge_idx(pod, i);
        _host_leaf[h] = e;
        int up = add_link(true, h, -1, false, e);
        int down = add_link(false, e, h % half, true, h);
        pair_twins(up, down);
        _host_uplink[h] = up;
    }
    for (int pod = 0; pod < pods; ++pod) {
        for (int i = 0; i < half; ++i) {
            for (int v = 0; v < half; ++v) {
                int up = add_link(false, edge_idx(pod, i), half + v, false, agg_idx(pod, v));
                int down = add_link(false, agg_idx(pod, v), i, false, edge_idx(pod, i));
                pair_twins(up, down);
            }
        }
        for (int j = 0; j < half; ++j) {
            for (int v = 0; v < half; ++v) {
                int c = j * half + v;
                int up = add_link(false, agg_idx(pod, j), half + v, false, core_idx(c));
                int down = add_link(false, core_idx(c), pod, false, agg_idx(pod, j));
                pair_twins(up, down);
            }
        }
    }
    int counts[2] = {half, half};
    _ev_layout = EvLayout::from_counts(counts);
}

static bool usable(const Link& l) { return l.health != LinkHealth::Failed; }

std::vector<std::vector<uint8_t>> Topology::ev_candidates(int src_host, int dst_host,
                                                          bool stale_up) const {
    std::vector<std::vector<uint8_t>> cands;
    int se = _host_leaf[src_host];
    int de = _host_leaf[dst_host];
    if (se == de)
        return cands;

    if (_tiers == 2) {
        const SwitchSpec& leaf = _switches[se];
        std::vector<uint8_t> c0;
        for (int v = 0; v < (int)leaf.uplink_port.size(); ++v) {
            const Link& up = _links[leaf.port_link[leaf.uplink_port[v]]];
            if (!stale_up && !usable(up))
                continue;
            int spine = up.to;
            const Link& down = _links[_switches[spine].port_link[de]];
            if (usable(down))
                c0.push_back((uint8_t)v);
        }
        cands.push_back(std::move(c0));
        return cands;
    }

    // 3-tier
    int sp = _switches[se].pod;
    int dp = _switches[de].pod;
    const SwitchSpec& edge = _switches[se];
    int half = _half;
    int edges = n_leaves();
    auto agg_of = [&](int pod, int j) { return edges + pod * half + j; };

    if (sp == dp) {
        std::vector<uint8_t> c0;
        for (int v = 0; v < half; ++v) {
            const Link& up = _links[edge.port_link[edge.uplink_port[v]]];
            if (!stale_up && !usable(up))
                continue;
            const SwitchSpec& agg = _switches[agg_of(sp, v)];
            int de_local = de - sp * half;
            const Link& down = _links[agg.port_link[de_local]];
            if (usable(down))
                c0.push_back((uint8_t)v);
        }
        cands.push_back(std::move(c0));
        return cands;
    }

    // Inter-pod: part 0 picks the agg row in both pods, part 1 the core in
    // that row's group. Validity of a part-1 value can depend on part 0 when
    // core links fail; the per-part sets are the values valid for every
    // surviving part-0 choice, keeping the sprayed space blackhole-free.
    std::vector<uint8_t> c0;
    for (int v = 0; v < half; ++v) {
        const Link& up = _links[edge.port_link[edge.uplink_port[v]]];
        if (!stale_up && !usable(up))
            continue;
        int de_local = de - dp * half;
        const Link& last = _links[_switches[agg_of(dp, v)].port_link[de_local]];
        if (!usable(last))
            continue;
        // at least one live core transit in row v
        const SwitchSpec& sagg = _switches[agg_of(sp, v)];
        bool any = false;
        for (int u = 0; u < half && !any; ++u) {
            const Link& a2c = _links[sagg.port_link[sagg.uplink_port[u]]];
            if (!stale_up && !usable(a2c))
                continue;
            int core = a2c.to;
            const Link& c2a = _links[_switches[core].port_link[dp]];
            any = usable(c2a);
        }
        if (any)
            c0.push_back((uint8_t)v);
    }
    std::vector<uint8_t> c1;
    for (int u = 0; u < half; ++u) {
        bool ok = !c0.empty();
        for (uint8_t v : c0) {
            const SwitchSpec& sagg = _switches[agg_of(sp, v)];
            const Link& a2c = _links[sagg.port_link[sagg.uplink_port[u]]];
            if (!stale_up && !usable(a2c)) {
                ok = false;
                break;
            }
            const Link& c2a = _links[_switches[a2c.to].port_link[dp]];
            if (!usable(c2a)) {
                ok = false;
                break;
            }
        }
        if (ok)
            c1.push_back((uint8_t)u);
    }
    cands.push_back(std::move(c0));
    cands.push_back(std::move(c1));
    return cands;
}

bool Topology::up_value_viable(int sw_idx, int v, int dst_host) const {
    const SwitchSpec& s = _switches[sw_idx];
    int de = _host_leaf[dst_host];
    if (_tiers == 2) {
        int spine = _links[uplink_link(sw_idx, v)].to;
        return usable(_links[_switches[spine].port_link[de]]);
    }

    int edges = n_leaves();
    int dp = _switches[de].pod;
    auto agg_of = [&](int pod, int j) { return edges + pod * _half + j; };
    if (s.tier == 1) {
        int de_local = de - dp * _half;
        if (!usable(_links[_switches[agg_of(dp, v)].port_link[de_local]]))
            return false;
        if (s.pod == dp)
            return true;
        const SwitchSpec& sagg = _switches[agg_of(s.pod, v)];
        for (int u = 0; u < _half; ++u) {
            const Link& a2c = _links[sagg.port_link[sagg.uplink_port[u]]];
            if (usable(a2c) && usable(_links[_switches[a2c.to].port_link[dp]]))
                return true;
        }
        return false;
    }
    const Link& a2c = _links[uplink_link(sw_idx, v)];
    return usable(_links[_switches[a2c.to].port_link[dp]]);
}

long Topology::upward_path_count(int src_host, int dst_host) const {
    if (src_host == dst_host)
        throw std::invalid_argument("path count needs distinct hosts");
    int se = _host_leaf[src_host];
    int de = _host_leaf[dst_host];
    if (se == de)
        return 1;
    if (_tiers == 2 || _switches[se].pod == _switches[de].pod) {
        auto c = ev_candidates(src_host, dst_host);
        return (long)c[0].size();
    }
    // exact inter-pod count; tolerates non-rectangular failure patterns
    int sp = _switches[se].pod;
    int dp = _switches[de].pod;
    int half = _half;
    int edges = n_leaves();
    const SwitchSpec& edge = _switches[se];
    long total = 0;
    for (int v = 0; v < half; ++v) {
        const Link& up = _links[edge.port_link[edge.uplink_port[v]]];
        if (!usable(up))
            continue;
        int de_local = de - dp * half;
        const Link& last = _links[_switches[edges + dp * half + v].port_link[de_local]];
        if (!usable(last))
            continue;
        const SwitchSpec& sagg = _switches[edges + sp * half + v];
        for (int u = 0; u < half; ++u) {
            const Link& a2c = _links[sagg.port_link[sagg.uplink_port[u]]];
            if (!usable(a2c))
                continue;
            const Link& c2a = _links[_switches[a2c.to].port_link[dp]];
            if (usable(c2a))
                ++total;
        }
    }
    return total;
}

int Topology::route_down(int sw_idx, int dst_host) const {
    const SwitchSpec& s = _switches[sw_idx];
    int dl = _host_leaf[dst_host];
    if (s.tier == 1) {
        if (sw_idx != dl)
            return -1;
        return _links[_links[_host_uplink[dst_host]].twin].from_port;
    }
    if (_tiers == 2)
        return dl;  // spine port l faces leaf l
    int half = _half;
    int dpod = _switches[dl].pod;
    if (s.tier == 2)
        return s.pod == dpod ? dl - dpod * half : -1;
    return dpod;  // core port p faces pod p
}

std::vector<int> Topology::up_fabric_links() const {
    std::vector<int> out;
    for (const Link& l : _links) {
        if (l.from_is_host || l.to_is_host)
            continue;
        if (_switches[l.from].tier < _switches[l.to].tier)
            out.push_back(l.id);
    }
    return out;
}

void Topology::fail_link(int link_id) {
    Link& l = _links[link_id];
    l.health = LinkHealth::Failed;
    if (l.twin >= 0)
        _links[l.twin].health = LinkHealth::Failed;
    ++_epoch;
}

void Topology::degrade_link(int link_id, double serve_fraction) {
    if (!(serve_fraction > 0.0 && serve_fraction < 1.0))
        throw std::invalid_argument("degrade: serve fraction must be in (0,1)");
    Link& l = _links[link_id];
    auto apply = [&](Link& x) {
        x.health = LinkHealth::Degraded;
        x.serve_fraction = serve_fraction;
        x.effective_bps = (uint64_t)((double)x.nominal_bps * serve_fraction);
    };
    apply(l);
    if (l.twin >= 0)
        apply(_links[l.twin]);
    ++_epoch;
}

Topology::PathProfile Topology::path_profile(int src_host, int dst_host) const {
    PathProfile pp;
    int se = _host_leaf[src_host];
    int de = _host_leaf[dst_host];
    int updown;
    if (se == de)
        updown = 0;
    else if (_tiers == 2 || _switches[se].pod == _switches[de].pod)
        updown = 1;
    else
        updown = 2;
    pp.links_oneway = 2 + 2 * updown;
    pp.intermediate_switches = 1 + 2 * updown;
    pp.delay_sum = (SimTime)pp.links_oneway * _params.link_delay;
    return pp;
}

Topology::PathProfile Topology::longest_path_profile() const {
    PathProfile pp;
    int updown = _tiers - 1;
    pp.links_oneway = 2 + 2 * updown;
    pp.intermediate_switches = 1 + 2 * updown;
    pp.delay_sum = (SimTime)pp.links_oneway * _params.link_delay;
    return pp;
}

} // namespace spraysim
