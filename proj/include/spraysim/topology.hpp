#pragma once
#include "spraysim/entropy.hpp"
#include "spraysim/time.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spraysim {

enum class LinkHealth : uint8_t { Up, Failed, Degraded };

struct Link {
    int32_t id = -1;
    bool from_is_host = false;
    int32_t from = -1;       // host id, or switch index
    int16_t from_port = -1;  // egress port at `from` when it is a switch
    bool to_is_host = false;
    int32_t to = -1;
    uint64_t nominal_bps = 0;
    uint64_t effective_bps = 0;
    SimTime delay = 0;
    LinkHealth health = LinkHealth::Up;
    double serve_fraction = 1.0;  // of nominal, when degraded
    int32_t twin = -1;            // reverse direction of the same physical link
};

struct SwitchSpec {
    int tier = 1;  // 1 = leaf/edge, counting up
    int pod = -1;  // 3-tier: pod of edge/agg switches, core group of cores
    int n_down = 0;
    std::vector<int32_t> port_link;    // egress link id per port; down ports first
    std::vector<int16_t> uplink_port;  // uplink index v -> port index
};

// Tiered folded-Clos fabric: hosts under tier-1 switches, equal-cost upward
// paths, deterministic downward routes. Immutable after construction except
// for link impairments.
class Topology {
public:
    struct Params {
        int tiers = 2;
        int hosts = 0;
        int switch_ports = 0;
        // explicit irregular 2-tier shape; 0 = regular builder
        int override_leaves = 0;
        int override_spines = 0;
        uint64_t bandwidth_bps = 0;
        SimTime link_delay = 0;
        int oversubscription = 1;
    };

    // throws std::invalid_argument naming the violated constraint
    static Topology build(const Params& p);

    int tiers() const { return _tiers; }
    int n_hosts() const { return _n_hosts; }
    int n_switches() const { return (int)_switches.size(); }
    int n_links() const { return (int)_links.size(); }
    const Link& link(int id) const { return _links[id]; }
    const SwitchSpec& sw(int idx) const { return _switches[idx]; }
    uint64_t bandwidth_bps() const { return _params.bandwidth_bps; }

    int leaf_of_host(int h) const { return _host_leaf[h]; }
    int host_access_link(int h) const { return _host_uplink[h]; }
    int host_downlink(int h) const { return _links[_host_uplink[h]].twin; }
    int n_leaves() const { return _n_leaves; }

    const EvLayout& ev_layout() const { return _ev_layout; }

    // Per-part live uplink candidates on the upward route src -> dst. Empty
    // when both hosts share a leaf (no spraying tier is crossed). For
    // intra-pod 3-tier pairs only one part is returned. With stale_up the
    // up-segment health checks are skipped: failed uplinks stay in the
    // sprayed space and the owning switch folds them onto survivors, so
    // only sender-side feedback can move load off them. Down segments are
    // always excluded (no switch can reroute a dead deterministic route).
    std::vector<std::vector<uint8_t>> ev_candidates(int src_host, int dst_host,
                                                    bool stale_up = false) const;

    // exact count of distinct live upward paths
    long upward_path_count(int src_host, int dst_host) const;

    // True when taking uplink value v at this switch can still deliver to
    // dst over live links; used to keep stale-EV folds blackhole-free.
    bool up_value_viable(int sw_idx, int v, int dst_host) const;

    // deterministic downward port; -1 when dst is not below this switch
    int route_down(int sw_idx, int dst_host) const;

    int uplink_link(int sw_idx, int uplink_v) const {
        return _switches[sw_idx].port_link[_switches[sw_idx].uplink_port[uplink_v]];
    }

    // directed up-direction switch->switch links (one per physical link)
    std::vector<int> up_fabric_links() const;

    // Impairments act on the physical link: both directions change together.
    void fail_link(int link_id);
    // serve_fraction in (0,1): remaining share of the nominal bandwidth
    void degrade_link(int link_id, double serve_fraction);
    uint64_t impairment_epoch() const { return _epoch; }

    struct PathProfile {
        int links_oneway = 0;
        SimTime delay_sum = 0;
        int intermediate_switches = 0;
    };
    PathProfile path_profile(int src_host, int dst_host) const;
    PathProfile longest_path_profile() const;

private:
    Topology() = default;
    void build_2tier_regular();
    void build_2tier_custom();
    void build_3tier();
    int add_link(bool fh, int from, int fport, bool th, int to);
    void pair_twins(int a, int b);

    Params _params;
    int _tiers = 2;
    int _n_hosts = 0;
    int _n_leaves = 0;
    int _half = 0;  // 3-tier: k/2
    std::vector<SwitchSpec> _switches;
    std::vector<Link> _links;
    std::vector<int> _host_leaf;
    std::vector<int> _host_uplink;  // host -> access link id
    EvLayout _ev_layout;
    uint64_t _epoch = 0;
};

} // namespace spraysim
