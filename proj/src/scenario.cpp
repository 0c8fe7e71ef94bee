#include "spraysim/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace spraysim {

using nlohmann::json;

namespace {

constexpr uint64_t kGbps = 1000ull * 1000 * 1000;

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
}

TrafficPattern pattern_from_name(const std::string& name) {
    if (name == "permutation")
        return TrafficPattern::kPermutation;
    if (name == "single")
        return TrafficPattern::kSingle;
    if (name == "leaf_pair")
        return TrafficPattern::kLeafPair;
    if (name == "mixed")
        return TrafficPattern::kMixed;
    bad("traffic.pattern", "unknown pattern '" + name + "'");
}

SchedPolicy policy_from_name(const std::string& name) {
    if (name == "fifo")
        return SchedPolicy::kFifo;
    if (name == "sp")
        return SchedPolicy::kSp;
    if (name == "wrr")
        return SchedPolicy::kWrr;
    bad("switch.policy", "unknown policy '" + name + "'");
}

const char* policy_name(SchedPolicy p) {
    switch (p) {
    case SchedPolicy::kFifo: return "fifo";
    case SchedPolicy::kSp: return "sp";
    case SchedPolicy::kWrr: return "wrr";
    }
    return "?";
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key))
        return fallback;
    return j.at(key).get<T>();
}

std::vector<int> hosts_under_leaf(const Topology& topo, int leaf) {
    std::vector<int> hs;
    for (int h = 0; h < topo.n_hosts(); ++h)
        if (topo.leaf_of_host(h) == leaf)
            hs.push_back(h);
    return hs;
}

} // namespace

const char* pattern_name(TrafficPattern p) {
    switch (p) {
    case TrafficPattern::kPermutation: return "permutation";
    case TrafficPattern::kSingle: return "single";
    case TrafficPattern::kLeafPair: return "leaf_pair";
    case TrafficPattern::kMixed: return "mixed";
    }
    return "?";
}

Scenario scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        bad("document", e.what());
    }

    Scenario s;
    s.version = get_or(j, "version", 0);
    if (s.version != 1)
        bad("version", "expected 1");
    s.name = get_or<std::string>(j, "name", "unnamed");

    if (!j.contains("topology"))
        bad("topology", "missing");
    const json& t = j.at("topology");
    s.topo.tiers = get_or(t, "tiers", 2);
    s.topo.hosts = get_or(t, "hosts", 0);
    s.topo.switch_ports = get_or(t, "switch_ports", 0);
    s.topo.override_leaves = get_or(t, "leaves", 0);
    s.topo.override_spines = get_or(t, "spines", 0);
    s.topo.oversubscription = get_or(t, "oversubscription", 1);
    s.topo.bandwidth_bps = (uint64_t)get_or(t, "bandwidth_gbps", 0) * kGbps;
    s.topo.link_delay = from_ns(get_or<int64_t>(t, "link_delay_ns", 600));

    if (j.contains("traffic")) {
        const json& tr = j.at("traffic");
        s.pattern = pattern_from_name(get_or<std::string>(tr, "pattern", "permutation"));
        s.flow_bytes = (uint64_t)get_or(tr, "flow_mib", 8) << 20;
        s.n_flows = get_or(tr, "n_flows", 0);
        s.ecmp_fraction = get_or(tr, "ecmp_fraction", 0.0);
    }
    if (s.n_flows == 0)
        s.n_flows = s.pattern == TrafficPattern::kLeafPair  ? 18
                    : s.pattern == TrafficPattern::kMixed   ? 1024
                    : s.pattern == TrafficPattern::kSingle  ? 1
                                                            : s.topo.hosts;

    s.net.balancer = balancer_from_name(get_or<std::string>(j, "balancer", "prime"));

    if (j.contains("impairments")) {
        const json& im = j.at("impairments");
        s.impair.fail_uplinks = get_or(im, "fail_uplinks", 0);
        s.impair.oracle_notify = get_or(im, "oracle_notify", true);
        s.impair.degrade_fraction = get_or(im, "degrade_fraction", 0.0);
        s.impair.degrade_to_bps = (uint64_t)get_or(im, "degrade_to_gbps", 0) * kGbps;
        if (im.contains("leaf_uplink")) {
            const json& lu = im.at("leaf_uplink");
            s.impair.leaf = get_or(lu, "leaf", 0);
            s.impair.uplink = get_or(lu, "uplink", 0);
            s.impair.d = get_or(lu, "d", 0.0);
        }
    }

    if (j.contains("switch")) {
        const json& sw = j.at("switch");
        s.net.policy = policy_from_name(get_or<std::string>(sw, "policy", "fifo"));
        s.net.wrr_ecmp_percent = get_or(sw, "wrr_ecmp_percent", 50);
    }

    if (j.contains("transport")) {
        const json& tp = j.at("transport");
        s.net.window_bytes = get_or<uint64_t>(tp, "window_bytes", 0);
        s.net.explore_pkts = get_or<uint32_t>(tp, "explore_pkts", 0);
        s.net.coalesce_n = get_or<uint32_t>(tp, "coalesce", 4);
        s.net.flush_timeout = from_us(get_or<int64_t>(tp, "flush_us", 50));
        s.net.k_bits = get_or(tp, "k_bits", 8);
        s.net.p_ecn = get_or<uint32_t>(tp, "p_ecn", 0);
        s.net.p_nack = get_or<uint32_t>(tp, "p_nack", 0);
        s.net.decay_step = get_or<uint32_t>(tp, "decay_step", 1);
        s.net.steady_draw_limit = get_or(tp, "steady_draw_limit", 0);
        s.net.randomized_advance = get_or(tp, "randomized_advance", false);
        s.net.echo_all = get_or(tp, "echo_all_evs", false);
    }

    if (j.contains("metrics")) {
        const json& m = j.at("metrics");
        s.sample_interval = from_us(get_or<int64_t>(m, "sample_interval_us", 10));
        s.record_port_flow_bytes = get_or(m, "record_port_flow_bytes", false);
    }

    s.sim_deadline = from_ms(get_or<int64_t>(j, "deadline_ms", 0));
    validate_scenario(s);
    return s;
}

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["version"] = s.version;
    j["name"] = s.name;
    j["topology"] = {{"tiers", s.topo.tiers},
                     {"hosts", s.topo.hosts},
                     {"switch_ports", s.topo.switch_ports},
                     {"leaves", s.topo.override_leaves},
                     {"spines", s.topo.override_spines},
                     {"oversubscription", s.topo.oversubscription},
                     {"bandwidth_gbps", s.topo.bandwidth_bps / kGbps},
                     {"link_delay_ns", to_ns(s.topo.link_delay)}};
    j["traffic"] = {{"pattern", pattern_name(s.pattern)},
                    {"flow_mib", s.flow_bytes >> 20},
                    {"n_flows", s.n_flows},
                    {"ecmp_fraction", s.ecmp_fraction}};
    j["balancer"] = balancer_name(s.net.balancer);
    j["impairments"] = {{"fail_uplinks", s.impair.fail_uplinks},
                        {"oracle_notify", s.impair.oracle_notify},
                        {"degrade_fraction", s.impair.degrade_fraction},
                        {"degrade_to_gbps", s.impair.degrade_to_bps / kGbps}};
    if (s.impair.leaf >= 0)
        j["impairments"]["leaf_uplink"] = {
            {"leaf", s.impair.leaf}, {"uplink", s.impair.uplink}, {"d", s.impair.d}};
    j["switch"] = {{"policy", policy_name(s.net.policy)},
                   {"wrr_ecmp_percent", s.net.wrr_ecmp_percent}};
    j["transport"] = {{"window_bytes", s.net.window_bytes},
                      {"explore_pkts", s.net.explore_pkts},
                      {"coalesce", s.net.coalesce_n},
                      {"flush_us", s.net.flush_timeout / 1'000'000},
                      {"k_bits", s.net.k_bits},
                      {"p_ecn", s.net.p_ecn},
                      {"p_nack", s.net.p_nack},
                      {"decay_step", s.net.decay_step},
                      {"steady_draw_limit", s.net.steady_draw_limit},
                      {"randomized_advance", s.net.randomized_advance},
                      {"echo_all_evs", s.net.echo_all}};
    j["metrics"] = {{"sample_interval_us", s.sample_interval / 1'000'000},
                    {"record_port_flow_bytes", s.record_port_flow_bytes}};
    j["deadline_ms"] = s.sim_deadline / 1'000'000'000;
    return j.dump(2) + "\n";
}

void validate_scenario(const Scenario& s) {
    uint64_t gbps = s.topo.bandwidth_bps / kGbps;
    if (gbps != 100 && gbps != 400 && gbps != 800)
        bad("topology.bandwidth_gbps", "must be one of 100, 400, 800");
    uint64_t mib = s.flow_bytes >> 20;
    if (mib != 2 && mib != 4 && mib != 8 && mib != 16 && mib != 32)
        bad("traffic.flow_mib", "must be one of 2, 4, 8, 16, 32");
    if (s.topo.hosts > 512)
        bad("topology.hosts", "desk scale tops out at 512 hosts");

    // surface topology constraint violations under a named field
    try {
        Topology::build(s.topo);
    } catch (const std::invalid_argument& e) {
        bad("topology", e.what());
    }

    if (s.ecmp_fraction < 0.0 || s.ecmp_fraction > 1.0)
        bad("traffic.ecmp_fraction", "must lie in [0, 1]");
    if (s.pattern == TrafficPattern::kMixed && s.topo.tiers != 3)
        bad("traffic.pattern", "mixed traffic needs the 3-tier fixture");
    if (s.pattern == TrafficPattern::kLeafPair) {
        if (s.impair.d < 0.0 || s.impair.d > 0.75)
            bad("impairments.leaf_uplink.d", "degradation must lie in [0, 0.75]");
        if (s.n_flows < 1)
            bad("traffic.n_flows", "need at least one flow");
    }
    if (s.impair.d < 0.0 || s.impair.d >= 1.0)
        bad("impairments.leaf_uplink.d", "must lie in [0, 1); use a failure instead of d=1");
    if (s.impair.degrade_fraction < 0.0 || s.impair.degrade_fraction >= 1.0)
        bad("impairments.degrade_fraction", "must lie in [0, 1)");
    if (s.impair.degrade_fraction > 0.0) {
        if (s.impair.degrade_to_bps == 0)
            bad("impairments.degrade_to_gbps", "required with degrade_fraction");
        if (s.impair.degrade_to_bps >= s.topo.bandwidth_bps)
            bad("impairments.degrade_to_gbps", "must be below the fabric bandwidth");
    }
    if (s.impair.fail_uplinks < 0)
        bad("impairments.fail_uplinks", "must be nonnegative");
    if (s.net.wrr_ecmp_percent < 1 || s.net.wrr_ecmp_percent > 99)
        bad("switch.wrr_ecmp_percent", "must lie in [1, 99]");
    if (s.net.coalesce_n < 1)
        bad("transport.coalesce", "must be at least 1");
    if (s.net.k_bits < 1 || s.net.k_bits > 16)
        bad("transport.k_bits", "must lie in [1, 16]");
}

std::vector<FlowSpec> build_flows(const Scenario& s, const Topology& topo, uint64_t seed) {
    std::vector<FlowSpec> flows;
    RngStream rng(seed, 0, kRngScenario);

    switch (s.pattern) {
    case TrafficPattern::kSingle: {
        flows.push_back({0, 0, topo.n_hosts() / 2, s.flow_bytes, 0, s.net.balancer,
                         kClassSprayed});
        break;
    }
    case TrafficPattern::kPermutation: {
        int n = topo.n_hosts();
        std::vector<int> dst(n);
        // uniform over fixed-point-free permutations by rejection
        bool ok = false;
        while (!ok) {
            for (int i = 0; i < n; ++i)
                dst[i] = i;
            for (int i = n - 1; i > 0; --i)
                std::swap(dst[i], dst[rng.below((uint64_t)i + 1)]);
            ok = true;
            for (int i = 0; i < n; ++i)
                if (dst[i] == i) {
                    ok = false;
                    break;
                }
        }
        for (int h = 0; h < n; ++h)
            flows.push_back({(uint32_t)h, h, dst[h], s.flow_bytes, 0, s.net.balancer,
                             kClassSprayed});
        break;
    }
    case TrafficPattern::kLeafPair: {
        std::vector<int> src = hosts_under_leaf(topo, 0);
        std::vector<int> dst = hosts_under_leaf(topo, 1);
        for (int i = 0; i < s.n_flows; ++i)
            flows.push_back({(uint32_t)i, src[i % src.size()], dst[i % dst.size()],
                             s.flow_bytes, 0, s.net.balancer, kClassSprayed});
        break;
    }
    case TrafficPattern::kMixed: {
        int n = topo.n_hosts();
        int per_host = s.n_flows / n;
        if (per_host < 1)
            per_host = 1;
        int total = per_host * n;
        for (int h = 0; h < n; ++h) {
            for (int k = 0; k < per_host; ++k) {
                int d = (int)rng.below((uint64_t)n - 1);
                if (d >= h)
                    ++d;  // uniform over the other hosts
                flows.push_back({(uint32_t)(h * per_host + k), h, d, s.flow_bytes, 0,
                                 s.net.balancer, kClassSprayed});
            }
        }
        // a seeded sample of flows runs as pinned ecmp traffic
        int n_ecmp = (int)std::lround(s.ecmp_fraction * total);
        std::vector<uint32_t> ids(total);
        for (int i = 0; i < total; ++i)
            ids[i] = (uint32_t)i;
        for (int i = total - 1; i > 0; --i)
            std::swap(ids[i], ids[rng.below((uint64_t)i + 1)]);
        for (int i = 0; i < n_ecmp; ++i) {
            flows[ids[i]].kind = BalancerKind::kEcmp;
            flows[ids[i]].cls = kClassEcmp;
        }
        break;
    }
    }
    return flows;
}

void apply_impairments(Topology& topo, const ImpairmentSpec& spec, uint64_t seed) {
    RngStream rng(seed, 1, kRngScenario);
    std::vector<int> fabric = topo.up_fabric_links();

    if (spec.fail_uplinks > 0) {
        if ((size_t)spec.fail_uplinks > fabric.size())
            throw std::invalid_argument("impairments.fail_uplinks: only " +
                                        std::to_string(fabric.size()) + " fabric links exist");
        std::vector<int> pick = fabric;
        for (size_t i = pick.size() - 1; i > 0; --i)
            std::swap(pick[i], pick[rng.below(i + 1)]);
        for (int i = 0; i < spec.fail_uplinks; ++i)
            topo.fail_link(pick[i]);
    }

    if (spec.degrade_fraction > 0.0) {
        int n = (int)std::lround(spec.degrade_fraction * (double)fabric.size());
        std::vector<int> pick = fabric;
        for (size_t i = pick.size() - 1; i > 0; --i)
            std::swap(pick[i], pick[rng.below(i + 1)]);
        double serve = (double)spec.degrade_to_bps / (double)topo.bandwidth_bps();
        int applied = 0;
        for (int i = 0; applied < n && i < (int)pick.size(); ++i) {
            if (topo.link(pick[i]).health == LinkHealth::Failed)
                continue;  // a failed pick stays failed
            topo.degrade_link(pick[i], serve);
            ++applied;
        }
    }

    if (spec.leaf >= 0 && spec.d > 0.0)
        topo.degrade_link(topo.uplink_link(spec.leaf, spec.uplink), 1.0 - spec.d);
}

} // namespace spraysim
