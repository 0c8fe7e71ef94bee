#include "spraysim/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace spraysim {

namespace {

std::string us6(SimTime t) {
    if (t == kNoTime)
        return "-1";
    char b[40];
    std::snprintf(b, sizeof b, "%.6f", (double)t / 1e6);
    return b;
}

std::string f6(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.6f", v);
    return b;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    out.close();
    if (!out)
        throw std::runtime_error("unwritable path: " + path);
}

const char* link_dir(const Topology& topo, const Link& l) {
    if (l.to_is_host)
        return "down";
    return topo.sw(l.to).tier > topo.sw(l.from).tier ? "up" : "down";
}

} // namespace

uint64_t fnv1a64(const std::string& bytes) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

RunResult run_scenario(const Scenario& s, uint64_t seed, double wall_limit_seconds) {
    validate_scenario(s);

    RunResult r;
    r.scen = s;
    r.seed = seed;

    Topology topo = Topology::build(s.topo);
    apply_impairments(topo, s.impair, seed);
    std::vector<FlowSpec> flows = build_flows(s, topo, seed);

    NetworkConfig nc = s.net;
    nc.oracle_notify = s.impair.oracle_notify;
    r.net = std::make_unique<Network>(seed, std::move(topo), nc, (int)flows.size());
    Network& net = *r.net;
    net.metrics().set_record_port_flow_bytes(s.record_port_flow_bytes);
    for (const FlowSpec& f : flows)
        net.add_flow(f.id, f.src, f.dst, f.bytes, f.start, f.kind, f.cls);
    if (s.sample_interval > 0)
        r.sampler = std::make_unique<QueueSampler>(net.engine(), net.topology(), net.metrics(),
                                                   s.sample_interval);

    SimTime deadline = s.sim_deadline > 0 ? s.sim_deadline : from_ms(60);
    const SimTime chunk = from_us(200);
    auto wall0 = std::chrono::steady_clock::now();
    SimTime horizon = 0;
    for (;;) {
        horizon = std::min(horizon + chunk, deadline);
        net.engine().run_until(horizon);
        if (net.all_done()) {
            r.status = "ok";
            break;
        }
        if (horizon >= deadline) {
            r.status = "deadline";
            break;
        }
        if (wall_limit_seconds > 0.0) {
            std::chrono::duration<double> el = std::chrono::steady_clock::now() - wall0;
            if (el.count() > wall_limit_seconds) {
                r.status = "wall_limit";
                break;
            }
        }
    }
    r.sim_end = horizon;
    r.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

    const Metrics& m = net.metrics();
    double fct_sum = 0.0;
    size_t done = 0;
    for (const FlowRecord& rec : m.records()) {
        r.max_ideal = std::max(r.max_ideal, rec.ideal_fct);
        if (!rec.complete()) {
            ++r.incomplete;
            continue;
        }
        SimTime fct = rec.fct();
        r.max_fct = std::max(r.max_fct, fct);
        if (rec.cls == kClassEcmp)
            r.max_fct_ecmp = std::max(r.max_fct_ecmp, fct);
        else
            r.max_fct_sprayed = std::max(r.max_fct_sprayed, fct);
        fct_sum += (double)fct;
        ++done;
    }
    if (done)
        r.avg_fct = fct_sum / (double)done;
    if (r.max_ideal > 0)
        r.ratio = (double)r.max_fct / (double)r.max_ideal;

    const Topology& t = net.topology();
    for (int l = 0; l < t.n_links(); ++l) {
        if (t.link(l).from_is_host)
            continue;
        r.max_port_depth_pkts = std::max(r.max_port_depth_pkts, m.max_depth_pkts(l));
        r.max_port_depth_bytes = std::max(r.max_port_depth_bytes, m.max_depth_bytes(l));
    }
    return r;
}

void write_outputs(const RunResult& r, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "figdata");

    const Metrics& m = r.net->metrics();
    const Topology& topo = r.net->topology();

    std::string sum =
        "scenario,pattern,balancer,seed,bandwidth_gbps,hosts,flows,flow_mib,status,"
        "incomplete,sim_time_us,max_fct_us,avg_fct_us,ideal_fct_us,ratio,"
        "max_fct_sprayed_us,max_fct_ecmp_us,max_port_depth_pkts,max_port_depth_bytes,"
        "trims,retransmits,nacks,ecn_acks,ecn_marks,control_drops,rto_fires,ev_remaps\n";
    sum += r.scen.name + ',' + pattern_name(r.scen.pattern) + ',' +
           balancer_name(r.scen.net.balancer) + ',' + std::to_string(r.seed) + ',' +
           std::to_string(topo.bandwidth_bps() / 1'000'000'000ull) + ',' +
           std::to_string(topo.n_hosts()) + ',' + std::to_string(m.records().size()) + ',' +
           std::to_string(r.scen.flow_bytes >> 20) + ',' + r.status + ',' +
           std::to_string(r.incomplete) + ',' + us6(r.sim_end) + ',' + us6(r.max_fct) + ',' +
           f6(r.avg_fct / 1e6) + ',' + us6(r.max_ideal) + ',' + f6(r.ratio) + ',' +
           us6(r.max_fct_sprayed) + ',' + us6(r.max_fct_ecmp) + ',' +
           std::to_string(r.max_port_depth_pkts) + ',' + std::to_string(r.max_port_depth_bytes) +
           ',' + std::to_string(m.trims_total()) + ',' + std::to_string(m.retx_total()) + ',' +
           std::to_string(m.nacks_total()) + ',' + std::to_string(m.ecn_acks_total()) + ',' +
           std::to_string(m.ecn_marks()) + ',' + std::to_string(m.control_drops()) + ',' +
           std::to_string(m.rto_fires()) + ',' + std::to_string(m.ev_remaps()) + '\n';
    write_file((fs::path(out_dir) / "summary.csv").string(), sum);

    std::string fl =
        "flow,cls,src,dst,bytes,start_us,end_us,fct_us,ideal_fct_us,ratio,"
        "delivered_bytes,sent_pkts,rcv_pkts,retransmits,trims,nacks,ecn_acks\n";
    for (const FlowRecord& rec : m.records()) {
        fl += std::to_string(rec.flow) + ',' + std::to_string(rec.cls) + ',' +
              std::to_string(rec.src) + ',' + std::to_string(rec.dst) + ',' +
              std::to_string(rec.bytes) + ',' + us6(rec.start) + ',' + us6(rec.end) + ',';
        if (rec.complete()) {
            fl += us6(rec.fct()) + ',' + us6(rec.ideal_fct) + ',' +
                  f6(rec.ideal_fct ? (double)rec.fct() / (double)rec.ideal_fct : 0.0);
        } else {
            fl += "-1," + us6(rec.ideal_fct) + ",-1";
        }
        fl += ',' + std::to_string(rec.delivered_bytes) + ',' + std::to_string(rec.sent_pkts) +
              ',' + std::to_string(rec.rcv_pkts) + ',' + std::to_string(rec.retransmits) + ',' +
              std::to_string(rec.trims) + ',' + std::to_string(rec.nacks) + ',' +
              std::to_string(rec.ecn_acks) + '\n';
    }
    write_file((fs::path(out_dir) / "flows.csv").string(), fl);

    std::string qs = "time_us,link,sw,port,cls,depth_pkts,depth_bytes\n";
    for (const QueueSample& s : m.samples()) {
        const Link& l = topo.link(s.link);
        qs += us6(s.at) + ',' + std::to_string(s.link) + ',' + std::to_string(l.from) + ',' +
              std::to_string(l.from_port) + ',' + std::to_string(s.cls) + ',' +
              std::to_string(s.pkts) + ',' + std::to_string(s.bytes) + '\n';
    }
    write_file((fs::path(out_dir) / "queues.csv").string(), qs);

    std::string pd = "link,sw,port,dir,max_depth_pkts,max_depth_bytes\n";
    for (int l = 0; l < topo.n_links(); ++l) {
        const Link& lk = topo.link(l);
        if (lk.from_is_host)
            continue;
        pd += std::to_string(l) + ',' + std::to_string(lk.from) + ',' +
              std::to_string(lk.from_port) + ',' + link_dir(topo, lk) + ',' +
              std::to_string(m.max_depth_pkts(l)) + ',' + std::to_string(m.max_depth_bytes(l)) +
              '\n';
    }
    write_file((fs::path(out_dir) / "figdata" / "port_max_depth.csv").string(), pd);

    std::vector<SimTime> fcts;
    for (const FlowRecord& rec : m.records())
        if (rec.complete())
            fcts.push_back(rec.fct());
    std::sort(fcts.begin(), fcts.end());
    std::string cdf = "fct_us,frac,series\n";
    for (size_t i = 0; i < fcts.size(); ++i)
        cdf += us6(fcts[i]) + ',' + f6((double)(i + 1) / (double)fcts.size()) + ',' +
               balancer_name(r.scen.net.balancer) + '\n';
    write_file((fs::path(out_dir) / "figdata" / "fct_cdf.csv").string(), cdf);

    if (r.scen.record_port_flow_bytes) {
        std::string pb = "link,sw,port,flow,bytes\n";
        for (const auto& [key, bytes] : m.port_flow_bytes()) {
            const Link& lk = topo.link(key.first);
            pb += std::to_string(key.first) + ',' + std::to_string(lk.from) + ',' +
                  std::to_string(lk.from_port) + ',' + std::to_string(key.second) + ',' +
                  std::to_string(bytes) + '\n';
        }
        write_file((fs::path(out_dir) / "figdata" / "port_bytes.csv").string(), pb);
    }
}

void write_manifest(const std::string& out_dir, const std::string& scenario_path,
                    uint64_t scenario_hash, uint64_t seed, const std::string& status,
                    double wall_seconds) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    char hex[32];
    std::snprintf(hex, sizeof hex, "0x%016llx", (unsigned long long)scenario_hash);
    nlohmann::json m{{"artifact", "spraysim"},
                     {"format_version", 1},
                     {"scenario_path", scenario_path},
                     {"scenario_fnv1a64", hex},
                     {"seed", seed},
                     {"status", status},
                     {"wall_seconds", wall_seconds}};
    write_file((fs::path(out_dir) / "manifest.json").string(), m.dump(2) + "\n");
}

} // namespace spraysim
