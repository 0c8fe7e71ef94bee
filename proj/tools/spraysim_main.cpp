#include "spraysim/runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace spraysim;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good())
        throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit_error(const std::string& kind, const std::string& detail) {
    json e{{"error", kind}, {"detail", detail}};
    std::cerr << e.dump() << "\n";
}

int cmd_run(const std::string& scenario_path, uint64_t seed, const std::string& out_dir,
            double deadline_s) {
    std::string text;
    Scenario s;
    try {
        text = slurp(scenario_path);
        s = scenario_from_json(text);
    } catch (const std::exception& e) {
        emit_error("config", e.what());
        return 2;
    }
    uint64_t hash = fnv1a64(text);
    try {
        write_manifest(out_dir, scenario_path, hash, seed, "running", 0.0);
        RunResult r = run_scenario(s, seed, deadline_s);
        write_outputs(r, out_dir);
        write_manifest(out_dir, scenario_path, hash, seed, r.status, r.wall_seconds);
        if (r.status != "ok") {
            json e{{"error", r.status},
                   {"detail", "run stopped before every flow finished"},
                   {"incomplete_flows", r.incomplete}};
            std::cerr << e.dump() << "\n";
            return 1;
        }
        char line[160];
        std::snprintf(line, sizeof line, "ok ratio=%.6f max_fct_us=%.6f flows=%zu\n", r.ratio,
                      (double)r.max_fct / 1e6, r.net->metrics().records().size());
        std::cout << line;
        return 0;
    } catch (const std::exception& e) {
        emit_error("runtime", e.what());
        return 1;
    }
}

int cmd_validate(const std::string& scenario_path) {
    try {
        Scenario s = scenario_from_json(slurp(scenario_path));
        Topology topo = Topology::build(s.topo);
        std::vector<FlowSpec> flows = build_flows(s, topo, 1);
        std::printf("ok name=%s hosts=%d links=%d flows=%zu balancer=%s\n", s.name.c_str(),
                    topo.n_hosts(), topo.n_links(), flows.size(),
                    balancer_name(s.net.balancer));
        return 0;
    } catch (const std::exception& e) {
        emit_error("config", e.what());
        return 2;
    }
}

struct SweepCell {
    uint64_t bandwidth_gbps;
    uint64_t flow_mib;
    std::string balancer;
    uint64_t seed;
};

struct SweepRow {
    std::string status = "unrun";
    double max_fct_us = 0.0;
    double ideal_fct_us = 0.0;
    double ratio = 0.0;
};

int cmd_sweep(const std::string& matrix_path, int jobs, const std::string& out_dir) {
    std::string text;
    Scenario base;
    std::vector<uint64_t> bws, sizes, seeds;
    std::vector<std::string> balancers;
    try {
        text = slurp(matrix_path);
        json j = json::parse(text);
        if (j.value("version", 0) != 1)
            throw std::invalid_argument("version: expected 1");
        if (!j.contains("scenario"))
            throw std::invalid_argument("scenario: missing");
        base = scenario_from_json(j.at("scenario").dump());
        json sw = j.value("sweep", json::object());
        bws = sw.value("bandwidths_gbps",
                       std::vector<uint64_t>{base.topo.bandwidth_bps / 1'000'000'000ull});
        sizes = sw.value("flow_mib", std::vector<uint64_t>{base.flow_bytes >> 20});
        balancers = sw.value("balancers",
                             std::vector<std::string>{balancer_name(base.net.balancer)});
        seeds = sw.value("seeds", std::vector<uint64_t>{1});
        if (bws.empty() || sizes.empty() || balancers.empty() || seeds.empty())
            throw std::invalid_argument("sweep: empty expansion");
        for (const std::string& b : balancers)
            (void)balancer_from_name(b);
    } catch (const std::exception& e) {
        emit_error("config", e.what());
        return 2;
    }

    // fixed expansion order keeps the table layout independent of job count
    std::vector<SweepCell> cells;
    for (uint64_t bw : bws)
        for (uint64_t mib : sizes)
            for (const std::string& bal : balancers)
                for (uint64_t seed : seeds)
                    cells.push_back({bw, mib, bal, seed});

    // validate every cell up front so a bad cell fails before any run starts
    try {
        for (const SweepCell& c : cells) {
            Scenario s = base;
            s.topo.bandwidth_bps = c.bandwidth_gbps * 1'000'000'000ull;
            s.flow_bytes = c.flow_mib << 20;
            s.net.balancer = balancer_from_name(c.balancer);
            validate_scenario(s);
        }
    } catch (const std::exception& e) {
        emit_error("config", e.what());
        return 2;
    }

    uint64_t hash = fnv1a64(text);
    write_manifest(out_dir, matrix_path, hash, seeds[0], "running", 0.0);
    auto wall0 = std::chrono::steady_clock::now();

    std::vector<SweepRow> rows(cells.size());
    std::atomic<size_t> next{0};
    if (jobs < 1)
        jobs = 1;
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= cells.size())
                return;
            const SweepCell& c = cells[i];
            Scenario s = base;
            s.topo.bandwidth_bps = c.bandwidth_gbps * 1'000'000'000ull;
            s.flow_bytes = c.flow_mib << 20;
            s.net.balancer = balancer_from_name(c.balancer);
            RunResult r = run_scenario(s, c.seed);
            rows[i] = {r.status, (double)r.max_fct / 1e6, (double)r.max_ideal / 1e6, r.ratio};
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back(worker);
    for (std::thread& t : pool)
        t.join();

    std::string grid = "bandwidth_gbps,flow_mib,balancer,seed,status,max_fct_us,ideal_fct_us,ratio\n";
    bool all_ok = true;
    for (size_t i = 0; i < cells.size(); ++i) {
        char line[200];
        std::snprintf(line, sizeof line, "%llu,%llu,%s,%llu,%s,%.6f,%.6f,%.6f\n",
                      (unsigned long long)cells[i].bandwidth_gbps,
                      (unsigned long long)cells[i].flow_mib, cells[i].balancer.c_str(),
                      (unsigned long long)cells[i].seed, rows[i].status.c_str(),
                      rows[i].max_fct_us, rows[i].ideal_fct_us, rows[i].ratio);
        grid += line;
        all_ok = all_ok && rows[i].status == "ok";
    }
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "ratio_grid.csv", std::ios::binary | std::ios::trunc);
    out << grid;
    out.close();
    double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    write_manifest(out_dir, matrix_path, hash, seeds[0], all_ok ? "ok" : "partial", wall);
    if (!all_ok) {
        emit_error("partial", "one or more sweep cells did not finish; see ratio_grid.csv");
        return 1;
    }
    std::printf("ok cells=%zu jobs=%d\n", cells.size(), jobs);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"packet-spraying fabric simulator"};
    app.require_subcommand(1);

    std::string scenario_path, matrix_path, out_dir = "out";
    uint64_t seed = 1;
    double deadline_s = 0.0;
    int jobs = 1;

    CLI::App* run = app.add_subcommand("run", "execute one scenario");
    run->add_option("--scenario", scenario_path, "scenario json")->required();
    run->add_option("--seed", seed, "global seed");
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--deadline", deadline_s, "wall-clock budget in seconds, 0 = none");

    CLI::App* sweep = app.add_subcommand("sweep", "run a bandwidth x size x balancer matrix");
    sweep->add_option("--matrix", matrix_path, "matrix json")->required();
    sweep->add_option("--jobs", jobs, "parallel runs");
    sweep->add_option("--out", out_dir, "output directory")->required();

    CLI::App* validate = app.add_subcommand("validate", "check a scenario without running");
    validate->add_option("--scenario", scenario_path, "scenario json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (run->parsed())
        return cmd_run(scenario_path, seed, out_dir, deadline_s);
    if (sweep->parsed())
        return cmd_sweep(matrix_path, jobs, out_dir);
    return cmd_validate(scenario_path);
}
