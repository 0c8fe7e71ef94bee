#pragma once
#include "spraysim/scenario.hpp"

#include <memory>
#include <string>

namespace spraysim {

// One executed scenario: summary scalars plus the live network for deeper
// inspection. The network is kept so callers can read metrics and host state
// after the run; drop it to reclaim memory in long sweeps.
struct RunResult {
    Scenario scen;
    uint64_t seed = 0;
    std::string status;  // ok | deadline | wall_limit
    SimTime sim_end = 0;
    double wall_seconds = 0.0;
    size_t incomplete = 0;

    SimTime max_fct = 0;
    double avg_fct = 0.0;  // ps, completed flows only
    SimTime max_ideal = 0;
    double ratio = 0.0;  // max_fct / max_ideal
    SimTime max_fct_sprayed = 0;
    SimTime max_fct_ecmp = 0;
    uint32_t max_port_depth_pkts = 0;  // over switch egress ports
    uint64_t max_port_depth_bytes = 0;

    std::unique_ptr<Network> net;
    std::unique_ptr<QueueSampler> sampler;
};

// Builds the impaired fabric, installs the flows, and runs in fixed sim-time
// chunks until every flow finishes or a deadline trips. A scenario deadline
// of 0 falls back to a generous bound so a wedged run still terminates.
RunResult run_scenario(const Scenario& s, uint64_t seed, double wall_limit_seconds = 0.0);

// FNV-1a 64-bit over the raw scenario bytes; binds outputs to their input.
uint64_t fnv1a64(const std::string& bytes);

// OUT/summary.csv, flows.csv, queues.csv, figdata/*.csv. No wall-clock
// values appear in these files, so identical runs diff clean.
void write_outputs(const RunResult& r, const std::string& out_dir);

// The manifest carries provenance and wall time. Callers write it with
// status "running" before the run and rewrite it with the final status.
void write_manifest(const std::string& out_dir, const std::string& scenario_path,
                    uint64_t scenario_hash, uint64_t seed, const std::string& status,
                    double wall_seconds);

} // namespace spraysim
