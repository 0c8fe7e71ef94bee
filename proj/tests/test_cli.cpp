#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spraysim/runner.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace spraysim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const std::string& stderr_to = "/dev/null") {
    std::string cmd = std::string(SPRAYSIM_BIN) + " " + args + " > /dev/null 2> " + stderr_to;
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path scratch(const char* leaf) {
    fs::path p = fs::temp_directory_path() / leaf;
    fs::remove_all(p);
    return p;
}

const std::string kScenarios = SCENARIO_DIR;

} // namespace

TEST_CASE("run executes a scenario and writes the full output layout") {
    fs::path out = scratch("spraysim_cli_run");
    int rc = run_cli("run --scenario " + kScenarios + "/calibration.json --seed 7 --out " +
                     out.string());
    CHECK(rc == 0);
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(fs::exists(out / "summary.csv"));
    CHECK(fs::exists(out / "flows.csv"));
    CHECK(fs::exists(out / "queues.csv"));
    CHECK(fs::exists(out / "figdata" / "port_max_depth.csv"));
    std::string man = slurp((out / "manifest.json").string());
    CHECK(man.find("\"status\": \"ok\"") != std::string::npos);
    CHECK(man.find("\"seed\": 7") != std::string::npos);
    CHECK(man.find("scenario_fnv1a64") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("validate accepts the shipped scenarios") {
    for (const char* name :
         {"permutation.json", "calibration.json", "failure.json", "degradation.json",
          "leaf_pair.json", "mixed_sp.json", "mixed_wrr50.json"})
        CHECK(run_cli("validate --scenario " + kScenarios + "/" + name) == 0);
}

TEST_CASE("config errors exit 2 with a machine-readable reason") {
    fs::path bad = scratch("spraysim_cli_bad.json");
    std::ofstream(bad) << R"({"version":1,"topology":
        {"hosts":128,"switch_ports":16,"bandwidth_gbps":999}})";
    fs::path errfile = scratch("spraysim_cli_err");
    CHECK(run_cli("validate --scenario " + bad.string(), errfile.string()) == 2);
    std::string err = slurp(errfile.string());
    CHECK(err.find("\"error\":\"config\"") != std::string::npos);
    CHECK(err.find("bandwidth_gbps") != std::string::npos);
    CHECK(run_cli("run --scenario " + bad.string() + " --out /tmp/spraysim_noout") == 2);
    CHECK(run_cli("run --no-such-flag") == 2);
    CHECK(run_cli("validate --scenario /no/such/file.json") == 2);
    fs::remove(bad);
    fs::remove(errfile);
}

TEST_CASE("cli and library produce byte-identical results") {
    fs::path cli_out = scratch("spraysim_cli_a");
    REQUIRE(run_cli("run --scenario " + kScenarios + "/calibration.json --seed 3 --out " +
                    cli_out.string()) == 0);

    Scenario s = scenario_from_json(slurp(kScenarios + "/calibration.json"));
    RunResult r = run_scenario(s, 3);
    fs::path lib_out = scratch("spraysim_lib_a");
    write_outputs(r, lib_out.string());

    for (const char* f : {"summary.csv", "flows.csv", "queues.csv"})
        CHECK(slurp((cli_out / f).string()) == slurp((lib_out / f).string()));
    CHECK(slurp((cli_out / "figdata" / "port_max_depth.csv").string()) ==
          slurp((lib_out / "figdata" / "port_max_depth.csv").string()));
    fs::remove_all(cli_out);
    fs::remove_all(lib_out);
}

TEST_CASE("identical seed reruns produce identical outputs") {
    fs::path a = scratch("spraysim_cli_r1");
    fs::path b = scratch("spraysim_cli_r2");
    std::string base = "run --scenario " + kScenarios + "/failure.json --seed 11 --out ";
    REQUIRE(run_cli(base + a.string()) == 0);
    REQUIRE(run_cli(base + b.string()) == 0);
    for (const char* f : {"summary.csv", "flows.csv", "queues.csv"})
        CHECK(slurp((a / f).string()) == slurp((b / f).string()));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("sweep tables are identical regardless of parallelism") {
    fs::path s1 = scratch("spraysim_sw1");
    fs::path s8 = scratch("spraysim_sw8");
    std::string mat = kScenarios + "/sweep_small.json";
    REQUIRE(run_cli("sweep --matrix " + mat + " --jobs 1 --out " + s1.string()) == 0);
    REQUIRE(run_cli("sweep --matrix " + mat + " --jobs 8 --out " + s8.string()) == 0);
    std::string grid = slurp((s1 / "ratio_grid.csv").string());
    CHECK(grid == slurp((s8 / "ratio_grid.csv").string()));
    CHECK(grid.find("400,2,prime,1,ok,") != std::string::npos);
    CHECK(grid.find("400,2,reps,2,ok,") != std::string::npos);
    fs::remove_all(s1);
    fs::remove_all(s8);
}

TEST_CASE("empty sweep expansion is a usage error") {
    fs::path mat = scratch("spraysim_cli_empty.json");
    std::ofstream(mat) << R"({"version":1,"scenario":{"version":1,"topology":
        {"hosts":64,"switch_ports":16,"bandwidth_gbps":400}},
        "sweep":{"seeds":[]}})";
    CHECK(run_cli("sweep --matrix " + mat.string() + " --jobs 1 --out /tmp/spraysim_noout") == 2);
    fs::remove(mat);
}
