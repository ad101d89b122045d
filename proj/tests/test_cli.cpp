#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = HDVP_CLI_PATH;
const std::string kSource = HDVP_SOURCE_DIR;

int run_cli(const std::string& args) {
    const std::string command = kCli + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
    const int status = std::system(command.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::current_path() / name;
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("analyze: reference maxima and both latency variants emitted") {
    const fs::path out = fresh_dir("cli_analyze");
    const int code = run_cli("analyze --config " + kSource + "/configs/reference.json --out " +
                             out.string() + " --n-range 1:500");
    CHECK(code == 0);
    const std::string summary = slurp(out / "summary.json");
    CHECK(summary.find("\"max_vehicles_aloha\": 6") != std::string::npos);
    CHECK(summary.find("\"max_vehicles_reservation_calibrated\": 394") != std::string::npos);
    CHECK(summary.find("\"max_vehicles_reservation_as_printed\": 278") != std::string::npos);
    CHECK(summary.find("\"n_slots\": 5000") != std::string::npos);
    CHECK(fs::exists(out / "aloha_collision.csv"));
    CHECK(fs::exists(out / "reservation_latency.csv"));
}

TEST_CASE("analyze: single-point range with the as-printed variant") {
    const fs::path out = fresh_dir("cli_analyze_n1");
    const int code = run_cli("analyze --config " + kSource + "/configs/reference.json --out " +
                             out.string() + " --n-range 1:1 --variant as-printed");
    CHECK(code == 0);
    const std::string collision = slurp(out / "aloha_collision.csv");
    CHECK(collision.find("\n1,0\n") != std::string::npos);
    const std::string latency = slurp(out / "reservation_latency.csv");
    CHECK(latency.find("\n1,0\n") != std::string::npos);
}

TEST_CASE("config errors exit with code 2") {
    CHECK(run_cli("analyze --config /nonexistent.json --out cli_tmp") == 2);
    {
        std::ofstream bad("cli_bad.json");
        bad << "{ not json";
    }
    CHECK(run_cli("analyze --config cli_bad.json --out cli_tmp") == 2);
    CHECK(run_cli("analyze") == 2); // missing required flag
    CHECK(run_cli("frobnicate --config x") == 2);
}

TEST_CASE("infeasible slot budgets exit with code 4") {
    {
        std::ofstream cfg("cli_infeasible.json");
        cfg << R"({
          "radio": {"bandwidth_hz": 10000000.0, "spectral_efficiency": 2.0},
          "traffic": {"packet_size_bits": 20000000, "generation_rate": 2.0},
          "qos": {"reliability_target": 0.001, "latency_target_s": 0.003}
        })";
    }
    CHECK(run_cli("analyze --config cli_infeasible.json --out cli_tmp") == 4);
}

TEST_CASE("simulate: quiet scenario produces empty event log") {
    const fs::path out = fresh_dir("cli_sim_quiet");
    const int code = run_cli("simulate --config " + kSource +
                             "/scenarios/empty_coverage_small.json --out " + out.string());
    CHECK(code == 0);
    CHECK(slurp(out / "events.ndjson").empty());
    const std::string summary = slurp(out / "summary.json");
    CHECK(summary.find("\"splits\": 0") != std::string::npos);
    CHECK(summary.find("\"merges\": 0") != std::string::npos);
}

TEST_CASE("simulate: coverage-hole reference scenario") {
    const fs::path out = fresh_dir("cli_sim_hole");
    const int code = run_cli("simulate --config " + kSource +
                             "/scenarios/coverage_hole.json --out " + out.string());
    CHECK(code == 0);
    const std::string summary = slurp(out / "summary.json");
    CHECK(summary.find("\"splits\": 3") != std::string::npos);
    CHECK(summary.find("\"merges\": 3") != std::string::npos);
    CHECK(summary.find("\"final_platoon_count\": 1") != std::string::npos);
}

TEST_CASE("simulate twice: byte-identical outputs") {
    const fs::path out_a = fresh_dir("cli_sim_a");
    const fs::path out_b = fresh_dir("cli_sim_b");
    const std::string config = kSource + "/scenarios/coverage_hole.json";
    CHECK(run_cli("simulate --config " + config + " --out " + out_a.string()) == 0);
    CHECK(run_cli("simulate --config " + config + " --out " + out_b.string()) == 0);
    CHECK(slurp(out_a / "events.ndjson") == slurp(out_b / "events.ndjson"));
    CHECK(slurp(out_a / "metrics.csv") == slurp(out_b / "metrics.csv"));
    CHECK(slurp(out_a / "summary.json") == slurp(out_b / "summary.json"));
}

TEST_CASE("sweep: sub-channelization lifts mean capacity") {
    const fs::path out = fresh_dir("cli_sweep");
    const int code = run_cli("sweep --config " + kSource +
                             "/scenarios/coverage_hole.json --out " + out.string() +
                             " --sweep radio.subchannel_count=1,2,4");
    CHECK(code == 0);
    const std::string csv = slurp(out / "sweep.csv");

    // Parse value -> mean_capacity_vps (column 5).
    std::istringstream lines(csv);
    std::string line;
    std::vector<double> capacity;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("radio.", 0) == 0) continue;
        std::istringstream fields(line);
        std::string field;
        std::vector<std::string> row;
        while (std::getline(fields, field, ',')) row.push_back(field);
        REQUIRE(row.size() >= 5);
        capacity.push_back(std::stod(row[4]));
    }
    REQUIRE(capacity.size() == 3);
    // Single channel forces maneuvers that stretch the convoy; each extra
    // sub-channel avoids more of them.
    CHECK(capacity[0] < capacity[1]);
    CHECK(capacity[1] < capacity[2]);
    CHECK(fs::exists(out / "radio.subchannel_count=1" / "events.ndjson"));
}

TEST_CASE("sweep: single value matches a plain simulate run") {
    const fs::path sweep_out = fresh_dir("cli_sweep_single");
    const fs::path sim_out = fresh_dir("cli_sim_single");
    const std::string config = kSource + "/scenarios/coverage_hole.json";
    CHECK(run_cli("sweep --config " + config + " --out " + sweep_out.string() +
                  " --sweep radio.subchannel_count=4") == 0);
    CHECK(run_cli("simulate --config " + config + " --out " + sim_out.string()) == 0);
    CHECK(slurp(sweep_out / "radio.subchannel_count=4" / "events.ndjson") ==
          slurp(sim_out / "events.ndjson"));
    CHECK(slurp(sweep_out / "radio.subchannel_count=4" / "metrics.csv") ==
          slurp(sim_out / "metrics.csv"));
}

TEST_CASE("sweep: unknown field exits with code 2") {
    CHECK(run_cli("sweep --config " + kSource + "/scenarios/coverage_hole.json --out cli_tmp" +
                  " --sweep radio.warp_factor=9") == 2);
}

TEST_CASE("simulate: --seed overrides the scenario seed") {
    const fs::path out = fresh_dir("cli_sim_seed");
    const int code = run_cli("simulate --config " + kSource +
                             "/scenarios/empty_coverage_small.json --out " + out.string() +
                             " --seed 999");
    CHECK(code == 0);
    CHECK(fs::exists(out / "summary.json"));
}

TEST_CASE("mc: quick validation run") {
    const fs::path out = fresh_dir("cli_mc");
    const int code = run_cli("mc --config " + kSource + "/configs/reference.json --out " +
                             out.string() + " --n-range 2:6:4 --trials 20000 --seed 7");
    CHECK(code == 0);
    const std::string csv = slurp(out / "mc_aloha.csv");
    CHECK(csv.find("n,closed_form,mc_mean,mc_std_error,z") != std::string::npos);
    CHECK(fs::exists(out / "mc_reservation.csv"));
}

TEST_CASE("capacity: curve generation") {
    const fs::path out = fresh_dir("cli_capacity");
    const int code = run_cli("capacity --config " + kSource + "/configs/reference.json --out " +
                             out.string() + " --n-range 1:20");
    CHECK(code == 0);
    const std::string csv = slurp(out / "capacity.csv");
    CHECK(csv.find("\n10,2.7027027027\n") != std::string::npos);
}
