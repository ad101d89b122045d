// hdvp: analytical QoS planner and highway platooning simulator front end.
//
// Exit codes: 0 success, 2 config error, 3 simulation invariant violation,
// 4 infeasible analytics (e.g. a slot budget below one slot).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hdvp/errors.hpp"
#include "hdvp/highway_sim.hpp"
#include "hdvp/mac_montecarlo.hpp"
#include "hdvp/qos_analytics.hpp"
#include "hdvp/scenario_io.hpp"
#include "hdvp/spectrum_manager.hpp"

namespace fs = std::filesystem;

namespace {

struct NRange {
    int lo = 1;
    int hi = 500;
    int step = 1;
};

NRange parse_n_range(const std::string& text) {
    NRange range;
    const auto first = text.find(':');
    if (first == std::string::npos) throw hdvp::ConfigError("--n-range must be lo:hi[:step]");
    try {
        range.lo = std::stoi(text.substr(0, first));
        const auto rest = text.substr(first + 1);
        const auto second = rest.find(':');
        if (second == std::string::npos) {
            range.hi = std::stoi(rest);
        } else {
            range.hi = std::stoi(rest.substr(0, second));
            range.step = std::stoi(rest.substr(second + 1));
        }
    } catch (const std::exception&) {
        throw hdvp::ConfigError("--n-range must be lo:hi[:step]");
    }
    if (range.lo < 1 || range.hi < range.lo || range.step < 1) {
        throw hdvp::ConfigError("--n-range must satisfy 1 <= lo <= hi, step >= 1");
    }
    return range;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw hdvp::ConfigError("cannot write " + path.string());
    return out;
}

int run_analyze(const std::string& config_path, const std::string& out_dir,
                const std::string& n_range_text, hdvp::LatencyVariant variant) {
    const hdvp::AnalyticsConfig cfg = hdvp::load_analytics_config_file(config_path);
    const NRange range = parse_n_range(n_range_text);
    const std::int64_t n_slots = hdvp::slots_per_interval(cfg.radio, cfg.traffic);
    fs::create_directories(out_dir);

    {
        auto out = open_output(fs::path(out_dir) / "aloha_collision.csv");
        out << "# slotted ALOHA: platoon size n vs collision probability\n";
        out << "n,aloha_collision_prob\n";
        for (int n = range.lo; n <= range.hi; n += range.step) {
            const double pc = hdvp::aloha_collision_probability(
                hdvp::PlatoonSizeDistribution::point_mass(n), n_slots);
            out << n << ',' << hdvp::format_number(pc) << "\n";
        }
    }
    {
        auto out = open_output(fs::path(out_dir) / "reservation_latency.csv");
        out << "# reservation MAC (" << hdvp::to_string(variant)
            << "): platoon size n vs mean latency [s]\n";
        out << "n,reservation_latency_s\n";
        const int hi = static_cast<int>(std::min<std::int64_t>(range.hi, n_slots));
        for (int n = range.lo; n <= hi; n += range.step) {
            const double latency = hdvp::reservation_latency(
                hdvp::PlatoonSizeDistribution::point_mass(n), cfg.radio, cfg.traffic, variant);
            out << n << ',' << hdvp::format_number(latency) << "\n";
        }
    }

    const int aloha_max = hdvp::max_vehicles_aloha(cfg.radio, cfg.traffic, cfg.qos);
    const int res_cal = hdvp::max_vehicles_reservation(cfg.radio, cfg.traffic, cfg.qos,
                                                       hdvp::LatencyVariant::Calibrated);
    const int res_printed = hdvp::max_vehicles_reservation(cfg.radio, cfg.traffic, cfg.qos,
                                                           hdvp::LatencyVariant::AsPrinted);
    {
        auto out = open_output(fs::path(out_dir) / "summary.json");
        out << "{\n"
            << "  \"n_slots\": " << n_slots << ",\n"
            << "  \"max_vehicles_aloha\": " << aloha_max << ",\n"
            << "  \"max_vehicles_reservation_calibrated\": " << res_cal << ",\n"
            << "  \"max_vehicles_reservation_as_printed\": " << res_printed << ",\n"
            << "  \"selected_variant\": \"" << hdvp::to_string(variant) << "\"\n"
            << "}\n";
    }
    std::cout << "summary: n_slots=" << n_slots << " max_vehicles_aloha=" << aloha_max
              << " max_vehicles_reservation_calibrated=" << res_cal
              << " max_vehicles_reservation_as_printed=" << res_printed << "\n";
    return 0;
}

int run_capacity(const std::string& config_path, const std::string& out_dir,
                 const std::string& n_range_text) {
    const hdvp::AnalyticsConfig cfg = hdvp::load_analytics_config_file(config_path);
    const NRange range = parse_n_range(n_range_text);
    fs::create_directories(out_dir);
    auto out = open_output(fs::path(out_dir) / "capacity.csv");
    out << "# road capacity [vehicles/s] vs platoon size n\n";
    out << "n,capacity_vps\n";
    for (int n = range.lo; n <= range.hi; n += range.step) {
        out << n << ',' << hdvp::format_number(hdvp::road_capacity(cfg.geometry, n)) << "\n";
    }
    const double bound =
        cfg.geometry.speed_mps / (cfg.geometry.vehicle_length_m + cfg.geometry.intra_spacing_m);
    std::cout << "capacity bound v/(s+d) = " << hdvp::format_number(bound) << " veh/s\n";
    return 0;
}

int run_mc(const std::string& config_path, const std::string& out_dir,
           const std::string& n_range_text, std::int64_t trials, std::uint64_t seed) {
    const hdvp::AnalyticsConfig cfg = hdvp::load_analytics_config_file(config_path);
    const NRange range = parse_n_range(n_range_text);
    const std::int64_t n_slots = hdvp::slots_per_interval(cfg.radio, cfg.traffic);
    const double slot_time = static_cast<double>(cfg.traffic.packet_size_bits) /
                             (cfg.radio.spectral_efficiency * cfg.radio.bandwidth_hz);
    fs::create_directories(out_dir);

    auto aloha_csv = open_output(fs::path(out_dir) / "mc_aloha.csv");
    aloha_csv << "# ALOHA collision probability: closed form vs Monte Carlo (" << trials
              << " trials)\n";
    aloha_csv << "n,closed_form,mc_mean,mc_std_error,z\n";
    auto res_csv = open_output(fs::path(out_dir) / "mc_reservation.csv");
    res_csv << "# reservation queue latency, synchronized arrivals (" << trials << " trials)\n";
    res_csv << "n,mean_s,p50_s,p99_s,max_s,collisions\n";

    for (int n = range.lo; n <= range.hi; n += range.step) {
        hdvp::TrialConfig trial{trials, seed, n, n_slots, slot_time};
        const auto estimate = hdvp::simulate_aloha_collision(trial);
        const double closed = hdvp::aloha_collision_probability(
            hdvp::PlatoonSizeDistribution::point_mass(n), n_slots);
        const double z = estimate.std_error > 0.0
                             ? (estimate.mean - closed) / estimate.std_error
                             : 0.0;
        aloha_csv << n << ',' << hdvp::format_number(closed) << ','
                  << hdvp::format_number(estimate.mean) << ','
                  << hdvp::format_number(estimate.std_error) << ',' << hdvp::format_number(z)
                  << "\n";
        if (n <= n_slots) {
            const auto stats =
                hdvp::simulate_reservation_latency(trial, hdvp::ArrivalPattern::Synchronized);
            res_csv << n << ',' << hdvp::format_number(stats.mean_s) << ','
                    << hdvp::format_number(stats.p50_s) << ','
                    << hdvp::format_number(stats.p99_s) << ','
                    << hdvp::format_number(stats.max_s) << ',' << stats.collisions << "\n";
        }
    }
    std::cout << "mc: wrote mc_aloha.csv and mc_reservation.csv (n_slots=" << n_slots << ")\n";
    return 0;
}

void write_run_outputs(const fs::path& dir, const hdvp::MetricsReport& report) {
    fs::create_directories(dir);
    {
        auto out = open_output(dir / "events.ndjson");
        hdvp::write_event_log_ndjson(out, report.event_log);
    }
    {
        auto out = open_output(dir / "metrics.csv");
        hdvp::write_metrics_csv(out, report.samples);
    }
    {
        auto out = open_output(dir / "summary.json");
        out << hdvp::summary_json(report);
    }
}

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed) {
    hdvp::Scenario scenario = hdvp::load_scenario_file(config_path);
    if (seed) scenario.seed = *seed;
    const hdvp::MetricsReport report = hdvp::run(scenario);
    write_run_outputs(out_dir, report);
    std::cout << "simulate: splits=" << report.splits << " merges=" << report.merges
              << " final_platoons=" << report.final_platoon_count
              << " maneuver_time_s=" << hdvp::format_number(report.maneuver_time_s) << "\n";
    return 0;
}

int run_sweep(const std::string& config_path, const std::string& out_dir,
              const std::string& sweep_spec) {
    const auto eq = sweep_spec.find('=');
    if (eq == std::string::npos) throw hdvp::ConfigError("--sweep must be field=v1,v2,...");
    const std::string field = sweep_spec.substr(0, eq);
    std::vector<std::string> values;
    std::string rest = sweep_spec.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
        const auto comma = rest.find(',', pos);
        values.push_back(rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                                     : comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (values.empty()) throw hdvp::ConfigError("--sweep needs at least one value");

    const hdvp::Scenario base = hdvp::load_scenario_file(config_path);
    fs::create_directories(out_dir);
    auto csv = open_output(fs::path(out_dir) / "sweep.csv");
    csv << "# sweep over " << field << "\n";
    csv << field
        << ",splits,merges,maneuver_time_s,mean_capacity_vps,final_platoon_count,"
           "qos_violation_total\n";
    for (const auto& value : values) {
        hdvp::Scenario scenario = base;
        hdvp::apply_scenario_override(scenario, field, value);
        const hdvp::MetricsReport report = hdvp::run(scenario);
        write_run_outputs(fs::path(out_dir) / (field + "=" + value), report);
        std::int64_t violation_total = 0;
        for (const auto& [key, count] : report.qos_violations) violation_total += count;
        csv << value << ',' << report.splits << ',' << report.merges << ','
            << hdvp::format_number(report.maneuver_time_s) << ','
            << hdvp::format_number(report.mean_capacity_vps) << ','
            << report.final_platoon_count << ',' << violation_total << "\n";
    }
    std::cout << "sweep: " << values.size() << " runs over " << field << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"highway platooning QoS planner and simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string n_range = "1:500";
    std::string variant_name = "calibrated";
    std::string sweep_spec;
    std::int64_t trials = 100000;
    std::uint64_t seed_value = 1;
    bool seed_given = false;

    auto add_common = [&](CLI::App* cmd, bool needs_range) {
        cmd->add_option("--config", config_path, "parameter or scenario JSON file")->required();
        cmd->add_option("--out", out_dir, "output directory");
        if (needs_range) cmd->add_option("--n-range", n_range, "platoon size range lo:hi[:step]");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "latency/collision curves and maxima");
    add_common(analyze, true);
    analyze->add_option("--variant", variant_name, "as-printed or calibrated");

    CLI::App* capacity = app.add_subcommand("capacity", "road capacity curve");
    add_common(capacity, true);

    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo MAC validation");
    add_common(mc, true);
    mc->add_option("--trials", trials, "trials per estimate");
    mc->add_option("--seed", seed_value, "RNG seed");

    CLI::App* simulate = app.add_subcommand("simulate", "run one scenario");
    add_common(simulate, false);
    simulate->add_option("--seed", seed_value, "override the scenario seed")
        ->each([&](const std::string&) { seed_given = true; });

    CLI::App* sweep = app.add_subcommand("sweep", "run a scenario over a parameter set");
    add_common(sweep, false);
    sweep->add_option("--sweep", sweep_spec, "field=v1,v2,...")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*analyze) {
            return run_analyze(config_path, out_dir, n_range,
                               hdvp::parse_latency_variant(variant_name));
        }
        if (*capacity) return run_capacity(config_path, out_dir, n_range);
        if (*mc) {
            if (mc->count("--n-range") == 0) n_range = "1:6";
            return run_mc(config_path, out_dir, n_range, trials, seed_value);
        }
        if (*simulate) {
            return run_simulate(config_path, out_dir,
                                seed_given ? std::optional<std::uint64_t>(seed_value)
                                           : std::nullopt);
        }
        if (*sweep) return run_sweep(config_path, out_dir, sweep_spec);
    } catch (const hdvp::SimulationError& e) {
        std::cerr << "simulation invariant violation: " << e.what() << "\n";
        return 3;
    } catch (const hdvp::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 4;
    } catch (const hdvp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
