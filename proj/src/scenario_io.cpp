#include "hdvp/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hdvp/errors.hpp"

namespace hdvp {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("malformed JSON");
    return j;
}

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (allowed.count(key) == 0) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    if (!obj[key].is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return obj[key].get<double>();
}

double get_number_or(const json& obj, const std::string& where, const std::string& key,
                     double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    if (!obj[key].is_number_integer()) {
        throw ConfigError(where + "." + key + ": expected an integer");
    }
    return obj[key].get<int>();
}

int get_int_or(const json& obj, const std::string& where, const std::string& key,
               int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) {
        throw ConfigError(where + "." + key + ": expected an integer");
    }
    return obj[key].get<int>();
}

TrafficModel parse_traffic(const json& obj) {
    require_keys(obj, "traffic", {"packet_size_bits", "packet_size_bytes", "generation_rate"});
    const bool has_bits = obj.contains("packet_size_bits");
    const bool has_bytes = obj.contains("packet_size_bytes");
    if (has_bits == has_bytes) {
        throw ConfigError("traffic: give exactly one of packet_size_bits / packet_size_bytes");
    }
    TrafficModel traffic;
    traffic.packet_size_bits =
        has_bits ? static_cast<std::int64_t>(get_number(obj, "traffic", "packet_size_bits"))
                 : static_cast<std::int64_t>(get_number(obj, "traffic", "packet_size_bytes")) * 8;
    traffic.generation_rate_hz = get_number(obj, "traffic", "generation_rate");
    traffic.validate();
    return traffic;
}

RadioConfig parse_radio(const json& obj) {
    require_keys(obj, "radio", {"bandwidth_hz", "spectral_efficiency", "subchannel_count"});
    RadioConfig radio;
    radio.bandwidth_hz = get_number(obj, "radio", "bandwidth_hz");
    radio.spectral_efficiency = get_number(obj, "radio", "spectral_efficiency");
    radio.subchannel_count = get_int_or(obj, "radio", "subchannel_count", 1);
    radio.validate();
    return radio;
}

QosTarget parse_qos(const json& obj) {
    require_keys(obj, "qos", {"reliability_target", "latency_target_s"});
    QosTarget qos;
    qos.reliability_target = get_number(obj, "qos", "reliability_target");
    qos.latency_target_s = get_number(obj, "qos", "latency_target_s");
    qos.validate();
    return qos;
}

RoadGeometry parse_geometry(const json& obj) {
    require_keys(obj, "geometry",
                 {"vehicle_length_m", "intra_spacing_m", "inter_spacing_m", "speed_mps"});
    RoadGeometry geom;
    geom.vehicle_length_m = get_number(obj, "geometry", "vehicle_length_m");
    geom.intra_spacing_m = get_number(obj, "geometry", "intra_spacing_m");
    geom.inter_spacing_m = get_number(obj, "geometry", "inter_spacing_m");
    geom.speed_mps = get_number(obj, "geometry", "speed_mps");
    geom.validate();
    return geom;
}

CoverageMap parse_coverage(const json& obj) {
    require_keys(obj, "coverage",
                 {"base_stations", "pathloss_exponent", "reference_distance_m",
                  "reference_loss_db"});
    CoverageMap map;
    map.pathloss_exponent = get_number_or(obj, "coverage", "pathloss_exponent", 3.0);
    map.reference_distance_m = get_number_or(obj, "coverage", "reference_distance_m", 1.0);
    map.reference_loss_db = get_number_or(obj, "coverage", "reference_loss_db", 40.0);
    if (obj.contains("base_stations")) {
        if (!obj["base_stations"].is_array()) {
            throw ConfigError("coverage.base_stations: expected an array");
        }
        for (const auto& bs : obj["base_stations"]) {
            require_keys(bs, "base_station", {"position_m", "tx_power_dbm"});
            map.base_stations.push_back({get_number(bs, "base_station", "position_m"),
                                         get_number(bs, "base_station", "tx_power_dbm")});
        }
    }
    map.validate();
    return map;
}

} // namespace

LatencyVariant parse_latency_variant(const std::string& name) {
    if (name == "calibrated") return LatencyVariant::Calibrated;
    if (name == "as_printed" || name == "as-printed") return LatencyVariant::AsPrinted;
    throw ConfigError("unknown latency variant '" + name + "'");
}

const char* to_string(LatencyVariant variant) {
    return variant == LatencyVariant::Calibrated ? "calibrated" : "as_printed";
}

Scenario parse_scenario(const std::string& json_text) {
    const json root = parse_json(json_text);
    require_keys(root, "scenario",
                 {"road_length_m", "duration_s", "timestep_s", "seed", "geometry", "radio",
                  "traffic", "qos", "cap", "thresholds", "transmission_range_m",
                  "latency_variant", "initial_platoons", "coverage", "speed_delta_mps",
                  "guard_margin_m", "shadowing_sigma_db"});
    Scenario s;
    s.road_length_m = get_number(root, "scenario", "road_length_m");
    s.duration_s = get_number(root, "scenario", "duration_s");
    s.timestep_s = get_number_or(root, "scenario", "timestep_s", 0.1);
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned() && !root["seed"].is_number_integer()) {
            throw ConfigError("scenario.seed: expected an unsigned integer");
        }
        s.seed = root["seed"].get<std::uint64_t>();
    }
    if (!root.contains("geometry")) throw ConfigError("scenario: missing key 'geometry'");
    s.geometry = parse_geometry(root["geometry"]);
    if (!root.contains("radio")) throw ConfigError("scenario: missing key 'radio'");
    s.radio = parse_radio(root["radio"]);
    if (!root.contains("traffic")) throw ConfigError("scenario: missing key 'traffic'");
    s.traffic = parse_traffic(root["traffic"]);
    if (!root.contains("qos")) throw ConfigError("scenario: missing key 'qos'");
    s.qos = parse_qos(root["qos"]);
    if (!root.contains("cap")) throw ConfigError("scenario: missing key 'cap'");
    require_keys(root["cap"], "cap", {"max_platoon_size"});
    s.cap.max_platoon_size = get_int(root["cap"], "cap", "max_platoon_size");
    if (!root.contains("thresholds")) throw ConfigError("scenario: missing key 'thresholds'");
    require_keys(root["thresholds"], "thresholds", {"prepare_dbm", "split_dbm"});
    s.thresholds.prepare_dbm = get_number(root["thresholds"], "thresholds", "prepare_dbm");
    s.thresholds.split_dbm = get_number(root["thresholds"], "thresholds", "split_dbm");
    s.transmission_range_m = get_number_or(root, "scenario", "transmission_range_m", 1000.0);
    if (root.contains("latency_variant")) {
        if (!root["latency_variant"].is_string()) {
            throw ConfigError("scenario.latency_variant: expected a string");
        }
        s.latency_variant = parse_latency_variant(root["latency_variant"].get<std::string>());
    }
    if (!root.contains("initial_platoons") || !root["initial_platoons"].is_array()) {
        throw ConfigError("scenario: missing array 'initial_platoons'");
    }
    for (const auto& p : root["initial_platoons"]) {
        require_keys(p, "initial_platoon", {"size", "lead_position_m", "subchannel"});
        InitialPlatoon init;
        init.size = get_int(p, "initial_platoon", "size");
        init.lead_position_m = get_number(p, "initial_platoon", "lead_position_m");
        init.subchannel = get_int_or(p, "initial_platoon", "subchannel", 0);
        s.initial_platoons.push_back(init);
    }
    if (!root.contains("coverage")) throw ConfigError("scenario: missing key 'coverage'");
    s.coverage = parse_coverage(root["coverage"]);
    s.speed_delta_mps = get_number_or(root, "scenario", "speed_delta_mps", 2.0);
    s.guard_margin_m = get_number_or(root, "scenario", "guard_margin_m", 50.0);
    s.shadowing_sigma_db = get_number_or(root, "scenario", "shadowing_sigma_db", 0.0);
    s.validate();
    return s;
}

AnalyticsConfig parse_analytics_config(const std::string& json_text) {
    const json root = parse_json(json_text);
    require_keys(root, "config", {"radio", "traffic", "qos", "geometry", "cap"});
    AnalyticsConfig cfg;
    if (!root.contains("radio")) throw ConfigError("config: missing key 'radio'");
    cfg.radio = parse_radio(root["radio"]);
    if (!root.contains("traffic")) throw ConfigError("config: missing key 'traffic'");
    cfg.traffic = parse_traffic(root["traffic"]);
    if (!root.contains("qos")) throw ConfigError("config: missing key 'qos'");
    cfg.qos = parse_qos(root["qos"]);
    if (root.contains("geometry")) cfg.geometry = parse_geometry(root["geometry"]);
    if (root.contains("cap")) {
        require_keys(root["cap"], "cap", {"max_platoon_size"});
        cfg.cap.max_platoon_size = get_int(root["cap"], "cap", "max_platoon_size");
        cfg.cap.validate();
    } else {
        cfg.cap.max_platoon_size = 1000000; // effectively uncapped
    }
    return cfg;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

Scenario load_scenario_file(const std::string& path) {
    return parse_scenario(read_file(path));
}

AnalyticsConfig load_analytics_config_file(const std::string& path) {
    return parse_analytics_config(read_file(path));
}

void apply_scenario_override(Scenario& scenario, const std::string& field,
                             const std::string& value) {
    double number = 0.0;
    try {
        std::size_t consumed = 0;
        number = std::stod(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
        throw ConfigError("sweep value '" + value + "' is not a number");
    }

    if (field == "radio.subchannel_count") {
        scenario.radio.subchannel_count = static_cast<int>(number);
    } else if (field == "radio.bandwidth_hz") {
        scenario.radio.bandwidth_hz = number;
    } else if (field == "radio.spectral_efficiency") {
        scenario.radio.spectral_efficiency = number;
    } else if (field == "traffic.generation_rate") {
        scenario.traffic.generation_rate_hz = number;
    } else if (field == "traffic.packet_size_bits") {
        scenario.traffic.packet_size_bits = static_cast<std::int64_t>(number);
    } else if (field == "qos.reliability_target") {
        scenario.qos.reliability_target = number;
    } else if (field == "qos.latency_target_s") {
        scenario.qos.latency_target_s = number;
    } else if (field == "cap.max_platoon_size") {
        scenario.cap.max_platoon_size = static_cast<int>(number);
    } else if (field == "transmission_range_m") {
        scenario.transmission_range_m = number;
    } else if (field == "speed_delta_mps") {
        scenario.speed_delta_mps = number;
    } else if (field == "guard_margin_m") {
        scenario.guard_margin_m = number;
    } else if (field == "shadowing_sigma_db") {
        scenario.shadowing_sigma_db = number;
    } else if (field == "seed") {
        scenario.seed = static_cast<std::uint64_t>(number);
    } else if (field == "duration_s") {
        scenario.duration_s = number;
    } else if (field == "timestep_s") {
        scenario.timestep_s = number;
    } else {
        throw ConfigError("unknown sweep field '" + field + "'");
    }
    scenario.validate();
}

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

void write_event_log_ndjson(std::ostream& out, const std::vector<Event>& events) {
    for (const auto& e : events) {
        json record;
        record["tick"] = e.tick;
        record["time_s"] = json::parse(format_number(e.time_s));
        record["event_type"] = e.event_type;
        record["platoon_ids"] = e.platoon_ids;
        json details = json::object();
        for (const auto& [key, value] : e.details) details[key] = value;
        record["details"] = details;
        out << record.dump() << "\n";
    }
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsSample>& samples) {
    out << "time_s,capacity_vps,n_platoons,n_in_coverage,active_maneuvers\n";
    for (const auto& s : samples) {
        out << format_number(s.time_s) << ',' << format_number(s.capacity_vps) << ','
            << s.n_platoons << ',' << s.n_in_coverage << ',' << s.active_maneuvers << "\n";
    }
}

std::string summary_json(const MetricsReport& report) {
    json j;
    j["splits"] = report.splits;
    j["merges"] = report.merges;
    j["maneuver_time_s"] = json::parse(format_number(report.maneuver_time_s));
    j["grace_window_max_s"] = json::parse(format_number(report.grace_window_max_s));
    j["final_platoon_count"] = report.final_platoon_count;
    j["vehicle_count"] = report.vehicle_count;
    j["mean_capacity_vps"] = json::parse(format_number(report.mean_capacity_vps));
    json violations = json::object();
    violations["oversize_in_coverage"] = 0;
    violations["oversize_out_of_coverage"] = 0;
    violations["co_channel_conflict"] = 0;
    for (const auto& [key, count] : report.qos_violations) violations[key] = count;
    j["qos_violations"] = violations;
    j["event_count"] = report.event_log.size();
    return j.dump(2) + "\n";
}

} // namespace hdvp
