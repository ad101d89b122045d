#pragma once

#include <iosfwd>
#include <string>

#include "hdvp/highway_sim.hpp"

namespace hdvp {

/// Analytical parameter set shared by the analyze/capacity/mc commands: the
/// radio, traffic, QoS and road blocks of a scenario without the world model.
struct AnalyticsConfig {
    RadioConfig radio;
    TrafficModel traffic;
    QosTarget qos;
    RoadGeometry geometry;
    RegulatoryCap cap;
};

/// Strict parsers: canonical snake_case keys, unknown keys rejected, packet
/// size accepted as packet_size_bits or packet_size_bytes (exactly one).
Scenario parse_scenario(const std::string& json_text);
AnalyticsConfig parse_analytics_config(const std::string& json_text);

Scenario load_scenario_file(const std::string& path);
AnalyticsConfig load_analytics_config_file(const std::string& path);

LatencyVariant parse_latency_variant(const std::string& name);
const char* to_string(LatencyVariant variant);

/// Sets one scenario field by its JSON path (e.g. "radio.subchannel_count")
/// from a decimal string; used by the sweep command. Throws ConfigError for
/// unknown fields.
void apply_scenario_override(Scenario& scenario, const std::string& field,
                             const std::string& value);

/// Fixed-precision rendering (12 significant digits) so run outputs diff
/// cleanly and byte-identically.
std::string format_number(double value);

void write_event_log_ndjson(std::ostream& out, const std::vector<Event>& events);
void write_metrics_csv(std::ostream& out, const std::vector<MetricsSample>& samples);
std::string summary_json(const MetricsReport& report);

} // namespace hdvp
