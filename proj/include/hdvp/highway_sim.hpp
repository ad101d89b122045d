#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hdvp/platoon_dynamics.hpp"
#include "hdvp/qos_analytics.hpp"
#include "hdvp/spectrum_manager.hpp"

namespace hdvp {

struct BaseStation {
    double position_m = 0.0;
    double tx_power_dbm = 30.0;
};

/// Log-distance pathloss geometry. An empty station list models a highway
/// with no coverage anywhere.
struct CoverageMap {
    std::vector<BaseStation> base_stations;
    double pathloss_exponent = 3.0;   // alpha
    double reference_distance_m = 1.0;
    double reference_loss_db = 40.0;  // loss at the reference distance

    void validate() const;
};

/// Best received signal over all base stations, dBm; -infinity with none.
double signal_strength(double position_m, const CoverageMap& map);

struct InitialPlatoon {
    int size = 1;
    double lead_position_m = 0.0;
    int subchannel = 0;
};

/// Complete, reproducible description of one run.
struct Scenario {
    double road_length_m = 10000.0;
    double duration_s = 10.0;
    double timestep_s = 0.1;
    std::uint64_t seed = 0;
    RoadGeometry geometry;
    RadioConfig radio;
    TrafficModel traffic;
    QosTarget qos;
    RegulatoryCap cap;
    SignalThresholds thresholds;
    double transmission_range_m = 1000.0;
    LatencyVariant latency_variant = LatencyVariant::Calibrated;
    std::vector<InitialPlatoon> initial_platoons;
    CoverageMap coverage;
    double speed_delta_mps = 2.0;
    double guard_margin_m = 50.0;
    double shadowing_sigma_db = 0.0; // 0 disables shadowing

    void validate() const;
};

struct Event {
    std::int64_t tick = 0;
    double time_s = 0.0;
    std::string event_type;
    std::vector<int> platoon_ids;
    std::vector<std::pair<std::string, std::string>> details; // ordered key/value
};

struct MetricsSample {
    double time_s = 0.0;
    double capacity_vps = 0.0;
    int n_platoons = 0;
    int n_in_coverage = 0;
    int active_maneuvers = 0;
};

struct MetricsReport {
    std::vector<MetricsSample> samples;
    std::vector<Event> event_log;
    std::map<std::string, std::int64_t> qos_violations;
    std::int64_t splits = 0;
    std::int64_t merges = 0;
    double maneuver_time_s = 0.0;
    double grace_window_max_s = 0.0; // longest oversize window after a coverage exit
    int final_platoon_count = 0;
    std::int64_t vehicle_count = 0;
    double mean_capacity_vps = 0.0;
};

/// Time-stepped 1-D highway world: kinematics, coverage-triggered split FSM,
/// sub-channel assignment or separation maneuvers, and in-coverage merging.
/// Fully deterministic for a fixed scenario.
class World {
public:
    explicit World(Scenario scenario);

    /// Advances one timestep: move, sample signals, run split triggers,
    /// execute splits, manage channels and maneuvers, attempt merges, record
    /// metrics. Throws SimulationError when a world invariant breaks.
    void step();

    /// Runs ceil(duration / timestep) steps and finalizes the report.
    MetricsReport run();

    std::int64_t tick() const { return tick_; }
    double time_s() const { return time_s_; }
    const Scenario& scenario() const { return scenario_; }
    const std::map<int, Platoon>& platoons() const { return platoons_; }
    const std::map<int, Vehicle>& vehicles() const { return vehicles_; }
    const ChannelPlan& channel_plan() const { return plan_; }
    bool platoon_in_coverage(int platoon_id) const;
    int coverage_cap_in() const { return cap_in_; }
    int coverage_cap_out() const { return cap_out_; }
    const MetricsReport& report() const { return report_; }

    /// Live-configuration road capacity: mean vehicle speed times vehicle
    /// count over the occupied span (convoy extent plus one notional
    /// inter-platoon gap D). Reduces exactly to the closed form for a single
    /// platoon with its notional gap.
    double achieved_road_capacity() const;

private:
    struct ActiveManeuver {
        SeparationManeuver maneuver;
        std::int64_t started_tick = 0;
    };

    void advance_positions();
    double platoon_signal(const Platoon& platoon);
    void update_coverage_states();
    void run_split_triggers();
    void execute_splits();
    void manage_channels_and_maneuvers();
    void recompute_velocities();
    void attempt_merges();
    void record_metrics();
    void check_invariants() const;

    double platoon_head(const Platoon& platoon) const;
    double platoon_tail(const Platoon& platoon) const;
    double gap_between(const Platoon& front, const Platoon& rear) const;
    std::vector<int> convoy_order() const; // platoon ids, front to rear
    std::vector<PlatoonExtent> extents() const;
    void set_platoon_velocity(Platoon& platoon, double velocity_mps);
    double platoon_velocity(const Platoon& platoon) const;
    void emit(const std::string& type, std::vector<int> platoon_ids,
              std::vector<std::pair<std::string, std::string>> details);

    Scenario scenario_;
    std::map<int, Vehicle> vehicles_;
    std::map<int, Platoon> platoons_;
    ChannelPlan plan_;
    std::map<int, bool> in_coverage_;
    std::map<int, double> oversize_out_since_; // platoon id -> time of coverage exit
    std::vector<ActiveManeuver> maneuvers_;
    std::vector<std::pair<int, int>> logged_merge_rejections_;
    MetricsReport report_;
    std::int64_t tick_ = 0;
    double time_s_ = 0.0;
    int next_platoon_id_ = 0;
    int cap_in_ = 1;  // in-coverage size bound min(N_v,res, N_c), fixed per scenario
    int cap_out_ = 1; // out-of-coverage size bound min(N_v,A, N_c)
};

/// Convenience wrapper: build a world from the scenario and run it.
MetricsReport run(const Scenario& scenario);

} // namespace hdvp
