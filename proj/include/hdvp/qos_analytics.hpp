#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace hdvp {

// Traffic generated by one platoon member: packet size in bits and the
// per-vehicle generation rate in packets/s. Internal canonical unit for the
// packet size is bits; config readers accept bytes and convert.
struct TrafficModel {
    std::int64_t packet_size_bits = 400;
    double generation_rate_hz = 10.0; // packets/s

    void validate() const;
};

struct RadioConfig {
    double bandwidth_hz = 10e6;
    double spectral_efficiency = 2.0; // bits/s/Hz
    int subchannel_count = 1;

    void validate() const;
};

struct QosTarget {
    double reliability_target = 1e-3; // max tolerated collision probability
    double latency_target_s = 3e-3;

    void validate() const;
};

struct RoadGeometry {
    double vehicle_length_m = 1.5;
    double intra_spacing_m = 1.0;
    double inter_spacing_m = 50.0;
    double speed_mps = 20.0;

    void validate() const;
};

/// Distribution of the platoon size N_v. Most callers use a point mass; the
/// expectation forms below accept any finite pmf.
struct PlatoonSizeDistribution {
    std::vector<std::pair<int, double>> pmf; // (size, probability)

    static PlatoonSizeDistribution point_mass(int n) { return {{{n, 1.0}}}; }
    void validate() const;
};

struct RegulatoryCap {
    int max_platoon_size = 1;

    void validate() const;
};

enum class MacProtocol { SlottedAloha, ReservationBased };

/// The reservation latency formula ships in two readings:
///   AsPrinted  — contention-style weight at exponent n-1 with the full
///                serialization load.
///   Calibrated — exponent n with half the load (mean queue position); the
///                default. With the bundled reference parameters the two
///                yield maxima of 278 and 394 vehicles at a 3 ms target.
enum class LatencyVariant { AsPrinted, Calibrated };

/// Whether slot-budget style quantities are computed on the full band or on
/// one sub-channel's share of it (bandwidth_hz / subchannel_count).
enum class BandScope { FullBand, PerSubchannel };

/// Steady-state lane throughput of platoons of size n, vehicles/s.
double road_capacity(const RoadGeometry& geom, int n);

/// Number of transmission slots the band supports per packet-generation
/// cycle. Throws InfeasibleError when the budget is below one slot.
std::int64_t slots_per_interval(const RadioConfig& radio, const TrafficModel& traffic,
                                BandScope scope = BandScope::FullBand);

/// Collision probability of slotted ALOHA with n_slots slots, averaged over
/// the platoon size distribution.
double aloha_collision_probability(const PlatoonSizeDistribution& dist, std::int64_t n_slots);

/// Largest platoon size whose ALOHA collision probability stays within the
/// reliability target. Exact integer search; the objective is monotone in n.
int max_vehicles_aloha(const RadioConfig& radio, const TrafficModel& traffic,
                       const QosTarget& qos);

/// Mean queueing latency of the reservation MAC, seconds. Requires every
/// supported size n <= N_s (the queue must drain within one interval).
double reservation_latency(const PlatoonSizeDistribution& dist, const RadioConfig& radio,
                           const TrafficModel& traffic, LatencyVariant variant);

/// Largest platoon size (capped at N_s) whose reservation latency stays
/// within the latency target under the selected variant.
int max_vehicles_reservation(const RadioConfig& radio, const TrafficModel& traffic,
                             const QosTarget& qos, LatencyVariant variant);

/// Medium access efficiency: supported vehicles over slot budget.
double mac_efficiency(MacProtocol protocol, const RadioConfig& radio,
                      const TrafficModel& traffic, const QosTarget& qos,
                      LatencyVariant variant);

/// Band needed to serve n_vehicles at the given efficiencies, Hz.
double required_bandwidth(const TrafficModel& traffic, int n_vehicles,
                          double spectral_efficiency, double eta_mac, double eta_b);

/// Largest whole platoon the band supports at the given efficiencies;
/// nullopt when even one vehicle does not fit. Values within 1e-9 relative
/// of an integer snap to it before flooring, so the required_bandwidth
/// round trip is exact.
std::optional<int> max_platoon_size(const RadioConfig& radio, const TrafficModel& traffic,
                                    double eta_mac, double eta_b);

/// Platoon size usable inside coverage: reservation MAC capped by regulation.
int platoon_size_in_coverage(const RadioConfig& radio, const TrafficModel& traffic,
                             const QosTarget& qos, const RegulatoryCap& cap,
                             LatencyVariant variant);

/// Platoon size usable outside coverage: slotted ALOHA capped by regulation.
int platoon_size_out_of_coverage(const RadioConfig& radio, const TrafficModel& traffic,
                                 const QosTarget& qos, const RegulatoryCap& cap);

} // namespace hdvp
