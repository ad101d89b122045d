#include "hdvp/qos_analytics.hpp"

#include <cmath>
#include <set>

#include "hdvp/errors.hpp"

namespace hdvp {

namespace {

// Floor that first snaps values within 1e-9 relative of an integer. Keeps
// analytically-integral products (e.g. 5000 * 0.0012) from flooring away on
// the last ulp.
std::int64_t floor_snapped(double x) {
    const double r = std::nearbyint(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) {
        return static_cast<std::int64_t>(r);
    }
    return static_cast<std::int64_t>(std::floor(x));
}

// 1 - ((N_s - 1) / N_s)^k via expm1/log1p; exact at k = 0 and accurate for
// the tiny probabilities the reliability target lives at.
double one_minus_qpow(std::int64_t n_slots, std::int64_t k) {
    if (k <= 0) return 0.0;
    return -std::expm1(static_cast<double>(k) * std::log1p(-1.0 / static_cast<double>(n_slots)));
}

double point_collision_probability(std::int64_t n_slots, int n) {
    return one_minus_qpow(n_slots, n - 1);
}

double point_reservation_latency(std::int64_t n_slots, int n, const RadioConfig& radio,
                                 const TrafficModel& traffic, LatencyVariant variant) {
    const double load = static_cast<double>(n) * static_cast<double>(traffic.packet_size_bits) *
                        traffic.generation_rate_hz /
                        (radio.spectral_efficiency * radio.bandwidth_hz);
    switch (variant) {
    case LatencyVariant::AsPrinted:
        return one_minus_qpow(n_slots, n - 1) * load;
    case LatencyVariant::Calibrated:
        return one_minus_qpow(n_slots, n) * load / 2.0;
    }
    throw ConfigError("unknown latency variant");
}

} // namespace

void TrafficModel::validate() const {
    if (packet_size_bits < 1) throw ConfigError("packet_size_bits must be >= 1");
    if (!(generation_rate_hz > 0.0)) throw ConfigError("generation_rate must be > 0");
}

void RadioConfig::validate() const {
    if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth_hz must be > 0");
    if (!(spectral_efficiency > 0.0)) throw ConfigError("spectral_efficiency must be > 0");
    if (subchannel_count < 1) throw ConfigError("subchannel_count must be >= 1");
}

void QosTarget::validate() const {
    if (!(reliability_target > 0.0 && reliability_target < 1.0)) {
        throw ConfigError("reliability_target must be in (0,1)");
    }
    if (!(latency_target_s > 0.0)) throw ConfigError("latency_target_s must be > 0");
}

void RoadGeometry::validate() const {
    if (!(vehicle_length_m > 0.0)) throw ConfigError("vehicle_length_m must be > 0");
    if (!(intra_spacing_m > 0.0)) throw ConfigError("intra_spacing_m must be > 0");
    if (!(inter_spacing_m > 0.0)) throw ConfigError("inter_spacing_m must be > 0");
    if (!(speed_mps > 0.0)) throw ConfigError("speed_mps must be > 0");
    if (!(inter_spacing_m > intra_spacing_m)) {
        throw ConfigError("inter_spacing_m must exceed intra_spacing_m");
    }
}

void PlatoonSizeDistribution::validate() const {
    if (pmf.empty()) throw ConfigError("platoon size distribution is empty");
    double total = 0.0;
    std::set<int> seen;
    for (const auto& [n, p] : pmf) {
        if (n < 1) throw ConfigError("platoon size distribution has size < 1");
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("pmf probability outside [0,1]");
        if (!seen.insert(n).second) throw ConfigError("duplicate size in pmf");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("pmf does not sum to 1");
}

void RegulatoryCap::validate() const {
    if (max_platoon_size < 1) throw ConfigError("max_platoon_size must be >= 1");
}

double road_capacity(const RoadGeometry& geom, int n) {
    geom.validate();
    if (n < 1) throw ConfigError("platoon size must be >= 1");
    const double nn = static_cast<double>(n);
    return geom.speed_mps * nn /
           (nn * geom.vehicle_length_m + (nn - 1.0) * geom.intra_spacing_m +
            geom.inter_spacing_m);
}

std::int64_t slots_per_interval(const RadioConfig& radio, const TrafficModel& traffic,
                                BandScope scope) {
    radio.validate();
    traffic.validate();
    double band = radio.bandwidth_hz;
    if (scope == BandScope::PerSubchannel) band /= static_cast<double>(radio.subchannel_count);
    const std::int64_t slots =
        floor_snapped(radio.spectral_efficiency * band /
                      (static_cast<double>(traffic.packet_size_bits) * traffic.generation_rate_hz));
    if (slots < 1) {
        throw InfeasibleError("slot budget below one slot: band too narrow for this traffic");
    }
    return slots;
}

double aloha_collision_probability(const PlatoonSizeDistribution& dist, std::int64_t n_slots) {
    dist.validate();
    if (n_slots < 1) throw ConfigError("n_slots must be >= 1");
    double pc = 0.0;
    for (const auto& [n, p] : dist.pmf) {
        pc += point_collision_probability(n_slots, n) * p;
    }
    return pc;
}

int max_vehicles_aloha(const RadioConfig& radio, const TrafficModel& traffic,
                       const QosTarget& qos) {
    qos.validate();
    const std::int64_t n_slots = slots_per_interval(radio, traffic);
    if (point_collision_probability(n_slots, 1) > qos.reliability_target) {
        throw InfeasibleError("reliability target unattainable even for one vehicle");
    }
    // P_c is monotone in n; linear scan with early exit, capped at N_s.
    int best = 1;
    for (int n = 2; n <= n_slots; ++n) {
        if (point_collision_probability(n_slots, n) > qos.reliability_target) break;
        best = n;
    }
    return best;
}

double reservation_latency(const PlatoonSizeDistribution& dist, const RadioConfig& radio,
                           const TrafficModel& traffic, LatencyVariant variant) {
    dist.validate();
    const std::int64_t n_slots = slots_per_interval(radio, traffic);
    double latency = 0.0;
    for (const auto& [n, p] : dist.pmf) {
        if (n > n_slots) {
            throw ConfigError("reservation queue cannot drain: size " + std::to_string(n) +
                              " exceeds slot budget " + std::to_string(n_slots));
        }
        latency += point_reservation_latency(n_slots, n, radio, traffic, variant) * p;
    }
    return latency;
}

int max_vehicles_reservation(const RadioConfig& radio, const TrafficModel& traffic,
                             const QosTarget& qos, LatencyVariant variant) {
    qos.validate();
    const std::int64_t n_slots = slots_per_interval(radio, traffic);
    int best = 0;
    for (int n = 1; n <= n_slots; ++n) {
        if (point_reservation_latency(n_slots, n, radio, traffic, variant) >
            qos.latency_target_s) {
            break;
        }
        best = n;
    }
    if (best == 0) throw InfeasibleError("latency target unattainable even for one vehicle");
    return best;
}

double mac_efficiency(MacProtocol protocol, const RadioConfig& radio,
                      const TrafficModel& traffic, const QosTarget& qos,
                      LatencyVariant variant) {
    const std::int64_t n_slots = slots_per_interval(radio, traffic);
    const int n_vehicles = protocol == MacProtocol::SlottedAloha
                               ? max_vehicles_aloha(radio, traffic, qos)
                               : max_vehicles_reservation(radio, traffic, qos, variant);
    return static_cast<double>(n_vehicles) / static_cast<double>(n_slots);
}

double required_bandwidth(const TrafficModel& traffic, int n_vehicles,
                          double spectral_efficiency, double eta_mac, double eta_b) {
    traffic.validate();
    if (n_vehicles < 1) throw ConfigError("n_vehicles must be >= 1");
    if (!(spectral_efficiency > 0.0)) throw ConfigError("spectral_efficiency must be > 0");
    if (!(eta_mac > 0.0 && eta_mac <= 1.0)) throw ConfigError("eta_mac must be in (0,1]");
    if (!(eta_b > 0.0 && eta_b <= 1.0)) throw ConfigError("eta_b must be in (0,1]");
    return static_cast<double>(traffic.packet_size_bits) * traffic.generation_rate_hz *
           static_cast<double>(n_vehicles) / (spectral_efficiency * eta_mac * eta_b);
}

std::optional<int> max_platoon_size(const RadioConfig& radio, const TrafficModel& traffic,
                                    double eta_mac, double eta_b) {
    radio.validate();
    traffic.validate();
    if (!(eta_mac > 0.0 && eta_mac <= 1.0)) throw ConfigError("eta_mac must be in (0,1]");
    if (!(eta_b > 0.0 && eta_b <= 1.0)) throw ConfigError("eta_b must be in (0,1]");
    const std::int64_t n = floor_snapped(
        radio.bandwidth_hz * radio.spectral_efficiency * eta_mac * eta_b /
        (static_cast<double>(traffic.packet_size_bits) * traffic.generation_rate_hz));
    if (n < 1) return std::nullopt;
    return static_cast<int>(n);
}

int platoon_size_in_coverage(const RadioConfig& radio, const TrafficModel& traffic,
                             const QosTarget& qos, const RegulatoryCap& cap,
                             LatencyVariant variant) {
    cap.validate();
    return std::min(max_vehicles_reservation(radio, traffic, qos, variant),
                    cap.max_platoon_size);
}

int platoon_size_out_of_coverage(const RadioConfig& radio, const TrafficModel& traffic,
                                 const QosTarget& qos, const RegulatoryCap& cap) {
    cap.validate();
    return std::min(max_vehicles_aloha(radio, traffic, qos), cap.max_platoon_size);
}

} // namespace hdvp
