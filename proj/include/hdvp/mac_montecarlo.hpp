#pragma once

#include <cstdint>

namespace hdvp {

struct TrialConfig {
    std::int64_t trials = 1;
    std::uint64_t seed = 0;
    int n_vehicles = 1;
    std::int64_t n_slots = 1;   // N_s
    double slot_time_s = 20e-6; // L_pkt / (S_mcs * B)

    void validate() const;
};

/// Bernoulli Monte Carlo estimate with its binomial standard error.
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 0;
};

enum class ArrivalPattern {
    Synchronized,     // every vehicle generates at t = 0
    UniformInInterval // generation offsets uniform over one interval
};

struct LatencyStats {
    double mean_s = 0.0;
    double p50_s = 0.0;
    double p99_s = 0.0;
    double max_s = 0.0;
    std::int64_t collisions = 0; // always 0 under reservation, recorded as a check
    std::int64_t trials = 0;
};

/// Slot-level ALOHA trial: every vehicle picks a slot uniformly; the tagged
/// vehicle counts a collision when any contender lands on its slot. The mean
/// over trials estimates the closed-form collision probability.
McEstimate simulate_aloha_collision(const TrialConfig& cfg);

/// Reservation-queue trial: one packet per vehicle per generation interval,
/// served first-come-first-served one per slot. Synchronized ties are broken
/// by a seeded uniform permutation. Rejects n_vehicles > n_slots (the queue
/// could not drain within the interval).
LatencyStats simulate_reservation_latency(const TrialConfig& cfg, ArrivalPattern arrival);

} // namespace hdvp
