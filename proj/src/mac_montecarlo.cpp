#include "hdvp/mac_montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hdvp/errors.hpp"
#include "hdvp/rng.hpp"

namespace hdvp {

void TrialConfig::validate() const {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (n_vehicles < 1) throw ConfigError("n_vehicles must be >= 1");
    if (n_slots < 1) throw ConfigError("n_slots must be >= 1");
    if (!(slot_time_s > 0.0)) throw ConfigError("slot_time_s must be > 0");
}

McEstimate simulate_aloha_collision(const TrialConfig& cfg) {
    cfg.validate();
    std::int64_t collisions = 0;
    for (std::int64_t t = 0; t < cfg.trials; ++t) {
        SplitMix64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
        const std::uint64_t tagged = rng.next_below(static_cast<std::uint64_t>(cfg.n_slots));
        for (int v = 1; v < cfg.n_vehicles; ++v) {
            if (rng.next_below(static_cast<std::uint64_t>(cfg.n_slots)) == tagged) {
                ++collisions;
                break;
            }
        }
    }
    McEstimate est;
    est.trials = cfg.trials;
    est.mean = static_cast<double>(collisions) / static_cast<double>(cfg.trials);
    est.std_error = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(cfg.trials));
    return est;
}

LatencyStats simulate_reservation_latency(const TrialConfig& cfg, ArrivalPattern arrival) {
    cfg.validate();
    if (cfg.n_vehicles > cfg.n_slots) {
        throw ConfigError("reservation queue cannot drain: n_vehicles exceeds n_slots");
    }
    const double interval_s = static_cast<double>(cfg.n_slots) * cfg.slot_time_s;

    std::vector<double> latencies;
    latencies.reserve(static_cast<std::size_t>(cfg.trials) * cfg.n_vehicles);
    std::vector<double> gen_times(static_cast<std::size_t>(cfg.n_vehicles));
    std::vector<int> order(static_cast<std::size_t>(cfg.n_vehicles));

    std::int64_t collisions = 0;
    for (std::int64_t t = 0; t < cfg.trials; ++t) {
        SplitMix64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
        for (int v = 0; v < cfg.n_vehicles; ++v) {
            gen_times[v] = arrival == ArrivalPattern::Synchronized
                               ? 0.0
                               : rng.next_double() * interval_s;
        }
        // Fisher-Yates permutation breaks generation-time ties uniformly;
        // the subsequent stable sort keeps FCFS order for distinct times.
        std::iota(order.begin(), order.end(), 0);
        for (int v = cfg.n_vehicles - 1; v > 0; --v) {
            const auto j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(v) + 1));
            std::swap(order[v], order[j]);
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return gen_times[a] < gen_times[b]; });

        // One packet per slot; a packet may start no earlier than the first
        // slot boundary at or after its generation time.
        std::int64_t next_free_slot = 0;
        std::int64_t last_slot = -1;
        for (int v : order) {
            const double g = gen_times[v];
            const auto earliest =
                static_cast<std::int64_t>(std::ceil(g / cfg.slot_time_s - 1e-12));
            const std::int64_t slot = std::max(earliest, next_free_slot);
            if (slot == last_slot) ++collisions; // never happens by construction
            last_slot = slot;
            next_free_slot = slot + 1;
            const double completion = static_cast<double>(slot + 1) * cfg.slot_time_s;
            latencies.push_back(completion - g);
        }
    }

    std::sort(latencies.begin(), latencies.end());
    LatencyStats stats;
    stats.trials = cfg.trials;
    stats.collisions = collisions;
    stats.mean_s = std::accumulate(latencies.begin(), latencies.end(), 0.0) /
                   static_cast<double>(latencies.size());
    auto quantile = [&](double q) {
        const auto idx = static_cast<std::size_t>(
            std::min<double>(static_cast<double>(latencies.size()) - 1.0,
                             std::floor(q * static_cast<double>(latencies.size()))));
        return latencies[idx];
    };
    stats.p50_s = quantile(0.50);
    stats.p99_s = quantile(0.99);
    stats.max_s = latencies.back();
    return stats;
}

} // namespace hdvp
