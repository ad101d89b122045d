#include "hdvp/highway_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "hdvp/errors.hpp"
#include "hdvp/rng.hpp"

namespace hdvp {

namespace {

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double gaussian_draw(SplitMix64& rng) {
    // Box-Muller; u1 kept away from 0.
    const double u1 = std::max(rng.next_double(), 1e-300);
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace

void CoverageMap::validate() const {
    if (pathloss_exponent < 2.0) throw ConfigError("pathloss_exponent must be >= 2");
    if (!(reference_distance_m > 0.0)) throw ConfigError("reference_distance_m must be > 0");
}

double signal_strength(double position_m, const CoverageMap& map) {
    map.validate();
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& bs : map.base_stations) {
        const double distance =
            std::max(std::abs(position_m - bs.position_m), map.reference_distance_m);
        const double rx = bs.tx_power_dbm - map.reference_loss_db -
                          10.0 * map.pathloss_exponent *
                              std::log10(distance / map.reference_distance_m);
        best = std::max(best, rx);
    }
    return best;
}

void Scenario::validate() const {
    geometry.validate();
    radio.validate();
    traffic.validate();
    qos.validate();
    cap.validate();
    thresholds.validate();
    coverage.validate();
    if (!(road_length_m > 0.0)) throw ConfigError("road_length_m must be > 0");
    if (!(timestep_s > 0.0)) throw ConfigError("timestep_s must be > 0");
    if (duration_s < timestep_s) throw ConfigError("duration_s must be >= timestep_s");
    if (!(transmission_range_m > 0.0)) throw ConfigError("transmission_range_m must be > 0");
    if (!(speed_delta_mps > 0.0)) throw ConfigError("speed_delta_mps must be > 0");
    if (guard_margin_m < 0.0) throw ConfigError("guard_margin_m must be >= 0");
    if (shadowing_sigma_db < 0.0) throw ConfigError("shadowing_sigma_db must be >= 0");
    if (initial_platoons.empty()) throw ConfigError("at least one initial platoon required");

    const int size_limit = platoon_size_in_coverage(radio, traffic, qos, cap, latency_variant);
    for (const auto& p : initial_platoons) {
        if (p.size < 1) throw ConfigError("initial platoon size must be >= 1");
        if (p.size > size_limit) {
            throw ConfigError("initial platoon size " + std::to_string(p.size) +
                              " exceeds min(N_v,in, N_c) = " + std::to_string(size_limit));
        }
        if (p.subchannel < 0 || p.subchannel >= radio.subchannel_count) {
            throw ConfigError("initial platoon subchannel out of range");
        }
        const double extent = static_cast<double>(p.size) * geometry.vehicle_length_m +
                              static_cast<double>(p.size - 1) * geometry.intra_spacing_m;
        if (p.lead_position_m - extent < 0.0 || p.lead_position_m > road_length_m) {
            throw ConfigError("initial platoon does not fit on the road");
        }
    }
    // Non-overlap: strings sorted by lead position must leave positive gaps.
    std::vector<InitialPlatoon> sorted = initial_platoons;
    std::sort(sorted.begin(), sorted.end(),
              [](const InitialPlatoon& a, const InitialPlatoon& b) {
                  return a.lead_position_m > b.lead_position_m;
              });
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const auto& front = sorted[i];
        const auto& rear = sorted[i + 1];
        const double front_tail =
            front.lead_position_m -
            (static_cast<double>(front.size) * geometry.vehicle_length_m +
             static_cast<double>(front.size - 1) * geometry.intra_spacing_m);
        if (rear.lead_position_m >= front_tail) {
            throw ConfigError("initial platoons overlap");
        }
    }
}

World::World(Scenario scenario) : scenario_(std::move(scenario)) {
    scenario_.validate();
    cap_in_ = platoon_size_in_coverage(scenario_.radio, scenario_.traffic, scenario_.qos,
                                       scenario_.cap, scenario_.latency_variant);
    cap_out_ = platoon_size_out_of_coverage(scenario_.radio, scenario_.traffic, scenario_.qos,
                                            scenario_.cap);

    int vehicle_id = 1;
    int platoon_id = 1;
    for (const auto& init : scenario_.initial_platoons) {
        Platoon p;
        p.id = platoon_id++;
        p.subchannel_id = init.subchannel;
        p.state = PlatoonState::Steady;
        const double pitch = scenario_.geometry.vehicle_length_m + scenario_.geometry.intra_spacing_m;
        for (int j = 0; j < init.size; ++j) {
            Vehicle v;
            v.id = vehicle_id++;
            v.position_m = init.lead_position_m - static_cast<double>(j) * pitch;
            v.velocity_mps = scenario_.geometry.speed_mps;
            v.length_m = scenario_.geometry.vehicle_length_m;
            vehicles_[v.id] = v;
            p.members.push_back(v.id);
        }
        plan_.assignments[p.id] = init.subchannel;
        const double sig = signal_strength(init.lead_position_m, scenario_.coverage);
        in_coverage_[p.id] = sig >= scenario_.thresholds.prepare_dbm;
        platoons_[p.id] = std::move(p);
    }
    next_platoon_id_ = platoon_id;
    report_.vehicle_count = static_cast<std::int64_t>(vehicles_.size());
}

bool World::platoon_in_coverage(int platoon_id) const {
    const auto it = in_coverage_.find(platoon_id);
    if (it == in_coverage_.end()) throw ConfigError("unknown platoon id");
    return it->second;
}

double World::platoon_head(const Platoon& platoon) const {
    return vehicles_.at(platoon.members.front()).position_m;
}

double World::platoon_tail(const Platoon& platoon) const {
    const Vehicle& last = vehicles_.at(platoon.members.back());
    return last.position_m - last.length_m;
}

double World::gap_between(const Platoon& front, const Platoon& rear) const {
    return platoon_tail(front) - platoon_head(rear);
}

std::vector<int> World::convoy_order() const {
    std::vector<int> ids;
    ids.reserve(platoons_.size());
    for (const auto& [id, p] : platoons_) ids.push_back(id);
    std::sort(ids.begin(), ids.end(), [this](int a, int b) {
        const double pa = platoon_head(platoons_.at(a));
        const double pb = platoon_head(platoons_.at(b));
        if (pa != pb) return pa > pb;
        return a < b;
    });
    return ids;
}

std::vector<PlatoonExtent> World::extents() const {
    std::vector<PlatoonExtent> out;
    out.reserve(platoons_.size());
    for (const auto& [id, p] : platoons_) {
        out.push_back({id, platoon_head(p), platoon_tail(p)});
    }
    return out;
}

void World::set_platoon_velocity(Platoon& platoon, double velocity_mps) {
    for (int member : platoon.members) vehicles_.at(member).velocity_mps = velocity_mps;
}

double World::platoon_velocity(const Platoon& platoon) const {
    return vehicles_.at(platoon.leader_vehicle_id()).velocity_mps;
}

void World::emit(const std::string& type, std::vector<int> platoon_ids,
                 std::vector<std::pair<std::string, std::string>> details) {
    report_.event_log.push_back({tick_, time_s_, type, std::move(platoon_ids), std::move(details)});
}

void World::advance_positions() {
    const double dt = scenario_.timestep_s;
    for (auto& [id, v] : vehicles_) v.position_m += v.velocity_mps * dt;
}

double World::platoon_signal(const Platoon& platoon) {
    double sig = signal_strength(platoon_head(platoon), scenario_.coverage);
    if (scenario_.shadowing_sigma_db > 0.0 && std::isfinite(sig)) {
        SplitMix64 rng(derive_seed(scenario_.seed,
                                   (static_cast<std::uint64_t>(tick_) << 20) ^
                                       static_cast<std::uint64_t>(platoon.id)));
        sig += scenario_.shadowing_sigma_db * gaussian_draw(rng);
    }
    return sig;
}

void World::update_coverage_states() {
    for (auto& [id, p] : platoons_) {
        const double sig = platoon_signal(p);
        bool& in = in_coverage_[id];
        if (sig >= scenario_.thresholds.prepare_dbm) {
            in = true;
        } else if (sig < scenario_.thresholds.split_dbm) {
            in = false;
        } // hold between P2 and P1

        if (!in && p.size() > cap_out_) {
            oversize_out_since_.emplace(id, time_s_);
        } else if (in) {
            oversize_out_since_.erase(id);
        }
    }
}

void World::run_split_triggers() {
    for (auto& [id, p] : platoons_) {
        // Platoons already within the out-of-coverage bound have nothing to
        // prepare; leaving coverage is QoS-safe for them.
        if (p.size() <= cap_out_) continue;
        if (p.state != PlatoonState::Steady && p.state != PlatoonState::PrepareSplit) continue;
        const double sig = platoon_signal(p);
        const SplitTrigger trigger = evaluate_split_trigger(p, sig, scenario_.thresholds);
        switch (trigger) {
        case SplitTrigger::BeginPreparation:
            emit("SplitPrepared", {id},
                 {{"signal_dbm", fmt_num(sig)},
                  {"prospective_leader",
                   std::to_string(p.prospective_leader_id.value_or(-1))}});
            break;
        case SplitTrigger::AbortPreparation:
            emit("SplitAborted", {id}, {{"signal_dbm", fmt_num(sig)}});
            break;
        case SplitTrigger::ExecuteSplit: // logged per applied plan in execute_splits
        case SplitTrigger::None:
            break;
        }
    }
}

void World::execute_splits() {
    std::vector<int> splitting;
    for (const auto& [id, p] : platoons_) {
        if (p.state == PlatoonState::Splitting) splitting.push_back(id);
    }
    for (int id : splitting) {
        Platoon original = platoons_.at(id);
        SplitOutcome outcome = split_platoon(original, cap_out_, next_platoon_id_);

        const double velocity = platoon_velocity(original);
        const bool coverage = in_coverage_.at(id);
        if (const auto it = oversize_out_since_.find(id); it != oversize_out_since_.end()) {
            report_.grace_window_max_s =
                std::max(report_.grace_window_max_s, time_s_ - it->second);
            oversize_out_since_.erase(it);
        }

        platoons_.erase(id);
        for (auto& part : outcome.platoons) {
            const int part_id = part.id;
            in_coverage_[part_id] = coverage;
            platoons_[part_id] = std::move(part);
            set_platoon_velocity(platoons_.at(part_id), velocity);
        }
        for (std::size_t i = 0; i < outcome.plans.size(); ++i) {
            const auto& plan = outcome.plans[i];
            const auto& ids = outcome.plan_ids[i];
            emit("SplitExecuted", {ids.first, ids.second},
                 {{"front_size", std::to_string(plan.front_members.size())},
                  {"rear_size", std::to_string(plan.rear_members.size())},
                  {"rear_leader", std::to_string(plan.rear_leader_id)}});
        }
        report_.splits += static_cast<std::int64_t>(outcome.plans.size());
        logged_merge_rejections_.clear();
    }
}

void World::manage_channels_and_maneuvers() {
    const double dt = scenario_.timestep_s;

    // Fresh rear platoons from this tick's splits: sense a sub-channel or
    // fall back to the separation maneuver behind their predecessor.
    // Processed front to rear so a no-vacancy rear can inherit the channel
    // of the platoon it just split from.
    const std::vector<int> order = convoy_order();
    for (int id : order) {
        Platoon& p = platoons_.at(id);
        if (p.state != PlatoonState::Separating) continue;
        if (plan_.assignments.count(id) != 0) continue; // already handled
        const InterferenceGraph graph =
            build_interference_graph(extents(), scenario_.transmission_range_m);
        const std::set<int> vacant =
            sense_vacant_subchannels(id, plan_, graph, scenario_.radio.subchannel_count);
        if (const auto channel = assign_subchannel(id, vacant, plan_)) {
            p.subchannel_id = *channel;
            p.state = PlatoonState::Steady;
            emit("SubchannelAssigned", {id}, {{"subchannel", std::to_string(*channel)}});
            continue;
        }
        // No vacancy: share the predecessor's channel and slow down until out
        // of its transmission range.
        const auto self = std::find(order.begin(), order.end(), id);
        if (self == order.begin()) {
            p.state = PlatoonState::Steady; // nothing ahead to interfere with
            continue;
        }
        const int front_id = *(self - 1);
        const Platoon& front = platoons_.at(front_id);
        const int shared = plan_.assignments.at(front_id);
        plan_.assignments[id] = shared;
        p.subchannel_id = shared;
        const double gap = gap_between(front, platoons_.at(id));
        if (gap > scenario_.transmission_range_m) {
            p.state = PlatoonState::Steady; // already out of range
            continue;
        }
        maneuvers_.push_back(
            {SeparationManeuver(front_id, id,
                                {scenario_.transmission_range_m, scenario_.guard_margin_m,
                                 scenario_.speed_delta_mps},
                                scenario_.geometry.speed_mps),
             tick_});
        emit("SeparationStarted", {front_id, id},
             {{"gap_m", fmt_num(gap)}, {"subchannel", std::to_string(shared)}});
    }

    // Retire maneuvers whose gap cleared range + guard.
    for (auto it = maneuvers_.begin(); it != maneuvers_.end();) {
        const auto front_it = platoons_.find(it->maneuver.front_platoon_id());
        const auto rear_it = platoons_.find(it->maneuver.rear_platoon_id());
        if (front_it == platoons_.end() || rear_it == platoons_.end()) {
            // A partner retired (merge churn); abandon and release the rear.
            if (rear_it != platoons_.end() &&
                rear_it->second.state == PlatoonState::Separating) {
                rear_it->second.state = PlatoonState::Steady;
            }
            it = maneuvers_.erase(it);
            continue;
        }
        const double gap = gap_between(front_it->second, rear_it->second);
        if (it->maneuver.complete(gap)) {
            rear_it->second.state = PlatoonState::Steady;
            emit("SeparationCompleted",
                 {it->maneuver.front_platoon_id(), it->maneuver.rear_platoon_id()},
                 {{"gap_m", fmt_num(gap)},
                  {"duration_s",
                   fmt_num(static_cast<double>(tick_ - it->started_tick) * dt)}});
            it = maneuvers_.erase(it);
            continue;
        }
        report_.maneuver_time_s += dt;
        ++it;
    }

    recompute_velocities();
}

void World::recompute_velocities() {
    // Stateless velocity assignment, front to rear: maneuvering rears track
    // their front partner minus speed_delta, everyone else aims for cruise,
    // and nobody may keep closing on a slower platoon within one
    // inter-platoon spacing (the longitudinal safety guard).
    std::map<int, int> maneuver_front; // rear platoon id -> front platoon id
    std::map<int, const SeparationManeuver*> maneuver_of_rear;
    for (const auto& m : maneuvers_) {
        maneuver_front[m.maneuver.rear_platoon_id()] = m.maneuver.front_platoon_id();
        maneuver_of_rear[m.maneuver.rear_platoon_id()] = &m.maneuver;
    }

    const double cruise = scenario_.geometry.speed_mps;
    const std::vector<int> order = convoy_order();
    std::map<int, double> target;
    int predecessor = -1;
    for (int id : order) {
        double v = cruise;
        if (const auto it = maneuver_front.find(id); it != maneuver_front.end()) {
            // The maneuver front is ahead in convoy order, so its target is
            // already fixed; fall back to its live velocity if not.
            const auto front_target = target.find(it->second);
            const double front_v = front_target != target.end()
                                       ? front_target->second
                                       : platoon_velocity(platoons_.at(it->second));
            v = maneuver_of_rear.at(id)->rear_velocity_command(front_v);
        }
        if (predecessor >= 0) {
            const double gap = gap_between(platoons_.at(predecessor), platoons_.at(id));
            if (gap <= scenario_.geometry.inter_spacing_m && v > target.at(predecessor)) {
                v = target.at(predecessor);
            }
        }
        target[id] = v;
        set_platoon_velocity(platoons_.at(id), v);
        predecessor = id;
    }
}

void World::attempt_merges() {
    std::vector<int> order = convoy_order();
    std::size_t i = 0;
    while (i + 1 < order.size()) {
        const int front_id = order[i];
        const int rear_id = order[i + 1];
        Platoon& front = platoons_.at(front_id);
        Platoon& rear = platoons_.at(rear_id);
        const bool eligible = front.state == PlatoonState::Steady &&
                              rear.state == PlatoonState::Steady &&
                              in_coverage_.at(front_id) && in_coverage_.at(rear_id) &&
                              gap_between(front, rear) <= 2.0 * scenario_.geometry.inter_spacing_m;
        if (!eligible) {
            ++i;
            continue;
        }
        const MergeResult result =
            merge_platoons(front, rear, cap_in_, scenario_.cap.max_platoon_size, true);
        if (result.outcome == MergeOutcome::Merged) {
            const auto front_size = front.size();
            const auto rear_size = rear.size();
            front = *result.merged;
            set_platoon_velocity(front, platoon_velocity(front));
            platoons_.erase(rear_id);
            plan_.assignments.erase(rear_id);
            in_coverage_.erase(rear_id);
            oversize_out_since_.erase(rear_id);
            emit("MergeExecuted", {front_id, rear_id},
                 {{"front_size", std::to_string(front_size)},
                  {"rear_size", std::to_string(rear_size)},
                  {"merged_size", std::to_string(front.size())}});
            ++report_.merges;
            logged_merge_rejections_.clear();
            order.erase(order.begin() + static_cast<std::ptrdiff_t>(i) + 1);
            // stay on i: the merged platoon may absorb the next one too
        } else {
            const std::pair<int, int> key{front_id, rear_id};
            if (std::find(logged_merge_rejections_.begin(), logged_merge_rejections_.end(),
                          key) == logged_merge_rejections_.end()) {
                logged_merge_rejections_.push_back(key);
                emit("MergeRejected", {front_id, rear_id},
                     {{"reason", to_string(result.outcome)},
                      {"combined_size", std::to_string(front.size() + rear.size())}});
            }
            ++i;
        }
    }
}

double World::achieved_road_capacity() const {
    if (platoons_.empty()) throw ConfigError("achieved_road_capacity: no platoons");
    double head = -std::numeric_limits<double>::infinity();
    double tail = std::numeric_limits<double>::infinity();
    double velocity_sum = 0.0;
    for (const auto& [id, v] : vehicles_) {
        head = std::max(head, v.position_m);
        tail = std::min(tail, v.position_m - v.length_m);
        velocity_sum += v.velocity_mps;
    }
    const double n = static_cast<double>(vehicles_.size());
    const double span = head - tail + scenario_.geometry.inter_spacing_m;
    return (velocity_sum / n) * n / span;
}

void World::check_invariants() const {
    // No overlapping vehicles anywhere on the road.
    std::vector<const Vehicle*> by_position;
    by_position.reserve(vehicles_.size());
    for (const auto& [id, v] : vehicles_) by_position.push_back(&v);
    std::sort(by_position.begin(), by_position.end(),
              [](const Vehicle* a, const Vehicle* b) { return a->position_m > b->position_m; });
    for (std::size_t i = 0; i + 1 < by_position.size(); ++i) {
        const double pred_rear = by_position[i]->position_m - by_position[i]->length_m;
        if (by_position[i + 1]->position_m > pred_rear + 1e-9) {
            throw SimulationError(tick_, "vehicles " + std::to_string(by_position[i]->id) +
                                             " and " + std::to_string(by_position[i + 1]->id) +
                                             " overlap");
        }
    }
    std::size_t member_count = 0;
    for (const auto& [id, p] : platoons_) {
        if (p.members.empty()) throw SimulationError(tick_, "empty platoon " + std::to_string(id));
        member_count += p.members.size();
        if (p.subchannel_id &&
            (*p.subchannel_id < 0 || *p.subchannel_id >= scenario_.radio.subchannel_count)) {
            throw SimulationError(tick_, "platoon " + std::to_string(id) +
                                             " holds an out-of-range sub-channel");
        }
        for (std::size_t i = 0; i + 1 < p.members.size(); ++i) {
            const Vehicle& a = vehicles_.at(p.members[i]);
            const Vehicle& b = vehicles_.at(p.members[i + 1]);
            if (!(b.position_m < a.position_m)) {
                throw SimulationError(tick_, "platoon " + std::to_string(id) +
                                                 " members out of order");
            }
        }
    }
    if (member_count != vehicles_.size()) {
        throw SimulationError(tick_, "vehicle/member bookkeeping diverged");
    }
}

void World::record_metrics() {
    check_invariants();

    auto& violations = report_.qos_violations;
    const std::vector<int> order = convoy_order();
    for (int id : order) {
        const Platoon& p = platoons_.at(id);
        const bool in = in_coverage_.at(id);
        if (in && p.size() > cap_in_) violations["oversize_in_coverage"]++;
        // Out of coverage, oversize is tolerated only while the split FSM is
        // actively working the platoon (the grace window).
        if (!in && p.size() > cap_out_ && p.state == PlatoonState::Steady) {
            violations["oversize_out_of_coverage"]++;
        }
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const Platoon& a = platoons_.at(order[i]);
            const Platoon& b = platoons_.at(order[j]);
            if (!a.subchannel_id || !b.subchannel_id || *a.subchannel_id != *b.subchannel_id)
                continue;
            if (in_coverage_.at(a.id) || in_coverage_.at(b.id)) continue;
            if (a.state != PlatoonState::Steady || b.state != PlatoonState::Steady) continue;
            bool resolving = false;
            for (const auto& m : maneuvers_) {
                if (m.maneuver.front_platoon_id() == a.id || m.maneuver.rear_platoon_id() == a.id ||
                    m.maneuver.front_platoon_id() == b.id || m.maneuver.rear_platoon_id() == b.id) {
                    resolving = true;
                    break;
                }
            }
            if (resolving) continue;
            if (gap_between(a, b) <= scenario_.transmission_range_m) {
                violations["co_channel_conflict"]++;
            }
        }
    }

    int n_in = 0;
    for (const auto& [id, in] : in_coverage_) n_in += in ? 1 : 0;
    report_.samples.push_back({time_s_, achieved_road_capacity(),
                               static_cast<int>(platoons_.size()), n_in,
                               static_cast<int>(maneuvers_.size())});
}

void World::step() {
    ++tick_;
    time_s_ = static_cast<double>(tick_) * scenario_.timestep_s;
    advance_positions();
    update_coverage_states();
    run_split_triggers();
    execute_splits();
    manage_channels_and_maneuvers();
    attempt_merges();
    record_metrics();
}

MetricsReport World::run() {
    const auto steps = static_cast<std::int64_t>(
        std::ceil(scenario_.duration_s / scenario_.timestep_s - 1e-9));
    for (std::int64_t i = 0; i < steps; ++i) step();
    report_.final_platoon_count = static_cast<int>(platoons_.size());
    double capacity_sum = 0.0;
    for (const auto& s : report_.samples) capacity_sum += s.capacity_vps;
    report_.mean_capacity_vps =
        report_.samples.empty() ? 0.0
                                : capacity_sum / static_cast<double>(report_.samples.size());
    return report_;
}

MetricsReport run(const Scenario& scenario) {
    World world(scenario);
    return world.run();
}

} // namespace hdvp
