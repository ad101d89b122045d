#include "hdvp/platoon_dynamics.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "hdvp/errors.hpp"

namespace hdvp {

const char* to_string(PlatoonState state) {
    switch (state) {
    case PlatoonState::Steady: return "Steady";
    case PlatoonState::PrepareSplit: return "PrepareSplit";
    case PlatoonState::Splitting: return "Splitting";
    case PlatoonState::Separating: return "Separating";
    case PlatoonState::Merging: return "Merging";
    }
    return "?";
}

const char* to_string(MergeOutcome outcome) {
    switch (outcome) {
    case MergeOutcome::Merged: return "merged";
    case MergeOutcome::OutOfCoverage: return "out of coverage";
    case MergeOutcome::SizeExceedsCap: return "size exceeds cap";
    }
    return "?";
}

void SignalThresholds::validate() const {
    if (!(split_dbm < prepare_dbm)) {
        throw ConfigError("split threshold P2 must be strictly below prepare threshold P1");
    }
}

void ManeuverParams::validate() const {
    if (!(transmission_range_m > 0.0)) throw ConfigError("transmission_range_m must be > 0");
    if (guard_margin_m < 0.0) throw ConfigError("guard_margin_m must be >= 0");
    if (!(speed_delta_mps > 0.0)) throw ConfigError("speed_delta_mps must be > 0");
}

int designate_leader(const std::vector<int>& rear_members) {
    if (rear_members.empty()) throw ConfigError("cannot designate a leader for an empty string");
    return rear_members.front();
}

int mid_split_index(int size) {
    if (size < 2) throw ConfigError("cannot mid-split a string of size < 2");
    return (size + 1) / 2;
}

SplitTrigger evaluate_split_trigger(Platoon& platoon, double signal_dbm,
                                    const SignalThresholds& thresholds) {
    thresholds.validate();
    switch (platoon.state) {
    case PlatoonState::Steady:
        if (signal_dbm < thresholds.prepare_dbm) {
            platoon.state = PlatoonState::PrepareSplit;
            if (platoon.size() >= 2) {
                const int mid = mid_split_index(platoon.size());
                platoon.prospective_leader_id = designate_leader(
                    {platoon.members.begin() + mid, platoon.members.end()});
            }
            return SplitTrigger::BeginPreparation;
        }
        return SplitTrigger::None;
    case PlatoonState::PrepareSplit:
        if (signal_dbm >= thresholds.prepare_dbm) {
            platoon.state = PlatoonState::Steady;
            platoon.prospective_leader_id.reset();
            return SplitTrigger::AbortPreparation;
        }
        if (signal_dbm < thresholds.split_dbm) {
            platoon.state = PlatoonState::Splitting;
            return SplitTrigger::ExecuteSplit;
        }
        return SplitTrigger::None; // hold between P2 and P1
    default:
        throw ConfigError(std::string("split trigger evaluated in state ") +
                          to_string(platoon.state));
    }
}

SplitOutcome split_platoon(const Platoon& platoon, int max_size_out, int& next_platoon_id) {
    if (max_size_out < 1) throw ConfigError("max_size_out must be >= 1");
    if (platoon.state != PlatoonState::Splitting) {
        throw ConfigError("split requested in state " + std::string(to_string(platoon.state)));
    }
    if (platoon.size() <= max_size_out) {
        throw ConfigError("no split needed: size " + std::to_string(platoon.size()) +
                          " within limit " + std::to_string(max_size_out));
    }

    SplitOutcome out;
    // Work front to rear so new ids are allocated in plan order.
    std::deque<Platoon> pending;
    Platoon seed = platoon;
    seed.state = PlatoonState::Steady;
    seed.prospective_leader_id.reset();
    pending.push_back(std::move(seed));

    while (!pending.empty()) {
        Platoon current = std::move(pending.front());
        pending.pop_front();
        if (current.size() <= max_size_out) {
            out.platoons.push_back(std::move(current));
            continue;
        }
        const int mid = mid_split_index(current.size());
        SplitPlan plan;
        plan.front_members.assign(current.members.begin(), current.members.begin() + mid);
        plan.rear_members.assign(current.members.begin() + mid, current.members.end());
        plan.rear_leader_id = designate_leader(plan.rear_members);

        Platoon front = current;
        front.members = plan.front_members;

        Platoon rear;
        rear.id = next_platoon_id++;
        rear.members = plan.rear_members;
        rear.subchannel_id.reset(); // assigned by sensing or inherited on no-vacancy
        rear.state = PlatoonState::Separating;

        out.plan_ids.emplace_back(front.id, rear.id);
        out.plans.push_back(std::move(plan));
        // Front first keeps convoy order in the result.
        pending.push_front(std::move(rear));
        pending.push_front(std::move(front));
    }
    return out;
}

SeparationManeuver::SeparationManeuver(int front_platoon_id, int rear_platoon_id,
                                       ManeuverParams params, double cruise_velocity_mps)
    : front_id_(front_platoon_id), rear_id_(rear_platoon_id), params_(params),
      cruise_mps_(cruise_velocity_mps) {
    params_.validate();
    if (!(cruise_velocity_mps > 0.0)) throw ConfigError("cruise velocity must be > 0");
}

double SeparationManeuver::rear_velocity_command(double front_velocity_mps) const {
    // Relative to the platoon ahead, not to cruise: in a chain of separating
    // platoons each must keep falling behind its own predecessor.
    const double command = std::min(front_velocity_mps, cruise_mps_) - params_.speed_delta_mps;
    return std::max(command, 0.0);
}

bool SeparationManeuver::complete(double gap_m) const {
    return gap_m > params_.transmission_range_m + params_.guard_margin_m;
}

MergeResult merge_platoons(const Platoon& front, const Platoon& rear, int max_size_in,
                           int regulatory_cap, bool in_coverage) {
    if (front.state != PlatoonState::Steady || rear.state != PlatoonState::Steady) {
        throw ConfigError("merge requires both platoons Steady");
    }
    if (max_size_in < 1 || regulatory_cap < 1) throw ConfigError("merge caps must be >= 1");
    if (!in_coverage) return {MergeOutcome::OutOfCoverage, std::nullopt};
    const int combined = front.size() + rear.size();
    if (combined > std::min(max_size_in, regulatory_cap)) {
        return {MergeOutcome::SizeExceedsCap, std::nullopt};
    }
    Platoon merged = front;
    merged.members.insert(merged.members.end(), rear.members.begin(), rear.members.end());
    merged.state = PlatoonState::Steady;
    merged.prospective_leader_id.reset();
    return {MergeOutcome::Merged, std::move(merged)};
}

} // namespace hdvp
