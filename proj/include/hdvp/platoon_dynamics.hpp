#pragma once

#include <optional>
#include <vector>

namespace hdvp {

struct Vehicle {
    int id = 0;
    double position_m = 0.0; // front bumper, longitudinal
    double velocity_mps = 0.0;
    double length_m = 1.5;
};

/// Split/merge lifecycle. Transitions follow the split flow only:
/// Steady -> PrepareSplit -> Splitting -> Separating -> Steady, plus
/// Steady -> Merging -> Steady.
enum class PlatoonState { Steady, PrepareSplit, Splitting, Separating, Merging };

const char* to_string(PlatoonState state);

/// Hysteresis pair for the coverage-exit trigger: preparation starts below
/// prepare_dbm (P1), the split itself fires below split_dbm (P2 < P1).
struct SignalThresholds {
    double prepare_dbm = -95.0;
    double split_dbm = -100.0;

    void validate() const;
};

/// Ordered vehicle string. The leader is the first member by construction.
struct Platoon {
    int id = 0;
    std::vector<int> members; // vehicle ids, front to rear
    std::optional<int> subchannel_id;
    PlatoonState state = PlatoonState::Steady;
    std::optional<int> prospective_leader_id;

    int leader_vehicle_id() const { return members.front(); }
    int size() const { return static_cast<int>(members.size()); }
};

/// One binary mid-split: front keeps the extra vehicle on odd sizes.
struct SplitPlan {
    std::vector<int> front_members;
    std::vector<int> rear_members;
    int rear_leader_id = 0;
    std::optional<int> rear_subchannel;
};

enum class SplitTrigger {
    None,             // hold current state
    BeginPreparation, // Steady -> PrepareSplit; sensing starts, leader designated
    AbortPreparation, // PrepareSplit -> Steady; signal recovered above P1
    ExecuteSplit      // PrepareSplit -> Splitting
};

/// Advances the split FSM of a Steady or PrepareSplit platoon from one signal
/// sample. Mutates platoon state and the prospective rear leader; returns what
/// happened so the caller can log it. Throws for platoons mid-split/merge.
SplitTrigger evaluate_split_trigger(Platoon& platoon, double signal_dbm,
                                    const SignalThresholds& thresholds);

/// Front-most member of the would-be rear platoon.
int designate_leader(const std::vector<int>& rear_members);

/// Index where a mid-split divides a string of the given size (front half
/// keeps the extra vehicle on odd sizes).
int mid_split_index(int size);

struct SplitOutcome {
    std::vector<SplitPlan> plans;                 // binary splits in application order
    std::vector<std::pair<int, int>> plan_ids;    // (front, rear) platoon id per plan
    std::vector<Platoon> platoons;                // resulting platoons, front to rear
};

/// Recursive binary mid-splits until every part fits max_size_out. The
/// front-most part keeps the original platoon id and sub-channel and returns
/// to Steady; every new rear platoon draws the next id from next_platoon_id
/// and starts in Separating until a sub-channel is found for it. Requires
/// state Splitting and size > max_size_out.
SplitOutcome split_platoon(const Platoon& platoon, int max_size_out, int& next_platoon_id);

struct ManeuverParams {
    double transmission_range_m = 1000.0;
    double guard_margin_m = 50.0;
    double speed_delta_mps = 2.0;

    void validate() const;
};

/// Single-channel fallback after a split: the rear platoon drops below the
/// speed of the platoon ahead until the gap clears transmission range plus a
/// guard margin, then both resume cruise. Only the rear slows so the forward
/// platoon's schedule is undisturbed.
class SeparationManeuver {
public:
    SeparationManeuver(int front_platoon_id, int rear_platoon_id, ManeuverParams params,
                       double cruise_velocity_mps);

    int front_platoon_id() const { return front_id_; }
    int rear_platoon_id() const { return rear_id_; }

    /// Rear-platoon velocity for the next step, never negative.
    double rear_velocity_command(double front_velocity_mps) const;

    /// True once the inter-platoon gap exceeds range + guard margin.
    bool complete(double gap_m) const;

    double cruise_velocity_mps() const { return cruise_mps_; }

private:
    int front_id_;
    int rear_id_;
    ManeuverParams params_;
    double cruise_mps_;
};

enum class MergeOutcome { Merged, OutOfCoverage, SizeExceedsCap };

const char* to_string(MergeOutcome outcome);

struct MergeResult {
    MergeOutcome outcome = MergeOutcome::Merged;
    std::optional<Platoon> merged; // set only on Merged
};

/// Merges the rear platoon into the front one when inside coverage and the
/// combined size fits min(max_size_in, regulatory cap). The merged platoon
/// keeps the front's id, leader and sub-channel; the rear id is retired by
/// the caller. Rejections are values, not errors. Requires both Steady and
/// the rear physically immediately behind the front (caller-checked).
MergeResult merge_platoons(const Platoon& front, const Platoon& rear, int max_size_in,
                           int regulatory_cap, bool in_coverage);

} // namespace hdvp
