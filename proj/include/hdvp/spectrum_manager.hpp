#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace hdvp {

/// One of N_b equal slices of the band.
struct SubChannel {
    int id = 0;
    double bandwidth_hz = 0.0; // B / N_b
};

std::vector<SubChannel> make_subchannels(double bandwidth_hz, int n_subchannels);

/// Spectrum reuse efficiency of an N_b-way equal split, 1/N_b.
double reuse_efficiency(int n_subchannels);

/// platoon id -> sub-channel id. Single-channel mode is N_b = 1 with every
/// platoon on sub-channel 0.
struct ChannelPlan {
    std::map<int, int> assignments;
};

/// Longitudinal footprint of a platoon: front bumper of the first vehicle
/// (head) down to the rear bumper of the last (tail), head >= tail.
struct PlatoonExtent {
    int id = 0;
    double head_m = 0.0;
    double tail_m = 0.0;
};

/// Binary in/out-of-range conflict relation between platoons. Symmetric,
/// no self-edges.
class InterferenceGraph {
public:
    void add_node(int id) { adjacency_[id]; }
    void add_edge(int a, int b);
    bool has_edge(int a, int b) const;
    bool has_node(int id) const { return adjacency_.count(id) != 0; }
    const std::set<int>& neighbors(int id) const;
    std::vector<std::pair<int, int>> edges() const;
    std::size_t node_count() const { return adjacency_.size(); }

private:
    std::map<int, std::set<int>> adjacency_;
};

/// Edge (i,j) iff the gap between the nearest ends of the two extents is
/// within transmission range. Overlapping extents are rejected.
InterferenceGraph build_interference_graph(const std::vector<PlatoonExtent>& extents,
                                           double transmission_range_m);

/// Sub-channels used by no in-range neighbor of the platoon (perfect
/// sensing, no misdetection model).
std::set<int> sense_vacant_subchannels(int platoon_id, const ChannelPlan& plan,
                                       const InterferenceGraph& graph, int n_subchannels);

/// Assigns the lowest-id vacant sub-channel and returns it; nullopt means no
/// vacancy and signals the caller to fall back to the separation maneuver.
std::optional<int> assign_subchannel(int platoon_id, const std::set<int>& vacant,
                                     ChannelPlan& plan);

} // namespace hdvp
