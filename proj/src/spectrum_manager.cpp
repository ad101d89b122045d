#include "hdvp/spectrum_manager.hpp"

#include <algorithm>
#include <string>

#include "hdvp/errors.hpp"

namespace hdvp {

std::vector<SubChannel> make_subchannels(double bandwidth_hz, int n_subchannels) {
    if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth_hz must be > 0");
    if (n_subchannels < 1) throw ConfigError("n_subchannels must be >= 1");
    std::vector<SubChannel> channels;
    channels.reserve(static_cast<std::size_t>(n_subchannels));
    for (int i = 0; i < n_subchannels; ++i) {
        channels.push_back({i, bandwidth_hz / static_cast<double>(n_subchannels)});
    }
    return channels;
}

double reuse_efficiency(int n_subchannels) {
    if (n_subchannels < 1) throw ConfigError("n_subchannels must be >= 1");
    return 1.0 / static_cast<double>(n_subchannels);
}

void InterferenceGraph::add_edge(int a, int b) {
    if (a == b) throw ConfigError("interference graph: self-edge");
    adjacency_[a].insert(b);
    adjacency_[b].insert(a);
}

bool InterferenceGraph::has_edge(int a, int b) const {
    const auto it = adjacency_.find(a);
    return it != adjacency_.end() && it->second.count(b) != 0;
}

const std::set<int>& InterferenceGraph::neighbors(int id) const {
    const auto it = adjacency_.find(id);
    if (it == adjacency_.end()) {
        throw ConfigError("interference graph: unknown platoon id " + std::to_string(id));
    }
    return it->second;
}

std::vector<std::pair<int, int>> InterferenceGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (const auto& [node, nbrs] : adjacency_) {
        for (int other : nbrs) {
            if (node < other) out.emplace_back(node, other);
        }
    }
    return out;
}

InterferenceGraph build_interference_graph(const std::vector<PlatoonExtent>& extents,
                                           double transmission_range_m) {
    if (!(transmission_range_m > 0.0)) throw ConfigError("transmission_range_m must be > 0");
    for (const auto& e : extents) {
        if (e.head_m < e.tail_m) {
            throw ConfigError("platoon extent " + std::to_string(e.id) + ": head behind tail");
        }
    }
    InterferenceGraph graph;
    for (const auto& e : extents) graph.add_node(e.id);
    for (std::size_t i = 0; i < extents.size(); ++i) {
        for (std::size_t j = i + 1; j < extents.size(); ++j) {
            const auto& a = extents[i];
            const auto& b = extents[j];
            // Nearest-end gap; negative means overlapping strings.
            const double gap = std::max(a.tail_m - b.head_m, b.tail_m - a.head_m);
            if (gap < 0.0) {
                throw ConfigError("overlapping platoon extents " + std::to_string(a.id) +
                                  " and " + std::to_string(b.id));
            }
            if (gap <= transmission_range_m) graph.add_edge(a.id, b.id);
        }
    }
    return graph;
}

std::set<int> sense_vacant_subchannels(int platoon_id, const ChannelPlan& plan,
                                       const InterferenceGraph& graph, int n_subchannels) {
    if (n_subchannels < 1) throw ConfigError("n_subchannels must be >= 1");
    if (!graph.has_node(platoon_id)) {
        throw ConfigError("sense: platoon " + std::to_string(platoon_id) + " not in graph");
    }
    std::set<int> vacant;
    for (int c = 0; c < n_subchannels; ++c) vacant.insert(c);
    for (int neighbor : graph.neighbors(platoon_id)) {
        const auto it = plan.assignments.find(neighbor);
        if (it != plan.assignments.end()) vacant.erase(it->second);
    }
    return vacant;
}

std::optional<int> assign_subchannel(int platoon_id, const std::set<int>& vacant,
                                     ChannelPlan& plan) {
    if (vacant.empty()) return std::nullopt;
    const int channel = *vacant.begin(); // lowest id, deterministic
    plan.assignments[platoon_id] = channel;
    return channel;
}

} // namespace hdvp
