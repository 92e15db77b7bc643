#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "faircomm/error.hpp"
#include "faircomm/graph.hpp"

namespace faircomm {

inline NodeSet make_node_set(std::vector<NodeId> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

namespace detail {

inline void check_members(const Graph& graph, std::span<const NodeId> members) {
    if (!std::is_sorted(members.begin(), members.end())) throw InputError("node set must be sorted");
    if (!members.empty() && members.back() >= graph.node_count()) {
        throw InputError("node " + std::to_string(members.back()) + " is not in the graph (" +
                         std::to_string(graph.node_count()) + " nodes)");
    }
}

inline bool contains(std::span<const NodeId> members, NodeId v) {
    return std::binary_search(members.begin(), members.end(), v);
}

} // namespace detail

struct EdgeCounts {
    std::size_t internal = 0; // both endpoints inside
    std::size_t cut = 0;      // exactly one endpoint inside
    std::size_t volume() const noexcept { return 2 * internal + cut; }
};

inline EdgeCounts edge_counts(const Graph& graph, std::span<const NodeId> members) {
    detail::check_members(graph, members);
    std::size_t internal_endpoints = 0;
    std::size_t volume = 0;
    for (NodeId v : members) {
        auto nbrs = graph.neighbors(v);
        volume += nbrs.size();
        for (NodeId w : nbrs) internal_endpoints += detail::contains(members, w);
    }
    return {internal_endpoints / 2, volume - internal_endpoints};
}

inline std::size_t internal_edge_count(const Graph& graph, std::span<const NodeId> members) {
    return edge_counts(graph, members).internal;
}

// Internal edges over possible internal pairs. A singleton has no internal
// pair and is given density 0.
inline double community_density(const Graph& graph, std::span<const NodeId> members) {
    if (members.empty()) throw InputError("density of an empty community");
    const auto internal = edge_counts(graph, members).internal;
    if (members.size() == 1) return 0.0;
    const double pairs = 0.5 * static_cast<double>(members.size()) * static_cast<double>(members.size() - 1);
    return static_cast<double>(internal) / pairs;
}

// cut / vol, vol being the degree sum of the members.
inline double community_conductance(const Graph& graph, std::span<const NodeId> members) {
    const auto counts = edge_counts(graph, members);
    if (counts.volume() == 0) throw UndefinedValue("conductance of a community with zero volume");
    return static_cast<double>(counts.cut) / static_cast<double>(counts.volume());
}

// Min-max scaled values, or nullopt when every value is equal.
inline std::optional<std::vector<double>> normalize_property(std::span<const double> values) {
    if (values.empty()) throw InputError("cannot normalize an empty list");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double min = *lo;
    const double range = *hi - *lo;
    if (!(range > 0.0)) return std::nullopt;
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back((v - min) / range);
    return out;
}

inline double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw InputError("length mismatch: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    }
    if (x.size() < 2) throw InputError("pearson correlation needs at least 2 samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw UndefinedValue("pearson correlation of a zero-variance vector");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Raw structural properties of every community of a partition. Conductance
/// is nullopt for communities with zero volume.
struct CommunityProperties {
    std::vector<double> size;
    std::vector<double> density;
    std::vector<std::optional<double>> conductance;
};

inline CommunityProperties community_properties(const Graph& graph, const Partition& partition) {
    CommunityProperties props;
    const auto m = partition.community_count();
    props.size.reserve(m);
    props.density.reserve(m);
    props.conductance.reserve(m);
    for (const NodeSet& members : partition.communities()) {
        const auto counts = edge_counts(graph, members);
        const double s = static_cast<double>(members.size());
        props.size.push_back(s);
        props.density.push_back(members.size() < 2 ? 0.0
                                                    : static_cast<double>(counts.internal) / (0.5 * s * (s - 1)));
        if (counts.volume() == 0) {
            props.conductance.push_back(std::nullopt);
        } else {
            props.conductance.push_back(static_cast<double>(counts.cut) / static_cast<double>(counts.volume()));
        }
    }
    return props;
}

} // namespace faircomm
