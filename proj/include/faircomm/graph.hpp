#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "faircomm/error.hpp"

namespace faircomm {

using NodeId = std::uint32_t;
using CommunityId = std::uint32_t;

// Sorted, duplicate-free list of node ids.
using NodeSet = std::vector<NodeId>;

struct Edge {
    NodeId u;
    NodeId v;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/**
 * Undirected simple graph over dense node ids 0..n-1.
 *
 * Construction normalizes the edge list: every edge is stored once with
 * u < v, duplicates and self-loops are dropped and counted. Each node keeps an
 * external label so results can be reported in the ids of the input file.
 * Immutable after construction.
 */
class Graph {
public:
    Graph() = default;

    Graph(std::size_t node_count, std::span<const Edge> edges, std::vector<std::string> labels = {})
        : adjacency_(node_count), labels_(std::move(labels)) {
        if (labels_.empty()) {
            labels_.reserve(node_count);
            for (std::size_t v = 0; v < node_count; ++v) labels_.push_back(std::to_string(v));
        }
        if (labels_.size() != node_count) {
            throw InputError("label count " + std::to_string(labels_.size()) + " does not match node count " +
                             std::to_string(node_count));
        }
        index_.reserve(node_count);
        for (std::size_t v = 0; v < node_count; ++v) {
            if (!index_.emplace(labels_[v], static_cast<NodeId>(v)).second) {
                throw InputError("duplicate node label '" + labels_[v] + "'");
            }
        }

        edges_.reserve(edges.size());
        for (Edge e : edges) {
            if (e.u >= node_count || e.v >= node_count) {
                throw InputError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                                 ") references a node outside 0.." + std::to_string(node_count - 1));
            }
            if (e.u == e.v) {
                ++self_loops_;
                continue;
            }
            if (e.u > e.v) std::swap(e.u, e.v);
            edges_.push_back(e);
        }
        std::sort(edges_.begin(), edges_.end());
        auto tail = std::unique(edges_.begin(), edges_.end());
        duplicates_ = static_cast<std::size_t>(edges_.end() - tail);
        edges_.erase(tail, edges_.end());

        for (const Edge& e : edges_) {
            adjacency_[e.u].push_back(e.v);
            adjacency_[e.v].push_back(e.u);
        }
        for (auto& list : adjacency_) std::sort(list.begin(), list.end());
    }

    std::size_t node_count() const noexcept { return adjacency_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    std::span<const Edge> edges() const noexcept { return edges_; }
    std::span<const NodeId> neighbors(NodeId v) const { return adjacency_.at(v); }
    std::size_t degree(NodeId v) const { return adjacency_.at(v).size(); }

    bool has_edge(NodeId u, NodeId v) const {
        const auto& list = adjacency_.at(u);
        return std::binary_search(list.begin(), list.end(), v);
    }

    const std::string& label(NodeId v) const { return labels_.at(v); }
    std::span<const std::string> labels() const noexcept { return labels_; }

    std::optional<NodeId> find(std::string_view label) const {
        auto it = index_.find(std::string(label));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t dropped_self_loops() const noexcept { return self_loops_; }
    std::size_t dropped_duplicates() const noexcept { return duplicates_; }

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<NodeId>> adjacency_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, NodeId> index_;
    std::size_t self_loops_ = 0;
    std::size_t duplicates_ = 0;
};

/**
 * Non-overlapping cover of nodes 0..n-1 by non-empty communities.
 *
 * Community ids are dense. `communities()[c]` is the sorted member list of
 * community c and `community_of(v)` is its inverse.
 */
class Partition {
public:
    Partition() = default;

    // `assignment[v]` must lie in [0, community_count) and every community id
    // must be used at least once.
    Partition(std::vector<CommunityId> assignment, std::size_t community_count)
        : assignment_(std::move(assignment)), communities_(community_count) {
        for (std::size_t v = 0; v < assignment_.size(); ++v) {
            const CommunityId c = assignment_[v];
            if (c >= community_count) {
                throw InputError("community id " + std::to_string(c) + " out of range for node " +
                                 std::to_string(v));
            }
            communities_[c].push_back(static_cast<NodeId>(v));
        }
        for (std::size_t c = 0; c < community_count; ++c) {
            if (communities_[c].empty()) throw InputError("community " + std::to_string(c) + " is empty");
        }
    }

    // Arbitrary labels; community ids are assigned in order of first
    // appearance over nodes 0..n-1.
    template <typename Label>
    static Partition from_labels(std::span<const Label> labels) {
        std::unordered_map<Label, CommunityId> ids;
        std::vector<CommunityId> assignment;
        assignment.reserve(labels.size());
        for (const Label& l : labels) {
            auto [it, inserted] = ids.emplace(l, static_cast<CommunityId>(ids.size()));
            assignment.push_back(it->second);
        }
        return Partition(std::move(assignment), ids.size());
    }

    template <typename Label>
    static Partition from_labels(const std::vector<Label>& labels) {
        return from_labels(std::span<const Label>(labels));
    }

    static Partition from_communities(std::size_t node_count, const std::vector<NodeSet>& communities) {
        std::vector<CommunityId> assignment(node_count, kUnassigned);
        for (std::size_t c = 0; c < communities.size(); ++c) {
            for (NodeId v : communities[c]) {
                if (v >= node_count) throw InputError("node " + std::to_string(v) + " out of range");
                if (assignment[v] != kUnassigned) {
                    throw InputError("node " + std::to_string(v) + " appears in more than one community");
                }
                assignment[v] = static_cast<CommunityId>(c);
            }
        }
        for (std::size_t v = 0; v < node_count; ++v) {
            if (assignment[v] == kUnassigned) throw InputError("node " + std::to_string(v) + " is not covered");
        }
        return Partition(std::move(assignment), communities.size());
    }

    std::size_t node_count() const noexcept { return assignment_.size(); }
    std::size_t community_count() const noexcept { return communities_.size(); }

    const NodeSet& community(std::size_t c) const {
        if (c >= communities_.size()) {
            throw InputError("community index " + std::to_string(c) + " out of range (" +
                             std::to_string(communities_.size()) + " communities)");
        }
        return communities_[c];
    }
    const std::vector<NodeSet>& communities() const noexcept { return communities_; }

    CommunityId community_of(NodeId v) const { return assignment_.at(v); }
    std::span<const CommunityId> assignment() const noexcept { return assignment_; }

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    static constexpr CommunityId kUnassigned = ~CommunityId{0};

    std::vector<CommunityId> assignment_;
    std::vector<NodeSet> communities_;
};

inline std::size_t community_size(const Partition& partition, std::size_t index) {
    return partition.community(index).size();
}

namespace detail {

// Splits a line into whitespace-separated tokens; returns nothing for blank
// and `#` comment lines.
inline std::vector<std::string> tokens_of(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string token;
    while (in >> token) {
        if (out.empty() && token.front() == '#') return {};
        out.push_back(std::move(token));
    }
    return out;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return in;
}

} // namespace detail

// Whitespace-separated edge list, `#` comments. Node ids are arbitrary
// tokens and receive internal ids in order of first appearance.
inline Graph load_graph(std::istream& in) {
    std::vector<std::string> labels;
    std::unordered_map<std::string, NodeId> ids;
    std::vector<Edge> edges;
    auto id_of = [&](const std::string& token) {
        auto [it, inserted] = ids.emplace(token, static_cast<NodeId>(labels.size()));
        if (inserted) labels.push_back(token);
        return it->second;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = detail::tokens_of(line);
        if (tokens.empty()) continue;
        if (tokens.size() != 2) {
            throw ParseError("expected 2 node ids, found " + std::to_string(tokens.size()), line_no);
        }
        const NodeId u = id_of(tokens[0]);
        const NodeId v = id_of(tokens[1]);
        edges.push_back({u, v});
    }
    const std::size_t n = labels.size();
    Graph graph(n, edges, std::move(labels));
    if (graph.edge_count() == 0) throw ParseError("edge list contains no edges");
    return graph;
}

inline Graph load_graph_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return load_graph(in);
}

inline Graph load_graph_file(const std::string& path) {
    auto in = detail::open_input(path);
    return load_graph(in);
}

// `<node id> <community label>` per line. Community ids follow the first
// appearance of each label in the file.
inline Partition load_partition(std::istream& in, const Graph& graph) {
    constexpr CommunityId unassigned = ~CommunityId{0};
    std::vector<CommunityId> assignment(graph.node_count(), unassigned);
    std::unordered_map<std::string, CommunityId> community_ids;
    std::vector<std::string> unknown;
    std::vector<std::string> duplicated;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = detail::tokens_of(line);
        if (tokens.empty()) continue;
        if (tokens.size() != 2) {
            throw ParseError("expected '<node> <community>', found " + std::to_string(tokens.size()) + " tokens",
                             line_no);
        }
        auto node = graph.find(tokens[0]);
        if (!node) {
            unknown.push_back(tokens[0]);
            continue;
        }
        auto [it, inserted] = community_ids.emplace(tokens[1], static_cast<CommunityId>(community_ids.size()));
        if (assignment[*node] != unassigned) {
            duplicated.push_back(tokens[0]);
            continue;
        }
        assignment[*node] = it->second;
    }

    auto join = [](const std::vector<std::string>& ids) {
        std::string out;
        for (std::size_t i = 0; i < ids.size() && i < 20; ++i) out += (i ? ", " : "") + ids[i];
        if (ids.size() > 20) out += ", ... (" + std::to_string(ids.size()) + " total)";
        return out;
    };
    if (!unknown.empty()) throw InputError("unknown node ids: " + join(unknown));
    if (!duplicated.empty()) throw InputError("nodes listed more than once: " + join(duplicated));
    std::vector<std::string> missing;
    for (std::size_t v = 0; v < assignment.size(); ++v) {
        if (assignment[v] == unassigned) missing.push_back(graph.label(static_cast<NodeId>(v)));
    }
    if (!missing.empty()) throw InputError("nodes without a community: " + join(missing));
    return Partition(std::move(assignment), community_ids.size());
}

inline Partition load_partition_text(std::string_view text, const Graph& graph) {
    std::istringstream in{std::string(text)};
    return load_partition(in, graph);
}

inline Partition load_partition_file(const std::string& path, const Graph& graph) {
    auto in = detail::open_input(path);
    return load_partition(in, graph);
}

inline void write_edge_list(std::ostream& out, const Graph& graph) {
    for (const Edge& e : graph.edges()) out << graph.label(e.u) << ' ' << graph.label(e.v) << '\n';
}

// Communities are written by index, nodes by external label in internal id
// order.
inline void write_partition(std::ostream& out, const Graph& graph, const Partition& partition) {
    if (partition.node_count() != graph.node_count()) {
        throw InputError("partition covers " + std::to_string(partition.node_count()) + " nodes, graph has " +
                         std::to_string(graph.node_count()));
    }
    for (NodeId v = 0; v < graph.node_count(); ++v) out << graph.label(v) << ' ' << partition.community_of(v) << '\n';
}

} // namespace faircomm
