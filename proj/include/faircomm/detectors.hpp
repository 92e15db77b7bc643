#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "faircomm/error.hpp"
#include "faircomm/graph.hpp"
#include "faircomm/random.hpp"

namespace faircomm {

// Q = sum_c [ m_c / m - (vol_c / 2m)^2 ]
inline double modularity(const Graph& graph, const Partition& partition) {
    if (graph.edge_count() == 0) throw UndefinedValue("modularity of an edgeless graph");
    if (partition.node_count() != graph.node_count()) throw InputError("partition does not match graph");
    std::vector<double> internal(partition.community_count(), 0.0);
    std::vector<double> volume(partition.community_count(), 0.0);
    for (const Edge& e : graph.edges()) {
        const auto cu = partition.community_of(e.u);
        const auto cv = partition.community_of(e.v);
        if (cu == cv) internal[cu] += 1.0;
        volume[cu] += 1.0;
        volume[cv] += 1.0;
    }
    const double m = static_cast<double>(graph.edge_count());
    double q = 0.0;
    for (std::size_t c = 0; c < internal.size(); ++c) {
        const double share = volume[c] / (2.0 * m);
        q += internal[c] / m - share * share;
    }
    return q;
}

/**
 * Asynchronous label propagation.
 *
 * Every node starts with its own label. Each sweep visits the nodes in a fresh
 * random order and gives each the label most frequent among its neighbors,
 * drawing uniformly among tied labels. The run stops after the first sweep at
 * whose end every node carries one of its neighborhood's most frequent labels.
 */
inline Partition label_propagation(const Graph& graph, std::uint64_t seed, std::size_t max_sweeps = 1000) {
    const std::size_t n = graph.node_count();
    Rng rng = make_rng(seed);
    std::vector<NodeId> labels(n);
    std::iota(labels.begin(), labels.end(), NodeId{0});
    std::vector<NodeId> order(labels);
    std::vector<std::uint32_t> counts(n, 0);
    std::vector<NodeId> seen;
    std::vector<NodeId> ties;

    // Fills `ties` with the sorted most frequent neighbor labels of v.
    auto majority = [&](NodeId v) {
        seen.clear();
        ties.clear();
        std::uint32_t best = 0;
        for (NodeId w : graph.neighbors(v)) {
            const NodeId l = labels[w];
            if (counts[l]++ == 0) seen.push_back(l);
            best = std::max(best, counts[l]);
        }
        for (NodeId l : seen) {
            if (counts[l] == best) ties.push_back(l);
            counts[l] = 0;
        }
        std::sort(ties.begin(), ties.end());
    };

    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        shuffle(std::span<NodeId>(order), rng);
        for (NodeId v : order) {
            if (graph.degree(v) == 0) continue;
            majority(v);
            labels[v] = ties.size() == 1 ? ties.front() : ties[uniform_index(rng, ties.size())];
        }
        bool stable = true;
        for (NodeId v = 0; v < n && stable; ++v) {
            if (graph.degree(v) == 0) continue;
            majority(v);
            stable = std::binary_search(ties.begin(), ties.end(), labels[v]);
        }
        if (stable) break;
    }
    return Partition::from_labels(labels);
}

struct GreedyModularityResult {
    Partition partition;
    double modularity = 0.0;
    // Modularity gain of every merge, in merge order.
    std::vector<double> merge_gains;
};

/**
 * Clauset-Newman-Moore agglomeration.
 *
 * Starting from singletons, the pair of adjacent communities with the largest
 * modularity gain is merged until no merge gains. Gains are compared exactly
 * as the integer 2m*L_ij - vol_i*vol_j (proportional to the gain), ties go to
 * the smallest (i, j) pair, and a merged community keeps the smaller id.
 */
inline GreedyModularityResult greedy_modularity_run(const Graph& graph) {
    if (graph.edge_count() == 0) throw InputError("greedy modularity needs at least one edge");
    const std::size_t n = graph.node_count();
    const std::int64_t two_m = 2 * static_cast<std::int64_t>(graph.edge_count());

    std::vector<std::int64_t> volume(n);
    std::vector<std::unordered_map<NodeId, std::int64_t>> links(n);
    for (NodeId v = 0; v < n; ++v) volume[v] = static_cast<std::int64_t>(graph.degree(v));
    for (const Edge& e : graph.edges()) {
        links[e.u][e.v] += 1;
        links[e.v][e.u] += 1;
    }

    struct Candidate {
        std::int64_t gain;
        NodeId i;
        NodeId j;
        bool operator<(const Candidate& o) const {
            if (gain != o.gain) return gain > o.gain;
            if (i != o.i) return i < o.i;
            return j < o.j;
        }
    };
    auto gain_of = [&](NodeId a, NodeId b, std::int64_t between) {
        return two_m * between - volume[a] * volume[b];
    };
    auto candidate = [&](NodeId a, NodeId b, std::int64_t between) {
        return Candidate{gain_of(a, b, between), std::min(a, b), std::max(a, b)};
    };

    std::set<Candidate> queue;
    for (const Edge& e : graph.edges()) queue.insert(candidate(e.u, e.v, 1));

    std::vector<NodeId> parent(n);
    std::iota(parent.begin(), parent.end(), NodeId{0});
    auto find = [&](NodeId v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };

    GreedyModularityResult result;
    const double scale = 2.0 * static_cast<double>(graph.edge_count()) * static_cast<double>(graph.edge_count());
    while (!queue.empty() && queue.begin()->gain > 0) {
        const auto [gain, i, j] = *queue.begin();
        result.merge_gains.push_back(static_cast<double>(gain) / scale);

        for (auto [k, between] : links[i]) queue.erase(candidate(i, k, between));
        for (auto [k, between] : links[j]) {
            if (k != i) queue.erase(candidate(j, k, between));
        }
        for (auto [k, between] : links[j]) {
            if (k == i) continue;
            links[i][k] += between;
            auto& back = links[k];
            back[i] += between;
            back.erase(j);
        }
        links[i].erase(j);
        links[j].clear();
        volume[i] += volume[j];
        volume[j] = 0;
        parent[j] = i;
        for (auto [k, between] : links[i]) queue.insert(candidate(i, k, between));
    }

    std::vector<NodeId> labels(n);
    for (NodeId v = 0; v < n; ++v) labels[v] = find(v);
    result.partition = Partition::from_labels(labels);
    result.modularity = modularity(graph, result.partition);
    return result;
}

inline Partition greedy_modularity(const Graph& graph) { return greedy_modularity_run(graph).partition; }

} // namespace faircomm
