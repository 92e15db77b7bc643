#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "faircomm/error.hpp"
#include "faircomm/graph.hpp"
#include "faircomm/random.hpp"

namespace faircomm {

struct GeneratedNetwork {
    Graph graph;
    Partition ground_truth;
};

namespace detail {

inline std::uint64_t edge_key(NodeId u, NodeId v) {
    if (u > v) std::swap(u, v);
    return (std::uint64_t{u} << 32) | v;
}

// Incremental simple-graph builder that rejects self-loops and duplicates.
class EdgeSet {
public:
    explicit EdgeSet(std::size_t nodes = 0) : adjacency_(nodes) {}

    NodeId add_node() {
        adjacency_.emplace_back();
        return static_cast<NodeId>(adjacency_.size() - 1);
    }

    bool add(NodeId u, NodeId v) {
        if (u == v || !keys_.insert(edge_key(u, v)).second) return false;
        edges_.push_back({u, v});
        adjacency_[u].push_back(v);
        adjacency_[v].push_back(u);
        return true;
    }

    bool contains(NodeId u, NodeId v) const { return keys_.contains(edge_key(u, v)); }
    std::size_t node_count() const { return adjacency_.size(); }
    const std::vector<NodeId>& neighbors(NodeId v) const { return adjacency_[v]; }
    std::size_t degree(NodeId v) const { return adjacency_[v].size(); }
    const std::vector<Edge>& edges() const { return edges_; }

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<NodeId>> adjacency_;
    std::unordered_set<std::uint64_t> keys_;
};

// Joins every connected component to the rest of the graph with one edge,
// preferring a partner from the same ground-truth community.
inline void connect_components(EdgeSet& edges, const std::vector<CommunityId>& assignment,
                               const std::vector<std::vector<NodeId>>& members, Rng& rng) {
    const std::size_t n = edges.node_count();
    std::vector<NodeId> parent(n);
    std::iota(parent.begin(), parent.end(), NodeId{0});
    auto find = [&](NodeId v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    for (const Edge& e : edges.edges()) parent[find(e.u)] = find(e.v);

    std::vector<std::vector<NodeId>> components(n);
    for (NodeId v = 0; v < n; ++v) components[find(v)].push_back(v);
    std::erase_if(components, [](const auto& c) { return c.empty(); });
    if (components.size() < 2) return;
    std::stable_sort(components.begin(), components.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });

    for (std::size_t c = 1; c < components.size(); ++c) {
        const auto& comp = components[c];
        const NodeId u = comp[uniform_index(rng, comp.size())];
        const auto& own = members[assignment[u]];
        std::optional<NodeId> partner;
        for (int attempt = 0; attempt < 32 && !partner; ++attempt) {
            const NodeId w = own[uniform_index(rng, own.size())];
            if (find(w) != find(u)) partner = w;
        }
        while (!partner) {
            const auto w = static_cast<NodeId>(uniform_index(rng, n));
            if (find(w) != find(u)) partner = w;
        }
        edges.add(u, *partner);
        parent[find(u)] = find(*partner);
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Planted partition with a mixing parameter.

struct PlantedPartitionConfig {
    std::size_t n = 1000;
    // Explicit community sizes. When empty, sizes are drawn from a power law
    // with exponent `size_exponent` on [min_community, max_community].
    std::vector<std::size_t> community_sizes;
    double size_exponent = 2.5;
    std::size_t min_community = 20;
    std::size_t max_community = 100;
    // Fraction of edge endpoints placed outside the node's community.
    double mu = 0.2;
    double avg_degree = 10.0;
    std::size_t max_degree = 50;
    std::uint64_t seed = 0;

    static PlantedPartitionConfig equal_communities(std::size_t n, std::size_t communities, double mu,
                                                    double avg_degree, std::uint64_t seed) {
        PlantedPartitionConfig c;
        c.n = n;
        c.mu = mu;
        c.avg_degree = avg_degree;
        c.max_degree = static_cast<std::size_t>(std::ceil(1.5 * avg_degree));
        c.seed = seed;
        for (std::size_t i = 0; i < communities; ++i) c.community_sizes.push_back(n / communities + (i < n % communities));
        return c;
    }

    // Power-law community sizes on [20, 100] with exponent 2.5.
    static PlantedPartitionConfig power_law(std::size_t n, double mu, double avg_degree, std::uint64_t seed) {
        PlantedPartitionConfig c;
        c.n = n;
        c.mu = mu;
        c.avg_degree = avg_degree;
        c.max_degree = static_cast<std::size_t>(std::ceil(1.5 * avg_degree));
        c.seed = seed;
        return c;
    }

    // Mirrors the LFR settings used for the large synthetic benchmarks.
    static PlantedPartitionConfig lfr_scale(double mu, std::uint64_t seed) {
        PlantedPartitionConfig c;
        c.n = 10000;
        c.mu = mu;
        c.avg_degree = 20.0;
        c.max_degree = 100;
        c.min_community = 20;
        c.max_community = 100;
        c.size_exponent = 2.5;
        c.seed = seed;
        return c;
    }
};

namespace detail {

inline std::vector<std::size_t> power_law_sizes(const PlantedPartitionConfig& config, Rng& rng) {
    if (config.min_community < 2 || config.max_community < config.min_community) {
        throw ConfigError("community size bounds must satisfy 2 <= min <= max");
    }
    if (config.n < config.min_community) throw ConfigError("n is smaller than the minimum community size");
    const double lo = static_cast<double>(config.min_community);
    const double hi = static_cast<double>(config.max_community) + 1.0;
    const double e = 1.0 - config.size_exponent;
    std::vector<std::size_t> sizes;
    std::size_t total = 0;
    while (total < config.n) {
        const double u = uniform_real(rng);
        double s;
        if (std::abs(e) < 1e-12) {
            s = lo * std::pow(hi / lo, u);
        } else {
            s = std::pow(std::pow(lo, e) + u * (std::pow(hi, e) - std::pow(lo, e)), 1.0 / e);
        }
        auto size = std::clamp(static_cast<std::size_t>(s), config.min_community, config.max_community);
        size = std::min(size, config.n - total);
        sizes.push_back(size);
        total += size;
    }
    // A remainder below the minimum is folded into the smallest community.
    if (sizes.size() > 1 && sizes.back() < config.min_community) {
        const auto rest = sizes.back();
        sizes.pop_back();
        *std::min_element(sizes.begin(), sizes.end()) += rest;
    }
    return sizes;
}

} // namespace detail

/**
 * Every node gets a degree budget drawn uniformly from
 * [avg/2, min(3avg/2, max_degree)] and emits half of it as edges; each edge is
 * intra-community with probability 1 - mu (uniform partner in the community)
 * and inter-community otherwise (uniform partner outside it). Duplicate and
 * self edges are re-drawn a bounded number of times. Components left
 * disconnected are then joined by one edge each.
 */
inline GeneratedNetwork generate_planted(const PlantedPartitionConfig& config) {
    if (!(config.mu >= 0.0 && config.mu <= 1.0)) throw ConfigError("mu must lie in [0, 1]");
    if (!(config.avg_degree > 0.0)) throw ConfigError("average degree must be positive");
    Rng rng = make_rng(config.seed);

    std::vector<std::size_t> sizes = config.community_sizes;
    if (sizes.empty()) {
        sizes = detail::power_law_sizes(config, rng);
    } else {
        if (std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) != config.n) {
            throw ConfigError("community sizes do not sum to n");
        }
        for (auto s : sizes)
            if (s < 2) throw ConfigError("community sizes must be at least 2");
    }
    if (config.mu > 0.0 && sizes.size() < 2) throw ConfigError("mu > 0 needs at least two communities");
    const std::size_t smallest = *std::min_element(sizes.begin(), sizes.end());
    if ((1.0 - config.mu) * config.avg_degree > static_cast<double>(smallest - 1)) {
        throw ConfigError("community of size " + std::to_string(smallest) + " cannot hold intra-degree " +
                          std::to_string((1.0 - config.mu) * config.avg_degree));
    }

    const std::size_t n = config.n;
    std::vector<CommunityId> assignment;
    assignment.reserve(n);
    for (std::size_t c = 0; c < sizes.size(); ++c) assignment.insert(assignment.end(), sizes[c], static_cast<CommunityId>(c));
    shuffle(std::span<CommunityId>(assignment), rng);
    std::vector<std::vector<NodeId>> members(sizes.size());
    for (NodeId v = 0; v < n; ++v) members[assignment[v]].push_back(v);

    const auto low = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(config.avg_degree / 2.0)));
    const auto high =
        std::max(low, std::min(config.max_degree, static_cast<std::size_t>(std::lround(1.5 * config.avg_degree))));

    constexpr int kAttempts = 32;
    detail::EdgeSet edges(n);
    for (NodeId v = 0; v < n; ++v) {
        const double budget = static_cast<double>(low + uniform_index(rng, high - low + 1)) / 2.0;
        auto stubs = static_cast<std::size_t>(budget);
        if (bernoulli(rng, budget - static_cast<double>(stubs))) ++stubs;
        const auto& own = members[assignment[v]];
        for (std::size_t s = 0; s < stubs; ++s) {
            const bool inter = bernoulli(rng, config.mu);
            for (int attempt = 0; attempt < kAttempts; ++attempt) {
                NodeId w;
                if (inter) {
                    do {
                        w = static_cast<NodeId>(uniform_index(rng, n));
                    } while (assignment[w] == assignment[v]);
                } else {
                    w = own[uniform_index(rng, own.size())];
                }
                if (edges.add(v, w)) break;
            }
        }
    }
    detail::connect_components(edges, assignment, members, rng);

    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t v = 0; v < n; ++v) labels.push_back(std::to_string(v));
    return {Graph(n, edges.edges(), std::move(labels)), Partition(std::move(assignment), sizes.size())};
}

// ---------------------------------------------------------------------------
// Homophilic preferential attachment with triadic closure.

struct HichBaConfig {
    std::size_t n = 10000;
    // Probability of a new node joining each community.
    std::vector<double> r;
    double h = 0.9;
    double p_node = 0.1;
    double p_triad = 0.3;
    double p_pa = 0.8;
    std::uint64_t seed = 0;
    // When set, community membership follows these exact sizes (in random
    // order) instead of sampling from r.
    std::vector<std::size_t> exact_sizes;

    // Scales likelihoods to sum to 1. The published preset lists sum to
    // 1.005 (MMin) and 0.999 (MMaj).
    static std::vector<double> normalized(std::vector<double> weights) {
        const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
        for (double& w : weights) w /= sum;
        return weights;
    }

    // Multiple minority communities and one dominant majority.
    static HichBaConfig mmin(std::uint64_t seed, std::size_t n = 10000) {
        HichBaConfig c;
        c.n = n;
        c.r = normalized({0.005, 0.005, 0.005, 0.01, 0.01, 0.01, 0.02, 0.02, 0.02, 0.9});
        c.seed = seed;
        return c;
    }

    // Multiple majority communities.
    static HichBaConfig mmaj(std::uint64_t seed, std::size_t n = 10000) {
        HichBaConfig c;
        c.n = n;
        c.r = normalized({0.003, 0.003, 0.003, 0.03, 0.03, 0.03, 0.3, 0.3, 0.3});
        c.seed = seed;
        return c;
    }

    // A single community of `n` nodes with about `edges` edges.
    static HichBaConfig single_community(std::size_t n, std::size_t edges, std::uint64_t seed) {
        HichBaConfig c;
        c.n = n;
        c.r = {1.0};
        c.p_node = std::min(1.0, static_cast<double>(n) / static_cast<double>(std::max<std::size_t>(edges, 1)));
        c.seed = seed;
        return c;
    }

    // Two communities of exactly the given sizes with about `edges` edges.
    static HichBaConfig two_communities(std::size_t majority, std::size_t minority, double h, std::size_t edges,
                                        std::uint64_t seed) {
        HichBaConfig c;
        const auto n = majority + minority;
        c.n = n;
        c.r = {static_cast<double>(majority) / static_cast<double>(n), static_cast<double>(minority) / static_cast<double>(n)};
        c.exact_sizes = {majority, minority};
        c.h = h;
        c.p_node = std::min(1.0, static_cast<double>(n) / static_cast<double>(std::max<std::size_t>(edges, 1)));
        c.seed = seed;
        return c;
    }
};

inline void validate(const HichBaConfig& config) {
    if (config.r.empty()) throw ConfigError("r must list at least one community");
    double sum = 0.0;
    for (double p : config.r) {
        if (!(p > 0.0)) throw ConfigError("r entries must be positive");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("r must sum to 1 (sums to " + std::to_string(sum) + ")");
    for (double p : {config.h, config.p_node, config.p_triad, config.p_pa}) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("probabilities must lie in [0, 1]");
    }
    if (!(config.p_node > 0.0)) throw ConfigError("p_node must be positive");
    if (config.n < config.r.size()) throw ConfigError("n is smaller than the number of communities");
    if (!config.exact_sizes.empty()) {
        if (config.exact_sizes.size() != config.r.size()) throw ConfigError("exact_sizes must match r in length");
        if (std::accumulate(config.exact_sizes.begin(), config.exact_sizes.end(), std::size_t{0}) != config.n) {
            throw ConfigError("exact_sizes must sum to n");
        }
        for (auto s : config.exact_sizes)
            if (s == 0) throw ConfigError("exact_sizes entries must be positive");
    }
}

/**
 * Event-driven homophilic network growth.
 *
 * One seed node per community, chained by single edges. Each event adds a
 * node with probability p_node, otherwise an edge:
 *
 * - node event: the community is drawn from r; the node links to one existing
 *   node of its own community with probability h, of another community
 *   otherwise.
 * - edge event: the source is uniform over existing nodes; the target lies in
 *   the source's community with probability h. With probability p_triad the
 *   target closes a triangle: it is the end of a sampled 2-path leaving the
 *   source (falling back to the whole community class when no sample
 *   qualifies).
 *
 * The target is degree-proportional within its candidate pool (a community
 * class, or the second step's neighborhood) with probability p_pa and uniform
 * otherwise. Rejected targets (self, existing
 * neighbor) are re-drawn a bounded number of times before the event is
 * dropped. Generation stops once n nodes exist.
 */
inline GeneratedNetwork generate_hichba(const HichBaConfig& config) {
    validate(config);
    Rng rng = make_rng(config.seed);
    const std::size_t communities = config.r.size();

    std::vector<double> cumulative(communities);
    std::partial_sum(config.r.begin(), config.r.end(), cumulative.begin());

    // Community of every node to be added after the seeds, for exact sizes.
    std::vector<CommunityId> bag;
    if (!config.exact_sizes.empty()) {
        for (std::size_t c = 0; c < communities; ++c) bag.insert(bag.end(), config.exact_sizes[c] - 1, static_cast<CommunityId>(c));
        shuffle(std::span<CommunityId>(bag), rng);
    }
    std::size_t bag_pos = 0;
    auto draw_community = [&]() -> CommunityId {
        if (!bag.empty()) return bag[bag_pos++];
        const double u = uniform_real(rng) * cumulative.back();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        return static_cast<CommunityId>(std::min<std::size_t>(it - cumulative.begin(), communities - 1));
    };

    detail::EdgeSet graph;
    std::vector<CommunityId> community;
    std::vector<std::vector<NodeId>> members(communities);
    std::vector<std::vector<NodeId>> endpoints_by_community(communities); // one entry per incident edge
    std::vector<NodeId> endpoints;                                        // all communities

    auto add_node = [&](CommunityId c) {
        const NodeId v = graph.add_node();
        community.push_back(c);
        members[c].push_back(v);
        return v;
    };
    auto add_edge = [&](NodeId u, NodeId v) {
        if (!graph.add(u, v)) return false;
        for (NodeId x : {u, v}) {
            endpoints.push_back(x);
            endpoints_by_community[community[x]].push_back(x);
        }
        return true;
    };

    // Uniform or degree-proportional draw from one community or from all
    // nodes outside it.
    auto draw_from_class = [&](CommunityId c, bool same, bool preferential) -> std::optional<NodeId> {
        if (same) {
            const auto& pool = preferential && !endpoints_by_community[c].empty() ? endpoints_by_community[c] : members[c];
            return pool[uniform_index(rng, pool.size())];
        }
        if (communities < 2) return std::nullopt;
        if (preferential && endpoints.size() > endpoints_by_community[c].size()) {
            for (int attempt = 0; attempt < 256; ++attempt) {
                const NodeId w = endpoints[uniform_index(rng, endpoints.size())];
                if (community[w] != c) return w;
            }
        }
        if (graph.node_count() == members[c].size()) return std::nullopt;
        for (;;) {
            const NodeId w = static_cast<NodeId>(uniform_index(rng, graph.node_count()));
            if (community[w] != c) return w;
        }
    };

    // One 2-path u - w - x: w uniform among u's neighbors, x among w's
    // neighbors (degree-proportional when preferential). nullopt when x is not
    // a usable target.
    auto draw_triadic = [&](NodeId u, bool same, bool preferential) -> std::optional<NodeId> {
        const auto& first = graph.neighbors(u);
        if (first.empty()) return std::nullopt;
        const auto& second = graph.neighbors(first[uniform_index(rng, first.size())]);
        NodeId x = second[uniform_index(rng, second.size())];
        if (preferential) {
            std::uint64_t total = 0;
            for (NodeId y : second) total += graph.degree(y);
            auto pick = uniform_index(rng, total);
            for (NodeId y : second) {
                if (pick < graph.degree(y)) {
                    x = y;
                    break;
                }
                pick -= graph.degree(y);
            }
        }
        if (x == u || (community[x] == community[u]) != same || graph.contains(u, x)) return std::nullopt;
        return x;
    };

    for (std::size_t c = 0; c < communities; ++c) add_node(static_cast<CommunityId>(c));
    for (NodeId c = 1; c < communities; ++c) add_edge(c - 1, c);

    constexpr int kAttempts = 16;
    while (graph.node_count() < config.n) {
        if (bernoulli(rng, config.p_node)) {
            const CommunityId c = draw_community();
            const bool same = communities < 2 || bernoulli(rng, config.h);
            const bool preferential = bernoulli(rng, config.p_pa);
            const NodeId target = *draw_from_class(c, same, preferential);
            add_edge(add_node(c), target);
            continue;
        }
        const NodeId u = static_cast<NodeId>(uniform_index(rng, graph.node_count()));
        const bool same = communities < 2 || bernoulli(rng, config.h);
        const bool triadic = bernoulli(rng, config.p_triad);
        const bool preferential = bernoulli(rng, config.p_pa);
        // Triadic events fall back to the community class once the 2-path
        // samples are exhausted.
        for (int attempt = 0; attempt < (triadic ? 2 : 1) * kAttempts; ++attempt) {
            std::optional<NodeId> target;
            if (triadic && attempt < kAttempts) {
                target = draw_triadic(u, same, preferential);
                if (!target) continue;
            } else {
                target = draw_from_class(community[u], same, preferential);
            }
            if (target && add_edge(u, *target)) break;
        }
    }

    const std::size_t n = graph.node_count();
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t v = 0; v < n; ++v) labels.push_back(std::to_string(v));
    return {Graph(n, graph.edges(), std::move(labels)), Partition(std::move(community), communities)};
}

/**
 * Re-runs the generator with p_node rescaled until the edge count is within
 * `tolerance` (relative) of `target_edges`, at most `rounds` times. Small
 * dense networks lose many early edge events to saturation, so the plain
 * n / target estimate undershoots.
 */
inline GeneratedNetwork generate_hichba_with_edges(HichBaConfig config, std::size_t target_edges,
                                                   double tolerance = 0.05, int rounds = 8) {
    if (target_edges == 0) throw ConfigError("target edge count must be positive");
    GeneratedNetwork best = generate_hichba(config);
    auto error_of = [&](const GeneratedNetwork& net) {
        return std::abs(static_cast<double>(net.graph.edge_count()) - static_cast<double>(target_edges)) /
               static_cast<double>(target_edges);
    };
    for (int round = 0; round < rounds && error_of(best) > tolerance; ++round) {
        const double ratio = static_cast<double>(best.graph.edge_count()) / static_cast<double>(target_edges);
        config.p_node = std::clamp(config.p_node * ratio, 1e-6, 1.0);
        auto next = generate_hichba(config);
        if (error_of(next) < error_of(best)) best = std::move(next);
    }
    return best;
}

} // namespace faircomm
