#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "faircomm/error.hpp"
#include "faircomm/graph.hpp"
#include "faircomm/random.hpp"

namespace faircomm {

inline std::size_t intersection_size(std::span<const NodeId> a, std::span<const NodeId> b) {
    std::size_t count = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++count;
            ++ia;
            ++ib;
        }
    }
    return count;
}

inline double jaccard(std::span<const NodeId> a, std::span<const NodeId> b) {
    if (a.empty() && b.empty()) throw InputError("jaccard similarity of two empty sets");
    const auto common = intersection_size(a, b);
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

struct MappedPair {
    std::size_t gt = 0;
    std::optional<std::size_t> pred; // nullopt: mapped to the empty set
    double jaccard = 0.0;
};

struct CommunityMapping {
    // Indexed by ground-truth community.
    std::vector<MappedPair> pairs;
    // Ground-truth indices in the order they were matched; NONE entries are
    // not part of it.
    std::vector<std::size_t> match_order;
    // Predicted communities left over once the ground truth was exhausted.
    std::vector<std::size_t> unmapped_predicted;

    std::optional<std::size_t> pred_of(std::size_t gt) const { return pairs.at(gt).pred; }
    std::size_t none_count() const {
        return static_cast<std::size_t>(
            std::count_if(pairs.begin(), pairs.end(), [](const MappedPair& p) { return !p.pred; }));
    }
};

namespace detail {

inline void check_same_nodes(const Partition& a, const Partition& b) {
    if (a.node_count() != b.node_count()) {
        throw InputError("partitions cover different node sets (" + std::to_string(a.node_count()) + " vs " +
                         std::to_string(b.node_count()) + " nodes)");
    }
}

// Jaccard value kept as an exact ratio so ties are detected without rounding.
struct OverlapPair {
    std::uint32_t gt;
    std::uint32_t pred;
    std::uint64_t common;
    std::uint64_t joint;

    // Larger similarity first, then lexicographic (gt, pred).
    friend bool operator<(const OverlapPair& l, const OverlapPair& r) {
        const auto lhs = l.common * r.joint;
        const auto rhs = r.common * l.joint;
        if (lhs != rhs) return lhs > rhs;
        if (l.gt != r.gt) return l.gt < r.gt;
        return l.pred < r.pred;
    }
    bool same_similarity(const OverlapPair& other) const { return common * other.joint == other.common * joint; }
    double similarity() const { return static_cast<double>(common) / static_cast<double>(joint); }
};

} // namespace detail

/**
 * Greedy Jaccard matching of ground-truth to predicted communities.
 *
 * Every round takes the pair of still-unmatched communities with the highest
 * Jaccard similarity and matches it. When several pairs share the maximum, one
 * is drawn uniformly from them, enumerated in (gt, pred) order, with the seeded
 * engine. Rounds continue until one side is exhausted, including rounds where
 * the best similarity is 0. Ground-truth communities left over map to NONE.
 *
 * Only overlapping pairs are materialized; the result equals the naive loop
 * that recomputes the full similarity matrix every round.
 */
inline CommunityMapping map_communities(const Partition& ground_truth, const Partition& predicted,
                                        std::uint64_t seed = 0) {
    detail::check_same_nodes(ground_truth, predicted);
    const std::size_t m = ground_truth.community_count();
    const std::size_t k = predicted.community_count();

    std::vector<detail::OverlapPair> overlaps;
    {
        std::unordered_map<std::uint64_t, std::uint64_t> counts;
        for (NodeId v = 0; v < ground_truth.node_count(); ++v) {
            const std::uint64_t key =
                (std::uint64_t{ground_truth.community_of(v)} << 32) | predicted.community_of(v);
            ++counts[key];
        }
        overlaps.reserve(counts.size());
        for (auto [key, common] : counts) {
            const auto gt = static_cast<std::uint32_t>(key >> 32);
            const auto pred = static_cast<std::uint32_t>(key & 0xffffffffu);
            const std::uint64_t joint = ground_truth.community(gt).size() + predicted.community(pred).size() - common;
            overlaps.push_back({gt, pred, common, joint});
        }
        std::sort(overlaps.begin(), overlaps.end());
    }

    Rng rng = make_rng(seed);
    std::vector<bool> gt_used(m, false);
    std::vector<bool> pred_used(k, false);
    CommunityMapping mapping;
    mapping.pairs.resize(m);
    for (std::size_t i = 0; i < m; ++i) mapping.pairs[i].gt = i;

    auto match = [&](std::size_t gt, std::size_t pred, double similarity) {
        gt_used[gt] = true;
        pred_used[pred] = true;
        mapping.pairs[gt].pred = pred;
        mapping.pairs[gt].jaccard = similarity;
        mapping.match_order.push_back(gt);
    };

    std::size_t rounds = std::min(m, k);
    std::size_t front = 0;
    std::vector<std::size_t> ties;
    while (rounds > 0) {
        while (front < overlaps.size() && (gt_used[overlaps[front].gt] || pred_used[overlaps[front].pred])) ++front;
        if (front == overlaps.size()) break;
        ties.clear();
        for (std::size_t i = front; i < overlaps.size() && overlaps[i].same_similarity(overlaps[front]); ++i) {
            if (!gt_used[overlaps[i].gt] && !pred_used[overlaps[i].pred]) ties.push_back(i);
        }
        const auto& chosen = overlaps[ties[ties.size() == 1 ? 0 : uniform_index(rng, ties.size())]];
        match(chosen.gt, chosen.pred, chosen.similarity());
        --rounds;
    }

    // Remaining pairs are all disjoint and tie at similarity 0.
    while (rounds > 0) {
        std::vector<std::size_t> free_gt, free_pred;
        for (std::size_t i = 0; i < m; ++i)
            if (!gt_used[i]) free_gt.push_back(i);
        for (std::size_t j = 0; j < k; ++j)
            if (!pred_used[j]) free_pred.push_back(j);
        const auto total = free_gt.size() * free_pred.size();
        const auto pick = total == 1 ? 0 : uniform_index(rng, total);
        match(free_gt[pick / free_pred.size()], free_pred[pick % free_pred.size()], 0.0);
        --rounds;
    }

    for (std::size_t j = 0; j < k; ++j)
        if (!pred_used[j]) mapping.unmapped_predicted.push_back(j);
    return mapping;
}

} // namespace faircomm
