#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "faircomm/error.hpp"
#include "faircomm/fairness.hpp"
#include "faircomm/graph.hpp"
#include "faircomm/random.hpp"
#include "faircomm/report_io.hpp"

namespace faircomm {

inline constexpr std::size_t kSweepRepetitions = 20;

// Mean, min and max of a score over the sweep repetitions.
struct Band {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;

    static Band of(const std::vector<double>& values) {
        Band b;
        if (values.empty()) return b;
        b.min = *std::min_element(values.begin(), values.end());
        b.max = *std::max_element(values.begin(), values.end());
        double sum = 0.0;
        for (double v : values) sum += v;
        b.mean = sum / static_cast<double>(values.size());
        return b;
    }
};

struct RemovalStep {
    std::size_t removed = 0;
    double fccn = 0.0;
    double f1 = 0.0;
    Band fcce;
};

struct SweepOptions {
    std::size_t repetitions = kSweepRepetitions;
    std::size_t stride = 1; // report every stride-th step (the last step is always reported)
    std::uint64_t seed = 0;
};

/**
 * Removes k = 0..|community| nodes from a correctly predicted community.
 *
 * FCCN and F1 depend only on k and are exact. FCCE depends on which nodes go;
 * each repetition removes nodes in its own random order and the band spans
 * the repetitions.
 */
inline std::vector<RemovalStep> sweep_removal(const Graph& graph, const NodeSet& community,
                                              const SweepOptions& options = {}) {
    detail::check_members(graph, community);
    if (community.empty()) throw InputError("removal sweep on an empty community");
    if (options.repetitions == 0 || options.stride == 0) throw ConfigError("repetitions and stride must be positive");
    const std::size_t size = community.size();
    const auto internal = internal_edge_count(graph, community);

    // surviving[rep][k]: internal edges left after removing k nodes.
    std::vector<std::vector<std::size_t>> surviving(options.repetitions, std::vector<std::size_t>(size + 1));
    Rng rng = make_rng(options.seed);
    std::vector<char> present(graph.node_count(), 0);
    for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
        NodeSet order = community;
        shuffle(std::span<NodeId>(order), rng);
        for (NodeId v : community) present[v] = 1;
        std::size_t left = internal;
        surviving[rep][0] = left;
        for (std::size_t k = 0; k < size; ++k) {
            const NodeId v = order[k];
            present[v] = 0;
            for (NodeId w : graph.neighbors(v)) left -= static_cast<std::size_t>(present[w]);
            surviving[rep][k + 1] = left;
        }
    }

    std::vector<RemovalStep> steps;
    for (std::size_t k = 0; k <= size; ++k) {
        if (k % options.stride != 0 && k != size) continue;
        RemovalStep step;
        step.removed = k;
        const double kept = static_cast<double>(size - k);
        step.fccn = kept / static_cast<double>(size);
        step.f1 = 2.0 * kept / static_cast<double>(2 * size - k);
        if (internal > 0) {
            std::vector<double> values;
            for (const auto& rep : surviving) values.push_back(static_cast<double>(rep[k]) / static_cast<double>(internal));
            step.fcce = Band::of(values);
        }
        steps.push_back(step);
    }
    return steps;
}

struct SwapCommunityScores {
    double fccn = 0.0;
    double f1 = 0.0;
    Band fcce;
};

struct SwapStep {
    std::size_t swapped = 0;
    double fraction = 0.0; // swapped / minority size
    // True when the majority ground truth maps to the minority-labeled
    // prediction.
    bool crossed = false;
    SwapCommunityScores majority;
    SwapCommunityScores minority;
    // Phi against community size for fccn, f1, fcce.
    std::array<Band, 3> phi_size;
};

struct SwapTrace {
    std::vector<SwapStep> steps;
    // First swap count at which the mapping is crossed, if any.
    std::optional<std::size_t> flip_at;
    std::size_t flips = 0; // number of identity/crossed transitions
};

/**
 * Swaps k = 0..|minority| nodes between a two-community ground truth and
 * re-evaluates the fairness report at every step. Each repetition draws its
 * own swap order; the swapped sets are nested in k within a repetition.
 */
inline SwapTrace sweep_swap(const Graph& graph, const Partition& ground_truth, const SweepOptions& options = {}) {
    if (ground_truth.community_count() != 2) throw InputError("swap sweep needs exactly two ground-truth communities");
    if (options.repetitions == 0 || options.stride == 0) throw ConfigError("repetitions and stride must be positive");
    const std::size_t major_id = ground_truth.community(0).size() >= ground_truth.community(1).size() ? 0 : 1;
    const std::size_t minor_id = 1 - major_id;
    const NodeSet& major = ground_truth.community(major_id);
    const NodeSet& minor = ground_truth.community(minor_id);
    const std::size_t limit = minor.size();

    Rng rng = make_rng(options.seed);
    std::vector<NodeSet> major_orders, minor_orders;
    for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
        major_orders.push_back(major);
        minor_orders.push_back(minor);
        shuffle(std::span<NodeId>(major_orders.back()), rng);
        shuffle(std::span<NodeId>(minor_orders.back()), rng);
    }

    SwapTrace trace;
    std::optional<bool> previous;
    for (std::size_t k = 0; k <= limit; ++k) {
        if (k % options.stride != 0 && k != limit) continue;
        SwapStep step;
        step.swapped = k;
        step.fraction = static_cast<double>(k) / static_cast<double>(limit);
        std::array<std::vector<double>, 3> phis;
        std::vector<double> major_fcce, minor_fcce;
        for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
            // Predicted community 0 carries the majority label, 1 the minority.
            std::vector<CommunityId> labels(ground_truth.node_count());
            for (NodeId v : major) labels[v] = 0;
            for (NodeId v : minor) labels[v] = 1;
            for (std::size_t s = 0; s < k; ++s) {
                labels[major_orders[rep][s]] = 1;
                labels[minor_orders[rep][s]] = 0;
            }
            const Partition predicted(std::move(labels), 2);
            const auto report = fairness_report(graph, ground_truth, predicted, options.seed + rep);

            const auto& major_row = report.communities[major_id];
            const auto& minor_row = report.communities[minor_id];
            const bool crossed = major_row.pred_index && *major_row.pred_index == 1;
            if (rep == 0) step.crossed = crossed;
            step.majority.fccn = major_row.fccn;
            step.majority.f1 = major_row.f1;
            step.minority.fccn = minor_row.fccn;
            step.minority.f1 = minor_row.f1;
            if (major_row.fcce) major_fcce.push_back(*major_row.fcce);
            if (minor_row.fcce) minor_fcce.push_back(*minor_row.fcce);
            for (ScoreMetric metric : kScoreMetrics) {
                const auto& cell = report.cell(metric, Property::size);
                if (cell.status == CellStatus::ok) phis[static_cast<std::size_t>(metric)].push_back(cell.phi);
            }
        }
        step.majority.fcce = Band::of(major_fcce);
        step.minority.fcce = Band::of(minor_fcce);
        for (std::size_t m = 0; m < 3; ++m) step.phi_size[m] = Band::of(phis[m]);

        if (previous && *previous != step.crossed) ++trace.flips;
        if (step.crossed && !trace.flip_at) trace.flip_at = k;
        previous = step.crossed;
        trace.steps.push_back(step);
    }
    return trace;
}

inline void write_removal_csv(std::ostream& out, const std::vector<RemovalStep>& steps) {
    out << "removed,fccn,f1,fcce_mean,fcce_min,fcce_max\n";
    for (const auto& s : steps) {
        out << s.removed << ',' << format_double(s.fccn) << ',' << format_double(s.f1) << ','
            << format_double(s.fcce.mean) << ',' << format_double(s.fcce.min) << ',' << format_double(s.fcce.max)
            << '\n';
    }
}

inline void write_swap_csv(std::ostream& out, const SwapTrace& trace) {
    out << "swapped,fraction,crossed";
    for (const char* who : {"majority", "minority"}) {
        out << ',' << who << "_fccn," << who << "_f1," << who << "_fcce_mean," << who << "_fcce_min," << who
            << "_fcce_max";
    }
    for (ScoreMetric m : kScoreMetrics) {
        const auto col = phi_column(m, Property::size);
        out << ',' << col << "_mean," << col << "_min," << col << "_max";
    }
    out << '\n';
    auto band = [&](const Band& b) {
        out << ',' << format_double(b.mean) << ',' << format_double(b.min) << ',' << format_double(b.max);
    };
    for (const auto& s : trace.steps) {
        out << s.swapped << ',' << format_double(s.fraction) << ',' << (s.crossed ? 1 : 0);
        for (const auto* c : {&s.majority, &s.minority}) {
            out << ',' << format_double(c->fccn) << ',' << format_double(c->f1);
            band(c->fcce);
        }
        for (const auto& b : s.phi_size) band(b);
        out << '\n';
    }
}

} // namespace faircomm

