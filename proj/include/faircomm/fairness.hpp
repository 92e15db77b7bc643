#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>
#include <numbers>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "faircomm/error.hpp"
#include "faircomm/graph.hpp"
#include "faircomm/mapping.hpp"
#include "faircomm/properties.hpp"

namespace faircomm {

// Fraction of the ground-truth community's nodes found in the prediction.
// An absent prediction (NONE) scores 0.
inline double fccn(std::span<const NodeId> gt, std::optional<std::span<const NodeId>> pred) {
    if (gt.empty()) throw InputError("fccn of an empty ground-truth community");
    if (!pred) return 0.0;
    return static_cast<double>(intersection_size(gt, *pred)) / static_cast<double>(gt.size());
}

inline double f1(std::span<const NodeId> gt, std::optional<std::span<const NodeId>> pred) {
    if (gt.empty()) throw InputError("f1 of an empty ground-truth community");
    if (!pred) return 0.0;
    return 2.0 * static_cast<double>(intersection_size(gt, *pred)) / static_cast<double>(gt.size() + pred->size());
}

// Fraction of the ground-truth community's internal edges that are also
// internal to the prediction. nullopt when the community has no internal
// edge (excluded from scoring).
inline std::optional<double> fcce(const Graph& graph, std::span<const NodeId> gt,
                                  std::optional<std::span<const NodeId>> pred) {
    const auto internal = internal_edge_count(graph, gt);
    if (pred) detail::check_members(graph, *pred);
    if (internal == 0) return std::nullopt;
    if (!pred) return 0.0;

    // An edge internal to both sets has both endpoints in their intersection.
    NodeSet common;
    std::set_intersection(gt.begin(), gt.end(), pred->begin(), pred->end(), std::back_inserter(common));
    return static_cast<double>(internal_edge_count(graph, common)) / static_cast<double>(internal);
}

enum class CellStatus { ok, no_variation, insufficient_data };

inline std::string_view to_string(CellStatus status) {
    switch (status) {
    case CellStatus::ok: return "ok";
    case CellStatus::no_variation: return "no-variation";
    case CellStatus::insufficient_data: return "insufficient-data";
    }
    return "?";
}

struct SlopeFit {
    CellStatus status = CellStatus::insufficient_data;
    double slope = 0.0;
};

// Ordinary least-squares slope of y on x, closed form, two passes.
inline SlopeFit fit_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InputError("fit_slope: x and y differ in length");
    if (x.size() < 2) return {CellStatus::insufficient_data, 0.0};
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) return {CellStatus::no_variation, 0.0};
    return {CellStatus::ok, sxy / sxx};
}

// Maps a regression slope on min-max scaled x (run = 1) to (-1, 1).
inline double phi(double slope) {
    return 2.0 / std::numbers::pi * std::atan(slope);
}

enum class ScoreMetric { fccn, f1, fcce };
enum class Property { size, density, conductance };

inline constexpr std::array<ScoreMetric, 3> kScoreMetrics{ScoreMetric::fccn, ScoreMetric::f1, ScoreMetric::fcce};
inline constexpr std::array<Property, 3> kProperties{Property::size, Property::density, Property::conductance};

inline std::string_view to_string(ScoreMetric metric) {
    switch (metric) {
    case ScoreMetric::fccn: return "fccn";
    case ScoreMetric::f1: return "f1";
    case ScoreMetric::fcce: return "fcce";
    }
    return "?";
}

inline std::string_view to_string(Property property) {
    switch (property) {
    case Property::size: return "size";
    case Property::density: return "density";
    case Property::conductance: return "conductance";
    }
    return "?";
}

struct CommunityScores {
    std::size_t gt_index = 0;
    std::optional<std::size_t> pred_index;
    double jaccard = 0.0;

    double size = 0.0;
    double density = 0.0;
    std::optional<double> conductance; // nullopt: zero volume
    std::optional<double> size_norm;
    std::optional<double> density_norm;
    std::optional<double> conductance_norm;

    double fccn = 0.0;
    double f1 = 0.0;
    std::optional<double> fcce; // nullopt: no internal edge

    double score(ScoreMetric metric) const {
        switch (metric) {
        case ScoreMetric::fccn: return fccn;
        case ScoreMetric::f1: return f1;
        case ScoreMetric::fcce: return *fcce;
        }
        return 0.0;
    }
    bool has_score(ScoreMetric metric) const { return metric != ScoreMetric::fcce || fcce.has_value(); }
    std::optional<double> raw(Property property) const {
        switch (property) {
        case Property::size: return size;
        case Property::density: return density;
        case Property::conductance: return conductance;
        }
        return std::nullopt;
    }
    std::optional<double> normalized(Property property) const {
        switch (property) {
        case Property::size: return size_norm;
        case Property::density: return density_norm;
        case Property::conductance: return conductance_norm;
        }
        return std::nullopt;
    }
};

struct PhiCell {
    CellStatus status = CellStatus::insufficient_data;
    double slope = 0.0;
    double phi = 0.0;
    std::size_t points = 0;
};

struct FairnessOptions {
    // Whether ground-truth communities mapped to NONE enter the regressions
    // (with score 0).
    bool include_unmapped = true;
};

struct FairnessReport {
    CommunityMapping mapping;
    std::vector<CommunityScores> communities;
    // cells[metric][property]
    std::array<std::array<PhiCell, 3>, 3> cells{};

    const PhiCell& cell(ScoreMetric metric, Property property) const {
        return cells[static_cast<std::size_t>(metric)][static_cast<std::size_t>(property)];
    }
    bool all_ok() const {
        for (const auto& row : cells)
            for (const auto& c : row)
                if (c.status != CellStatus::ok) return false;
        return true;
    }
};

/**
 * Scores every ground-truth community against its mapped prediction and fits
 * one regression per (score, property) pair.
 *
 * Properties are min-max scaled over the ground-truth communities for which
 * they are defined. A property with no variation marks its three cells
 * no-variation; fewer than two usable points marks a cell insufficient-data.
 * Communities without internal edges are dropped from the FCCE regressions
 * only.
 */
inline FairnessReport fairness_report(const Graph& graph, const Partition& ground_truth, const Partition& predicted,
                                      std::uint64_t seed = 0, const FairnessOptions& options = {}) {
    if (ground_truth.node_count() != graph.node_count()) {
        throw InputError("ground truth covers " + std::to_string(ground_truth.node_count()) +
                         " nodes, graph has " + std::to_string(graph.node_count()));
    }
    FairnessReport report;
    report.mapping = map_communities(ground_truth, predicted, seed);

    const std::size_t m = ground_truth.community_count();
    const auto props = community_properties(graph, ground_truth);
    report.communities.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        auto& row = report.communities[i];
        const NodeSet& gt = ground_truth.community(i);
        const auto& pair = report.mapping.pairs[i];
        row.gt_index = i;
        row.pred_index = pair.pred;
        row.jaccard = pair.jaccard;
        row.size = props.size[i];
        row.density = props.density[i];
        row.conductance = props.conductance[i];

        std::optional<std::span<const NodeId>> pred;
        if (pair.pred) pred = std::span<const NodeId>(predicted.community(*pair.pred));
        row.fccn = fccn(gt, pred);
        row.f1 = f1(gt, pred);
        row.fcce = fcce(graph, gt, pred);
    }

    for (Property property : kProperties) {
        std::vector<std::size_t> defined;
        std::vector<double> raw;
        for (std::size_t i = 0; i < m; ++i) {
            if (auto value = report.communities[i].raw(property)) {
                defined.push_back(i);
                raw.push_back(*value);
            }
        }
        std::optional<std::vector<double>> scaled;
        if (!raw.empty()) scaled = normalize_property(raw);
        if (scaled) {
            for (std::size_t d = 0; d < defined.size(); ++d) {
                auto& row = report.communities[defined[d]];
                const double value = (*scaled)[d];
                switch (property) {
                case Property::size: row.size_norm = value; break;
                case Property::density: row.density_norm = value; break;
                case Property::conductance: row.conductance_norm = value; break;
                }
            }
        }

        for (ScoreMetric metric : kScoreMetrics) {
            std::vector<double> xs, ys;
            for (std::size_t i : defined) {
                const auto& row = report.communities[i];
                if (!row.has_score(metric)) continue;
                if (!row.pred_index && !options.include_unmapped) continue;
                xs.push_back(scaled ? *row.normalized(property) : 0.0);
                ys.push_back(row.score(metric));
            }
            PhiCell& cell = report.cells[static_cast<std::size_t>(metric)][static_cast<std::size_t>(property)];
            cell.points = xs.size();
            if (xs.size() < 2) {
                cell.status = CellStatus::insufficient_data;
                continue;
            }
            if (!scaled) {
                cell.status = CellStatus::no_variation;
                continue;
            }
            const auto fit = fit_slope(xs, ys);
            cell.status = fit.status;
            cell.slope = fit.slope;
            cell.phi = fit.status == CellStatus::ok ? phi(fit.slope) : 0.0;
        }
    }
    return report;
}

} // namespace faircomm
