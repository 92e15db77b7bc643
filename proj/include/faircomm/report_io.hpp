#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "faircomm/fairness.hpp"
#include "faircomm/mapping.hpp"
#include "faircomm/validation.hpp"

namespace faircomm {

// Shortest representation that round-trips, independent of locale.
inline std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (value == 0.0) return "0"; // also folds -0
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), end);
}

inline std::string phi_column(ScoreMetric metric, Property property) {
    return "phi_" + std::string(to_string(metric)) + "_" + std::string(to_string(property));
}

inline std::string status_column(ScoreMetric metric, Property property) {
    return "status_" + std::string(to_string(metric)) + "_" + std::string(to_string(property));
}

// Phi cells in column order: grouped by property, then fccn, f1, fcce.
inline std::vector<std::pair<ScoreMetric, Property>> phi_cells() {
    std::vector<std::pair<ScoreMetric, Property>> cells;
    for (Property p : kProperties)
        for (ScoreMetric m : kScoreMetrics) cells.emplace_back(m, p);
    return cells;
}

inline constexpr int kCsvSchemaVersion = 1;

/// One evaluated (network, method, seed) triple.
struct ResultRow {
    std::string network;
    std::string method;
    std::uint64_t seed = 0;
    std::size_t n_gt_communities = 0;
    std::size_t n_pred_communities = 0;
    ValidationScores scores;
    std::array<std::array<PhiCell, 3>, 3> cells{};
    std::string error; // non-empty: the evaluation failed and metrics are absent

    const PhiCell& cell(ScoreMetric metric, Property property) const {
        return cells[static_cast<std::size_t>(metric)][static_cast<std::size_t>(property)];
    }
    bool failed() const { return !error.empty(); }
    bool all_ok() const {
        if (failed()) return false;
        for (const auto& row : cells)
            for (const auto& c : row)
                if (c.status != CellStatus::ok) return false;
        return true;
    }
};

namespace detail {

inline std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace detail

inline std::vector<std::string> result_columns() {
    std::vector<std::string> cols{"network", "method", "seed", "n_gt_communities", "n_pred_communities",
                                  "nmi",     "rmi",    "rmi_path", "ari",        "pf1",
                                  "nf1"};
    for (auto [m, p] : phi_cells()) cols.push_back(phi_column(m, p));
    for (auto [m, p] : phi_cells()) cols.push_back(status_column(m, p));
    cols.push_back("error");
    return cols;
}

inline void write_csv_header(std::ostream& out, const std::vector<std::string>& columns) {
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
}

inline void write_csv_row(std::ostream& out, const ResultRow& row) {
    std::vector<std::string> fields{detail::csv_field(row.network), detail::csv_field(row.method),
                                    std::to_string(row.seed)};
    if (row.failed()) {
        fields.resize(result_columns().size() - 1);
        fields.push_back(detail::csv_field(row.error));
    } else {
        fields.push_back(std::to_string(row.n_gt_communities));
        fields.push_back(std::to_string(row.n_pred_communities));
        fields.push_back(format_double(row.scores.nmi));
        fields.push_back(format_double(row.scores.rmi));
        fields.push_back(std::string(to_string(row.scores.rmi_path)));
        fields.push_back(format_double(row.scores.ari));
        fields.push_back(format_double(row.scores.pf1));
        fields.push_back(format_double(row.scores.nf1));
        for (auto [m, p] : phi_cells()) {
            const auto& c = row.cell(m, p);
            fields.push_back(c.status == CellStatus::ok ? format_double(c.phi) : "");
        }
        for (auto [m, p] : phi_cells()) fields.push_back(std::string(to_string(row.cell(m, p).status)));
        fields.push_back("");
    }
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
    out << '\n';
}

inline nlohmann::ordered_json to_json(const CommunityMapping& mapping) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& pair : mapping.pairs) {
        nlohmann::ordered_json entry;
        entry["gt_index"] = pair.gt;
        entry["pred_index"] = pair.pred ? nlohmann::ordered_json(*pair.pred) : nlohmann::ordered_json(nullptr);
        entry["jaccard"] = pair.jaccard;
        out.push_back(std::move(entry));
    }
    return out;
}

inline nlohmann::ordered_json to_json(const FairnessReport& report) {
    nlohmann::ordered_json out;
    auto optional_value = [](const std::optional<double>& v) {
        return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    auto cells = nlohmann::ordered_json::object();
    for (auto [m, p] : phi_cells()) {
        const auto& c = report.cell(m, p);
        nlohmann::ordered_json cell;
        cell["status"] = std::string(to_string(c.status));
        cell["slope"] = c.status == CellStatus::ok ? nlohmann::ordered_json(c.slope) : nlohmann::ordered_json(nullptr);
        cell["phi"] = c.status == CellStatus::ok ? nlohmann::ordered_json(c.phi) : nlohmann::ordered_json(nullptr);
        cell["points"] = c.points;
        cells[phi_column(m, p)] = std::move(cell);
    }
    out["phi"] = std::move(cells);
    auto communities = nlohmann::ordered_json::array();
    for (const auto& row : report.communities) {
        nlohmann::ordered_json c;
        c["gt_index"] = row.gt_index;
        c["pred_index"] = row.pred_index ? nlohmann::ordered_json(*row.pred_index) : nlohmann::ordered_json(nullptr);
        c["jaccard"] = row.jaccard;
        c["size"] = row.size;
        c["density"] = row.density;
        c["conductance"] = optional_value(row.conductance);
        c["size_norm"] = optional_value(row.size_norm);
        c["density_norm"] = optional_value(row.density_norm);
        c["conductance_norm"] = optional_value(row.conductance_norm);
        c["fccn"] = row.fccn;
        c["f1"] = row.f1;
        c["fcce"] = optional_value(row.fcce);
        communities.push_back(std::move(c));
    }
    out["communities"] = std::move(communities);
    out["mapping"] = to_json(report.mapping);
    out["unmapped_predicted"] = report.mapping.unmapped_predicted;
    return out;
}

inline nlohmann::ordered_json to_json(const ResultRow& row) {
    nlohmann::ordered_json out;
    out["network"] = row.network;
    out["method"] = row.method;
    out["seed"] = row.seed;
    if (row.failed()) {
        out["error"] = row.error;
        return out;
    }
    out["n_gt_communities"] = row.n_gt_communities;
    out["n_pred_communities"] = row.n_pred_communities;
    out["nmi"] = row.scores.nmi;
    out["rmi"] = row.scores.rmi;
    out["rmi_path"] = std::string(to_string(row.scores.rmi_path));
    out["ari"] = row.scores.ari;
    out["pf1"] = row.scores.pf1;
    out["nf1"] = row.scores.nf1;
    for (auto [m, p] : phi_cells()) {
        const auto& c = row.cell(m, p);
        out[phi_column(m, p)] = c.status == CellStatus::ok ? nlohmann::ordered_json(c.phi) : nlohmann::ordered_json(nullptr);
    }
    for (auto [m, p] : phi_cells()) out[status_column(m, p)] = std::string(to_string(row.cell(m, p).status));
    return out;
}

} // namespace faircomm
