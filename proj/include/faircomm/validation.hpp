#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "faircomm/error.hpp"
#include "faircomm/graph.hpp"

namespace faircomm {

/**
 * Sparse contingency table between a ground-truth partition (rows) and a
 * predicted partition (columns). Only non-zero cells are stored, sorted by
 * (row, col).
 */
struct ContingencyTable {
    struct Cell {
        std::uint32_t row;
        std::uint32_t col;
        std::uint64_t count;
    };

    std::vector<std::uint64_t> row_sums;
    std::vector<std::uint64_t> col_sums;
    std::vector<Cell> cells;
    std::uint64_t n = 0;

    static ContingencyTable build(const Partition& rows, const Partition& cols) {
        if (rows.node_count() != cols.node_count()) {
            throw InputError("partitions cover different node sets (" + std::to_string(rows.node_count()) + " vs " +
                             std::to_string(cols.node_count()) + " nodes)");
        }
        ContingencyTable ct;
        ct.n = rows.node_count();
        ct.row_sums.assign(rows.community_count(), 0);
        ct.col_sums.assign(cols.community_count(), 0);
        std::unordered_map<std::uint64_t, std::uint64_t> counts;
        for (NodeId v = 0; v < rows.node_count(); ++v) {
            const auto r = rows.community_of(v);
            const auto c = cols.community_of(v);
            ++ct.row_sums[r];
            ++ct.col_sums[c];
            ++counts[(std::uint64_t{r} << 32) | c];
        }
        ct.cells.reserve(counts.size());
        for (auto [key, count] : counts) {
            ct.cells.push_back({static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key), count});
        }
        std::sort(ct.cells.begin(), ct.cells.end(),
                  [](const Cell& l, const Cell& r) { return l.row != r.row ? l.row < r.row : l.col < r.col; });
        return ct;
    }

    ContingencyTable transposed() const {
        ContingencyTable t;
        t.n = n;
        t.row_sums = col_sums;
        t.col_sums = row_sums;
        t.cells.reserve(cells.size());
        for (const Cell& c : cells) t.cells.push_back({c.col, c.row, c.count});
        std::sort(t.cells.begin(), t.cells.end(),
                  [](const Cell& l, const Cell& r) { return l.row != r.row ? l.row < r.row : l.col < r.col; });
        return t;
    }

    // True when both partitions are equal up to relabeling.
    bool identical() const {
        if (row_sums.size() != col_sums.size() || cells.size() != row_sums.size()) return false;
        return std::all_of(cells.begin(), cells.end(), [&](const Cell& c) {
            return c.count == row_sums[c.row] && c.count == col_sums[c.col];
        });
    }
};

namespace detail {

// Sum of p log(1/p) over the given sizes, p = size / n.
inline double entropy_of(const std::vector<std::uint64_t>& sizes, std::uint64_t n) {
    const double total = static_cast<double>(n);
    double h = 0.0;
    for (auto s : sizes) {
        if (s == 0) continue;
        const double size = static_cast<double>(s);
        h += size / total * std::log(total / size);
    }
    return h;
}

inline double pairs(std::uint64_t k) {
    return 0.5 * static_cast<double>(k) * static_cast<double>(k > 0 ? k - 1 : 0);
}

} // namespace detail

inline double entropy_rows(const ContingencyTable& ct) { return detail::entropy_of(ct.row_sums, ct.n); }
inline double entropy_cols(const ContingencyTable& ct) { return detail::entropy_of(ct.col_sums, ct.n); }

// In nats.
inline double mutual_information(const ContingencyTable& ct) {
    const double n = static_cast<double>(ct.n);
    double mi = 0.0;
    for (const auto& cell : ct.cells) {
        const double nij = static_cast<double>(cell.count);
        const double ab = static_cast<double>(ct.row_sums[cell.row]) * static_cast<double>(ct.col_sums[cell.col]);
        mi += nij / n * std::log(n * nij / ab);
    }
    return std::max(mi, 0.0);
}

namespace detail {

inline double log_factorial(std::uint64_t k) { return std::lgamma(static_cast<double>(k) + 1.0); }

// log(n! / prod s_i!) with n = sum s_i.
inline double log_multinomial(const std::vector<std::uint64_t>& sizes) {
    std::uint64_t n = 0;
    double total = 0.0;
    for (auto s : sizes) {
        n += s;
        total -= log_factorial(s);
    }
    return total + log_factorial(n);
}

} // namespace detail

// Exact counting form (1/n) log[n! prod c_ij! / (prod a_i! prod b_j!)]. It
// tends to the Shannon value for large n and equals log(Omega)/n when one side
// is all singletons.
inline double mutual_information_counting(const ContingencyTable& ct) {
    double total = detail::log_multinomial(ct.row_sums);
    for (const auto& cell : ct.cells) total += detail::log_factorial(cell.count);
    for (auto b : ct.col_sums) total -= detail::log_factorial(b);
    return total / static_cast<double>(ct.n);
}

inline double nmi(const ContingencyTable& ct) {
    if (ct.identical()) return 1.0;
    const double hc = entropy_rows(ct);
    const double hp = entropy_cols(ct);
    if (hc == 0.0 && hp == 0.0) return 1.0;
    if (hc == 0.0 || hp == 0.0) return 0.0;
    return std::clamp(mutual_information(ct) / std::sqrt(hc * hp), 0.0, 1.0);
}

inline double nmi(const Partition& gt, const Partition& pred) { return nmi(ContingencyTable::build(gt, pred)); }

// ---------------------------------------------------------------------------
// Number of non-negative integer matrices with given margins.

/**
 * Exact log of the number of contingency tables with row sums `rows` and
 * column sums `cols`.
 *
 * Rows are filled one at a time; the state is the multiset of remaining column
 * capacities. Columns with equal remaining capacity are interchangeable, so a
 * row is distributed over groups of equal capacities and each choice is
 * weighted by the multinomial count of column assignments. Counts are exact in
 * 128-bit integers, which bounds n to about 33 (the count never exceeds n!).
 */
class TableCounter {
public:
    using Count = unsigned __int128;

    static constexpr std::uint64_t kMaxTotal = 33;

    TableCounter(std::vector<std::uint64_t> rows, std::vector<std::uint64_t> cols) : rows_(std::move(rows)) {
        std::uint64_t rs = 0, cs = 0;
        for (auto r : rows_) rs += r;
        for (auto c : cols) cs += c;
        if (rs != cs) throw InputError("row and column sums differ");
        if (rs > kMaxTotal) throw InputError("exact table count limited to n <= " + std::to_string(kMaxTotal));
        std::erase(rows_, 0);
        std::sort(rows_.begin(), rows_.end(), std::greater<>());
        caps0_.assign(cols.begin(), cols.end());
        std::erase(caps0_, 0u);
        std::sort(caps0_.begin(), caps0_.end());
        for (std::size_t i = 0; i <= kMaxTotal; ++i) {
            binom_[i][0] = 1;
            for (std::size_t j = 1; j <= i; ++j) binom_[i][j] = binom_[i - 1][j - 1] + (j < i ? binom_[i - 1][j] : 0);
        }
    }

    Count count() {
        if (rows_.empty()) return 1;
        return count_from(0, caps0_);
    }

    double log_count() { return log_of(count()); }

    static double log_of(Count c) {
        // Split into two 64-bit halves to keep full double precision.
        const auto hi = static_cast<std::uint64_t>(c >> 64);
        const auto lo = static_cast<std::uint64_t>(c);
        return std::log(std::ldexp(static_cast<double>(hi), 64) + static_cast<double>(lo));
    }

private:
    using Caps = std::vector<std::uint32_t>;

    struct Group {
        std::uint32_t value;
        std::uint32_t mult;
    };

    Count count_from(std::size_t row, const Caps& caps) {
        if (row + 1 == rows_.size()) return 1;
        auto key = std::make_pair(row, caps);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;

        std::vector<Group> groups;
        for (auto c : caps) {
            if (!groups.empty() && groups.back().value == c) {
                ++groups.back().mult;
            } else {
                groups.push_back({c, 1});
            }
        }
        std::vector<std::uint64_t> capacity_after(groups.size() + 1, 0);
        for (std::size_t g = groups.size(); g-- > 0;) {
            capacity_after[g] = capacity_after[g + 1] + std::uint64_t{groups[g].value} * groups[g].mult;
        }

        Count total = 0;
        Caps next;
        next.reserve(caps.size());
        // Distributes `remaining` units over groups g.., `left` columns of
        // group g still unassigned, `take` the amount given to each of them.
        auto distribute = [&](auto&& self, std::size_t g, std::uint32_t take, std::uint32_t left,
                              std::uint64_t remaining, Count weight) -> void {
            if (g == groups.size()) {
                if (remaining == 0) {
                    Caps sorted = next;
                    std::erase(sorted, 0u);
                    std::sort(sorted.begin(), sorted.end());
                    total += weight * count_from(row + 1, sorted);
                }
                return;
            }
            const auto value = groups[g].value;
            if (left == 0) {
                if (remaining <= capacity_after[g + 1]) {
                    const auto mult = g + 1 < groups.size() ? groups[g + 1].mult : 0;
                    self(self, g + 1, 0, mult, remaining, weight);
                }
                return;
            }
            if (take == value) {
                const std::uint64_t used = std::uint64_t{take} * left;
                if (used > remaining) return;
                for (std::uint32_t i = 0; i < left; ++i) next.push_back(0);
                self(self, g, take, 0, remaining - used, weight);
                next.resize(next.size() - left);
                return;
            }
            for (std::uint32_t k = 0; k <= left; ++k) {
                const std::uint64_t used = std::uint64_t{take} * k;
                if (used > remaining) break;
                for (std::uint32_t i = 0; i < k; ++i) next.push_back(value - take);
                self(self, g, take + 1, left - k, remaining - used, weight * binom_[left][k]);
                next.resize(next.size() - k);
            }
        };
        if (!groups.empty() && rows_[row] <= capacity_after[0]) {
            distribute(distribute, 0, 0, groups[0].mult, rows_[row], 1);
        }
        memo_.emplace(std::move(key), total);
        return total;
    }

    std::vector<std::uint64_t> rows_;
    Caps caps0_;
    std::map<std::pair<std::size_t, Caps>, Count> memo_;
    std::uint64_t binom_[kMaxTotal + 1][kMaxTotal + 1]{};
};

inline double log_omega_exact(const std::vector<std::uint64_t>& rows, const std::vector<std::uint64_t>& cols) {
    return TableCounter(rows, cols).log_count();
}

namespace detail {

// Effective-columns estimate with `rows` as the Dirichlet-multinomial side.
inline double log_omega_effective_columns(const std::vector<std::uint64_t>& rows,
                                          const std::vector<std::uint64_t>& cols) {
    double total = 0.0, col_sq = 0.0;
    for (auto c : cols) {
        total += static_cast<double>(c);
        col_sq += static_cast<double>(c) * static_cast<double>(c);
    }
    const double m = static_cast<double>(rows.size());
    auto lbinom = [](double top, double bottom) {
        return std::lgamma(top + 1.0) - std::lgamma(bottom + 1.0) - std::lgamma(top - bottom + 1.0);
    };
    if (col_sq == total) {
        // All columns are singletons: exactly the multinomial count.
        double out = std::lgamma(total + 1.0);
        for (auto r : rows) out -= std::lgamma(static_cast<double>(r) + 1.0);
        return out;
    }
    const double alpha = (total * total - total + (total * total - col_sq) / m) / (col_sq - total);
    double out = -lbinom(total + m * alpha - 1.0, m * alpha - 1.0);
    for (auto c : cols) out += lbinom(static_cast<double>(c) + m - 1.0, m - 1.0);
    for (auto r : rows) {
        const double x = static_cast<double>(r);
        out += std::lgamma(x + alpha) - std::lgamma(alpha) - std::lgamma(x + 1.0);
    }
    return out;
}

} // namespace detail

namespace detail {

// Exact log Omega for two rows: the coefficient of t^r in prod_j (1 + ... + t^c_j),
// kept rescaled in doubles.
inline double log_omega_two_rows(std::uint64_t r0, std::uint64_t r1, const std::vector<std::uint64_t>& cols) {
    const std::size_t target = static_cast<std::size_t>(std::min(r0, r1));
    std::vector<double> poly(target + 1, 0.0), next(target + 1), prefix(target + 2);
    poly[0] = 1.0;
    double log_scale = 0.0;
    for (auto c : cols) {
        prefix[0] = 0.0;
        for (std::size_t k = 0; k <= target; ++k) prefix[k + 1] = prefix[k] + poly[k];
        double top = 0.0;
        for (std::size_t k = 0; k <= target; ++k) {
            const std::size_t low = k > c ? k - static_cast<std::size_t>(c) : 0;
            next[k] = prefix[k + 1] - prefix[low];
            top = std::max(top, next[k]);
        }
        for (std::size_t k = 0; k <= target; ++k) poly[k] = next[k] / top;
        log_scale += std::log(top);
    }
    return std::log(poly[target]) + log_scale;
}

} // namespace detail

/**
 * Analytic estimate of log Omega(rows, cols).
 *
 * Effective-columns estimate: the row sums of a table whose columns are
 * filled uniformly at random are approximated by a symmetric
 * Dirichlet-multinomial whose concentration matches the exact row-sum
 * variance,
 *   alpha = (n^2 - n + (n^2 - sum c^2) / R) / (sum c^2 - n),
 *   Omega ~ prod_j C(c_j + R - 1, R - 1) * prod_i C(r_i + alpha - 1, alpha - 1)
 *           / C(n + R alpha - 1, R alpha - 1).
 * The estimate is evaluated in both orientations and averaged, which makes it
 * symmetric in its arguments. These cases are counted exactly instead: a single
 * row or column (Omega = 1), an all-singleton side (the multinomial
 * n! / prod r_i!) and two rows or two columns (a polynomial coefficient).
 */
inline double log_omega_approx(std::vector<std::uint64_t> rows, std::vector<std::uint64_t> cols) {
    std::erase(rows, 0u);
    std::erase(cols, 0u);
    if (rows.size() <= 1 || cols.size() <= 1) return 0.0;
    auto singletons = [](const std::vector<std::uint64_t>& v) {
        return std::all_of(v.begin(), v.end(), [](std::uint64_t x) { return x == 1; });
    };
    if (singletons(cols)) return detail::log_multinomial(rows);
    if (singletons(rows)) return detail::log_multinomial(cols);
    if (rows.size() == 2) return detail::log_omega_two_rows(rows[0], rows[1], cols);
    if (cols.size() == 2) return detail::log_omega_two_rows(cols[0], cols[1], rows);
    return 0.5 * (detail::log_omega_effective_columns(rows, cols) + detail::log_omega_effective_columns(cols, rows));
}

enum class RmiPath { exact, approximate };

inline std::string_view to_string(RmiPath path) { return path == RmiPath::exact ? "exact" : "approx"; }

struct RmiResult {
    double normalized = 0.0; // raw / raw-of-ground-truth-with-itself
    double raw = 0.0;        // counting MI - log(Omega) / n, nats
    RmiPath path = RmiPath::exact;
};

inline constexpr std::uint64_t kDefaultRmiExactThreshold = 30;

inline RmiResult rmi(const ContingencyTable& ct, std::uint64_t exact_threshold = kDefaultRmiExactThreshold) {
    if (exact_threshold > TableCounter::kMaxTotal) {
        throw ConfigError("rmi exact threshold above " + std::to_string(TableCounter::kMaxTotal));
    }
    RmiResult result;
    result.path = ct.n <= exact_threshold ? RmiPath::exact : RmiPath::approximate;
    auto log_omega = [&](const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
        return result.path == RmiPath::exact ? log_omega_exact(a, b) : log_omega_approx(a, b);
    };
    const double n = static_cast<double>(ct.n);
    const double self = (detail::log_multinomial(ct.row_sums) - log_omega(ct.row_sums, ct.row_sums)) / n;
    if (ct.identical()) {
        result.raw = self;
        result.normalized = 1.0;
        return result;
    }
    result.raw = mutual_information_counting(ct) - log_omega(ct.row_sums, ct.col_sums) / n;
    if (self > 0.0) {
        result.normalized = result.raw / self;
    } else {
        // Only a single ground-truth community has no self information; then
        // every table is determined by its margins and the raw value is 0.
        result.normalized = std::abs(result.raw) < 1e-12 ? 1.0 : 0.0;
    }
    return result;
}

inline RmiResult rmi(const Partition& gt, const Partition& pred,
                     std::uint64_t exact_threshold = kDefaultRmiExactThreshold) {
    return rmi(ContingencyTable::build(gt, pred), exact_threshold);
}

// ---------------------------------------------------------------------------
// Pair counting.

inline double rand_index(const ContingencyTable& ct) {
    if (ct.n < 2) throw InputError("rand index needs at least 2 nodes");
    double same_both = 0.0, same_rows = 0.0, same_cols = 0.0;
    for (const auto& cell : ct.cells) same_both += detail::pairs(cell.count);
    for (auto a : ct.row_sums) same_rows += detail::pairs(a);
    for (auto b : ct.col_sums) same_cols += detail::pairs(b);
    const double total = detail::pairs(ct.n);
    // TP + TN = total - FN - FP
    return (total - (same_rows - same_both) - (same_cols - same_both)) / total;
}

inline double ari(const ContingencyTable& ct) {
    if (ct.n < 2) throw InputError("adjusted rand index needs at least 2 nodes");
    double index = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& cell : ct.cells) index += detail::pairs(cell.count);
    for (auto a : ct.row_sums) sum_a += detail::pairs(a);
    for (auto b : ct.col_sums) sum_b += detail::pairs(b);
    const double expected = sum_a * sum_b / detail::pairs(ct.n);
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0; // both trivial in the same way
    return (index - expected) / (max_index - expected);
}

inline double ari(const Partition& gt, const Partition& pred) { return ari(ContingencyTable::build(gt, pred)); }

// ---------------------------------------------------------------------------
// Label-overlap F1 family.

struct LabelF1 {
    double pf1 = 0.0;
    double nf1 = 0.0;
    double coverage = 0.0;
    double redundancy = 0.0;
    // Per predicted community: the ground-truth label it was assigned.
    std::vector<std::uint32_t> assigned;
};

/**
 * Each predicted community takes the ground-truth label most frequent among
 * its members (ties to the smallest ground-truth index) and is scored with
 * the F1 of that pair. PF1 is the unweighted mean over predicted
 * communities; NF1 scales it by coverage / redundancy.
 */
inline LabelF1 label_f1(const ContingencyTable& ct) {
    LabelF1 out;
    const auto k = ct.col_sums.size();
    std::vector<std::uint64_t> best(k, 0);
    out.assigned.assign(k, 0);
    // Cells are sorted by row, so the first maximum seen has the smallest row.
    for (const auto& cell : ct.cells) {
        if (cell.count > best[cell.col]) {
            best[cell.col] = cell.count;
            out.assigned[cell.col] = cell.row;
        }
    }
    double sum = 0.0;
    std::vector<bool> matched(ct.row_sums.size(), false);
    for (std::size_t j = 0; j < k; ++j) {
        const double overlap = static_cast<double>(best[j]);
        const double precision = overlap / static_cast<double>(ct.col_sums[j]);
        const double recall = overlap / static_cast<double>(ct.row_sums[out.assigned[j]]);
        sum += precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        matched[out.assigned[j]] = true;
    }
    if (k == 0) return out;
    out.pf1 = sum / static_cast<double>(k);
    const auto matched_count = static_cast<double>(std::count(matched.begin(), matched.end(), true));
    if (matched_count == 0.0) return out;
    out.coverage = matched_count / static_cast<double>(ct.row_sums.size());
    out.redundancy = static_cast<double>(k) / matched_count;
    out.nf1 = out.pf1 * out.coverage / out.redundancy;
    return out;
}

inline double pf1(const Partition& gt, const Partition& pred) {
    return label_f1(ContingencyTable::build(gt, pred)).pf1;
}
inline double nf1(const Partition& gt, const Partition& pred) {
    return label_f1(ContingencyTable::build(gt, pred)).nf1;
}

struct ValidationScores {
    double nmi = 0.0;
    double rmi = 0.0;
    RmiPath rmi_path = RmiPath::exact;
    double ari = 0.0;
    double pf1 = 0.0;
    double nf1 = 0.0;
};

inline ValidationScores validation_scores(const Partition& gt, const Partition& pred,
                                          std::uint64_t rmi_exact_threshold = kDefaultRmiExactThreshold) {
    const auto ct = ContingencyTable::build(gt, pred);
    ValidationScores s;
    s.nmi = nmi(ct);
    const auto r = rmi(ct, rmi_exact_threshold);
    s.rmi = r.normalized;
    s.rmi_path = r.path;
    s.ari = ari(ct);
    const auto f = label_f1(ct);
    s.pf1 = f.pf1;
    s.nf1 = f.nf1;
    return s;
}

} // namespace faircomm
