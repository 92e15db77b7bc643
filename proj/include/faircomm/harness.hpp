#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "faircomm/detectors.hpp"
#include "faircomm/error.hpp"
#include "faircomm/fairness.hpp"
#include "faircomm/generators.hpp"
#include "faircomm/graph.hpp"
#include "faircomm/properties.hpp"
#include "faircomm/report_io.hpp"
#include "faircomm/validation.hpp"

namespace faircomm {

struct EvaluationOptions {
    FairnessOptions fairness;
    std::uint64_t rmi_exact_threshold = kDefaultRmiExactThreshold;
};

struct Evaluation {
    ResultRow row;
    FairnessReport report;
};

inline Evaluation evaluate(const Graph& graph, const Partition& ground_truth, const Partition& predicted,
                           std::uint64_t seed, const EvaluationOptions& options = {}, std::string network = "",
                           std::string method = "") {
    Evaluation out;
    out.report = fairness_report(graph, ground_truth, predicted, seed, options.fairness);
    auto& row = out.row;
    row.network = std::move(network);
    row.method = std::move(method);
    row.seed = seed;
    row.n_gt_communities = ground_truth.community_count();
    row.n_pred_communities = predicted.community_count();
    row.scores = validation_scores(ground_truth, predicted, options.rmi_exact_threshold);
    row.cells = out.report.cells;
    return out;
}

// ---------------------------------------------------------------------------
// Property correlations.

using CorrelationMatrix = std::array<std::array<std::optional<double>, 3>, 3>;

/**
 * Pearson correlations between size, density and conductance over the
 * ground-truth communities. Pairs involving a zero-variance property are left
 * undefined. Communities with zero volume have no conductance and are dropped
 * from the pairs involving it.
 */
inline CorrelationMatrix property_correlations(const Graph& graph, const Partition& ground_truth) {
    if (ground_truth.community_count() < 3) throw InputError("property correlations need at least 3 communities");
    const auto props = community_properties(graph, ground_truth);
    auto column = [&](Property p, std::size_t i) -> std::optional<double> {
        switch (p) {
        case Property::size: return props.size[i];
        case Property::density: return props.density[i];
        case Property::conductance: return props.conductance[i];
        }
        return std::nullopt;
    };
    CorrelationMatrix matrix{};
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
            std::vector<double> x, y;
            for (std::size_t i = 0; i < ground_truth.community_count(); ++i) {
                auto xv = column(kProperties[a], i);
                auto yv = column(kProperties[b], i);
                if (xv && yv) {
                    x.push_back(*xv);
                    y.push_back(*yv);
                }
            }
            try {
                matrix[a][b] = pearson_correlation(x, y);
                if (a == b) matrix[a][b] = 1.0;
            } catch (const UndefinedValue&) {
            } catch (const InputError&) {
            }
        }
    }
    return matrix;
}

inline void write_correlation_csv(std::ostream& out, const CorrelationMatrix& matrix) {
    out << "property,size,density,conductance\n";
    for (std::size_t a = 0; a < 3; ++a) {
        out << to_string(kProperties[a]);
        for (std::size_t b = 0; b < 3; ++b) out << ',' << (matrix[a][b] ? format_double(*matrix[a][b]) : "undefined");
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Aggregation.

// Network instances "<group>#<i>" aggregate under "<group>".
inline std::string network_group(const std::string& network) {
    return network.substr(0, network.find('#'));
}

struct MetricSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0;          // sample std over all runs pooled
    double std_networks = 0.0; // sample std of per-network means
    double std_runs = 0.0;     // mean of per-network sample stds over seeds
};

struct SummaryRow {
    std::string network;
    std::string method;
    std::size_t runs = 0;
    std::size_t failed = 0;
    std::map<std::string, MetricSummary> metrics;
};

inline std::vector<std::string> summary_metric_names() {
    std::vector<std::string> names{"nmi", "rmi", "ari", "pf1", "nf1", "n_pred_communities"};
    for (auto [m, p] : phi_cells()) names.push_back(phi_column(m, p));
    return names;
}

namespace detail {

inline std::optional<double> metric_value(const ResultRow& row, const std::string& name) {
    if (row.failed()) return std::nullopt;
    if (name == "nmi") return row.scores.nmi;
    if (name == "rmi") return row.scores.rmi;
    if (name == "ari") return row.scores.ari;
    if (name == "pf1") return row.scores.pf1;
    if (name == "nf1") return row.scores.nf1;
    if (name == "n_pred_communities") return static_cast<double>(row.n_pred_communities);
    for (auto [m, p] : phi_cells()) {
        if (name == phi_column(m, p)) {
            const auto& c = row.cell(m, p);
            if (c.status != CellStatus::ok) return std::nullopt;
            return c.phi;
        }
    }
    return std::nullopt;
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace detail

// One summary row per (network group, method), in sorted key order.
inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
    std::map<std::pair<std::string, std::string>, std::vector<const ResultRow*>> groups;
    for (const auto& row : rows) groups[{network_group(row.network), row.method}].push_back(&row);

    std::vector<SummaryRow> out;
    for (const auto& [key, members] : groups) {
        SummaryRow summary;
        summary.network = key.first;
        summary.method = key.second;
        summary.runs = members.size();
        for (const ResultRow* r : members) summary.failed += r->failed();
        for (const auto& name : summary_metric_names()) {
            std::vector<double> pooled;
            std::map<std::string, std::vector<double>> per_network;
            for (const ResultRow* r : members) {
                if (auto v = detail::metric_value(*r, name)) {
                    pooled.push_back(*v);
                    per_network[r->network].push_back(*v);
                }
            }
            MetricSummary s;
            s.count = pooled.size();
            s.mean = detail::mean_of(pooled);
            s.std = detail::sample_std(pooled);
            std::vector<double> network_means, network_stds;
            for (const auto& [network, values] : per_network) {
                network_means.push_back(detail::mean_of(values));
                network_stds.push_back(detail::sample_std(values));
            }
            s.std_networks = detail::sample_std(network_means);
            s.std_runs = detail::mean_of(network_stds);
            summary.metrics[name] = s;
        }
        out.push_back(std::move(summary));
    }
    return out;
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    std::vector<std::string> columns{"network", "method", "runs", "failed"};
    for (const auto& name : summary_metric_names()) {
        for (const char* suffix : {"_count", "_mean", "_std", "_std_networks", "_std_runs"}) {
            columns.push_back(name + suffix);
        }
    }
    write_csv_header(out, columns);
    for (const auto& row : rows) {
        out << detail::csv_field(row.network) << ',' << detail::csv_field(row.method) << ',' << row.runs << ','
            << row.failed;
        for (const auto& name : summary_metric_names()) {
            const auto& s = row.metrics.at(name);
            out << ',' << s.count;
            if (s.count == 0) {
                out << ",,,,";
            } else {
                out << ',' << format_double(s.mean) << ',' << format_double(s.std) << ','
                    << format_double(s.std_networks) << ',' << format_double(s.std_runs);
            }
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Batch runs.

struct NetworkSource {
    enum class Kind { planted, hichba_mmin, hichba_mmaj, files };
    Kind kind = Kind::planted;
    std::string id;
    std::size_t instances = 1;
    std::uint64_t seed = 0; // instance i uses seed + i
    // planted
    std::size_t n = 1000;
    std::size_t communities = 0; // 0: power-law sizes on [20, 100]
    double mu = 0.2;
    double avg_degree = 10.0;
    // files
    std::string graph_path;
    std::string gt_path;
};

struct MethodSource {
    std::string name;      // lpa, cnm, or the ingested method name
    std::string directory; // non-empty: partition files to ingest
};

struct ExperimentConfig {
    std::vector<NetworkSource> networks;
    std::vector<MethodSource> methods;
    std::vector<std::uint64_t> seeds;
    EvaluationOptions evaluation;
    std::size_t jobs = 1;
};

struct NetworkInstance {
    std::string id;
    GeneratedNetwork network;
};

inline std::vector<NetworkInstance> materialize(const NetworkSource& source) {
    std::vector<NetworkInstance> out;
    if (source.kind == NetworkSource::Kind::files) {
        auto graph = load_graph_file(source.graph_path);
        auto gt = load_partition_file(source.gt_path, graph);
        out.push_back({source.id, {std::move(graph), std::move(gt)}});
        return out;
    }
    for (std::size_t i = 0; i < source.instances; ++i) {
        const auto seed = source.seed + i;
        GeneratedNetwork net;
        switch (source.kind) {
        case NetworkSource::Kind::planted:
            net = generate_planted(
                source.communities
                    ? PlantedPartitionConfig::equal_communities(source.n, source.communities, source.mu,
                                                                source.avg_degree, seed)
                    : PlantedPartitionConfig::power_law(source.n, source.mu, source.avg_degree, seed));
            break;
        case NetworkSource::Kind::hichba_mmin: net = generate_hichba(HichBaConfig::mmin(seed, source.n)); break;
        case NetworkSource::Kind::hichba_mmaj: net = generate_hichba(HichBaConfig::mmaj(seed, source.n)); break;
        case NetworkSource::Kind::files: break;
        }
        out.push_back({source.id + "#" + std::to_string(i), std::move(net)});
    }
    return out;
}

// Ingested partition files: `<method>.<rep>.part` or `<method>.part`.
struct IngestedRun {
    std::string method;
    std::uint64_t rep = 0;
    std::filesystem::path path;
};

inline std::vector<IngestedRun> scan_partition_directory(const std::filesystem::path& directory) {
    if (!std::filesystem::is_directory(directory)) {
        throw ConfigError("partition directory '" + directory.string() + "' does not exist");
    }
    std::vector<IngestedRun> runs;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".part") continue;
        const std::string stem = entry.path().stem().string();
        IngestedRun run{stem, 0, entry.path()};
        if (auto dot = stem.rfind('.'); dot != std::string::npos) {
            const auto suffix = stem.substr(dot + 1);
            if (!suffix.empty() && std::all_of(suffix.begin(), suffix.end(), [](char c) { return c >= '0' && c <= '9'; })) {
                run.method = stem.substr(0, dot);
                run.rep = std::stoull(suffix);
            }
        }
        runs.push_back(std::move(run));
    }
    std::sort(runs.begin(), runs.end(),
              [](const IngestedRun& a, const IngestedRun& b) { return std::tie(a.method, a.rep) < std::tie(b.method, b.rep); });
    return runs;
}

inline Partition run_builtin(const std::string& method, const Graph& graph, std::uint64_t seed) {
    if (method == "lpa") return label_propagation(graph, seed);
    if (method == "cnm") return greedy_modularity(graph);
    throw ConfigError("unknown detection method '" + method + "' (expected lpa or cnm)");
}

inline void validate(const ExperimentConfig& config) {
    if (config.networks.empty()) throw ConfigError("no networks configured");
    if (config.methods.empty()) throw ConfigError("no methods configured");
    if (config.jobs == 0) throw ConfigError("jobs must be at least 1");
    auto seeds = config.seeds;
    std::sort(seeds.begin(), seeds.end());
    if (std::adjacent_find(seeds.begin(), seeds.end()) != seeds.end()) throw ConfigError("seeds must be distinct");
    for (const auto& net : config.networks) {
        if (net.kind == NetworkSource::Kind::files) {
            for (const auto& path : {net.graph_path, net.gt_path}) {
                if (!std::filesystem::exists(path)) throw ConfigError("file '" + path + "' does not exist");
            }
        } else if (net.instances == 0) {
            throw ConfigError("network '" + net.id + "' has zero instances");
        }
    }
    for (const auto& method : config.methods) {
        if (!method.directory.empty()) {
            if (!std::filesystem::is_directory(method.directory)) {
                throw ConfigError("partition directory '" + method.directory + "' does not exist");
            }
        } else {
            if (method.name != "lpa" && method.name != "cnm") {
                throw ConfigError("unknown detection method '" + method.name + "' (expected lpa or cnm)");
            }
            if (config.seeds.empty()) throw ConfigError("builtin methods need at least one seed");
        }
    }
}

/**
 * Evaluates networks x methods x seeds. Builtin methods run once per seed;
 * ingested directories contribute one run per partition file with the file's
 * repetition number as seed. A failing run becomes a row with its error and
 * the batch continues. Rows are ordered by (network, method, seed) whatever the
 * number of worker threads.
 */
inline std::vector<ResultRow> run_bench(const ExperimentConfig& config) {
    validate(config);

    std::vector<NetworkInstance> instances;
    for (const auto& source : config.networks) {
        for (auto& instance : materialize(source)) instances.push_back(std::move(instance));
    }

    struct Task {
        std::size_t network;
        std::string method;
        std::uint64_t seed;
        std::function<Partition(const Graph&)> detect;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        for (const auto& method : config.methods) {
            if (method.directory.empty()) {
                for (auto seed : config.seeds) {
                    tasks.push_back({i, method.name, seed, [name = method.name, seed](const Graph& g) {
                                         return run_builtin(name, g, seed);
                                     }});
                }
            } else {
                for (const auto& run : scan_partition_directory(method.directory)) {
                    tasks.push_back({i, run.method, run.rep, [path = run.path.string()](const Graph& g) {
                                         return load_partition_file(path, g);
                                     }});
                }
            }
        }
    }

    std::vector<ResultRow> rows(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
            const auto& task = tasks[t];
            const auto& instance = instances[task.network];
            try {
                const auto predicted = task.detect(instance.network.graph);
                rows[t] = evaluate(instance.network.graph, instance.network.ground_truth, predicted, task.seed,
                                   config.evaluation, instance.id, task.method)
                              .row;
            } catch (const std::exception& e) {
                rows[t] = ResultRow{};
                rows[t].error = e.what();
            }
            rows[t].network = instance.id;
            rows[t].method = task.method;
            rows[t].seed = task.seed;
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t j = 1; j < std::min(config.jobs, tasks.size()); ++j) pool.emplace_back(worker);
        worker();
    }
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.network, a.method, a.seed) < std::tie(b.network, b.method, b.seed);
    });
    return rows;
}

} // namespace faircomm
