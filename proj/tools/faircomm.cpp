#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "faircomm/detectors.hpp"
#include "faircomm/error.hpp"
#include "faircomm/generators.hpp"
#include "faircomm/graph.hpp"
#include "faircomm/harness.hpp"
#include "faircomm/report_io.hpp"
#include "faircomm/sweeps.hpp"

namespace fs = std::filesystem;
using faircomm::ConfigError;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kInput = 2, kUndefinedOnly = 3, kInternal = 4 };

int fail(Exit code, const std::string& kind, const std::string& message) {
    json err;
    err["error"] = {{"kind", kind}, {"message", message}};
    std::cerr << err.dump() << '\n';
    return code;
}

std::ofstream open_output(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, mode);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

// Writes to `path`, or stdout when it is empty or "-".
template <typename F>
void emit(const std::string& path, F&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        return;
    }
    auto out = open_output(path);
    write(out);
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string model;
    std::string preset;
    std::string name;
    std::string out = ".";
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::size_t communities = 10;
    double mu = 0.2;
    double avg_degree = 10.0;
    std::size_t max_degree = 0;
    std::vector<double> r;
    double h = 0.9;
    double p_node = 0.1;
    double p_triad = 0.3;
    double p_pa = 0.8;
    std::size_t majority = 70;
    std::size_t minority = 40;
    std::size_t edges = 0;
};

int run_generate(const GenerateArgs& a, const CLI::App& cmd) {
    auto given = [&](const char* flag) { return cmd.count(flag) > 0; };
    json echo;
    echo["model"] = a.model;
    faircomm::GeneratedNetwork net;
    if (a.model == "planted") {
        const std::string preset = a.preset.empty() ? "equal" : a.preset;
        faircomm::PlantedPartitionConfig c;
        if (preset == "equal") {
            c = faircomm::PlantedPartitionConfig::equal_communities(given("--n") ? a.n : 1000, a.communities, a.mu,
                                                                    a.avg_degree, a.seed);
        } else if (preset == "power-law") {
            c = faircomm::PlantedPartitionConfig::power_law(given("--n") ? a.n : 1000, a.mu, a.avg_degree, a.seed);
        } else if (preset == "lfr-scale") {
            c = faircomm::PlantedPartitionConfig::lfr_scale(a.mu, a.seed);
            if (given("--n")) c.n = a.n;
            if (given("--avg-degree")) c.avg_degree = a.avg_degree;
        } else {
            throw ConfigError("unknown planted preset '" + preset + "' (expected equal, power-law or lfr-scale)");
        }
        if (given("--max-degree")) c.max_degree = a.max_degree;
        net = faircomm::generate_planted(c);
        echo["preset"] = preset;
        echo["n"] = c.n;
        echo["mu"] = c.mu;
        echo["avg_degree"] = c.avg_degree;
        echo["max_degree"] = c.max_degree;
        echo["community_sizes"] = c.community_sizes;
        if (c.community_sizes.empty()) {
            echo["size_exponent"] = c.size_exponent;
            echo["min_community"] = c.min_community;
            echo["max_community"] = c.max_community;
        }
        echo["seed"] = c.seed;
    } else {
        const std::string preset = a.preset.empty() ? "mmin" : a.preset;
        faircomm::HichBaConfig c;
        std::size_t target_edges = 0;
        if (preset == "mmin") {
            c = faircomm::HichBaConfig::mmin(a.seed, given("--n") ? a.n : 10000);
        } else if (preset == "mmaj") {
            c = faircomm::HichBaConfig::mmaj(a.seed, given("--n") ? a.n : 10000);
        } else if (preset == "single") {
            target_edges = given("--edges") ? a.edges : 90000;
            c = faircomm::HichBaConfig::single_community(given("--n") ? a.n : 1024, target_edges, a.seed);
        } else if (preset == "two") {
            target_edges = given("--edges") ? a.edges : 900;
            c = faircomm::HichBaConfig::two_communities(a.majority, a.minority, a.h, target_edges, a.seed);
        } else {
            throw ConfigError("unknown hichba preset '" + preset + "' (expected mmin, mmaj, single or two)");
        }
        if (given("--r")) c.r = a.r;
        if (given("--homophily")) c.h = a.h;
        if (given("--p-node")) c.p_node = a.p_node;
        if (given("--p-triad")) c.p_triad = a.p_triad;
        if (given("--p-pa")) c.p_pa = a.p_pa;
        net = target_edges ? faircomm::generate_hichba_with_edges(c, target_edges) : faircomm::generate_hichba(c);
        echo["preset"] = preset;
        echo["n"] = c.n;
        echo["r"] = c.r;
        echo["h"] = c.h;
        echo["p_node"] = c.p_node;
        echo["p_triad"] = c.p_triad;
        echo["p_pa"] = c.p_pa;
        if (!c.exact_sizes.empty()) echo["exact_sizes"] = c.exact_sizes;
        if (target_edges) echo["target_edges"] = target_edges;
        echo["seed"] = c.seed;
    }
    echo["nodes"] = net.graph.node_count();
    echo["edges"] = net.graph.edge_count();
    echo["communities"] = net.ground_truth.community_count();

    const fs::path dir(a.out);
    {
        auto out = open_output(dir / (a.name + ".edges"));
        faircomm::write_edge_list(out, net.graph);
    }
    {
        auto out = open_output(dir / (a.name + ".gt"));
        faircomm::write_partition(out, net.graph, net.ground_truth);
    }
    {
        auto out = open_output(dir / (a.name + ".json"));
        out << echo.dump(2) << '\n';
    }
    std::cout << echo.dump() << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------

struct DetectArgs {
    std::string graph;
    std::string method;
    std::size_t reps = 1;
    std::uint64_t seed = 0;
    std::string out;
};

int run_detect(const DetectArgs& a) {
    if (a.reps == 0) throw ConfigError("reps must be at least 1");
    const auto graph = faircomm::load_graph_file(a.graph);
    for (std::size_t rep = 0; rep < a.reps; ++rep) {
        const auto seed = a.seed + rep;
        const auto part = faircomm::run_builtin(a.method, graph, seed);
        const auto path = fs::path(a.out) / (a.method + "." + std::to_string(rep) + ".part");
        auto out = open_output(path);
        faircomm::write_partition(out, graph, part);
        json line;
        line["path"] = path.string();
        line["seed"] = seed;
        line["communities"] = part.community_count();
        line["modularity"] = faircomm::modularity(graph, part);
        std::cout << line.dump() << '\n';
    }
    return kOk;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
    std::string graph, gt, pred;
    std::uint64_t seed = 0;
    std::string csv;
    std::string network;
    std::string method;
    bool include_unmapped = true;
    std::uint64_t rmi_exact_threshold = faircomm::kDefaultRmiExactThreshold;
    bool details = false;
};

int run_evaluate(const EvaluateArgs& a) {
    const auto graph = faircomm::load_graph_file(a.graph);
    const auto gt = faircomm::load_partition_file(a.gt, graph);
    const auto pred = faircomm::load_partition_file(a.pred, graph);
    faircomm::EvaluationOptions options;
    options.fairness.include_unmapped = a.include_unmapped;
    options.rmi_exact_threshold = a.rmi_exact_threshold;
    const auto network = a.network.empty() ? fs::path(a.graph).stem().string() : a.network;
    const auto method = a.method.empty() ? fs::path(a.pred).stem().string() : a.method;
    const auto result = faircomm::evaluate(graph, gt, pred, a.seed, options, network, method);

    auto out = faircomm::to_json(result.row);
    if (a.details) out["report"] = faircomm::to_json(result.report);
    std::cout << out.dump(2) << '\n';

    if (!a.csv.empty()) {
        const bool fresh = !fs::exists(a.csv) || fs::file_size(a.csv) == 0;
        auto csv = open_output(a.csv, std::ios::app);
        if (fresh) faircomm::write_csv_header(csv, faircomm::result_columns());
        faircomm::write_csv_row(csv, result.row);
    }
    return result.row.all_ok() ? kOk : kUndefinedOnly;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
    std::vector<double> mu;
    std::size_t n = 1000;
    std::size_t communities = 0;
    double avg_degree = 10.0;
    std::vector<std::string> hichba;
    std::size_t hichba_n = 10000;
    std::size_t instances = 1;
    std::uint64_t network_seed = 0;
    std::string graph, gt, network_id;
    std::vector<std::string> methods;
    std::vector<std::string> ingest;
    std::size_t seeds = 10;
    std::uint64_t seed = 0;
    std::size_t jobs = 0;
    bool include_unmapped = true;
    std::uint64_t rmi_exact_threshold = faircomm::kDefaultRmiExactThreshold;
    std::string out;
};

int run_bench_command(const BenchArgs& a) {
    faircomm::ExperimentConfig config;
    for (double mu : a.mu) {
        faircomm::NetworkSource s;
        s.kind = faircomm::NetworkSource::Kind::planted;
        s.id = "planted_mu" + faircomm::format_double(mu);
        s.mu = mu;
        s.n = a.n;
        s.communities = a.communities;
        s.avg_degree = a.avg_degree;
        s.instances = a.instances;
        s.seed = a.network_seed;
        config.networks.push_back(s);
    }
    for (const auto& preset : a.hichba) {
        faircomm::NetworkSource s;
        if (preset == "mmin") {
            s.kind = faircomm::NetworkSource::Kind::hichba_mmin;
        } else if (preset == "mmaj") {
            s.kind = faircomm::NetworkSource::Kind::hichba_mmaj;
        } else {
            throw ConfigError("unknown hichba preset '" + preset + "' (expected mmin or mmaj)");
        }
        s.id = "hichba_" + preset;
        s.n = a.hichba_n;
        s.instances = a.instances;
        s.seed = a.network_seed;
        config.networks.push_back(s);
    }
    if (!a.graph.empty() || !a.gt.empty()) {
        if (a.graph.empty() || a.gt.empty()) throw ConfigError("--graph and --gt go together");
        faircomm::NetworkSource s;
        s.kind = faircomm::NetworkSource::Kind::files;
        s.id = a.network_id.empty() ? fs::path(a.graph).stem().string() : a.network_id;
        s.graph_path = a.graph;
        s.gt_path = a.gt;
        config.networks.push_back(s);
    }
    for (const auto& m : a.methods) config.methods.push_back({m, ""});
    for (const auto& dir : a.ingest) config.methods.push_back({fs::path(dir).filename().string(), dir});
    if (a.seeds == 0) throw ConfigError("seeds must be at least 1");
    for (std::size_t i = 0; i < a.seeds; ++i) config.seeds.push_back(a.seed + i);
    config.jobs = a.jobs ? a.jobs : std::max(1u, std::thread::hardware_concurrency());
    config.evaluation.fairness.include_unmapped = a.include_unmapped;
    config.evaluation.rmi_exact_threshold = a.rmi_exact_threshold;

    const auto rows = faircomm::run_bench(config);
    const fs::path dir(a.out);
    {
        auto out = open_output(dir / "runs.csv");
        faircomm::write_csv_header(out, faircomm::result_columns());
        for (const auto& row : rows) faircomm::write_csv_row(out, row);
    }
    const auto summary = faircomm::summarize(rows);
    {
        auto out = open_output(dir / "summary.csv");
        faircomm::write_summary_csv(out, summary);
    }

    std::size_t failed = 0, undefined = 0;
    for (const auto& row : rows) {
        if (row.failed()) {
            ++failed;
            std::cerr << "run failed: " << row.network << ' ' << row.method << ' ' << row.seed << ": " << row.error
                      << '\n';
        } else if (!row.all_ok()) {
            ++undefined;
        }
    }
    json line;
    line["runs"] = rows.size();
    line["failed"] = failed;
    line["undefined_cells_rows"] = undefined;
    line["summary_rows"] = summary.size();
    line["runs_csv"] = (dir / "runs.csv").string();
    line["summary_csv"] = (dir / "summary.csv").string();
    std::cout << line.dump() << '\n';
    if (failed) return kInternal;
    return undefined ? kUndefinedOnly : kOk;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string kind;
    std::string graph, gt;
    std::size_t community = 0;
    std::size_t nodes = 1024;
    std::size_t majority = 70;
    std::size_t minority = 40;
    double h = 0.9;
    std::size_t edges = 0;
    std::size_t reps = faircomm::kSweepRepetitions;
    std::size_t stride = 1;
    std::uint64_t seed = 0;
    std::string out;
};

int run_sweep(const SweepArgs& a) {
    faircomm::SweepOptions options;
    options.repetitions = a.reps;
    options.stride = a.stride;
    options.seed = a.seed;

    std::optional<faircomm::GeneratedNetwork> net;
    if (!a.graph.empty() || !a.gt.empty()) {
        if (a.graph.empty() || a.gt.empty()) throw ConfigError("--graph and --gt go together");
        auto graph = faircomm::load_graph_file(a.graph);
        auto gt = faircomm::load_partition_file(a.gt, graph);
        net = faircomm::GeneratedNetwork{std::move(graph), std::move(gt)};
    }

    if (a.kind == "removal") {
        if (!net) {
            const auto edges = a.edges ? a.edges : 90000;
            net = faircomm::generate_hichba_with_edges(
                faircomm::HichBaConfig::single_community(a.nodes, edges, a.seed), edges);
        }
        const auto& community = net->ground_truth.community(a.community);
        const auto steps = faircomm::sweep_removal(net->graph, community, options);
        emit(a.out, [&](std::ostream& os) { faircomm::write_removal_csv(os, steps); });
        return kOk;
    }
    if (!net) {
        const auto edges = a.edges ? a.edges : 900;
        net = faircomm::generate_hichba_with_edges(
            faircomm::HichBaConfig::two_communities(a.majority, a.minority, a.h, edges, a.seed), edges);
    }
    const auto trace = faircomm::sweep_swap(net->graph, net->ground_truth, options);
    emit(a.out, [&](std::ostream& os) { faircomm::write_swap_csv(os, trace); });
    json line;
    line["flip_at"] = trace.flip_at ? json(*trace.flip_at) : json(nullptr);
    line["flips"] = trace.flips;
    std::cerr << line.dump() << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------

struct CorrelateArgs {
    std::string graph, gt, out;
};

int run_correlate(const CorrelateArgs& a) {
    const auto graph = faircomm::load_graph_file(a.graph);
    const auto gt = faircomm::load_partition_file(a.gt, graph);
    const auto matrix = faircomm::property_correlations(graph, gt);
    emit(a.out, [&](std::ostream& os) { faircomm::write_correlation_csv(os, matrix); });
    for (const auto& row : matrix)
        for (const auto& v : row)
            if (!v) return kUndefinedOnly;
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group fairness of community detection results"};
    app.set_version_flag("--version", std::string("faircomm ") + FAIRCOMM_VERSION);
    app.set_config("--config", "", "TOML file with option values ([subcommand] sections)");
    app.require_subcommand(1);

    auto add_seed = [](CLI::App* cmd, std::uint64_t& seed) {
        cmd->add_option("--seed", seed, "Random seed")->envname("FAIRCOMM_SEED")->capture_default_str();
    };

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate a synthetic network with ground truth");
    generate->add_option("--model", gen.model, "planted or hichba")
        ->required()
        ->check(CLI::IsMember({"planted", "hichba"}));
    generate->add_option("--preset", gen.preset,
                         "planted: equal (default), power-law, lfr-scale; hichba: mmin (default), mmaj, single, two");
    generate->add_option("--name", gen.name, "Output file stem")->required();
    generate->add_option("--out", gen.out, "Output directory")->capture_default_str();
    add_seed(generate, gen.seed);
    generate->add_option("--n", gen.n, "Number of nodes");
    generate->add_option("--communities", gen.communities, "Planted: community count")->capture_default_str();
    generate->add_option("--mu", gen.mu, "Planted: mixing fraction")->capture_default_str();
    generate->add_option("--avg-degree", gen.avg_degree, "Planted: average degree")->capture_default_str();
    generate->add_option("--max-degree", gen.max_degree, "Planted: maximum degree");
    generate->add_option("--r", gen.r, "HICH-BA: community likelihoods");
    generate->add_option("--homophily", gen.h, "HICH-BA: homophily")->capture_default_str();
    generate->add_option("--p-node", gen.p_node, "HICH-BA: node event probability");
    generate->add_option("--p-triad", gen.p_triad, "HICH-BA: triadic closure probability");
    generate->add_option("--p-pa", gen.p_pa, "HICH-BA: preferential attachment probability");
    generate->add_option("--majority", gen.majority, "HICH-BA two: majority size")->capture_default_str();
    generate->add_option("--minority", gen.minority, "HICH-BA two: minority size")->capture_default_str();
    generate->add_option("--edges", gen.edges, "HICH-BA single/two: target edge count");

    DetectArgs det;
    auto* detect = app.add_subcommand("detect", "Run a builtin detector, one partition file per repetition");
    detect->add_option("--graph", det.graph, "Edge list")->required();
    detect->add_option("--method", det.method, "lpa or cnm")->required()->check(CLI::IsMember({"lpa", "cnm"}));
    detect->add_option("--reps", det.reps, "Repetitions")->capture_default_str();
    add_seed(detect, det.seed);
    detect->add_option("--out", det.out, "Output directory")->required();

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Score a predicted partition against ground truth");
    evaluate->add_option("--graph", ev.graph, "Edge list")->required();
    evaluate->add_option("--gt", ev.gt, "Ground-truth partition")->required();
    evaluate->add_option("--pred", ev.pred, "Predicted partition")->required();
    add_seed(evaluate, ev.seed);
    evaluate->add_option("--csv", ev.csv, "Append the result row to this CSV");
    evaluate->add_option("--network", ev.network, "Network id (default: graph file stem)");
    evaluate->add_option("--method", ev.method, "Method id (default: prediction file stem)");
    evaluate->add_option("--include-unmapped", ev.include_unmapped, "Regress unmapped communities with score 0")
        ->capture_default_str();
    evaluate->add_option("--rmi-exact-threshold", ev.rmi_exact_threshold, "Largest n for exact RMI")
        ->capture_default_str();
    evaluate->add_flag("--details", ev.details, "Include per-community scores and the mapping");

    BenchArgs be;
    auto* bench = app.add_subcommand("bench", "Evaluate networks x methods x seeds");
    bench->add_option("--mu", be.mu, "Planted networks, one per mixing fraction");
    bench->add_option("--n", be.n, "Planted: nodes")->capture_default_str();
    bench->add_option("--communities", be.communities, "Planted: equal communities (0: power-law sizes)")->capture_default_str();
    bench->add_option("--avg-degree", be.avg_degree, "Planted: average degree")->capture_default_str();
    bench->add_option("--hichba", be.hichba, "HICH-BA presets (mmin, mmaj)");
    bench->add_option("--hichba-n", be.hichba_n, "HICH-BA: nodes")->capture_default_str();
    bench->add_option("--instances", be.instances, "Generated instances per network")->capture_default_str();
    bench->add_option("--network-seed", be.network_seed, "Seed of the first generated instance")
        ->capture_default_str();
    bench->add_option("--graph", be.graph, "Edge list of a network read from file");
    bench->add_option("--gt", be.gt, "Ground truth of the network read from file");
    bench->add_option("--network-id", be.network_id, "Id of the network read from file");
    bench->add_option("--method", be.methods, "Builtin methods (lpa, cnm)");
    bench->add_option("--ingest", be.ingest, "Directories of <method>[.<rep>].part files");
    bench->add_option("--seeds", be.seeds, "Seeds per builtin method")->capture_default_str();
    add_seed(bench, be.seed);
    bench->add_option("--jobs", be.jobs, "Worker threads (0: all cores)")->capture_default_str();
    bench->add_option("--include-unmapped", be.include_unmapped, "Regress unmapped communities with score 0")
        ->capture_default_str();
    bench->add_option("--rmi-exact-threshold", be.rmi_exact_threshold, "Largest n for exact RMI")
        ->capture_default_str();
    bench->add_option("--out", be.out, "Output directory for runs.csv and summary.csv")->required();

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Metric behavior sweeps");
    sweep->add_option("kind", sw.kind, "removal or swap")->required()->check(CLI::IsMember({"removal", "swap"}));
    sweep->add_option("--graph", sw.graph, "Edge list (default: generated)");
    sweep->add_option("--gt", sw.gt, "Ground truth (default: generated)");
    sweep->add_option("--community", sw.community, "Removal: ground-truth community index")->capture_default_str();
    sweep->add_option("--nodes", sw.nodes, "Removal: nodes of the generated community")->capture_default_str();
    sweep->add_option("--majority", sw.majority, "Swap: majority size")->capture_default_str();
    sweep->add_option("--minority", sw.minority, "Swap: minority size")->capture_default_str();
    sweep->add_option("--homophily", sw.h, "Swap: homophily")->capture_default_str();
    sweep->add_option("--edges", sw.edges, "Target edges (default: 90000 removal, 900 swap)");
    sweep->add_option("--reps", sw.reps, "Repetitions")->capture_default_str();
    sweep->add_option("--stride", sw.stride, "Report every stride-th step")->capture_default_str();
    add_seed(sweep, sw.seed);
    sweep->add_option("--out", sw.out, "Trace CSV (default: stdout)");

    CorrelateArgs co;
    auto* correlate = app.add_subcommand("correlate", "Pearson correlations of community properties");
    correlate->add_option("--graph", co.graph, "Edge list")->required();
    correlate->add_option("--gt", co.gt, "Ground-truth partition")->required();
    correlate->add_option("--out", co.out, "Matrix CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(kInput, "usage", e.what());
    }

    try {
        if (*generate) return run_generate(gen, *generate);
        if (*detect) return run_detect(det);
        if (*evaluate) return run_evaluate(ev);
        if (*bench) return run_bench_command(be);
        if (*sweep) return run_sweep(sw);
        if (*correlate) return run_correlate(co);
    } catch (const faircomm::ParseError& e) {
        return fail(kInput, "parse", e.what());
    } catch (const faircomm::InputError& e) {
        return fail(kInput, "input", e.what());
    } catch (const faircomm::ConfigError& e) {
        return fail(kInput, "config", e.what());
    } catch (const faircomm::UndefinedValue& e) {
        return fail(kUndefinedOnly, "undefined", e.what());
    } catch (const fs::filesystem_error& e) {
        return fail(kInput, "io", e.what());
    } catch (const std::exception& e) {
        return fail(kInternal, "internal", e.what());
    }
    return kInternal;
}
