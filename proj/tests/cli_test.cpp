#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = FAIRCOMM_CLI;
const std::string kData = FAIRCOMM_TEST_DATA;

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path(testing::TempDir()) / ("faircomm_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Result run(const std::string& args, const std::string& env = "") {
    const fs::path err_file = fs::path(testing::TempDir()) / "faircomm_cli_stderr.txt";
    const std::string command = env + (env.empty() ? "" : " ") + kCli + " " + args + " 2>" + err_file.string();
    Result r;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return r;
    char buffer[4096];
    std::size_t got;
    while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) r.out.append(buffer, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = read_file(err_file);
    return r;
}

std::string fixture_args() {
    return "--graph " + kData + "/fixture.edges --gt " + kData + "/fixture.gt";
}

} // namespace

TEST(Cli, VersionAndUsage) {
    const auto v = run("--version");
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find("0.1.0"), std::string::npos);

    const auto none = run("");
    EXPECT_EQ(none.code, 2);
    const auto err = nlohmann::json::parse(none.err);
    EXPECT_EQ(err["error"]["kind"], "usage");

    EXPECT_EQ(run("evaluate --graph x").code, 2);
    EXPECT_EQ(run("detect --graph x --method louvain --out y").code, 2);
}

TEST(Cli, EvaluateMatchesGoldenCsv) {
    const auto dir = scratch("evaluate");
    const auto csv = dir / "rows.csv";
    const auto r = run("evaluate " + fixture_args() + " --pred " + kData + "/fixture.pred --network fixture --method handmade --seed 0 --csv " + csv.string());
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_file(csv), read_file(kData + "/fixture_golden.csv"));
    const auto row = nlohmann::json::parse(r.out);
    EXPECT_EQ(row["network"], "fixture");
    EXPECT_NEAR(row["nmi"].get<double>(), 0.6799248875070509, 1e-15);

    // a second run appends without repeating the header
    run("evaluate " + fixture_args() + " --pred " + kData + "/fixture.pred --network fixture --method handmade --csv " + csv.string());
    const auto text = read_file(csv);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
    EXPECT_EQ(text.find("network,", 1), std::string::npos);
}

TEST(Cli, SeedFromEnvironmentAndConfig) {
    const auto pred = " --pred " + kData + "/ingest/noisy.3.part";
    const auto flag = run("evaluate " + fixture_args() + pred + " --seed 7");
    const auto env = run("evaluate " + fixture_args() + pred, "FAIRCOMM_SEED=7");
    ASSERT_EQ(flag.code, 0) << flag.err;
    EXPECT_EQ(nlohmann::json::parse(env.out)["seed"], 7);
    EXPECT_EQ(flag.out, env.out);

    const auto dir = scratch("config");
    std::ofstream(dir / "run.toml") << "[evaluate]\nseed = 7\n";
    const auto conf = run("--config " + (dir / "run.toml").string() + " evaluate " + fixture_args() + pred);
    EXPECT_EQ(conf.code, 0) << conf.err;
    EXPECT_EQ(conf.out, flag.out);
}

TEST(Cli, MissingFilesAndBadInput) {
    const auto r = run("evaluate --graph /nonexistent.edges --gt x --pred y");
    EXPECT_EQ(r.code, 2);
    EXPECT_NO_THROW(nlohmann::json::parse(r.err));

    const auto dir = scratch("bad");
    std::ofstream(dir / "bad.gt") << "n0 a\n";
    const auto partial = run("evaluate --graph " + kData + "/fixture.edges --gt " + (dir / "bad.gt").string() + " --pred " + kData + "/fixture.pred");
    EXPECT_EQ(partial.code, 2);
    const auto err = nlohmann::json::parse(partial.err);
    EXPECT_NE(err["error"]["message"].get<std::string>().find("without a community"), std::string::npos);
}

TEST(Cli, UndefinedCellsExitWithThree) {
    // two equal, identical communities: no property varies
    const auto dir = scratch("undefined");
    std::ofstream(dir / "one.gt") << "n0 a\nn1 a\nn2 b\nn3 b\n";
    std::ofstream(dir / "one.edges") << "n0 n1\nn2 n3\nn1 n2\n";
    const auto r = run("evaluate --graph " + (dir / "one.edges").string() + " --gt " + (dir / "one.gt").string() + " --pred " + (dir / "one.gt").string());
    EXPECT_EQ(r.code, 3) << r.out << r.err;
    const auto row = nlohmann::json::parse(r.out);
    EXPECT_EQ(row["status_fccn_size"], "no-variation");
    EXPECT_TRUE(row["phi_fccn_size"].is_null());
}

TEST(Cli, GenerateDetectEvaluateRoundTrip) {
    const auto dir = scratch("pipeline");
    const auto gen = run("generate --model planted --preset power-law --n 400 --mu 0.2 --name net --seed 3 --out " + dir.string());
    ASSERT_EQ(gen.code, 0) << gen.err;
    EXPECT_TRUE(fs::exists(dir / "net.edges"));
    EXPECT_TRUE(fs::exists(dir / "net.gt"));
    const auto echo = nlohmann::json::parse(read_file(dir / "net.json"));
    EXPECT_EQ(echo["seed"], 3);

    // regenerating with the same seed is byte-identical
    const auto again = scratch("pipeline_again");
    run("generate --model planted --preset power-law --n 400 --mu 0.2 --name net --seed 3 --out " + again.string());
    EXPECT_EQ(read_file(dir / "net.edges"), read_file(again / "net.edges"));

    const auto det = run("detect --graph " + (dir / "net.edges").string() + " --method lpa --reps 2 --out " + (dir / "parts").string());
    ASSERT_EQ(det.code, 0) << det.err;
    EXPECT_TRUE(fs::exists(dir / "parts" / "lpa.0.part"));
    EXPECT_TRUE(fs::exists(dir / "parts" / "lpa.1.part"));

    const auto ev = run("evaluate --graph " + (dir / "net.edges").string() + " --gt " + (dir / "net.gt").string() + " --pred " + (dir / "parts" / "lpa.1.part").string() + " --details");
    EXPECT_LE(ev.code, 3) << ev.err;
    const auto row = nlohmann::json::parse(ev.out);
    EXPECT_EQ(row["method"], "lpa.1");
    EXPECT_TRUE(row.contains("report"));
    EXPECT_GT(row["nmi"].get<double>(), 0.5);
}

TEST(Cli, BenchWritesRunsAndSummary) {
    const auto dir = scratch("bench");
    const auto r = run(fixture_args().insert(0, "bench ") + " --network-id fixture --ingest " + kData + "/ingest --out " + dir.string());
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_file(dir / "runs.csv"), read_file(kData + "/ingest_golden.csv"));
    const auto summary = read_file(dir / "summary.csv");
    EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 4);
}

TEST(Cli, SweepCsv) {
    const auto dir = scratch("sweep");
    const auto r = run("sweep swap --reps 2 --out " + (dir / "swap.csv").string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto flip = nlohmann::json::parse(r.err);
    EXPECT_EQ(flip["flip_at"], 31);
    EXPECT_EQ(flip["flips"], 1);
    const auto text = read_file(dir / "swap.csv");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 42);

    const auto removal = run("sweep removal --nodes 100 --edges 1000 --reps 2");
    ASSERT_EQ(removal.code, 0) << removal.err;
    EXPECT_EQ(removal.out.substr(0, 7), "removed");
    EXPECT_EQ(std::count(removal.out.begin(), removal.out.end(), '\n'), 102);
}

TEST(Cli, Correlate) {
    const auto r = run("correlate " + fixture_args());
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, 33), "property,size,density,conductance");
}
