#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int status = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("geogap-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Outcome run(const std::string& args) {
        auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
        std::string cmd = std::string("\"") + GEOGAP_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
        int raw = std::system(cmd.c_str());
        return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    /// Synthetic corpus plus a config file pointing at it.
    void synth(const std::string& extra = "--projects 4 --types 4 --per-type 6 --dim 8") {
        auto r = run("synth --out-data " + path("data.csv") + " --out-cache " + path("emb.bin") + " --out-config " +
                     path("geogap.toml") + " " + extra);
        ASSERT_EQ(r.status, 0) << r.err;
    }

    void build() {
        auto r = run("build --config " + path("geogap.toml") + " --out " + path("art.json"));
        ASSERT_EQ(r.status, 0) << r.err;
    }

    /// Dataset holding the first `n` rows of the corpus' P0.
    void target(std::size_t n) {
        std::ifstream in(path("data.csv"));
        std::ofstream out(path("target.csv"));
        std::string line;
        std::getline(in, line);
        out << line << '\n';
        std::size_t kept = 0;
        while (std::getline(in, line) && kept < n)
            if (line.find("P0") != std::string::npos) {
                out << line << '\n';
                ++kept;
            }
    }

    std::string score_args() const {
        return "score --artifacts " + path("art.json") + " --data " + path("target.csv") + " --cache " +
               path("emb.bin") + " --types T0,T1,T2,T3";
    }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, HelpAndVersion) {
    EXPECT_EQ(run("--help").status, 0);
    auto v = run("--version");
    EXPECT_EQ(v.status, 0);
    EXPECT_NE(v.out.find("geogap"), std::string::npos);
    EXPECT_EQ(run("").status, 1);
    EXPECT_EQ(run("score --bogus").status, 1);
}

TEST_F(Cli, BuildIsByteIdenticalAcrossRuns) {
    synth();
    build();
    auto first = slurp(path("art.json"));
    auto r = run("build --config " + path("geogap.toml") + " --out " + path("art2.json"));
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(first, slurp(path("art2.json")));
    EXPECT_NE(r.out.find("N=96"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("fingerprint="), std::string::npos);
}

TEST_F(Cli, ScoreWritesReportSvgAndWarnsOnSmallTargets) {
    synth();
    build();
    target(20);
    auto r = run(score_args() + " --top-n 2 --out " + path("report.json") + " --svg " + path("cells.svg"));
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    auto rep = nlohmann::json::parse(slurp(path("report.json")));
    EXPECT_EQ(rep["format"], "geogap-gap-report");
    EXPECT_EQ(rep["summary"]["top"].size(), 2u);
    EXPECT_EQ(rep["target_size"], 20);
    EXPECT_TRUE(rep["below_reliability_floor"].get<bool>());
    auto svg = slurp(path("cells.svg"));
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST_F(Cli, ModeBAndFailOnGap) {
    synth();
    build();
    target(12);  // P0 rows of T0 and T1 only: T2 and T3 are gaps
    auto b = run(score_args() + " --mode B --tau 0.2");
    ASSERT_EQ(b.status, 0) << b.err;
    auto rep = nlohmann::json::parse(b.out);
    EXPECT_EQ(rep["mode"], "B");
    EXPECT_DOUBLE_EQ(rep["config"]["tau"].get<double>(), 0.2);
    double sum = 0;
    for (double w : rep["project_weights"]) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-9);
    EXPECT_EQ(run(score_args() + " --fail-on-gap 1.0").status, 4);
    EXPECT_EQ(run(score_args() + " --fail-on-gap 100").status, 0);
    EXPECT_EQ(run(score_args() + " --mode C").status, 1);
}

TEST_F(Cli, MissingEmbeddingIsADataErrorNamingTheId) {
    synth();
    build();
    target(3);
    {
        std::ofstream out(path("target.csv"), std::ios::app);
        out << "ghost-17,The system shall do something,P0,T1\n";
    }
    auto r = run(score_args());
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("ghost-17"), std::string::npos) << r.err;
}

TEST_F(Cli, MissingArtifactFileFails) {
    synth();
    target(3);
    auto r = run(score_args());
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.err.find("art.json"), std::string::npos);
}

TEST_F(Cli, EvalExperiments) {
    synth();
    auto cfg = " --config " + path("geogap.toml");
    auto u = run("eval bogus" + cfg);
    EXPECT_EQ(u.status, 1);
    EXPECT_NE(u.err.find("type-level"), std::string::npos);

    auto t = run("eval type-level --n-targets 1 --out " + path("records.jsonl") + cfg);
    ASSERT_EQ(t.status, 0) << t.err;
    auto summary = nlohmann::json::parse(t.out);
    EXPECT_EQ(summary["summary"]["folds"], 4);
    std::istringstream lines(slurp(path("records.jsonl")));
    std::size_t n = 0;
    for (std::string line; std::getline(lines, line); ++n) EXPECT_TRUE(nlohmann::json::parse(line).contains("auroc"));
    EXPECT_EQ(n, 4u);

    auto b = run("eval baseline --name classifier --n-targets 1 --out " + path("b.jsonl") + cfg);
    ASSERT_EQ(b.status, 0) << b.err;
    EXPECT_EQ(nlohmann::json::parse(b.out)["classifier"], "nearest-centroid");
    EXPECT_EQ(run("eval baseline --name nope" + cfg).status, 1);

    auto k = run("eval k-sweep --ks 1 2 --n-targets 1 --out " + path("k.jsonl") + cfg);
    ASSERT_EQ(k.status, 0) << k.err;
    std::istringstream klines(k.out);
    std::size_t points = 0;
    for (std::string line; std::getline(klines, line);) points += nlohmann::json::parse(line).contains("k") ? 1 : 0;
    EXPECT_EQ(points, 2u);
}

TEST_F(Cli, ConfigFileErrorsAreUsageErrors) {
    synth();
    {
        std::ofstream out(path("bad.toml"));
        out << "k = 1\nk = 2\n";
    }
    auto r = run("build --config " + path("bad.toml") + " --out " + path("x.json"));
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("duplicate"), std::string::npos);
}
