#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "hotstart/pipeline.hpp"

using namespace hotstart;
namespace fs = std::filesystem;

namespace {

// Fresh, empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = fs::temp_directory_path() / ("hotstart_" + tag + "_" + info->name() + "_" + std::to_string(::getpid()));
        fs::remove_all(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Relative path -> contents for every regular file under `root`.
std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
    return out;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + HOTSTART_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

PipelineConfig tiny_config(const fs::path& out) {
    PipelineConfig c;
    c.out = out;
    c.seed = 2024;
    c.game_types = {{2, 1}, {4, 2}};
    c.workers = 2;
    c.episodes = 2;
    c.nsga2.population_size = 12;
    c.nsga2.generations = 3;
    c.evader_samples = 4;
    c.train.epochs = 3;
    c.train.batch_size = 16;
    c.train.learning_rate = 1e-3;
    c.hot_start_count = 7;
    c.eval_batches = 2;
    c.eval_batch_size = 3;
    c.heatmap_resolution = 8;
    return c;
}

} // namespace

TEST(PipelineConfig, DefaultsAreValid) {
    PipelineConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.game_types.size(), 12u);
    EXPECT_EQ(c.eval_pairs(), 1000);
    EXPECT_EQ(c.scenario_for({4, 2}).evader_speed, 0.5);
    EXPECT_EQ(c.scenario_for({3, 1}).pursuer_speed, 0.5);
    EXPECT_EQ(c.scenario_for({3, 1}).evader_speed, 1.0);
}

TEST(PipelineConfig, JsonOverridesAndRejectsUnknownKeys) {
    const auto j = nlohmann::json::parse(R"({"seed": 9, "game_types": ["3x2"], "train": {"epochs": 4}})");
    const PipelineConfig c = pipeline_config_from_json(j);
    EXPECT_EQ(c.seed, 9u);
    ASSERT_EQ(c.game_types.size(), 1u);
    EXPECT_EQ(c.game_types[0], (GameType{3, 2}));
    EXPECT_EQ(c.train.epochs, 4);
    EXPECT_EQ(c.train.batch_size, TrainConfig{}.batch_size);
    EXPECT_THROW(pipeline_config_from_json(nlohmann::json::parse(R"({"sed": 1})")), ConfigError);
    EXPECT_THROW(pipeline_config_from_json(nlohmann::json::parse(R"({"train": {"epoch": 1}})")), ConfigError);
    EXPECT_THROW(pipeline_config_from_json(nlohmann::json::parse(R"({"seed": "x"})")), ConfigError);
    EXPECT_THROW(pipeline_config_from_json(nlohmann::json::parse(R"({"game_types": ["6x2"]})")), ConfigError);
}

TEST(PipelineConfig, HashIgnoresOutputLocationAndWorkers) {
    PipelineConfig a, b;
    b.out = "elsewhere";
    b.workers = 7;
    EXPECT_EQ(a.hash(), b.hash());
    b.seed = a.seed + 1;
    EXPECT_NE(a.hash(), b.hash());
}

TEST(Simulate, SingleEpisodeIsReproducible) {
    TempDir dir("sim1");
    PipelineConfig c = tiny_config(dir.path());
    c.game_types = {{3, 2}};
    c.episodes = 1;
    cmd_simulate(c);
    const auto first = snapshot(dir.path());
    EXPECT_EQ(first.size(), 2u);
    EXPECT_TRUE(first.count("simulate/3x2/episode_0.jsonl"));
    EXPECT_TRUE(first.count("simulate/manifest.json"));
    const auto manifest = nlohmann::json::parse(first.at("simulate/manifest.json"));
    EXPECT_EQ(manifest.at("stage"), "simulate");
    EXPECT_EQ(manifest.at("seed"), 2024u);
    EXPECT_TRUE(manifest.at("episode_seeds").contains("3x2"));
    cmd_simulate(c);
    EXPECT_EQ(snapshot(dir.path()), first);
}

TEST(Simulate, TenEpisodesAcrossAllGameTypes) {
    TempDir dir("sim120");
    PipelineConfig c;
    c.out = dir.path();
    c.episodes = 10;
    cmd_simulate(c);
    const auto files = snapshot(dir.path() / "simulate");
    EXPECT_EQ(files.size(), 121u);
    EXPECT_EQ(nlohmann::json::parse(files.at("manifest.json")).at("outputs").size(), 120u);
}

TEST(Simulate, WorkerCountDoesNotChangeOutput) {
    TempDir a("w1"), b("w4");
    PipelineConfig c = tiny_config(a.path());
    c.episodes = 4;
    c.workers = 1;
    cmd_simulate(c);
    c.out = b.path();
    c.workers = 4;
    cmd_simulate(c);
    EXPECT_EQ(snapshot(a.path()), snapshot(b.path()));
}

TEST(BuildGfs, OneFrontPerGameAndStackedDataset) {
    TempDir dir("gfs");
    PipelineConfig c = tiny_config(dir.path());
    c.game_types = standard_game_types();
    cmd_build_gfs(c);
    std::size_t total = 0;
    for (const auto& g : c.game_types) {
        const fs::path f = pipeline_detail::front_file(c, g);
        ASSERT_TRUE(fs::exists(f)) << f;
        const auto loaded = load_front(f);
        EXPECT_EQ(loaded.front.game_type, g);
        total += loaded.front.members.size();
    }
    const auto dataset = nlohmann::json::parse(slurp(dir.path() / "gfs" / "dataset.json"));
    EXPECT_EQ(dataset.at("graphs").size(), total);
    // One CSV row per front member.
    EXPECT_EQ(count_lines(slurp(dir.path() / "gfs" / "fronts.csv")), 1 + total);
}

TEST(BuildGfs, TamperedFrontIsRejectedOnLoad) {
    TempDir dir("tamper");
    PipelineConfig c = tiny_config(dir.path());
    c.game_types = {{3, 1}};
    cmd_build_gfs(c);
    const fs::path f = pipeline_detail::front_file(c, {3, 1});
    auto j = nlohmann::json::parse(slurp(f));
    auto& members = j.at("front").at("members");
    ASSERT_GE(members.size(), 1u);
    // Append a copy of a member made strictly worse on every objective.
    auto worse = members[0];
    auto& feat = worse.at("features");
    // Stored as [capture, distance, heading]; lower capture/heading and higher distance are worse.
    feat[0] = feat.at(0).get<double>() - 0.01;
    feat[1] = feat.at(1).get<double>() + 0.01;
    feat[2] = feat.at(2).get<double>() - 0.01;
    members.push_back(worse);
    std::ofstream(f) << j.dump();
    EXPECT_THROW(load_front(f), std::runtime_error);
}

TEST(Pipeline, StagesRequireUpstreamArtifacts) {
    TempDir dir("deps");
    const PipelineConfig c = tiny_config(dir.path());
    EXPECT_THROW(cmd_train(c), StageDependencyError);
    EXPECT_THROW(cmd_generate(c), StageDependencyError);
    EXPECT_THROW(cmd_evaluate(c), StageDependencyError);
    EXPECT_THROW(cmd_report(c), StageDependencyError);
}

TEST(Pipeline, FullRunIsDeterministic) {
    TempDir a("runa"), b("runb");
    PipelineConfig c = tiny_config(a.path());
    run_all(c);
    c.out = b.path();
    c.workers = 3;
    run_all(c);
    const auto sa = snapshot(a.path());
    EXPECT_EQ(sa, snapshot(b.path()));

    // Generated hot starts: count rows per pursuer per game type.
    const auto hot = hot_starts_from_csv(sa.at("generate/hotstarts.csv"));
    for (const auto& g : c.game_types) {
        ASSERT_EQ(hot.at(g).size(), 7u);
        for (const auto& hs : hot.at(g)) EXPECT_EQ(hs.positions.size(), static_cast<std::size_t>(g.pursuers));
    }
    EXPECT_EQ(count_lines(sa.at("generate/hotstarts.csv")), 1u + 7u * (2u + 4u));

    for (const char* f : {"report/logrank.json", "report/indicators.json", "report/containment.json",
                          "report/4x2/survival_hot.csv", "report/4x2/heatmap_random.pgm", "train/model.json",
                          "train/loss_trace.csv", "evaluate/4x2/capture_times.csv"})
        EXPECT_TRUE(sa.count(f)) << f;
    const auto lr = nlohmann::json::parse(sa.at("report/logrank.json"));
    EXPECT_EQ(lr.at("stage"), "report");
    EXPECT_EQ(lr.at("games").at("4x2").at("subjects_per_arm"), 12u);
    EXPECT_EQ(count_lines(sa.at("report/2x1/survival_random.csv")), 42u);
}

TEST(Pipeline, IdenticalArmsGiveUnitPValue) {
    TempDir dir("same");
    const PipelineConfig c = tiny_config(dir.path());
    run_stages(c, {"build-gfs", "train", "generate", "evaluate"});
    // Replace every hot-arm row with the paired random-arm outcome.
    for (const auto& g : c.game_types) {
        const fs::path f = dir.path() / "evaluate" / g.name() / "capture_times.csv";
        std::istringstream in(slurp(f));
        std::string header, line;
        std::getline(in, header);
        std::vector<std::string> random_rows;
        while (std::getline(in, line))
            if (line.find(",random,") != std::string::npos) random_rows.push_back(line);
        std::ostringstream out;
        out << header << '\n';
        for (const auto& r : random_rows) {
            std::string hot = r;
            hot.replace(hot.find(",random,"), 8, ",hot,");
            out << hot << '\n' << r << '\n';
        }
        std::ofstream(f, std::ios::trunc) << out.str();
    }
    cmd_report(c);
    const auto lr = nlohmann::json::parse(slurp(dir.path() / "report" / "logrank.json"));
    for (const auto& g : c.game_types) {
        const auto& r = lr.at("games").at(g.name());
        EXPECT_EQ(r.at("chi_square").get<double>(), 0.0);
        EXPECT_EQ(r.at("p_value").get<double>(), 1.0);
        EXPECT_EQ(r.at("survival_at_horizon_hot").get<double>(), r.at("survival_at_horizon_random").get<double>());
    }
}

TEST(Cli, InvalidGameTypeIsConfigErrorWithNoOutput) {
    TempDir dir("cli_bad");
    EXPECT_EQ(run_cli("simulate --out \"" + dir.path().string() + "\" --game-type 6x2 --episodes 1"), 2);
    EXPECT_FALSE(fs::exists(dir.path()));
    EXPECT_EQ(run_cli("simulate --out \"" + dir.path().string() + "\" --episodes 0"), 2);
    EXPECT_FALSE(fs::exists(dir.path()));
}

TEST(Cli, MissingUpstreamIsStageDependencyError) {
    TempDir dir("cli_dep");
    EXPECT_EQ(run_cli("train --out \"" + dir.path().string() + "\""), 3);
    EXPECT_EQ(run_cli("evaluate --out \"" + dir.path().string() + "\""), 3);
}

TEST(Cli, ConfigFileWithFlagOverrides) {
    TempDir dir("cli_cfg");
    fs::create_directories(dir.path());
    const fs::path cfg = dir.path() / "config.json";
    std::ofstream(cfg) << R"({"seed": 5, "game_types": ["2x1"], "simulate": {"episodes": 3}})";
    const fs::path out = dir.path() / "out";
    ASSERT_EQ(run_cli("simulate --config \"" + cfg.string() + "\" --out \"" + out.string() + "\" --episodes 2"), 0);
    const auto m = nlohmann::json::parse(slurp(out / "simulate" / "manifest.json"));
    EXPECT_EQ(m.at("seed"), 5u);
    EXPECT_EQ(m.at("outputs").size(), 2u);

    std::ofstream(cfg, std::ios::trunc) << R"({"simulate": {"episodes": 1}, "typo": 1})";
    EXPECT_EQ(run_cli("simulate --config \"" + cfg.string() + "\" --out \"" + out.string() + "\""), 2);
    EXPECT_NE(run_cli("no-such-command"), 0);
}
