#pragma once

// Six-stage pipeline: simulate -> build-gfs -> train -> generate -> evaluate
// -> report. Each stage reads only artifacts of earlier stages from the
// output directory and writes its own subdirectory with a manifest. Outputs
// carry no timestamps, so re-running a stage with the same configuration
// reproduces identical bytes.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hotstart/containment.hpp"
#include "hotstart/controllers.hpp"
#include "hotstart/gcn.hpp"
#include "hotstart/gfs.hpp"
#include "hotstart/heatmap.hpp"
#include "hotstart/indicators.hpp"
#include "hotstart/nsga2.hpp"
#include "hotstart/random.hpp"
#include "hotstart/sim.hpp"
#include "hotstart/stats.hpp"
#include "hotstart/survival.hpp"

namespace hotstart {

namespace fs = std::filesystem;

// An upstream artifact a stage needs is missing.
class StageDependencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names{"simulate", "build-gfs", "train", "generate", "evaluate", "report"};
    return names;
}

struct PipelineConfig {
    fs::path out = "hotstart-out";
    std::uint64_t seed = 1;
    std::vector<GameType> game_types = standard_game_types();
    int workers = 0;  // 0 = hardware concurrency

    // Scenario
    double pursuer_speed_many = 1.0;  // many-vs-many; evaders move at half this speed
    double pursuer_speed_one = 0.5;   // one-vs-many
    double evader_speed_one = 1.0;
    double capture_radius = 0.1;
    double dt = 0.05;
    int horizon = 40;
    HybridParams hybrid;

    // simulate
    int episodes = 10;

    // build-gfs
    Nsga2Params nsga2;
    int evader_samples = kDefaultEvaderSamples;

    // train
    TrainConfig train;

    // generate
    int hot_start_count = 1000;

    // evaluate
    int eval_batches = 10;
    int eval_batch_size = 100;
    int heatmap_resolution = 32;

    Scenario scenario_for(GameType g) const {
        Scenario s = Scenario::for_game(g);
        if (s.kind == GameKind::OneVsMany) {
            s.pursuer_speed = pursuer_speed_one;
            s.evader_speed = evader_speed_one;
        } else {
            s.pursuer_speed = pursuer_speed_many;
            s.evader_speed = 0.5 * pursuer_speed_many;
        }
        s.capture_radius = capture_radius;
        s.dt = dt;
        s.horizon = horizon;
        return s;
    }

    Nsga2Params nsga2_for(GameType g) const {
        Nsga2Params p = nsga2;
        p.capture_radius = capture_radius;
        p.speed_cap = scenario_for(g).pursuer_speed;
        return p;
    }

    int eval_pairs() const { return eval_batches * eval_batch_size; }

    void validate() const {
        if (out.empty()) throw ConfigError("output directory must not be empty");
        if (game_types.empty()) throw ConfigError("at least one game type is required");
        for (const auto& g : game_types) {
            if (!g.valid()) throw ConfigError("unsupported game type " + g.name() + " (pursuers 2-5, evaders 1-5)");
            scenario_for(g).validate();
        }
        if (workers < 0) throw ConfigError("workers must be >= 0");
        if (hybrid.grid_resolution < 3) throw ConfigError("value grid resolution must be >= 3");
        if (!(hybrid.alpha >= 0.0 && hybrid.alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
        if (episodes < 1) throw ConfigError("episodes per game type must be positive");
        nsga2.validate();
        if (evader_samples < 1) throw ConfigError("evader samples must be positive");
        train.validate();
        if (hot_start_count < 1) throw ConfigError("hot start count must be positive");
        if (eval_batches < 1 || eval_batch_size < 1) throw ConfigError("evaluation batches and batch size must be positive");
        if (heatmap_resolution < 8) throw ConfigError("heatmap resolution must be >= 8");
    }

    // Everything that influences artifact contents (not the output path or worker count).
    nlohmann::json to_json() const {
        std::vector<std::string> games;
        for (const auto& g : game_types) games.push_back(g.name());
        return {
            {"seed", seed},
            {"game_types", games},
            {"scenario",
             {{"pursuer_speed_many", pursuer_speed_many},
              {"pursuer_speed_one", pursuer_speed_one},
              {"evader_speed_one", evader_speed_one},
              {"capture_radius", capture_radius},
              {"dt", dt},
              {"horizon", horizon},
              {"grid_resolution", hybrid.grid_resolution},
              {"alpha", hybrid.alpha},
              {"avoid_radius", hybrid.avoid_radius}}},
            {"simulate", {{"episodes", episodes}}},
            {"nsga2",
             {{"population_size", nsga2.population_size},
              {"generations", nsga2.generations},
              {"crossover_prob", nsga2.crossover_prob},
              {"sbx_eta", nsga2.sbx_eta},
              {"mutation_eta", nsga2.mutation_eta},
              {"mutation_prob", nsga2.mutation_prob},
              {"evader_samples", evader_samples}}},
            {"train",
             {{"batch_size", train.batch_size},
              {"learning_rate", train.learning_rate},
              {"weight_decay", train.weight_decay},
              {"epochs", train.epochs}}},
            {"generate", {{"count", hot_start_count}}},
            {"evaluate",
             {{"batches", eval_batches}, {"batch_size", eval_batch_size}, {"heatmap_resolution", heatmap_resolution}}},
        };
    }

    std::uint64_t hash() const { return fnv1a(to_json().dump()); }
};

namespace pipeline_detail {

template <class T>
void take(const nlohmann::json& obj, const char* key, T& into) {
    if (!obj.contains(key)) return;
    try {
        into = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config field '") + key + "' has the wrong type");
    }
}

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> known, const std::string& where) {
    if (!obj.is_object()) throw ConfigError("config section '" + where + "' must be an object");
    for (const auto& [k, v] : obj.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* n) { return k == n; }))
            throw ConfigError("unknown config field '" + (where.empty() ? k : where + "." + k) + "'");
    }
}

} // namespace pipeline_detail

// Applies a JSON config document on top of `base`; unknown keys are errors.
inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j, PipelineConfig base = {}) {
    using pipeline_detail::reject_unknown;
    using pipeline_detail::take;
    reject_unknown(j, {"out", "seed", "game_types", "workers", "scenario", "simulate", "nsga2", "train", "generate", "evaluate"}, "");
    PipelineConfig c = std::move(base);
    std::string out = c.out.string();
    take(j, "out", out);
    c.out = out;
    take(j, "seed", c.seed);
    take(j, "workers", c.workers);
    if (j.contains("game_types")) {
        std::vector<std::string> names;
        take(j, "game_types", names);
        c.game_types.clear();
        for (const auto& n : names) c.game_types.push_back(GameType::parse(n));
    }
    if (j.contains("scenario")) {
        const auto& s = j.at("scenario");
        reject_unknown(s, {"pursuer_speed_many", "pursuer_speed_one", "evader_speed_one", "capture_radius", "dt", "horizon",
                           "grid_resolution", "alpha", "avoid_radius"}, "scenario");
        take(s, "pursuer_speed_many", c.pursuer_speed_many);
        take(s, "pursuer_speed_one", c.pursuer_speed_one);
        take(s, "evader_speed_one", c.evader_speed_one);
        take(s, "capture_radius", c.capture_radius);
        take(s, "dt", c.dt);
        take(s, "horizon", c.horizon);
        take(s, "grid_resolution", c.hybrid.grid_resolution);
        take(s, "alpha", c.hybrid.alpha);
        take(s, "avoid_radius", c.hybrid.avoid_radius);
    }
    if (j.contains("simulate")) {
        reject_unknown(j.at("simulate"), {"episodes"}, "simulate");
        take(j.at("simulate"), "episodes", c.episodes);
    }
    if (j.contains("nsga2")) {
        const auto& n = j.at("nsga2");
        reject_unknown(n, {"population_size", "generations", "crossover_prob", "sbx_eta", "mutation_eta", "mutation_prob",
                           "evader_samples"}, "nsga2");
        take(n, "population_size", c.nsga2.population_size);
        take(n, "generations", c.nsga2.generations);
        take(n, "crossover_prob", c.nsga2.crossover_prob);
        take(n, "sbx_eta", c.nsga2.sbx_eta);
        take(n, "mutation_eta", c.nsga2.mutation_eta);
        take(n, "mutation_prob", c.nsga2.mutation_prob);
        take(n, "evader_samples", c.evader_samples);
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        reject_unknown(t, {"batch_size", "learning_rate", "weight_decay", "epochs"}, "train");
        take(t, "batch_size", c.train.batch_size);
        take(t, "learning_rate", c.train.learning_rate);
        take(t, "weight_decay", c.train.weight_decay);
        take(t, "epochs", c.train.epochs);
    }
    if (j.contains("generate")) {
        reject_unknown(j.at("generate"), {"count"}, "generate");
        take(j.at("generate"), "count", c.hot_start_count);
    }
    if (j.contains("evaluate")) {
        const auto& e = j.at("evaluate");
        reject_unknown(e, {"batches", "batch_size", "heatmap_resolution"}, "evaluate");
        take(e, "batches", c.eval_batches);
        take(e, "batch_size", c.eval_batch_size);
        take(e, "heatmap_resolution", c.heatmap_resolution);
    }
    return c;
}

inline PipelineConfig load_pipeline_config(const fs::path& file, PipelineConfig base = {}) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config file " + file.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file " + file.string() + " is not valid JSON: " + e.what());
    }
    return pipeline_config_from_json(j, std::move(base));
}

// ---------------------------------------------------------------------------
// Plumbing

namespace pipeline_detail {

inline std::string hex(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex;
    s.width(16);
    s.fill('0');
    s << v;
    return s.str();
}

inline nlohmann::json provenance(const PipelineConfig& c, const std::string& stage) {
    return {{"stage", stage}, {"seed", c.seed}, {"config_hash", hex(c.hash())}};
}

// Independent stream per (stage, game, index) under the master seed.
inline std::uint64_t stream_seed(const PipelineConfig& c, const std::string& stage, GameType g, std::uint64_t index) {
    return derive_seed(derive_seed(derive_seed(c.seed, fnv1a(stage)), fnv1a(g.name())), index);
}

inline void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
}

inline void write_text(const fs::path& file, const std::string& text) {
    ensure_dir(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + file.string());
}

inline std::string read_text(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void require(const fs::path& file, const std::string& stage, const std::string& producer) {
    if (!fs::exists(file))
        throw StageDependencyError("stage '" + stage + "' needs " + file.string() + "; run '" + producer + "' first");
}

inline nlohmann::json read_json(const fs::path& file) { return nlohmann::json::parse(read_text(file)); }

inline std::string dump(const nlohmann::json& j) { return j.dump(1) + "\n"; }

inline void write_manifest(const PipelineConfig& c, const std::string& stage, const fs::path& dir,
                           std::vector<std::string> outputs, nlohmann::json extra = nlohmann::json::object()) {
    std::sort(outputs.begin(), outputs.end());
    nlohmann::json m = provenance(c, stage);
    m["config"] = c.to_json();
    m["outputs"] = outputs;
    for (const auto& [k, v] : extra.items()) m[k] = v;
    write_text(dir / "manifest.json", dump(m));
}

inline int worker_count(const PipelineConfig& c) {
    if (c.workers > 0) return c.workers;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, n) on a small pool; results must be stored by index.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    const int count = static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(workers)));
    for (int w = 0; w < count; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline std::vector<AgentState> random_agents(int n, double speed, Rng& rng) {
    std::vector<AgentState> out;
    for (int i = 0; i < n; ++i) {
        const Vec2 p = uniform_in_world(rng);
        const double heading = uniform(rng, -kPi, kPi);
        out.push_back({p, from_heading(heading) * speed});
    }
    return out;
}

inline fs::path front_file(const PipelineConfig& c, GameType g) { return c.out / "gfs" / ("front_" + g.name() + ".json"); }

} // namespace pipeline_detail

// ---------------------------------------------------------------------------
// Stage 1: episodes under the baseline control laws from uniform starts.

inline void cmd_simulate(const PipelineConfig& c) {
    using namespace pipeline_detail;
    c.validate();
    const fs::path dir = c.out / "simulate";
    ensure_dir(dir);
    std::vector<std::string> outputs;
    nlohmann::json seeds = nlohmann::json::object();
    for (const auto& g : c.game_types) {
        const Scenario s = c.scenario_for(g);
        const PolicyPair policies = default_policies(s, c.hybrid);
        std::vector<std::string> texts(static_cast<std::size_t>(c.episodes));
        std::vector<std::uint64_t> episode_seeds(texts.size());
        parallel_for(texts.size(), worker_count(c), [&](std::size_t k) {
            const std::uint64_t seed = stream_seed(c, "simulate", g, k);
            Rng rng(seed);
            const auto pursuers = random_agents(s.n_pursuers, s.pursuer_speed, rng);
            const auto evaders = random_agents(s.n_evaders, s.evader_speed, rng);
            texts[k] = episode_to_jsonl(run_episode(s, policies.pursuers, policies.evaders, pursuers, evaders, seed));
            episode_seeds[k] = seed;
        });
        for (std::size_t k = 0; k < texts.size(); ++k) {
            const std::string rel = g.name() + "/episode_" + std::to_string(k) + ".jsonl";
            write_text(dir / rel, texts[k]);
            outputs.push_back(rel);
        }
        seeds[g.name()] = episode_seeds;
    }
    write_manifest(c, "simulate", dir, outputs, {{"episode_seeds", seeds}});
}

// ---------------------------------------------------------------------------
// Stage 2: NSGA-II fronts per game type and the stacked graph dataset.

inline void cmd_build_gfs(const PipelineConfig& c) {
    using namespace pipeline_detail;
    c.validate();
    const fs::path dir = c.out / "gfs";
    ensure_dir(dir);

    struct Built {
        ParetoFront front;
        EvaderSamples samples;
        std::vector<ConfigGraph> graphs;
    };
    std::vector<Built> built(c.game_types.size());
    parallel_for(built.size(), worker_count(c), [&](std::size_t gi) {
        const GameType g = c.game_types[gi];
        auto& b = built[gi];
        b.samples = sample_evaders(g.evaders, c.evader_samples, stream_seed(c, "build-gfs/samples", g, 0));
        b.front = nsga2_optimize(g, b.samples, c.nsga2_for(g), stream_seed(c, "build-gfs/nsga2", g, 0)).front;
        Rng noise(stream_seed(c, "build-gfs/noise", g, 0));
        for (const auto& m : b.front.members)
            b.graphs.push_back(build_graph(m.config, per_pursuer_features(m.config, b.samples), noise));
    });

    std::vector<std::string> outputs{"fronts.csv", "dataset.json"};
    std::string csv = fronts_csv_header();
    nlohmann::json graphs = nlohmann::json::array();
    nlohmann::json sizes = nlohmann::json::object();
    for (std::size_t gi = 0; gi < built.size(); ++gi) {
        const GameType g = c.game_types[gi];
        const auto& b = built[gi];
        const Scenario s = c.scenario_for(g);
        nlohmann::json doc = provenance(c, "build-gfs");
        doc["front"] = to_json(b.front);
        doc["evader_samples"] = to_json(b.samples);
        doc["capture_radius"] = s.capture_radius;
        doc["pursuer_speed"] = s.pursuer_speed;
        write_text(front_file(c, g), dump(doc));
        outputs.push_back(front_file(c, g).filename().string());
        csv += fronts_csv_rows(b.front);
        for (const auto& gr : b.graphs) graphs.push_back(to_json(gr));
        sizes[g.name()] = b.front.members.size();
    }
    write_text(dir / "fronts.csv", csv);
    nlohmann::json dataset = provenance(c, "build-gfs");
    dataset["graphs"] = graphs;
    write_text(dir / "dataset.json", dump(dataset));
    write_manifest(c, "build-gfs", dir, outputs, {{"front_sizes", sizes}});
}

// Front file contents, with every member re-checked for non-dominance.
struct LoadedFront {
    ParetoFront front;
    EvaderSamples samples;
    double capture_radius = 0.1;
    double pursuer_speed = 1.0;
};

inline LoadedFront load_front(const fs::path& file) {
    const auto j = pipeline_detail::read_json(file);
    LoadedFront f;
    f.front = pareto_front_from_json(j.at("front"));
    f.samples = evader_samples_from_json(j.at("evader_samples"));
    f.capture_radius = j.at("capture_radius").get<double>();
    f.pursuer_speed = j.at("pursuer_speed").get<double>();
    const auto fv = f.front.feature_vectors();
    if (non_dominated_indices(fv).size() != fv.size())
        throw std::runtime_error("front file " + file.string() + " contains a dominated member");
    return f;
}

inline std::map<GameType, GameContext> load_contexts(const PipelineConfig& c, const std::string& stage) {
    using namespace pipeline_detail;
    std::map<GameType, GameContext> out;
    for (const auto& g : c.game_types) {
        const fs::path file = front_file(c, g);
        require(file, stage, "build-gfs");
        const LoadedFront f = load_front(file);
        out[g] = {g, f.samples, f.front.feature_vectors(), f.capture_radius, f.pursuer_speed};
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stage 3: GCN training on the stacked dataset.

inline void cmd_train(const PipelineConfig& c) {
    using namespace pipeline_detail;
    c.validate();
    const fs::path data_file = c.out / "gfs" / "dataset.json";
    require(data_file, "train", "build-gfs");
    const auto contexts = load_contexts(c, "train");
    std::vector<ConfigGraph> dataset;
    const nlohmann::json data = read_json(data_file);
    for (const auto& gj : data.at("graphs")) {
        ConfigGraph g = config_graph_from_json(gj);
        if (contexts.count(g.game_type)) dataset.push_back(std::move(g));
    }

    TrainConfig tc = c.train;
    tc.seed = derive_seed(c.seed, fnv1a("train"));
    const TrainResult r = train(dataset, contexts, tc);

    const fs::path dir = c.out / "train";
    nlohmann::json model = to_json(r.model);
    model["provenance"] = provenance(c, "train");
    write_text(dir / "model.json", dump(model));

    std::ostringstream trace;
    trace.precision(12);
    trace << "epoch,loss,gd,gd_plus,igd,igd_plus,hypervolume\n";
    for (const auto& e : r.trace)
        trace << e.epoch << ',' << e.loss << ',' << e.gd << ',' << e.gd_plus << ',' << e.igd << ',' << e.igd_plus << ','
              << e.hypervolume << '\n';
    write_text(dir / "loss_trace.csv", trace.str());
    write_manifest(c, "train", dir, {"model.json", "loss_trace.csv"},
                   {{"graphs", dataset.size()},
                    {"model_hash", hex(r.model.hash())},
                    {"first_epoch_loss", r.trace.front().loss},
                    {"last_epoch_loss", r.trace.back().loss}});
}

inline GcnModel load_model(const fs::path& file) { return gcn_model_from_json(pipeline_detail::read_json(file)); }

// ---------------------------------------------------------------------------
// Stage 4: hot starts from the trained model.

inline void cmd_generate(const PipelineConfig& c) {
    using namespace pipeline_detail;
    c.validate();
    const fs::path model_file = c.out / "train" / "model.json";
    require(model_file, "generate", "train");
    const GcnModel model = load_model(model_file);
    std::string csv = hot_start_csv_header();
    nlohmann::json seeds = nlohmann::json::object();
    for (const auto& g : c.game_types) {
        const std::uint64_t seed = stream_seed(c, "generate", g, 0);
        csv += hot_starts_to_csv_rows(generate_hot_starts(model, g, c.hot_start_count, seed));
        seeds[g.name()] = seed;
    }
    const fs::path dir = c.out / "generate";
    write_text(dir / "hotstarts.csv", csv);
    write_manifest(c, "generate", dir, {"hotstarts.csv"}, {{"model_hash", hex(model.hash())}, {"sample_seeds", seeds}});
}

// ---------------------------------------------------------------------------
// Stage 5: paired hot-start vs uniform-random episodes.

enum class Arm { Hot = 0, Random = 1 };
inline const char* arm_name(Arm a) { return a == Arm::Hot ? "hot" : "random"; }

struct ArmOutcome {
    std::vector<SurvivalRecord> survival;
    std::vector<int> contained, observed, degenerate;  // per step
    Heatmap heatmap;
};

struct PairOutcome {
    ArmOutcome arms[2];
};

inline void tally_containment(const EpisodeLog& log, ArmOutcome& o) {
    for (const auto& rec : log.steps) {
        const auto t = static_cast<std::size_t>(rec.step);
        const auto pursuers = detail::positions(rec.pursuers);
        for (const auto& e : rec.evaders) {
            if (!e) continue;
            const Containment cm = containment(pursuers, e->position);
            ++o.observed[t];
            if (cm.degenerate) ++o.degenerate[t];
            else if (cm.inside) ++o.contained[t];
        }
    }
}

inline void cmd_evaluate(const PipelineConfig& c) {
    using namespace pipeline_detail;
    c.validate();
    const fs::path hot_file = c.out / "generate" / "hotstarts.csv";
    require(hot_file, "evaluate", "generate");
    const auto hot = hot_starts_from_csv(read_text(hot_file));
    const fs::path dir = c.out / "evaluate";
    std::vector<std::string> outputs;

    for (const auto& g : c.game_types) {
        const auto it = hot.find(g);
        if (it == hot.end() || it->second.empty())
            throw StageDependencyError("hotstarts.csv has no samples for " + g.name() + "; re-run 'generate'");
        const auto& starts = it->second;
        const Scenario s = c.scenario_for(g);
        const PolicyPair policies = default_policies(s, c.hybrid);
        const auto steps = static_cast<std::size_t>(s.horizon + 1);

        std::vector<PairOutcome> pairs(static_cast<std::size_t>(c.eval_pairs()));
        std::vector<std::size_t> picked(pairs.size());
        parallel_for(pairs.size(), worker_count(c), [&](std::size_t k) {
            const std::uint64_t seed = stream_seed(c, "evaluate", g, k);
            Rng rng(seed);
            const auto evaders = random_agents(s.n_evaders, s.evader_speed, rng);
            const auto random_pursuers = random_agents(s.n_pursuers, s.pursuer_speed, rng);
            picked[k] = uniform_index(rng, starts.size());
            std::vector<AgentState> hot_pursuers;
            const auto& hs = starts[picked[k]];
            for (std::size_t i = 0; i < hs.positions.size(); ++i)
                hot_pursuers.push_back({hs.positions[i], from_heading(hs.headings[i]) * s.pursuer_speed});
            const std::uint64_t episode_seed = derive_seed(seed, 1);
            for (Arm arm : {Arm::Hot, Arm::Random}) {
                auto& o = pairs[k].arms[static_cast<int>(arm)];
                const auto& init = arm == Arm::Hot ? hot_pursuers : random_pursuers;
                const EpisodeLog log = run_episode(s, policies.pursuers, policies.evaders, init, evaders, episode_seed);
                o.survival = survival_records(log);
                o.contained.assign(steps, 0);
                o.observed.assign(steps, 0);
                o.degenerate.assign(steps, 0);
                tally_containment(log, o);
                o.heatmap = Heatmap(c.heatmap_resolution);
                o.heatmap.add(log);
            }
        });

        std::ostringstream times;
        times << "pair,batch,hot_start,arm,evader,time,event\n";
        for (std::size_t k = 0; k < pairs.size(); ++k)
            for (Arm arm : {Arm::Hot, Arm::Random}) {
                const auto& o = pairs[k].arms[static_cast<int>(arm)];
                for (std::size_t j = 0; j < o.survival.size(); ++j)
                    times << k << ',' << k / static_cast<std::size_t>(c.eval_batch_size) << ',' << picked[k] << ','
                          << arm_name(arm) << ',' << j << ',' << o.survival[j].time << ',' << (o.survival[j].event ? 1 : 0)
                          << '\n';
            }
        const std::string gdir = g.name() + "/";
        write_text(dir / (gdir + "capture_times.csv"), times.str());
        outputs.push_back(gdir + "capture_times.csv");

        std::ostringstream cont;
        cont << "arm,step,contained,observed,degenerate\n";
        for (Arm arm : {Arm::Hot, Arm::Random}) {
            Heatmap h(c.heatmap_resolution);
            std::vector<long> contained(steps, 0), observed(steps, 0), degenerate(steps, 0);
            for (const auto& p : pairs) {
                const auto& o = p.arms[static_cast<int>(arm)];
                h.merge(o.heatmap);
                for (std::size_t t = 0; t < steps; ++t) {
                    contained[t] += o.contained[t];
                    observed[t] += o.observed[t];
                    degenerate[t] += o.degenerate[t];
                }
            }
            for (std::size_t t = 0; t < steps; ++t)
                cont << arm_name(arm) << ',' << t << ',' << contained[t] << ',' << observed[t] << ',' << degenerate[t] << '\n';
            const std::string rel = gdir + "heatmap_" + arm_name(arm) + "_raw.csv";
            write_text(dir / rel, h.raw_csv());
            outputs.push_back(rel);
        }
        write_text(dir / (gdir + "containment.csv"), cont.str());
        outputs.push_back(gdir + "containment.csv");
    }
    write_manifest(c, "evaluate", dir, outputs, {{"pairs_per_game", c.eval_pairs()}});
}

// ---------------------------------------------------------------------------
// Stage 6: survival curves, log-rank tests, containment, heatmaps, indicators.

struct ArmRecords {
    std::vector<SurvivalRecord> hot, random;
};

inline ArmRecords read_capture_times(const fs::path& file) {
    std::istringstream in(pipeline_detail::read_text(file));
    std::string line;
    std::getline(in, line);
    ArmRecords r;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
        if (f.size() != 7) throw std::runtime_error("malformed capture time row: " + line);
        const SurvivalRecord rec{std::stod(f[5]), f[6] == "1"};
        (f[3] == "hot" ? r.hot : r.random).push_back(rec);
    }
    return r;
}

inline PointSet configuration_points(const std::vector<HotStart>& starts, const GameContext& ctx) {
    PointSet out;
    for (const auto& hs : starts) {
        const FeatureVector f =
            aggregate_features(configuration_from_positions(hs.positions, ctx.game, ctx.capture_radius, ctx.speed), ctx.samples);
        const auto u = f.unit_objectives();
        out.push_back({u[0], u[1], u[2]});
    }
    return out;
}

inline void cmd_report(const PipelineConfig& c) {
    using namespace pipeline_detail;
    c.validate();
    const fs::path eval_dir = c.out / "evaluate";
    const fs::path hot_file = c.out / "generate" / "hotstarts.csv";
    for (const auto& g : c.game_types) {
        require(eval_dir / g.name() / "capture_times.csv", "report", "evaluate");
        require(eval_dir / g.name() / "containment.csv", "report", "evaluate");
    }
    require(hot_file, "report", "generate");
    const auto contexts = load_contexts(c, "report");
    const auto hot = hot_starts_from_csv(read_text(hot_file));

    const fs::path dir = c.out / "report";
    std::vector<std::string> outputs{"indicators.json", "logrank.json", "containment.json"};
    nlohmann::json logrank = provenance(c, "report");
    nlohmann::json contain = provenance(c, "report");
    nlohmann::json indicators = provenance(c, "report");
    indicators["reference"] = unit_reference();
    indicators["p"] = 2.0;

    for (const auto& g : c.game_types) {
        const std::string gdir = g.name() + "/";
        const Scenario s = c.scenario_for(g);
        const ArmRecords rec = read_capture_times(eval_dir / g.name() / "capture_times.csv");
        const SurvivalCurve hot_curve = kaplan_meier(rec.hot, s.horizon);
        const SurvivalCurve random_curve = kaplan_meier(rec.random, s.horizon);
        write_text(dir / (gdir + "survival_hot.csv"), hot_curve.to_csv());
        write_text(dir / (gdir + "survival_random.csv"), random_curve.to_csv());
        outputs.push_back(gdir + "survival_hot.csv");
        outputs.push_back(gdir + "survival_random.csv");
        const LogRankResult lr = log_rank(rec.hot, rec.random);
        logrank["games"][g.name()] = {{"chi_square", lr.chi_square},
                                      {"p_value", lr.p_value},
                                      {"observed_hot", lr.observed_a},
                                      {"expected_hot", lr.expected_a},
                                      {"variance", lr.variance},
                                      {"degenerate", lr.degenerate},
                                      {"subjects_per_arm", rec.hot.size()},
                                      {"survival_at_horizon_hot", hot_curve.at(s.horizon)},
                                      {"survival_at_horizon_random", random_curve.at(s.horizon)}};

        // Containment density per step and overall.
        std::istringstream in(read_text(eval_dir / g.name() / "containment.csv"));
        std::string line;
        std::getline(in, line);
        std::ostringstream dens;
        dens.precision(10);
        dens << "arm,step,density\n";
        std::map<std::string, std::pair<long, long>> totals;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<std::string> f;
            std::istringstream ls(line);
            for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
            const long inside = std::stol(f[2]);
            const long usable = std::stol(f[3]) - std::stol(f[4]);
            dens << f[0] << ',' << f[1] << ',' << (usable > 0 ? static_cast<double>(inside) / usable : 0.0) << '\n';
            totals[f[0]].first += inside;
            totals[f[0]].second += usable;
        }
        write_text(dir / (gdir + "containment_density.csv"), dens.str());
        outputs.push_back(gdir + "containment_density.csv");
        for (const auto& [arm, t] : totals)
            contain["games"][g.name()][arm] = {{"contained", t.first},
                                               {"observed", t.second},
                                               {"density", t.second > 0 ? static_cast<double>(t.first) / t.second : 0.0}};

        for (Arm arm : {Arm::Hot, Arm::Random}) {
            const std::string raw = gdir + "heatmap_" + arm_name(arm) + "_raw.csv";
            require(eval_dir / raw, "report", "evaluate");
            const Heatmap h = Heatmap::from_raw_csv(read_text(eval_dir / raw));
            const std::string base = gdir + "heatmap_" + arm_name(arm);
            write_text(dir / (base + ".csv"), h.to_csv());
            write_text(dir / (base + ".pgm"), h.to_pgm());
            outputs.push_back(base + ".csv");
            outputs.push_back(base + ".pgm");
        }

        // Front-approximation quality of the hot starts vs uniform-random placements.
        const auto& ctx = contexts.at(g);
        const auto hs = hot.find(g);
        if (hs == hot.end()) throw StageDependencyError("hotstarts.csv has no samples for " + g.name());
        std::vector<HotStart> random_starts(hs->second.size());
        Rng rng(stream_seed(c, "report/random", g, 0));
        for (auto& r : random_starts)
            for (int i = 0; i < g.pursuers; ++i) r.positions.push_back(uniform_in_world(rng));
        const PointSet front = unit_points(ctx.front);
        indicators["games"][g.name()] = {
            {"front_size", ctx.front.size()},
            {"front_hypervolume", hypervolume(front, unit_reference())},
            {"hot", to_json(indicator_report(configuration_points(hs->second, ctx), front, unit_reference()))},
            {"random", to_json(indicator_report(configuration_points(random_starts, ctx), front, unit_reference()))}};
    }
    write_text(dir / "logrank.json", dump(logrank));
    write_text(dir / "containment.json", dump(contain));
    write_text(dir / "indicators.json", dump(indicators));
    write_manifest(c, "report", dir, outputs);
}

// Runs the named stages in pipeline order.
inline void run_stages(const PipelineConfig& c, const std::vector<std::string>& stages) {
    c.validate();
    for (const auto& s : stages)
        if (std::find(stage_names().begin(), stage_names().end(), s) == stage_names().end())
            throw ConfigError("unknown stage '" + s + "'");
    for (const auto& name : stage_names()) {
        if (std::find(stages.begin(), stages.end(), name) == stages.end()) continue;
        if (name == "simulate") cmd_simulate(c);
        else if (name == "build-gfs") cmd_build_gfs(c);
        else if (name == "train") cmd_train(c);
        else if (name == "generate") cmd_generate(c);
        else if (name == "evaluate") cmd_evaluate(c);
        else cmd_report(c);
    }
}

inline void run_all(const PipelineConfig& c) { run_stages(c, stage_names()); }

} // namespace hotstart
