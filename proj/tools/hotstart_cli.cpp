// hotstart: command-line driver for the six pipeline stages.
//
//   hotstart simulate  --out run --seed 7 --game-type 4x2 --episodes 10
//   hotstart build-gfs --out run --population 50 --generations 20
//   hotstart train | generate | evaluate | report --out run
//   hotstart run-all   --config pipeline.json

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hotstart/pipeline.hpp"

namespace {

using hotstart::PipelineConfig;

// Flag values as optionals so that only flags actually given override the
// config file (and the file overrides the built-in defaults).
struct Flags {
    std::string config_file;
    std::string out;
    std::uint64_t seed = 0;
    std::vector<std::string> game_types;
    int workers = -1;

    double pursuer_speed_many = 0, pursuer_speed_one = 0, evader_speed_one = 0;
    double capture_radius = 0, dt = 0, alpha = -1, avoid_radius = -1;
    int horizon = 0, grid_resolution = 0;

    int episodes = 0;
    int population = 0, generations = 0, evader_samples = 0;
    double crossover_prob = -1, sbx_eta = 0, mutation_eta = 0, mutation_prob = -1;
    int batch_size = 0, epochs = 0;
    double learning_rate = -1, weight_decay = -1;
    int count = 0;
    int eval_batches = 0, eval_batch_size = 0, heatmap_resolution = 0;
};

void add_flags(CLI::App& app, Flags& f) {
    app.add_option("-c,--config", f.config_file, "JSON pipeline config file")->check(CLI::ExistingFile);
    app.add_option("-o,--out", f.out, "Output directory");
    app.add_option("-s,--seed", f.seed, "Master seed");
    app.add_option("-g,--game-type", f.game_types, "Game type PxE (repeatable; default: all twelve)");
    app.add_option("--workers", f.workers, "Worker threads for episodes (0 = all cores)");

    auto* sc = "Scenario";
    app.add_option("--pursuer-speed", f.pursuer_speed_many, "Pursuer speed in many-vs-many games")->group(sc);
    app.add_option("--pursuer-speed-one", f.pursuer_speed_one, "Pursuer speed in one-vs-many games")->group(sc);
    app.add_option("--evader-speed-one", f.evader_speed_one, "Evader speed in one-vs-many games")->group(sc);
    app.add_option("--capture-radius", f.capture_radius, "Capture radius")->group(sc);
    app.add_option("--dt", f.dt, "Integration step")->group(sc);
    app.add_option("--horizon", f.horizon, "Episode horizon in steps")->group(sc);
    app.add_option("--grid-resolution", f.grid_resolution, "Value grid resolution")->group(sc);
    app.add_option("--alpha", f.alpha, "Geometric/value blend weight")->group(sc);
    app.add_option("--avoid-radius", f.avoid_radius, "Evader avoidance radius (0 = three capture radii)")->group(sc);

    app.add_option("--episodes", f.episodes, "simulate: episodes per game type")->group("simulate");

    auto* ga = "build-gfs";
    app.add_option("--population", f.population, "NSGA-II population size")->group(ga);
    app.add_option("--generations", f.generations, "NSGA-II generations")->group(ga);
    app.add_option("--crossover-prob", f.crossover_prob, "SBX crossover probability")->group(ga);
    app.add_option("--sbx-eta", f.sbx_eta, "SBX distribution index")->group(ga);
    app.add_option("--mutation-eta", f.mutation_eta, "Polynomial mutation distribution index")->group(ga);
    app.add_option("--mutation-prob", f.mutation_prob, "Per-gene mutation probability (0 = 1/length)")->group(ga);
    app.add_option("--evader-samples", f.evader_samples, "Evader samples per feature evaluation")->group(ga);

    auto* tr = "train";
    app.add_option("--batch-size", f.batch_size, "Training batch size")->group(tr);
    app.add_option("--learning-rate", f.learning_rate, "AdamW learning rate")->group(tr);
    app.add_option("--weight-decay", f.weight_decay, "AdamW weight decay")->group(tr);
    app.add_option("--epochs", f.epochs, "Training epochs")->group(tr);

    app.add_option("--count", f.count, "generate: hot starts per game type")->group("generate");

    auto* ev = "evaluate";
    app.add_option("--eval-batches", f.eval_batches, "Evaluation batches")->group(ev);
    app.add_option("--eval-batch-size", f.eval_batch_size, "Episode pairs per batch")->group(ev);
    app.add_option("--heatmap-resolution", f.heatmap_resolution, "Heatmap cells per side")->group(ev);
}

PipelineConfig resolve(const CLI::App& app, const Flags& f) {
    PipelineConfig c;
    if (!f.config_file.empty()) c = hotstart::load_pipeline_config(f.config_file, c);
    auto given = [&](const char* name) { return app.count(name) > 0; };
    if (given("--out")) c.out = f.out;
    if (given("--seed")) c.seed = f.seed;
    if (given("--workers")) c.workers = f.workers;
    if (given("--game-type")) {
        c.game_types.clear();
        for (const auto& g : f.game_types) c.game_types.push_back(hotstart::GameType::parse(g));
    }
    if (given("--pursuer-speed")) c.pursuer_speed_many = f.pursuer_speed_many;
    if (given("--pursuer-speed-one")) c.pursuer_speed_one = f.pursuer_speed_one;
    if (given("--evader-speed-one")) c.evader_speed_one = f.evader_speed_one;
    if (given("--capture-radius")) c.capture_radius = f.capture_radius;
    if (given("--dt")) c.dt = f.dt;
    if (given("--horizon")) c.horizon = f.horizon;
    if (given("--grid-resolution")) c.hybrid.grid_resolution = f.grid_resolution;
    if (given("--alpha")) c.hybrid.alpha = f.alpha;
    if (given("--avoid-radius")) c.hybrid.avoid_radius = f.avoid_radius;
    if (given("--episodes")) c.episodes = f.episodes;
    if (given("--population")) c.nsga2.population_size = f.population;
    if (given("--generations")) c.nsga2.generations = f.generations;
    if (given("--crossover-prob")) c.nsga2.crossover_prob = f.crossover_prob;
    if (given("--sbx-eta")) c.nsga2.sbx_eta = f.sbx_eta;
    if (given("--mutation-eta")) c.nsga2.mutation_eta = f.mutation_eta;
    if (given("--mutation-prob")) c.nsga2.mutation_prob = f.mutation_prob;
    if (given("--evader-samples")) c.evader_samples = f.evader_samples;
    if (given("--batch-size")) c.train.batch_size = f.batch_size;
    if (given("--learning-rate")) c.train.learning_rate = f.learning_rate;
    if (given("--weight-decay")) c.train.weight_decay = f.weight_decay;
    if (given("--epochs")) c.train.epochs = f.epochs;
    if (given("--count")) c.hot_start_count = f.count;
    if (given("--eval-batches")) c.eval_batches = f.eval_batches;
    if (given("--eval-batch-size")) c.eval_batch_size = f.eval_batch_size;
    if (given("--heatmap-resolution")) c.heatmap_resolution = f.heatmap_resolution;
    c.validate();
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hot-start pursuer configurations for pursuit-evasion games"};
    app.require_subcommand(1);

    struct Command {
        std::string name;
        std::string help;
        std::vector<std::string> stages;
    };
    const std::vector<Command> commands{
        {"simulate", "Run episodes under the baseline control laws", {"simulate"}},
        {"build-gfs", "Build Pareto fronts and the graph dataset", {"build-gfs"}},
        {"train", "Train the GCN on the stacked fronts", {"train"}},
        {"generate", "Write hot-start configurations", {"generate"}},
        {"evaluate", "Run paired hot-start vs random-start episodes", {"evaluate"}},
        {"report", "Write survival, log-rank, containment, heatmap and indicator reports", {"report"}},
        {"run-all", "Run every stage in order", hotstart::stage_names()},
    };

    std::vector<Flags> flags(commands.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        auto* sub = app.add_subcommand(commands[i].name, commands[i].help);
        add_flags(*sub, flags[i]);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    for (std::size_t i = 0; i < commands.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        try {
            const PipelineConfig config = resolve(*subs[i], flags[i]);
            hotstart::run_stages(config, commands[i].stages);
            std::cout << commands[i].name << ": wrote " << config.out.string() << '\n';
            return EXIT_SUCCESS;
        } catch (const hotstart::ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return 2;
        } catch (const hotstart::StageDependencyError& e) {
            std::cerr << "stage dependency error: " << e.what() << '\n';
            return 3;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 1;
        }
    }
    return EXIT_FAILURE;
}
