#pragma once

// Graph convolutional network that maps a pursuer graph to pursuer
// positions, trained so the generated configuration's aggregated utilities
// land near the Pareto front of its game type.
//
// Layer stack 10 -> 64 -> 32 -> 64 -> 2. Every layer aggregates with the
// symmetric-normalised weighted adjacency (self loops added), applies an
// affine map, and ReLU on the hidden layers; the linear output is squashed
// into the arena with tanh.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hotstart/gfs.hpp"
#include "hotstart/indicators.hpp"
#include "hotstart/random.hpp"

namespace hotstart {

inline constexpr std::array<int, 5> kGcnDims{kNodeFeatures, 64, 32, 64, 2};
inline constexpr int kGcnLayers = 4;
inline constexpr int kGcnFormatVersion = 1;

struct GcnLayer {
    Eigen::MatrixXd weight;  // in x out
    Eigen::VectorXd bias;    // out
};

struct GcnModel {
    std::array<GcnLayer, kGcnLayers> layers;
    // Per-feature input range seen in training; generation noise is drawn from it.
    std::array<double, kNodeFeatures> feature_lo{};
    std::array<double, kNodeFeatures> feature_hi{};
    std::uint64_t seed = 0;

    static GcnModel zeros() {
        GcnModel m;
        for (int l = 0; l < kGcnLayers; ++l) {
            m.layers[l].weight = Eigen::MatrixXd::Zero(kGcnDims[l], kGcnDims[l + 1]);
            m.layers[l].bias = Eigen::VectorXd::Zero(kGcnDims[l + 1]);
        }
        m.feature_hi.fill(1.0);
        return m;
    }

    // Glorot-uniform weights, zero biases.
    static GcnModel glorot(std::uint64_t seed) {
        GcnModel m = zeros();
        m.seed = seed;
        Rng rng(seed);
        for (int l = 0; l < kGcnLayers; ++l) {
            const double limit = std::sqrt(6.0 / (kGcnDims[l] + kGcnDims[l + 1]));
            auto& w = m.layers[l].weight;
            for (Eigen::Index r = 0; r < w.rows(); ++r)
                for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = uniform(rng, -limit, limit);
        }
        return m;
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
        return n;
    }

    // Parameters in layer order, weights column-major then biases.
    std::vector<double> flatten() const {
        std::vector<double> out;
        out.reserve(parameter_count());
        for (const auto& l : layers) {
            out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
            out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
        }
        return out;
    }

    void unflatten(const std::vector<double>& p) {
        if (p.size() != parameter_count()) throw std::invalid_argument("parameter vector has the wrong length");
        std::size_t k = 0;
        for (auto& l : layers) {
            std::copy_n(p.begin() + static_cast<std::ptrdiff_t>(k), l.weight.size(), l.weight.data());
            k += static_cast<std::size_t>(l.weight.size());
            std::copy_n(p.begin() + static_cast<std::ptrdiff_t>(k), l.bias.size(), l.bias.data());
            k += static_cast<std::size_t>(l.bias.size());
        }
    }

    bool all_finite() const {
        for (const auto& l : layers)
            if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
        return true;
    }

    bool shapes_valid() const {
        for (int l = 0; l < kGcnLayers; ++l) {
            if (layers[l].weight.rows() != kGcnDims[l] || layers[l].weight.cols() != kGcnDims[l + 1]) return false;
            if (layers[l].bias.size() != kGcnDims[l + 1]) return false;
        }
        return true;
    }

    std::uint64_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (double v : flatten()) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof bits);
            h = fnv1a(std::string_view(reinterpret_cast<const char*>(&bits), sizeof bits), h);
        }
        return h;
    }
};

// D^-1/2 (A + I) D^-1/2 with A the weighted, symmetric edge matrix.
inline Eigen::MatrixXd normalized_adjacency(const ConfigGraph& g) {
    const int n = g.node_count();
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (const auto& e : g.edges) {
        if (e.from < 0 || e.to < 0 || e.from >= n || e.to >= n) throw std::invalid_argument("edge references a missing node");
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) throw std::invalid_argument("edge weights must be positive");
        if (e.from == e.to) continue;
        a(e.from, e.to) += e.weight;
        a(e.to, e.from) += e.weight;
    }
    const Eigen::VectorXd inv_sqrt = a.rowwise().sum().array().rsqrt();
    return inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
}

inline Eigen::MatrixXd node_matrix(const ConfigGraph& g) {
    Eigen::MatrixXd x(g.node_count(), kNodeFeatures);
    for (int i = 0; i < g.node_count(); ++i)
        for (int k = 0; k < kNodeFeatures; ++k) x(i, k) = g.nodes[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    return x;
}

struct GcnTrace {
    Eigen::MatrixXd adjacency;
    std::array<Eigen::MatrixXd, kGcnLayers> aggregated;  // A_hat * H_l
    std::array<Eigen::MatrixXd, kGcnLayers> pre;          // pre-activations
    Eigen::MatrixXd positions;                           // n x 2, in (-1, 1)
};

inline GcnTrace gcn_forward_trace(const GcnModel& model, const ConfigGraph& graph) {
    if (graph.node_count() < 1) throw std::invalid_argument("graph has no nodes");
    if (!model.shapes_valid()) throw std::invalid_argument("model layer shapes do not match 10-64-32-64-2");
    GcnTrace t;
    t.adjacency = normalized_adjacency(graph);
    Eigen::MatrixXd h = node_matrix(graph);
    for (int l = 0; l < kGcnLayers; ++l) {
        t.aggregated[l] = t.adjacency * h;
        t.pre[l] = (t.aggregated[l] * model.layers[l].weight).rowwise() + model.layers[l].bias.transpose();
        if (l + 1 < kGcnLayers) h = t.pre[l].cwiseMax(0.0);
    }
    t.positions = t.pre[kGcnLayers - 1].array().tanh().matrix();
    return t;
}

inline Eigen::MatrixXd gcn_forward(const GcnModel& model, const ConfigGraph& graph) {
    return gcn_forward_trace(model, graph).positions;
}

// Accumulates d loss / d parameters into `grad` given d loss / d positions.
inline void gcn_backward(const GcnModel& model, const GcnTrace& t, const Eigen::MatrixXd& d_positions, GcnModel& grad) {
    Eigen::MatrixXd dz = d_positions.cwiseProduct((1.0 - t.positions.array().square()).matrix());
    for (int l = kGcnLayers - 1; l >= 0; --l) {
        grad.layers[l].weight += t.aggregated[l].transpose() * dz;
        grad.layers[l].bias += dz.colwise().sum().transpose();
        if (l == 0) break;
        const Eigen::MatrixXd dh = t.adjacency.transpose() * (dz * model.layers[l].weight.transpose());
        dz = dh.cwiseProduct((t.pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
}

// ---------------------------------------------------------------------------
// Pareto loss

struct ParetoLoss {
    double value = 0.0;
    std::size_t nearest = 0;
};

// Distance from y to the nearest front member (lowest index on ties).
inline ParetoLoss pareto_loss(const FeatureVector& y, std::span<const FeatureVector> front) {
    if (front.empty()) throw std::invalid_argument("pareto loss needs a non-empty front");
    ParetoLoss best{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t j = 0; j < front.size(); ++j) {
        const double dc = y.capture - front[j].capture;
        const double dd = y.distance - front[j].distance;
        const double dh = y.heading - front[j].heading;
        const double d = std::sqrt(dc * dc + dd * dd + dh * dh);
        if (d < best.value) best = {d, j};
    }
    return best;
}

inline ParetoLoss pareto_loss(const FeatureVector& y, const ParetoFront& front) {
    const auto fv = front.feature_vectors();
    return pareto_loss(y, fv);
}

// Everything needed to score generated positions for one game type.
struct GameContext {
    GameType game;
    EvaderSamples samples;
    std::vector<FeatureVector> front;
    double capture_radius = 0.1;
    double speed = 1.0;
};

inline std::vector<Vec2> to_positions(const Eigen::MatrixXd& m) {
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back({m(i, 0), m(i, 1)});
    return out;
}

struct PositionLoss {
    double value = 0.0;
    FeatureVector features;
    Eigen::MatrixXd d_positions;  // n x 2
};

inline PositionLoss position_loss(std::span<const Vec2> positions, const GameContext& ctx) {
    const FeatureJacobian fj = features_with_jacobian(positions, ctx.capture_radius, ctx.speed, ctx.samples);
    const ParetoLoss pl = pareto_loss(fj.features, ctx.front);
    PositionLoss out;
    out.value = pl.value;
    out.features = fj.features;
    out.d_positions = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(positions.size()), 2);
    if (pl.value <= 0.0) return out;
    const auto y = fj.features.values();
    const auto p = ctx.front[pl.nearest].values();
    for (std::size_t q = 0; q < 2 * positions.size(); ++q) {
        double g = 0.0;
        for (int k = 0; k < 3; ++k) g += (y[k] - p[k]) / pl.value * fj.jacobian[k][q];
        out.d_positions(static_cast<Eigen::Index>(q / 2), static_cast<Eigen::Index>(q % 2)) = g;
    }
    return out;
}

// Loss of one graph and its parameter gradient (accumulated into `grad`).
inline PositionLoss graph_loss(const GcnModel& model, const ConfigGraph& graph, const GameContext& ctx,
                               GcnModel* grad) {
    const GcnTrace t = gcn_forward_trace(model, graph);
    const auto pos = to_positions(t.positions);
    PositionLoss pl = position_loss(pos, ctx);
    if (grad) gcn_backward(model, t, pl.d_positions, *grad);
    return pl;
}

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
    int batch_size = 1024;
    double learning_rate = 1e-4;
    double weight_decay = 1e-2;
    int epochs = 150;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;

    void validate() const {
        if (batch_size < 1) throw ConfigError("batch size must be positive");
        if (learning_rate < 0.0 || weight_decay < 0.0) throw ConfigError("learning rate and weight decay must be >= 0");
        if (epochs < 1) throw ConfigError("training needs at least one epoch");
        if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("Adam betas must lie in [0, 1)");
    }
};

struct EpochStats {
    int epoch = 0;
    double loss = 0.0;  // mean Pareto loss over the epoch's graphs
    double gd = 0.0;
    double gd_plus = 0.0;
    double igd = 0.0;
    double igd_plus = 0.0;
    double hypervolume = 0.0;
};

struct TrainResult {
    GcnModel model;
    std::vector<EpochStats> trace;
};

// Feature vectors as unit-box minimisation points.
inline PointSet unit_points(std::span<const FeatureVector> fv) {
    PointSet out;
    out.reserve(fv.size());
    for (const auto& f : fv) {
        const auto u = f.unit_objectives();
        out.push_back({u[0], u[1], u[2]});
    }
    return out;
}

inline const Point& unit_reference() {
    static const Point ref{1.0, 1.0, 1.0};
    return ref;
}

inline void record_feature_ranges(GcnModel& model, const std::vector<ConfigGraph>& data) {
    model.feature_lo.fill(std::numeric_limits<double>::infinity());
    model.feature_hi.fill(-std::numeric_limits<double>::infinity());
    for (const auto& g : data)
        for (const auto& row : g.nodes)
            for (int k = 0; k < kNodeFeatures; ++k) {
                model.feature_lo[k] = std::min(model.feature_lo[k], row[k]);
                model.feature_hi[k] = std::max(model.feature_hi[k], row[k]);
            }
}

class AdamW {
public:
    AdamW(std::size_t n, const TrainConfig& cfg) : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

    void step(std::vector<double>& params, const std::vector<double>& grad) {
        ++t_;
        const double c1 = 1.0 - std::pow(cfg_.beta1, t_);
        const double c2 = 1.0 - std::pow(cfg_.beta2, t_);
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
            v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
            const double mhat = m_[i] / c1;
            const double vhat = v_[i] / c2;
            params[i] -= cfg_.learning_rate * (mhat / (std::sqrt(vhat) + cfg_.adam_eps) + cfg_.weight_decay * params[i]);
        }
    }

private:
    TrainConfig cfg_;
    std::vector<double> m_, v_;
    int t_ = 0;
};

inline TrainResult train(const std::vector<ConfigGraph>& dataset, const std::map<GameType, GameContext>& contexts,
                         const TrainConfig& cfg, const GcnModel* initial = nullptr) {
    cfg.validate();
    if (dataset.empty()) throw std::invalid_argument("training dataset is empty");
    for (const auto& g : dataset) {
        const auto it = contexts.find(g.game_type);
        if (it == contexts.end() || it->second.front.empty())
            throw std::invalid_argument("no Pareto front for game type " + g.game_type.name());
    }

    TrainResult result;
    result.model = initial ? *initial : GcnModel::glorot(derive_seed(cfg.seed, 1));
    record_feature_ranges(result.model, dataset);

    std::vector<FeatureVector> all_front;
    for (const auto& [game, ctx] : contexts) all_front.insert(all_front.end(), ctx.front.begin(), ctx.front.end());
    const PointSet front_points = unit_points(all_front);

    std::vector<double> params = result.model.flatten();
    AdamW adam(params.size(), cfg);
    Rng order_rng(derive_seed(cfg.seed, 2));
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        // Fisher-Yates with the portable uniform index.
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(order_rng, i)]);

        double loss_sum = 0.0;
        std::vector<FeatureVector> generated;
        generated.reserve(dataset.size());
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            GcnModel grad = GcnModel::zeros();
            result.model.unflatten(params);
            for (std::size_t b = start; b < stop; ++b) {
                const auto& g = dataset[order[b]];
                const PositionLoss pl = graph_loss(result.model, g, contexts.at(g.game_type), &grad);
                loss_sum += pl.value;
                generated.push_back(pl.features);
            }
            std::vector<double> gvec = grad.flatten();
            const double scale = 1.0 / static_cast<double>(stop - start);
            for (double& x : gvec) x *= scale;
            adam.step(params, gvec);
        }
        result.model.unflatten(params);

        EpochStats s;
        s.epoch = epoch;
        s.loss = loss_sum / static_cast<double>(dataset.size());
        const PointSet gen_points = unit_points(generated);
        s.gd = gd(gen_points, front_points);
        s.gd_plus = gd_plus(gen_points, front_points);
        s.igd = igd(gen_points, front_points);
        s.igd_plus = igd_plus(gen_points, front_points);
        s.hypervolume = hypervolume(gen_points, unit_reference());
        result.trace.push_back(s);
    }
    if (!result.model.all_finite()) throw std::runtime_error("training diverged: non-finite parameters");
    return result;
}

// ---------------------------------------------------------------------------
// Hot starts

struct HotStart {
    std::vector<Vec2> positions;
    std::vector<double> headings;
    GameType game_type;
    std::uint64_t model_hash = 0;
    std::uint64_t seed = 0;
};

// Edges of the generation-time input graph.
enum class NoiseEdges {
    // Mean-distance rule with 1/d weights applied to the noise x, y channels.
    MeanDistance,
    // Every pair, unit weight. The normalised adjacency is then uniform, so every
    // node receives the same aggregate and all pursuers land on one point.
    Complete,
};

// Node rows are uniform noise over the model's training feature ranges.
inline ConfigGraph noise_graph(const GcnModel& model, GameType game, Rng& rng,
                               NoiseEdges edges = NoiseEdges::MeanDistance) {
    ConfigGraph g;
    g.game_type = game;
    for (int i = 0; i < game.pursuers; ++i) {
        std::array<double, kNodeFeatures> row{};
        for (int k = 0; k < kNodeFeatures; ++k) {
            const double lo = model.feature_lo[k];
            const double hi = std::max(model.feature_hi[k], lo);
            row[k] = uniform(rng, lo, hi);
        }
        g.nodes.push_back(row);
    }
    if (edges == NoiseEdges::Complete) {
        for (int i = 0; i < game.pursuers; ++i)
            for (int j = i + 1; j < game.pursuers; ++j) g.edges.push_back({i, j, 1.0});
        return g;
    }
    std::vector<Vec2> pts;
    for (const auto& row : g.nodes) pts.push_back({row[6], row[7]});
    g.edges = pp_edges(pts);
    return g;
}

inline double heading_toward_origin(Vec2 p) { return std::atan2(-p.y, -p.x); }

inline std::vector<HotStart> generate_hot_starts(const GcnModel& model, GameType game, int count, std::uint64_t seed,
                                                 NoiseEdges edges = NoiseEdges::MeanDistance) {
    if (game.pursuers < kMinPursuers || game.pursuers > kMaxPursuers)
        throw ConfigError("hot starts support 2 to 5 pursuers");
    if (count < 1) throw ConfigError("hot start count must be positive");
    Rng rng(seed);
    const std::uint64_t h = model.hash();
    std::vector<HotStart> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int s = 0; s < count; ++s) {
        const ConfigGraph g = noise_graph(model, game, rng, edges);
        const auto pos = to_positions(gcn_forward(model, g));
        HotStart hs;
        hs.game_type = game;
        hs.model_hash = h;
        hs.seed = seed;
        for (Vec2 p : pos) {
            const Vec2 c = clamp_world(p);
            hs.positions.push_back(c);
            hs.headings.push_back(heading_toward_origin(c));
        }
        out.push_back(std::move(hs));
    }
    return out;
}

inline std::string hot_start_csv_header() { return "game_type,sample_id,pursuer_id,x,y,heading\n"; }

inline std::string hot_starts_to_csv_rows(const std::vector<HotStart>& starts) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t s = 0; s < starts.size(); ++s)
        for (std::size_t i = 0; i < starts[s].positions.size(); ++i)
            out << starts[s].game_type.name() << ',' << s << ',' << i << ',' << starts[s].positions[i].x << ','
                << starts[s].positions[i].y << ',' << starts[s].headings[i] << '\n';
    return out.str();
}

// Groups rows by (game_type, sample_id) in file order.
inline std::map<GameType, std::vector<HotStart>> hot_starts_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line + "\n" != hot_start_csv_header())
        throw std::runtime_error("hot start CSV has an unexpected header");
    std::map<GameType, std::vector<HotStart>> out;
    std::map<std::pair<GameType, long>, std::size_t> slot;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 6) throw std::runtime_error("malformed hot start row: " + line);
        const GameType g = GameType::parse(f[0]);
        const long sample = std::stol(f[1]);
        auto& list = out[g];
        auto [it, fresh] = slot.try_emplace({g, sample}, list.size());
        if (fresh) {
            list.emplace_back();
            list.back().game_type = g;
        }
        auto& hs = list[it->second];
        hs.positions.push_back({std::stod(f[3]), std::stod(f[4])});
        hs.headings.push_back(std::stod(f[5]));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Model files

inline nlohmann::json to_json(const GcnModel& m) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : m.layers) {
        nlohmann::json w = nlohmann::json::array();
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
            std::vector<double> row(static_cast<std::size_t>(l.weight.cols()));
            for (Eigen::Index c = 0; c < l.weight.cols(); ++c) row[static_cast<std::size_t>(c)] = l.weight(r, c);
            w.push_back(row);
        }
        layers.push_back({{"shape", {l.weight.rows(), l.weight.cols()}},
                          {"weight", w},
                          {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
    }
    return {{"format", "hotstart-gcn"},
            {"version", kGcnFormatVersion},
            {"dims", kGcnDims},
            {"adjacency", "sym-norm-self-loops"},
            {"seed", m.seed},
            {"feature_lo", m.feature_lo},
            {"feature_hi", m.feature_hi},
            {"layers", layers}};
}

inline GcnModel gcn_model_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "hotstart-gcn") throw std::runtime_error("not a hotstart GCN model file");
    if (j.at("version").get<int>() != kGcnFormatVersion) throw std::runtime_error("unsupported model file version");
    GcnModel m = GcnModel::zeros();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.feature_lo = j.at("feature_lo").get<std::array<double, kNodeFeatures>>();
    m.feature_hi = j.at("feature_hi").get<std::array<double, kNodeFeatures>>();
    const auto& layers = j.at("layers");
    if (layers.size() != kGcnLayers) throw std::runtime_error("model file has the wrong number of layers");
    for (int l = 0; l < kGcnLayers; ++l) {
        const auto& lj = layers[static_cast<std::size_t>(l)];
        const auto w = lj.at("weight").get<std::vector<std::vector<double>>>();
        const auto b = lj.at("bias").get<std::vector<double>>();
        if (static_cast<int>(w.size()) != kGcnDims[l] || static_cast<int>(b.size()) != kGcnDims[l + 1])
            throw std::runtime_error("model layer shape mismatch");
        for (int r = 0; r < kGcnDims[l]; ++r) {
            if (static_cast<int>(w[r].size()) != kGcnDims[l + 1]) throw std::runtime_error("model layer shape mismatch");
            for (int c = 0; c < kGcnDims[l + 1]; ++c) m.layers[l].weight(r, c) = w[r][c];
        }
        for (int c = 0; c < kGcnDims[l + 1]; ++c) m.layers[l].bias(c) = b[static_cast<std::size_t>(c)];
    }
    return m;
}

} // namespace hotstart
