#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hotstart/sim.hpp"

namespace hotstart {

// Visit counts of pursuer positions on a square grid over the arena.
class Heatmap {
public:
    explicit Heatmap(int resolution = 32) : resolution_(resolution) {
        if (resolution < 8) throw std::invalid_argument("heatmap resolution must be >= 8");
        counts_.assign(static_cast<std::size_t>(resolution) * resolution, 0);
    }

    int resolution() const { return resolution_; }

    // Row = y cell, column = x cell.
    std::uint64_t count(int row, int col) const { return counts_[static_cast<std::size_t>(row) * resolution_ + col]; }

    void add(Vec2 p) {
        ++counts_[static_cast<std::size_t>(cell(p.y)) * resolution_ + cell(p.x)];
    }

    void add(const EpisodeLog& log) {
        for (const auto& rec : log.steps)
            for (const auto& a : rec.pursuers) add(a.position);
    }

    void merge(const Heatmap& o) {
        if (o.resolution_ != resolution_) throw std::invalid_argument("heatmap resolutions differ");
        for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
    }

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (auto c : counts_) t += c;
        return t;
    }

    const std::vector<std::uint64_t>& raw() const { return counts_; }

    // Counts scaled by the busiest cell.
    std::vector<double> density() const {
        const auto mx = *std::max_element(counts_.begin(), counts_.end());
        std::vector<double> out(counts_.size(), 0.0);
        if (mx == 0) return out;
        for (std::size_t i = 0; i < counts_.size(); ++i) out[i] = static_cast<double>(counts_[i]) / static_cast<double>(mx);
        return out;
    }

    std::string to_csv() const {
        const auto d = density();
        std::ostringstream out;
        out.precision(10);
        for (int r = 0; r < resolution_; ++r) {
            for (int c = 0; c < resolution_; ++c) {
                if (c) out << ',';
                out << d[static_cast<std::size_t>(r) * resolution_ + c];
            }
            out << '\n';
        }
        return out.str();
    }

    std::string raw_csv() const {
        std::ostringstream out;
        for (int r = 0; r < resolution_; ++r) {
            for (int c = 0; c < resolution_; ++c) {
                if (c) out << ',';
                out << count(r, c);
            }
            out << '\n';
        }
        return out.str();
    }

    static Heatmap from_raw_csv(const std::string& text) {
        std::vector<std::vector<std::uint64_t>> rows;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<std::uint64_t> row;
            std::istringstream ls(line);
            std::string cellv;
            while (std::getline(ls, cellv, ',')) row.push_back(std::stoull(cellv));
            rows.push_back(std::move(row));
        }
        Heatmap h(static_cast<int>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != rows.size()) throw std::runtime_error("heatmap CSV is not square");
            for (std::size_t c = 0; c < rows.size(); ++c) h.counts_[r * rows.size() + c] = rows[r][c];
        }
        return h;
    }

    // Plain (ASCII) PGM; top row is the largest y.
    std::string to_pgm() const {
        const auto d = density();
        std::ostringstream out;
        out << "P2\n" << resolution_ << ' ' << resolution_ << "\n255\n";
        for (int r = resolution_ - 1; r >= 0; --r) {
            for (int c = 0; c < resolution_; ++c) {
                if (c) out << ' ';
                out << static_cast<int>(std::lround(255.0 * d[static_cast<std::size_t>(r) * resolution_ + c]));
            }
            out << '\n';
        }
        return out.str();
    }

private:
    int cell(double v) const {
        const int k = static_cast<int>(std::floor((clamp_world(v) - kWorldMin) / (kWorldMax - kWorldMin) * resolution_));
        return std::clamp(k, 0, resolution_ - 1);
    }

    int resolution_;
    std::vector<std::uint64_t> counts_;
};

inline Heatmap heatmap_accumulate(const std::vector<EpisodeLog>& logs, int resolution) {
    if (logs.empty()) throw std::invalid_argument("heatmap needs at least one episode log");
    Heatmap h(resolution);
    for (const auto& log : logs) h.add(log);
    return h;
}

} // namespace hotstart
