#pragma once

// Evader survival: Kaplan-Meier product-limit estimate and the two-sample
// log-rank (Mantel-Haenszel) test.

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hotstart/sim.hpp"
#include "hotstart/stats.hpp"

namespace hotstart {

// One evader: the step it was caught, or the last step it was observed alive.
struct SurvivalRecord {
    double time = 0.0;
    bool event = false;
};

struct SurvivalCurve {
    std::vector<double> times;     // distinct event times, ascending
    std::vector<int> events;       // d_i
    std::vector<int> at_risk;      // n_i
    std::vector<int> censored;     // censored at t_i (still at risk at t_i)
    std::vector<double> survival;  // S(t_i)
    double horizon = 0.0;
    int subjects = 0;

    double at(double t) const {
        double s = 1.0;
        for (std::size_t i = 0; i < times.size() && times[i] <= t; ++i) s = survival[i];
        return s;
    }

    // `time,survival_probability` for t = 0, 1, ..., horizon.
    std::string to_csv() const {
        std::ostringstream out;
        out.precision(10);
        out << "time,survival_probability\n";
        for (int t = 0; t <= static_cast<int>(horizon); ++t) out << t << ',' << at(t) << '\n';
        return out.str();
    }
};

inline SurvivalCurve kaplan_meier(const std::vector<SurvivalRecord>& records, double horizon) {
    for (const auto& r : records) {
        if (r.time < 0.0) throw std::invalid_argument("survival times must be non-negative");
        if (r.time > horizon) throw std::invalid_argument("survival time beyond the horizon");
    }
    // time -> (events, censored); ties at one time form a single event time.
    std::map<double, std::pair<int, int>> table;
    for (const auto& r : records) {
        auto& cell = table[r.time];
        (r.event ? cell.first : cell.second) += 1;
    }
    SurvivalCurve c;
    c.horizon = horizon;
    c.subjects = static_cast<int>(records.size());
    int at_risk = c.subjects;
    double s = 1.0;
    for (const auto& [t, dc] : table) {
        const auto [d, cens] = dc;
        if (d > 0) {
            s *= 1.0 - static_cast<double>(d) / at_risk;
            c.times.push_back(t);
            c.events.push_back(d);
            c.at_risk.push_back(at_risk);
            c.censored.push_back(cens);
            c.survival.push_back(s);
        }
        at_risk -= d + cens;
    }
    return c;
}

struct LogRankResult {
    double chi_square = 0.0;
    double p_value = 1.0;
    double observed_a = 0.0;
    double expected_a = 0.0;
    double variance = 0.0;
    bool degenerate = false;  // no events in either group
};

inline LogRankResult log_rank(const std::vector<SurvivalRecord>& a, const std::vector<SurvivalRecord>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("log-rank needs at least one subject per group");
    std::vector<double> times;
    for (const auto* g : {&a, &b})
        for (const auto& r : *g)
            if (r.event) times.push_back(r.time);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    auto count = [](const std::vector<SurvivalRecord>& g, double t, int& risk, int& died) {
        risk = 0;
        died = 0;
        for (const auto& r : g) {
            if (r.time >= t) ++risk;
            if (r.event && r.time == t) ++died;
        }
    };

    LogRankResult out;
    for (double t : times) {
        int na, da, nb, db;
        count(a, t, na, da);
        count(b, t, nb, db);
        const double n = na + nb;
        const double d = da + db;
        out.observed_a += da;
        out.expected_a += d * na / n;
        if (n > 1.0) out.variance += d * (na / n) * (nb / n) * (n - d) / (n - 1.0);
    }
    if (times.empty() || out.variance <= 0.0) {
        out.degenerate = times.empty();
        return out;
    }
    const double diff = out.observed_a - out.expected_a;
    out.chi_square = diff * diff / out.variance;
    out.p_value = chi_square_sf(out.chi_square, 1.0);
    return out;
}

// One record per evader: capture step, or censored at the horizon.
inline std::vector<SurvivalRecord> survival_records(const EpisodeLog& log) {
    std::vector<SurvivalRecord> out;
    for (int j = 0; j < log.scenario.n_evaders; ++j) {
        if (auto t = log.capture_step(j)) out.push_back({static_cast<double>(*t), true});
        else out.push_back({static_cast<double>(log.scenario.horizon), false});
    }
    return out;
}

} // namespace hotstart
