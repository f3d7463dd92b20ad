#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hotstart {

// Dense row-major cost matrix, rows = pursuers, columns = evaders.
struct CostMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    CostMatrix() = default;
    CostMatrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

struct Assignment {
    static constexpr int kUnassigned = -1;
    std::vector<int> target;  // per pursuer
    double total_cost = 0.0;
};

namespace detail {

// Minimum-cost matching of every row for rows <= cols (shortest augmenting
// path with potentials, O(rows^2 * cols)). Returns the column per row.
inline std::vector<int> solve_rectangular(const CostMatrix& c) {
    const int n = c.rows;
    const int m = c.cols;
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    std::vector<char> used(m + 1);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> col_of_row(n, -1);
    for (int j = 1; j <= m; ++j)
        if (p[j] != 0) col_of_row[p[j] - 1] = j - 1;
    return col_of_row;
}

} // namespace detail

// Minimum-cost pursuer->evader matching. With more pursuers than evaders the
// matrix is padded with a sentinel column per surplus pursuer; those pursuers
// then chase their individually cheapest evader.
inline Assignment hungarian_assign(const CostMatrix& cost) {
    if (cost.rows <= 0 || cost.cols <= 0) throw std::invalid_argument("cost matrix must be non-empty");
    double max_abs = 0.0;
    for (double x : cost.data) {
        if (std::isnan(x)) throw std::invalid_argument("cost matrix contains NaN");
        if (!std::isfinite(x)) throw std::invalid_argument("cost matrix contains a non-finite entry");
        max_abs = std::max(max_abs, std::abs(x));
    }

    Assignment out;
    out.target.assign(static_cast<std::size_t>(cost.rows), Assignment::kUnassigned);

    if (cost.rows <= cost.cols) {
        out.target = detail::solve_rectangular(cost);
    } else {
        const double sentinel = (max_abs + 1.0) * (cost.rows + 1);
        CostMatrix padded(cost.rows, cost.rows, sentinel);
        for (int i = 0; i < cost.rows; ++i)
            for (int j = 0; j < cost.cols; ++j) padded(i, j) = cost(i, j);
        auto cols = detail::solve_rectangular(padded);
        for (int i = 0; i < cost.rows; ++i) {
            if (cols[i] < cost.cols) {
                out.target[i] = cols[i];
                continue;
            }
            int best = 0;
            for (int j = 1; j < cost.cols; ++j)
                if (cost(i, j) < cost(i, best)) best = j;
            out.target[i] = best;
        }
    }

    for (int i = 0; i < cost.rows; ++i)
        if (out.target[i] != Assignment::kUnassigned) out.total_cost += cost(i, out.target[i]);
    return out;
}

} // namespace hotstart
