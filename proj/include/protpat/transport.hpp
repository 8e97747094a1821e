#pragma once

// Exact solver for the balanced transportation problem
//
//   minimize   sum_ij x_ij * c_ij
//   subject to sum_j x_ij = supply_i,  sum_i x_ij = demand_j,  x_ij >= 0
//
// by the transportation simplex (u-v potentials on a spanning-tree basis,
// north-west-corner start). With an integral mass type every basic solution
// is integral and the optimum is exact.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace protpat {

template <typename T>
struct TransportFlow {
    std::size_t from = 0;
    std::size_t to = 0;
    T mass{};
};

template <typename T>
struct TransportSolution {
    std::vector<TransportFlow<T>> flows;  // positive entries of the optimal plan
    double objective = 0.0;
    std::size_t pivots = 0;
};

/// `cost(i, j)` returns the unit cost from source i to sink j. Supplies and
/// demands must be non-negative with equal totals (to 1e-9 relative for
/// floating-point masses, exactly for integral ones).
template <typename T, typename Cost>
TransportSolution<T> solve_transport(const std::vector<T>& supply, const std::vector<T>& demand, Cost&& cost)
{
    static_assert(std::is_arithmetic_v<T>);
    T supply_total{}, demand_total{};
    for (T s : supply) {
        if (s < T{}) throw std::invalid_argument("negative supply");
        supply_total += s;
    }
    for (T d : demand) {
        if (d < T{}) throw std::invalid_argument("negative demand");
        demand_total += d;
    }
    if constexpr (std::is_integral_v<T>) {
        if (supply_total != demand_total) throw std::invalid_argument("unbalanced transport problem");
    } else {
        const double scale = std::max<double>({1.0, std::abs(double(supply_total)), std::abs(double(demand_total))});
        if (std::abs(double(supply_total) - double(demand_total)) > 1e-9 * scale)
            throw std::invalid_argument("unbalanced transport problem");
    }

    // Only rows and columns carrying mass take part.
    std::vector<std::size_t> rows, cols;
    for (std::size_t i = 0; i < supply.size(); ++i)
        if (supply[i] > T{}) rows.push_back(i);
    for (std::size_t j = 0; j < demand.size(); ++j)
        if (demand[j] > T{}) cols.push_back(j);

    TransportSolution<T> result;
    if (rows.empty() || cols.empty()) return result;

    const std::size_t m = rows.size(), n = cols.size();
    std::vector<double> c(m * n);
    double max_cost = 0.0;
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t k = 0; k < n; ++k) {
            c[r * n + k] = static_cast<double>(cost(rows[r], cols[k]));
            max_cost = std::max(max_cost, std::abs(c[r * n + k]));
        }

    struct Cell {
        std::size_t r, k;
        T x;
    };
    std::vector<Cell> basis;
    basis.reserve(m + n - 1);
    std::vector<char> is_basic(m * n, 0);

    // North-west corner: exactly m + n - 1 cells, advancing one row or column per step.
    {
        std::vector<T> rs(m), rd(n);
        for (std::size_t r = 0; r < m; ++r) rs[r] = supply[rows[r]];
        for (std::size_t k = 0; k < n; ++k) rd[k] = demand[cols[k]];
        std::size_t r = 0, k = 0;
        while (true) {
            const T x = std::min(rs[r], rd[k]);
            basis.push_back({r, k, x});
            is_basic[r * n + k] = 1;
            if (r == m - 1 && k == n - 1) break;
            const bool row_done = rs[r] <= rd[k];
            rs[r] -= x;
            rd[k] -= x;
            if ((row_done && r < m - 1) || k == n - 1)
                ++r;
            else
                ++k;
        }
    }

    const std::size_t nodes = m + n;  // rows are 0..m-1, columns m..m+n-1
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(nodes);  // (neighbour, basis index)
    std::vector<double> potential(nodes);
    std::vector<std::size_t> parent_node(nodes), parent_cell(nodes), queue;
    std::vector<char> seen(nodes);

    const double eps = 1e-9 * (1.0 + max_cost);
    const std::size_t bland_after = 50 * nodes * nodes + 100;
    const std::size_t max_pivots = bland_after * 4;

    for (;;) {
        for (auto& a : adj) a.clear();
        for (std::size_t b = 0; b < basis.size(); ++b) {
            adj[basis[b].r].push_back({m + basis[b].k, b});
            adj[m + basis[b].k].push_back({basis[b].r, b});
        }

        // Potentials u_r + v_k = c_rk on basic cells, rooted at row 0.
        std::fill(seen.begin(), seen.end(), 0);
        queue.assign(1, 0);
        seen[0] = 1;
        potential[0] = 0.0;
        for (std::size_t q = 0; q < queue.size(); ++q) {
            const std::size_t u = queue[q];
            for (auto [v, b] : adj[u]) {
                if (seen[v]) continue;
                seen[v] = 1;
                potential[v] = c[basis[b].r * n + basis[b].k] - potential[u];
                queue.push_back(v);
            }
        }

        // Entering cell: most negative reduced cost (Bland's first-negative rule
        // after many pivots, to rule out cycling on degenerate bases).
        const bool bland = result.pivots >= bland_after;
        std::size_t enter_r = m, enter_k = n;
        double best = -eps;
        for (std::size_t r = 0; r < m && !(bland && enter_r < m); ++r)
            for (std::size_t k = 0; k < n; ++k) {
                if (is_basic[r * n + k]) continue;
                const double reduced = c[r * n + k] - potential[r] - potential[m + k];
                if (reduced < best) {
                    best = reduced;
                    enter_r = r;
                    enter_k = k;
                    if (bland) break;
                }
            }
        if (enter_r == m) break;
        if (++result.pivots > max_pivots) throw std::runtime_error("transport simplex did not converge");

        // Tree path from the entering row to the entering column.
        std::fill(seen.begin(), seen.end(), 0);
        queue.assign(1, enter_r);
        seen[enter_r] = 1;
        for (std::size_t q = 0; q < queue.size() && !seen[m + enter_k]; ++q) {
            const std::size_t u = queue[q];
            for (auto [v, b] : adj[u]) {
                if (seen[v]) continue;
                seen[v] = 1;
                parent_node[v] = u;
                parent_cell[v] = b;
                queue.push_back(v);
            }
        }
        // Walking back from the column, cells alternate -, +, -, ... ending with -.
        std::vector<std::size_t> minus, plus;
        bool is_minus = true;
        for (std::size_t v = m + enter_k; v != enter_r; v = parent_node[v]) {
            (is_minus ? minus : plus).push_back(parent_cell[v]);
            is_minus = !is_minus;
        }
        std::size_t leaving = minus.front();
        for (std::size_t b : minus)
            if (basis[b].x < basis[leaving].x) leaving = b;
        const T theta = basis[leaving].x;
        for (std::size_t b : plus) basis[b].x += theta;
        for (std::size_t b : minus) basis[b].x -= theta;

        is_basic[basis[leaving].r * n + basis[leaving].k] = 0;
        basis[leaving] = {enter_r, enter_k, theta};
        is_basic[enter_r * n + enter_k] = 1;
    }

    for (const auto& cell : basis) {
        if constexpr (std::is_floating_point_v<T>) {
            if (!(cell.x > T{})) continue;
        } else {
            if (cell.x <= T{}) continue;
        }
        result.flows.push_back({rows[cell.r], cols[cell.k], cell.x});
        result.objective += static_cast<double>(cell.x) * c[cell.r * n + cell.k];
    }
    std::sort(result.flows.begin(), result.flows.end(),
              [](const auto& a, const auto& b) { return a.from != b.from ? a.from < b.from : a.to < b.to; });
    return result;
}

}  // namespace protpat
