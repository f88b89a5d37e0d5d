#include "delmdp/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace delmdp {

namespace {

constexpr double kPivot = 1e-11;
constexpr double kZero = 1e-11;

// Tableau simplex over the equality system A z = b, z >= 0, with an explicit
// basis. Bland's rule: entering variable is the lowest-index one with
// negative reduced cost, leaving row breaks ratio ties by the lowest basis
// index. Guarantees termination.
struct Tableau {
    std::size_t m, n;             // rows, total columns (without rhs)
    std::vector<double> a;        // m x (n+1), last column is rhs
    std::vector<double> cost;     // reduced-cost row
    double value = 0.0;           // objective value of the current basis
    std::vector<std::size_t> basis;

    double& at(std::size_t i, std::size_t j) { return a[i * (n + 1) + j]; }
    double rhs(std::size_t i) const { return a[i * (n + 1) + n]; }

    void pivot(std::size_t row, std::size_t col) {
        double inv = 1.0 / at(row, col);
        for (std::size_t j = 0; j <= n; ++j) at(row, j) *= inv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row) continue;
            double f = at(i, col);
            if (std::fabs(f) < kZero) continue;
            for (std::size_t j = 0; j <= n; ++j) at(i, j) -= f * at(row, j);
        }
        double f = cost[col];
        if (f != 0.0) {
            for (std::size_t j = 0; j < n; ++j) cost[j] -= f * at(row, j);
            value += f * rhs(row);  // entering at rhs(row) units changes the objective
        }
        basis[row] = col;
    }

    // Runs to optimality considering only columns < enter_limit for entry.
    // Returns false when the objective is unbounded below.
    bool run(std::size_t enter_limit) {
        for (;;) {
            std::size_t enter = enter_limit;
            for (std::size_t j = 0; j < enter_limit; ++j) {
                if (cost[j] < -kZero) {
                    enter = j;
                    break;  // Bland: lowest index enters
                }
            }
            if (enter == enter_limit) return true;
            std::size_t leave = m;
            double best_ratio = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                double aij = at(i, enter);
                if (aij > kPivot) {
                    double ratio = rhs(i) / aij;
                    if (leave == m || ratio < best_ratio - kZero ||
                        (ratio < best_ratio + kZero && basis[i] < basis[leave])) {
                        leave = i;
                        best_ratio = ratio;
                    }
                }
            }
            if (leave == m) return false;
            pivot(leave, enter);
        }
    }
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
    const std::size_t n = problem.costs.size();
    const std::size_t m = problem.constraint_matrix.size();
    if (problem.rhs.size() != m)
        throw std::invalid_argument("solve_lp: rhs size mismatch");
    for (const auto& row : problem.constraint_matrix)
        if (row.size() != n) throw std::invalid_argument("solve_lp: row size mismatch");
    for (double c : problem.costs)
        if (!std::isfinite(c)) throw std::invalid_argument("solve_lp: non-finite cost");

    // Equality form: G x - s = b with surplus s >= 0, rows flipped so b >= 0,
    // plus one artificial variable per row for phase 1.
    Tableau t;
    t.m = m;
    t.n = n + 2 * m;  // x, surplus, artificial
    t.a.assign(m * (t.n + 1), 0.0);
    t.basis.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        double sign = problem.rhs[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j)
            t.at(i, j) = sign * problem.constraint_matrix[i][j];
        t.at(i, n + i) = -sign;       // surplus
        t.at(i, n + m + i) = 1.0;     // artificial
        t.at(i, t.n) = sign * problem.rhs[i];
        t.basis[i] = n + m + i;
    }

    // Phase 1: minimize the sum of artificials. Reduced costs relative to
    // the artificial basis: -column sums for the real columns.
    t.cost.assign(t.n, 0.0);
    t.value = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n + m; ++j) t.cost[j] -= t.at(i, j);
        t.value += t.rhs(i);
    }
    t.run(n + m);  // bounded below by 0, cannot be unbounded
    if (t.value > 1e-8) return {LpStatus::Infeasible, {}, 0.0};

    // Drive leftover artificials out of the basis; a row without a usable
    // pivot is redundant (rhs ~ 0) and may keep its artificial.
    for (std::size_t i = 0; i < m; ++i) {
        if (t.basis[i] < n + m) continue;
        for (std::size_t j = 0; j < n + m; ++j) {
            if (std::fabs(t.at(i, j)) > kPivot) {
                t.pivot(i, j);
                break;
            }
        }
    }

    // Phase 2: minimize the real objective; artificial columns never enter.
    t.cost.assign(t.n, 0.0);
    t.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) t.cost[j] = problem.costs[j];
    for (std::size_t i = 0; i < m; ++i) {
        double f = t.cost[t.basis[i]];
        if (f != 0.0) {
            for (std::size_t j = 0; j < t.n; ++j) t.cost[j] -= f * t.at(i, j);
            t.value += f * t.rhs(i);
        }
    }
    if (!t.run(n + m)) return {LpStatus::Unbounded, {}, 0.0};

    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (t.basis[i] < n) sol.x[t.basis[i]] = std::max(0.0, t.rhs(i));
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) sol.objective += problem.costs[j] * sol.x[j];
    return sol;
}

std::string to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "?";
}

}  // namespace delmdp
