// Test-only oracles, kept independent of the library's solver paths:
// exhaustive policy enumeration with its own stationary-distribution solve,
// vertex-enumeration LP, and a plain Monte-Carlo episode simulator.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "delmdp/lp.hpp"
#include "delmdp/mdp.hpp"

namespace oracle {

// Local Gaussian elimination (deliberately separate from the library's).
inline std::vector<double> solve_square(std::vector<double> A, std::vector<double> b) {
    std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(A[i * n + k]) > std::fabs(A[piv * n + k])) piv = i;
        if (std::fabs(A[piv * n + k]) < 1e-12) throw std::runtime_error("oracle: singular");
        for (std::size_t j = 0; j < n; ++j) std::swap(A[k * n + j], A[piv * n + j]);
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = A[i * n + k] / A[k * n + k];
            for (std::size_t j = k; j < n; ++j) A[i * n + j] -= f * A[k * n + j];
            b[i] -= f * b[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = k + 1; j < n; ++j) b[k] -= A[k * n + j] * b[j];
        b[k] /= A[k * n + k];
    }
    return b;
}

// Gain of a deterministic policy via its stationary distribution.
inline double policy_gain(const delmdp::Mdp& mdp, const std::vector<std::size_t>& f) {
    std::size_t S = mdp.num_states;
    std::vector<double> A(S * S, 0.0), b(S, 0.0);
    for (std::size_t y = 0; y < S; ++y)
        for (std::size_t x = 0; x < S; ++x)
            A[y * S + x] = mdp.p(x, f[x], y) - (x == y ? 1.0 : 0.0);
    for (std::size_t x = 0; x < S; ++x) A[(S - 1) * S + x] = 1.0;
    b[S - 1] = 1.0;
    auto pi = solve_square(std::move(A), std::move(b));
    double g = 0.0;
    for (std::size_t x = 0; x < S; ++x) g += pi[x] * mdp.r(x, f[x]);
    return g;
}

// Best gain over all A^S deterministic policies.
inline double best_gain_enumerated(const delmdp::Mdp& mdp) {
    std::size_t S = mdp.num_states, A = mdp.num_actions;
    std::vector<std::size_t> f(S, 0);
    double best = -1e300;
    for (;;) {
        best = std::max(best, policy_gain(mdp, f));
        std::size_t i = 0;
        while (i < S && ++f[i] == A) f[i++] = 0;
        if (i == S) break;
    }
    return best;
}

// Vertex enumeration for min c.x st G x >= b, x >= 0. Complete for problems
// with a bounded-below objective over a pointed feasible region (always the
// case for c >= 0), which is what the generated instances use.
struct VertexLpResult {
    delmdp::LpStatus status = delmdp::LpStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
};

inline VertexLpResult vertex_lp(const delmdp::LpProblem& p) {
    std::size_t n = p.costs.size(), m = p.constraint_matrix.size();
    VertexLpResult best;
    std::size_t total = m + n;  // constraint hyperplanes then axis hyperplanes
    std::vector<std::size_t> pick(n);
    // iterate all n-subsets of {0..total-1}
    for (std::size_t i = 0; i < n; ++i) pick[i] = i;
    if (n > total) return best;
    for (;;) {
        std::vector<double> A(n * n), b(n);
        for (std::size_t r = 0; r < n; ++r) {
            std::size_t h = pick[r];
            if (h < m) {
                for (std::size_t j = 0; j < n; ++j) A[r * n + j] = p.constraint_matrix[h][j];
                b[r] = p.rhs[h];
            } else {
                for (std::size_t j = 0; j < n; ++j) A[r * n + j] = 0.0;
                A[r * n + (h - m)] = 1.0;
                b[r] = 0.0;
            }
        }
        try {
            auto x = solve_square(std::move(A), std::move(b));
            bool feasible = true;
            for (std::size_t j = 0; j < n && feasible; ++j)
                if (x[j] < -1e-9) feasible = false;
            for (std::size_t i = 0; i < m && feasible; ++i) {
                double lhs = 0.0;
                for (std::size_t j = 0; j < n; ++j) lhs += p.constraint_matrix[i][j] * x[j];
                if (lhs < p.rhs[i] - 1e-7) feasible = false;
            }
            if (feasible) {
                double obj = 0.0;
                for (std::size_t j = 0; j < n; ++j) obj += p.costs[j] * x[j];
                if (best.status != delmdp::LpStatus::Optimal || obj < best.objective) {
                    best.status = delmdp::LpStatus::Optimal;
                    best.objective = obj;
                    best.x = x;
                }
            }
        } catch (const std::runtime_error&) {
            // singular pick, skip
        }
        // next combination
        std::size_t i = n;
        while (i > 0) {
            --i;
            if (pick[i] != i + total - n) {
                ++pick[i];
                for (std::size_t j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
                break;
            }
            if (i == 0) return best;
        }
        if (n == 0) return best;
    }
}

// Independent uniform-random-policy episode: returns the pseudo-regret
// sum N_T(x,a) delta(x,a) computed against the supplied gap values.
inline double mc_uniform_pseudo_regret(const delmdp::Mdp& mdp,
                                       const std::vector<double>& delta, std::uint64_t T,
                                       std::uint32_t seed) {
    std::mt19937 rng(seed);
    auto unif = [&rng]() { return (rng() >> 8) * 0x1.0p-24; };
    std::size_t S = mdp.num_states, A = mdp.num_actions;
    std::size_t x = 0;
    double pr = 0.0;
    for (std::uint64_t t = 0; t < T; ++t) {
        std::size_t a = std::min<std::size_t>(A - 1, static_cast<std::size_t>(unif() * A));
        pr += delta[x * A + a];
        double u = unif(), acc = 0.0;
        std::size_t y = S - 1;
        for (std::size_t cand = 0; cand < S; ++cand) {
            acc += mdp.p(x, a, cand);
            if (u < acc) {
                y = cand;
                break;
            }
        }
        x = y;
    }
    return pr;
}

}  // namespace oracle
