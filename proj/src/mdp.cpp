#include "delmdp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>

namespace delmdp {

namespace {

constexpr double kPivotTol = 1e-11;

// Dense Gaussian elimination with partial pivoting. A is n x n row-major,
// b length n; solution overwrites b. Throws ReducibleChainError on a
// vanishing pivot (the planning systems are singular exactly when the
// underlying chain structure is degenerate).
void solve_dense(std::vector<double>& A, std::vector<double>& b, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::fabs(A[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            double v = std::fabs(A[i * n + k]);
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best < kPivotTol)
            throw ReducibleChainError("singular linear system (pivot " +
                                      std::to_string(best) + " at column " +
                                      std::to_string(k) + ")");
        if (piv != k) {
            for (std::size_t j = k; j < n; ++j) std::swap(A[k * n + j], A[piv * n + j]);
            std::swap(b[k], b[piv]);
        }
        const double inv = 1.0 / A[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = A[i * n + k] * inv;
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) A[i * n + j] -= f * A[k * n + j];
            b[i] -= f * b[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= A[k * n + j] * b[j];
        b[k] = s / A[k * n + k];
    }
}

// Forward/backward reachability intersection: the strongly connected
// component of `root` in the graph given by an adjacency callback.
template <typename Succ, typename Pred>
std::vector<bool> scc_of(std::size_t n, std::size_t root, Succ succ, Pred pred) {
    auto bfs = [n](std::size_t start, auto&& next) {
        std::vector<bool> seen(n, false);
        std::deque<std::size_t> q{start};
        seen[start] = true;
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop_front();
            next(u, [&](std::size_t v) {
                if (!seen[v]) {
                    seen[v] = true;
                    q.push_back(v);
                }
            });
        }
        return seen;
    };
    auto fwd = bfs(root, succ);
    auto bwd = bfs(root, pred);
    std::vector<bool> in(n, false);
    for (std::size_t i = 0; i < n; ++i) in[i] = fwd[i] && bwd[i];
    return in;
}

bool strongly_connected(const std::vector<std::vector<bool>>& adj) {
    std::size_t n = adj.size();
    auto in = scc_of(
        n, 0,
        [&](std::size_t u, auto&& visit) {
            for (std::size_t v = 0; v < n; ++v)
                if (adj[u][v]) visit(v);
        },
        [&](std::size_t u, auto&& visit) {
            for (std::size_t v = 0; v < n; ++v)
                if (adj[v][u]) visit(v);
        });
    return std::all_of(in.begin(), in.end(), [](bool b) { return b; });
}

bool policy_irreducible(const Mdp& mdp, const Policy& f) {
    std::size_t S = mdp.num_states;
    std::vector<std::vector<bool>> adj(S, std::vector<bool>(S, false));
    for (State x = 0; x < S; ++x) {
        const double* row = mdp.row(x, f.action_of[x]);
        for (State y = 0; y < S; ++y) adj[x][y] = row[y] > 0.0;
    }
    return strongly_connected(adj);
}

// Restricted planning works on a subset of states with per-state allowed
// action sets; `states` holds global indices, `allowed` parallel action sets.
struct SubSpace {
    std::vector<State> states;
    std::vector<std::vector<Action>> allowed;
};

double bellman_local(const Mdp& mdp, const SubSpace& sub, const std::vector<double>& h,
                     std::size_t xi, Action a) {
    State x = sub.states[xi];
    double v = mdp.r(x, a);
    const double* row = mdp.row(x, a);
    for (std::size_t yi = 0; yi < sub.states.size(); ++yi)
        v += row[sub.states[yi]] * h[yi];
    return v;
}

// Evaluation equation on the subspace: g + h(x) = (B^{f(x)} h)(x), h(ref)=0.
// Unknowns are [g, h(x) for x != ref]; rows x of the subspace.
std::pair<double, std::vector<double>> evaluate_local(const Mdp& mdp, const SubSpace& sub,
                                                      const std::vector<Action>& f,
                                                      std::size_t ref_local) {
    std::size_t n = sub.states.size();
    auto col_of = [&](std::size_t xi) {
        return 1 + (xi < ref_local ? xi : xi - 1);
    };
    std::vector<double> A(n * n, 0.0), b(n, 0.0);
    for (std::size_t xi = 0; xi < n; ++xi) {
        State x = sub.states[xi];
        const double* row = mdp.row(x, f[xi]);
        A[xi * n + 0] = 1.0;  // g
        if (xi != ref_local) A[xi * n + col_of(xi)] += 1.0;
        for (std::size_t yi = 0; yi < n; ++yi) {
            if (yi == ref_local) continue;
            A[xi * n + col_of(yi)] -= row[sub.states[yi]];
        }
        b[xi] = mdp.r(x, f[xi]);
    }
    solve_dense(A, b, n);
    std::vector<double> h(n, 0.0);
    for (std::size_t xi = 0; xi < n; ++xi)
        if (xi != ref_local) h[xi] = b[col_of(xi)];
    return {b[0], std::move(h)};
}

struct LocalSolution {
    double gain = 0.0;
    std::vector<double> bias;
    std::vector<Action> policy;
};

// Howard policy iteration on a subspace. Improvement is accepted only when
// the Bellman advantage exceeds kTieTol; ties go to the lowest action index.
LocalSolution policy_iteration(const Mdp& mdp, const SubSpace& sub, std::size_t ref_local,
                               const std::vector<Action>* warm_start) {
    std::size_t n = sub.states.size();
    std::vector<Action> f(n);
    for (std::size_t xi = 0; xi < n; ++xi) {
        const auto& acts = sub.allowed[xi];
        Action best = acts.front();
        for (Action a : acts)
            if (mdp.r(sub.states[xi], a) > mdp.r(sub.states[xi], best) + kTieTol) best = a;
        f[xi] = best;
    }
    if (warm_start) {
        for (std::size_t xi = 0; xi < n; ++xi) {
            Action w = (*warm_start)[xi];
            const auto& acts = sub.allowed[xi];
            if (std::find(acts.begin(), acts.end(), w) != acts.end()) f[xi] = w;
        }
    }

    constexpr int kMaxIters = 10000;
    double last_residual = kInf;
    for (int it = 0; it < kMaxIters; ++it) {
        auto [g, h] = evaluate_local(mdp, sub, f, ref_local);
        bool improved = false;
        last_residual = 0.0;
        for (std::size_t xi = 0; xi < n; ++xi) {
            const auto& acts = sub.allowed[xi];
            double cur = bellman_local(mdp, sub, h, xi, f[xi]);
            double vmax = cur;
            for (Action a : acts) vmax = std::max(vmax, bellman_local(mdp, sub, h, xi, a));
            last_residual = std::max(last_residual, vmax - cur);
            if (vmax > cur + kTieTol) {
                for (Action a : acts) {
                    if (bellman_local(mdp, sub, h, xi, a) >= vmax - kTieTol) {
                        f[xi] = a;
                        break;
                    }
                }
                improved = true;
            }
        }
        if (!improved) return {g, std::move(h), std::move(f)};
    }
    throw PlanningError("policy iteration did not converge (last residual " +
                        std::to_string(last_residual) + ")");
}

SubSpace full_space(std::size_t S, const Correspondence& C) {
    SubSpace sub;
    sub.states.resize(S);
    std::iota(sub.states.begin(), sub.states.end(), State{0});
    sub.allowed = C.allowed;
    return sub;
}

// Communicating component of `ref` under the restriction: iteratively keep
// only actions whose support stays inside the candidate set and shrink to
// the strongly connected component of ref.
SubSpace communicating_component(const Mdp& mdp, const Correspondence& C, State ref) {
    std::size_t S = mdp.num_states;
    std::vector<bool> in(S, true);
    for (;;) {
        std::vector<std::vector<Action>> allowed(S);
        for (State x = 0; x < S; ++x) {
            if (!in[x]) continue;
            for (Action a : C.allowed[x]) {
                const double* row = mdp.row(x, a);
                bool closed = true;
                for (State y = 0; y < S && closed; ++y)
                    if (row[y] > 0.0 && !in[y]) closed = false;
                if (closed) allowed[x].push_back(a);
            }
        }
        if (allowed[ref].empty())
            throw PlanningError("restricted MDP degenerate: no closed action at ref state");
        auto succ = [&](std::size_t u, auto&& visit) {
            for (Action a : allowed[u]) {
                const double* row = mdp.row(u, a);
                for (State y = 0; y < S; ++y)
                    if (row[y] > 0.0 && in[y]) visit(y);
            }
        };
        auto pred = [&](std::size_t u, auto&& visit) {
            for (State x = 0; x < S; ++x) {
                if (!in[x]) continue;
                for (Action a : allowed[x]) {
                    if (mdp.p(x, a, u) > 0.0) {
                        visit(x);
                        break;
                    }
                }
            }
        };
        auto comp = scc_of(S, ref, succ, pred);
        std::vector<bool> next(S, false);
        for (State x = 0; x < S; ++x) next[x] = in[x] && comp[x] && !allowed[x].empty();
        if (!next[ref]) throw PlanningError("restricted MDP degenerate at ref state");
        if (next == in) {
            SubSpace sub;
            for (State x = 0; x < S; ++x)
                if (in[x]) {
                    sub.states.push_back(x);
                    sub.allowed.push_back(std::move(allowed[x]));
                }
            return sub;
        }
        in = std::move(next);
    }
}

}  // namespace

ValidationReport validate_mdp(const Mdp& mdp) {
    ValidationReport rep;
    std::size_t S = mdp.num_states, A = mdp.num_actions;
    char buf[160];
    if (S < 1 || A < 1) {
        rep.violations.push_back("num_states and num_actions must be >= 1");
        return rep;
    }
    if (mdp.transitions.size() != S * A * S)
        rep.violations.push_back("transitions table has wrong size");
    if (mdp.reward_means.size() != S * A)
        rep.violations.push_back("reward_means table has wrong size");
    if (!rep.violations.empty()) return rep;

    for (State x = 0; x < S; ++x) {
        for (Action a = 0; a < A; ++a) {
            double sum = 0.0;
            for (State y = 0; y < S; ++y) {
                double p = mdp.p(x, a, y);
                if (p < 0.0 || p > 1.0) {
                    std::snprintf(buf, sizeof buf,
                                  "transition p(%zu|%zu,%zu) = %g outside [0,1]", y, x, a, p);
                    rep.violations.emplace_back(buf);
                }
                sum += p;
            }
            if (std::fabs(sum - 1.0) > kRowSumTol) {
                std::snprintf(buf, sizeof buf, "transition row (x=%zu,a=%zu) sums to %.15g",
                              x, a, sum);
                rep.violations.emplace_back(buf);
            }
            double r = mdp.r(x, a);
            if (r < 0.0 || r > 1.0) {
                std::snprintf(buf, sizeof buf, "reward mean r(%zu,%zu) = %g outside [0,1]",
                              x, a, r);
                rep.violations.emplace_back(buf);
            }
        }
    }
    if (!mdp.state_embedding.empty()) {
        if (mdp.state_embedding.size() != S)
            rep.violations.push_back("state_embedding must have one row per state");
        else
            for (std::size_t i = 1; i < S; ++i)
                if (mdp.state_embedding[i].size() != mdp.state_embedding[0].size()) {
                    rep.violations.push_back("state_embedding rows have mixed dimensions");
                    break;
                }
    }
    if (!mdp.action_embedding.empty()) {
        if (mdp.action_embedding.size() != A)
            rep.violations.push_back("action_embedding must have one row per action");
        else
            for (std::size_t i = 1; i < A; ++i)
                if (mdp.action_embedding[i].size() != mdp.action_embedding[0].size()) {
                    rep.violations.push_back("action_embedding rows have mixed dimensions");
                    break;
                }
    }
    if (!rep.violations.empty()) return rep;

    // Sufficient test: the graph whose edge (x,y) requires p(y|x,a) > 0 for
    // every action is contained in each policy's chain.
    std::vector<std::vector<bool>> common(S, std::vector<bool>(S, true));
    for (State x = 0; x < S; ++x)
        for (State y = 0; y < S; ++y)
            for (Action a = 0; a < A; ++a)
                if (mdp.p(x, a, y) <= 0.0) {
                    common[x][y] = false;
                    break;
                }
    if (strongly_connected(common)) {
        rep.ergodicity = ErgodicityVerdict::ProvenErgodic;
        return rep;
    }

    double n_policies = std::pow(static_cast<double>(A), static_cast<double>(S));
    if (n_policies <= 1024.0) {
        Policy f;
        f.action_of.assign(S, 0);
        for (;;) {
            if (!policy_irreducible(mdp, f)) {
                rep.ergodicity = ErgodicityVerdict::ProvenNotErgodic;
                rep.non_ergodic_witness = f;
                return rep;
            }
            std::size_t i = 0;
            while (i < S && ++f.action_of[i] == A) f.action_of[i++] = 0;
            if (i == S) break;
        }
        rep.ergodicity = ErgodicityVerdict::ProvenErgodic;
        return rep;
    }
    rep.ergodicity = ErgodicityVerdict::Unknown;
    return rep;
}

std::vector<double> stationary_distribution(const Mdp& mdp, const Policy& f) {
    std::size_t S = mdp.num_states;
    // (P^T - I) pi = 0 with the last balance equation replaced by sum(pi) = 1.
    std::vector<double> A(S * S, 0.0), b(S, 0.0);
    for (State y = 0; y < S; ++y)
        for (State x = 0; x < S; ++x)
            A[y * S + x] = mdp.p(x, f.action_of[x], y) - (x == y ? 1.0 : 0.0);
    for (State x = 0; x < S; ++x) A[(S - 1) * S + x] = 1.0;
    b[S - 1] = 1.0;
    solve_dense(A, b, S);

    double resid = 0.0;
    for (State y = 0; y < S; ++y) {
        double flow = 0.0;
        for (State x = 0; x < S; ++x) flow += b[x] * mdp.p(x, f.action_of[x], y);
        resid = std::max(resid, std::fabs(flow - b[y]));
    }
    double neg = *std::min_element(b.begin(), b.end());
    if (resid > 1e-10 || neg < -1e-10)
        throw ReducibleChainError("stationary distribution invalid (residual " +
                                  std::to_string(resid) + ")");
    return b;
}

double bellman_apply(const Mdp& mdp, const std::vector<double>& h, State x, Action a) {
    if (x >= mdp.num_states || a >= mdp.num_actions)
        throw std::out_of_range("bellman_apply: state or action index out of range");
    if (h.size() != mdp.num_states)
        throw std::out_of_range("bellman_apply: bias vector has wrong length");
    double v = mdp.r(x, a);
    const double* row = mdp.row(x, a);
    for (State y = 0; y < mdp.num_states; ++y) v += row[y] * h[y];
    return v;
}

GainBias evaluate_policy(const Mdp& mdp, const Policy& f, State ref_state) {
    SubSpace sub = full_space(mdp.num_states, Correspondence::full(mdp.num_states, 1));
    for (State x = 0; x < mdp.num_states; ++x) sub.allowed[x] = {f.action_of[x]};
    auto [g, h] = evaluate_local(mdp, sub, f.action_of, ref_state);

    double resid = 0.0;
    for (State x = 0; x < mdp.num_states; ++x)
        resid = std::max(resid, std::fabs(g + h[x] - bellman_apply(mdp, h, x, f.action_of[x])));
    if (resid > kEvalTol)
        throw PlanningError("evaluation residual " + std::to_string(resid) +
                            " exceeds tolerance");
    return {g, std::move(h), ref_state};
}

OptimalSolution solve_optimal(const Mdp& mdp, State ref_state) {
    auto C = Correspondence::full(mdp.num_states, mdp.num_actions);
    auto sol = policy_iteration(mdp, full_space(mdp.num_states, C), ref_state, nullptr);

    OptimalSolution out;
    out.gain_bias = {sol.gain, sol.bias, ref_state};
    std::size_t S = mdp.num_states, A = mdp.num_actions;
    out.optimal_actions.resize(S);
    out.optimal_policy.action_of.resize(S);
    for (State x = 0; x < S; ++x) {
        double vmax = -kInf;
        for (Action a = 0; a < A; ++a)
            vmax = std::max(vmax, bellman_apply(mdp, sol.bias, x, a));
        for (Action a = 0; a < A; ++a)
            if (bellman_apply(mdp, sol.bias, x, a) >= vmax - kTieTol)
                out.optimal_actions[x].push_back(a);
        out.optimal_policy.action_of[x] = out.optimal_actions[x].front();
    }
    return out;
}

GapTable delta_star(const Mdp& mdp, const OptimalSolution& sol) {
    std::size_t S = mdp.num_states, A = mdp.num_actions;
    const auto& h = sol.gain_bias.bias;
    GapTable g;
    g.num_states = S;
    g.num_actions = A;
    g.delta.assign(S * A, 0.0);
    g.suboptimal.assign(S * A, 0);
    for (State x = 0; x < S; ++x) {
        double vmax = -kInf;
        for (Action a = 0; a < A; ++a) vmax = std::max(vmax, bellman_apply(mdp, h, x, a));
        for (Action a = 0; a < A; ++a) {
            double d = vmax - bellman_apply(mdp, h, x, a);
            g.delta[x * A + a] = d;
            if (d > kTieTol) {
                g.suboptimal[x * A + a] = 1;
                g.delta_min = std::min(g.delta_min, d);
            }
        }
    }
    double hi = *std::max_element(h.begin(), h.end());
    double lo = *std::min_element(h.begin(), h.end());
    g.span = hi - lo;
    return g;
}

RestrictedSolution solve_optimal_restricted(const Mdp& mdp, const Correspondence& C,
                                            State ref_state, const Policy* warm_start) {
    std::size_t S = mdp.num_states;
    for (State x = 0; x < S; ++x)
        if (C.allowed[x].empty())
            throw std::invalid_argument("correspondence must be nonempty at every state");

    std::vector<Action> warm;
    if (warm_start) warm = warm_start->action_of;

    LocalSolution local;
    SubSpace sub = full_space(S, C);
    bool fallback = false;
    try {
        local = policy_iteration(mdp, sub, ref_state, warm_start ? &warm : nullptr);
    } catch (const ReducibleChainError&) {
        fallback = true;
        sub = communicating_component(mdp, C, ref_state);
        std::size_t ref_local =
            std::find(sub.states.begin(), sub.states.end(), ref_state) - sub.states.begin();
        std::vector<Action> warm_local;
        if (warm_start) {
            warm_local.resize(sub.states.size());
            for (std::size_t i = 0; i < sub.states.size(); ++i)
                warm_local[i] = warm_start->action_of[sub.states[i]];
        }
        try {
            local = policy_iteration(mdp, sub, ref_local,
                                     warm_start ? &warm_local : nullptr);
        } catch (const ReducibleChainError& e) {
            throw PlanningError(std::string("restricted MDP reducible beyond the "
                                            "communicating-component fallback: ") +
                                e.what());
        }
    }

    RestrictedSolution out;
    out.used_component_fallback = fallback;
    out.gain_bias.gain = local.gain;
    out.gain_bias.ref_state = ref_state;
    out.gain_bias.bias.assign(S, 0.0);
    for (std::size_t i = 0; i < sub.states.size(); ++i)
        out.gain_bias.bias[sub.states[i]] = local.bias[i];

    out.optimal_actions.resize(S);
    for (State x = 0; x < S; ++x) {
        double vmax = -kInf;
        for (Action a : C.allowed[x])
            vmax = std::max(vmax, bellman_apply(mdp, out.gain_bias.bias, x, a));
        for (Action a : C.allowed[x])
            if (bellman_apply(mdp, out.gain_bias.bias, x, a) >= vmax - kTieTol)
                out.optimal_actions[x].push_back(a);
    }
    return out;
}

GapTable gaps_from_restricted(const Mdp& mdp, const Correspondence& C,
                              const RestrictedSolution& sol, double zeta) {
    std::size_t S = mdp.num_states, A = mdp.num_actions;
    const auto& h = sol.gain_bias.bias;
    GapTable g;
    g.num_states = S;
    g.num_actions = A;
    g.restricted = true;
    g.delta.assign(S * A, 0.0);
    g.pre_threshold.assign(S * A, 0.0);
    g.suboptimal.assign(S * A, 1);

    for (State x = 0; x < S; ++x) {
        double bstar = -kInf;
        for (Action a : C.allowed[x]) bstar = std::max(bstar, bellman_apply(mdp, h, x, a));
        for (Action a : C.allowed[x]) {
            // exact zeros on O(x; phi(C))
            if (bellman_apply(mdp, h, x, a) >= bstar - kTieTol)
                g.suboptimal[x * A + a] = 0;
        }
        for (Action a = 0; a < A; ++a) {
            double pre = bstar - bellman_apply(mdp, h, x, a);
            g.pre_threshold[x * A + a] = pre;
            if (!g.suboptimal[x * A + a])
                g.delta[x * A + a] = 0.0;
            else
                g.delta[x * A + a] = pre <= zeta ? 0.0 : pre;
            if (g.suboptimal[x * A + a] && g.delta[x * A + a] > 0.0)
                g.delta_min = std::min(g.delta_min, g.delta[x * A + a]);
        }
    }
    double hi = *std::max_element(h.begin(), h.end());
    double lo = *std::min_element(h.begin(), h.end());
    g.span = hi - lo;
    return g;
}

GapTable delta_star_restricted(const Mdp& mdp, const Correspondence& C, double zeta,
                               State ref_state) {
    auto sol = solve_optimal_restricted(mdp, C, ref_state);
    return gaps_from_restricted(mdp, C, sol, zeta);
}

GapTable threshold_gaps(const GapTable& gaps, double zeta) {
    GapTable out = gaps;
    out.delta_min = kInf;
    for (std::size_t i = 0; i < out.delta.size(); ++i) {
        if (out.delta[i] <= zeta) out.delta[i] = 0.0;
        if (out.suboptimal[i] && out.delta[i] > 0.0)
            out.delta_min = std::min(out.delta_min, out.delta[i]);
    }
    return out;
}

double kl_pair(const Mdp& phi, const Mdp& psi, State x, Action a) {
    if (x >= phi.num_states || a >= phi.num_actions)
        throw std::out_of_range("kl_pair: index out of range");
    double kl = 0.0;
    for (State y = 0; y < phi.num_states; ++y) {
        double p = phi.p(x, a, y), q = psi.p(x, a, y);
        if (p > 0.0) {
            if (q <= 0.0) return kInf;
            kl += p * std::log(p / q);
        }
    }
    double rp = phi.r(x, a), rq = psi.r(x, a);
    if (rp > 0.0) {
        if (rq <= 0.0) return kInf;
        kl += rp * std::log(rp / rq);
    }
    if (rp < 1.0) {
        if (rq >= 1.0) return kInf;
        kl += (1.0 - rp) * std::log((1.0 - rp) / (1.0 - rq));
    }
    return std::max(kl, 0.0);
}

}  // namespace delmdp
