#include "delmdp/structure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "delmdp/lp.hpp"

namespace delmdp {

namespace {

double euclidean(const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double d = u[i] - v[i];
        s += d * d;
    }
    return std::sqrt(s);
}

void fill_row_pairs(const GapTable& gaps, ConstraintSet& cs) {
    std::size_t n = gaps.num_states * gaps.num_actions;
    for (std::size_t p = 0; p < n; ++p) {
        if (gaps.suboptimal[p]) {
            if (gaps.delta[p] > 0.0)
                cs.rows.push_back(p);
            else
                cs.infeasible_rows.push_back(p);
        } else if (gaps.restricted && gaps.delta[p] == 0.0) {
            cs.forced_infinite.push_back(p);
        }
    }
    // Suboptimal pairs whose gap was thresholded to zero are also pinned to
    // infinity by the algorithm's eta(x,a) = inf branch.
    for (std::size_t p : cs.infeasible_rows)
        if (gaps.restricted) cs.forced_infinite.push_back(p);
    cs.cols = cs.rows;
}

}  // namespace

ExplorationRates eta_unstructured(const GapTable& gaps) {
    std::size_t S = gaps.num_states, A = gaps.num_actions;
    ExplorationRates out;
    out.num_states = S;
    out.num_actions = A;
    out.eta.assign(S * A, 0.0);
    const double hp1 = gaps.span + 1.0;
    for (std::size_t p = 0; p < S * A; ++p) {
        if (gaps.suboptimal[p]) {
            double d = gaps.delta[p];
            if (d <= 0.0) {
                out.feasible = false;
                if (!out.infeasible_witness) out.infeasible_witness = p;
                continue;
            }
            out.eta[p] = 2.0 * (hp1 / d) * (hp1 / d);
            out.objective += out.eta[p] * d;
        } else if (gaps.restricted && gaps.delta[p] == 0.0) {
            out.eta[p] = kInf;  // inf * 0 = 0 in the objective
        }
    }
    return out;
}

double lip_weight(const Mdp& mdp, const StructureSpec& spec, const GapTable& gaps,
                  std::size_t row_pair, std::size_t col_pair) {
    if (!mdp.has_embeddings())
        throw std::invalid_argument("lip_weight: embeddings required");
    std::size_t A = gaps.num_actions;
    State xr = row_pair / A, xc = col_pair / A;
    Action ar = row_pair % A, ac = col_pair % A;
    double dx = euclidean(mdp.state_embedding[xr], mdp.state_embedding[xc]);
    double da = euclidean(mdp.action_embedding[ar], mdp.action_embedding[ac]);
    double bracket = gaps.delta[row_pair] / (gaps.span + 1.0) -
                     2.0 * (spec.L * std::pow(dx, spec.alpha) +
                            spec.L_prime * std::pow(da, spec.alpha_prime));
    if (bracket <= 0.0) return 0.0;
    return bracket * bracket;
}

ConstraintSet build_lip_lp(const Mdp& mdp, const StructureSpec& spec, const GapTable& gaps) {
    std::size_t S = gaps.num_states, A = gaps.num_actions;
    ConstraintSet cs;
    cs.num_states = S;
    cs.num_actions = A;
    fill_row_pairs(gaps, cs);
    cs.weights.assign(cs.rows.size() * S * A, 0.0);
    for (std::size_t i = 0; i < cs.rows.size(); ++i) {
        for (std::size_t p = 0; p < S * A; ++p) {
            // The plain program sums over suboptimal columns only; the
            // restricted variant credits every pair.
            if (!gaps.restricted && !gaps.suboptimal[p]) continue;
            cs.weights[i * S * A + p] = lip_weight(mdp, spec, gaps, cs.rows[i], p);
        }
    }
    return cs;
}

ConstraintSet build_un_lp(const GapTable& gaps) {
    std::size_t S = gaps.num_states, A = gaps.num_actions;
    ConstraintSet cs;
    cs.num_states = S;
    cs.num_actions = A;
    fill_row_pairs(gaps, cs);
    cs.weights.assign(cs.rows.size() * S * A, 0.0);
    const double hp1 = gaps.span + 1.0;
    for (std::size_t i = 0; i < cs.rows.size(); ++i) {
        std::size_t p = cs.rows[i];
        double ratio = gaps.delta[p] / hp1;
        cs.weights[i * S * A + p] = ratio * ratio;
    }
    return cs;
}

ConstraintSet build_constraints(const Mdp& mdp, const StructureSpec& spec,
                                const GapTable& gaps) {
    return spec.kind == StructureKind::Lipschitz ? build_lip_lp(mdp, spec, gaps)
                                                 : build_un_lp(gaps);
}

ExplorationRates solve_exploration(const ConstraintSet& cs, const GapTable& gaps) {
    std::size_t S = cs.num_states, A = cs.num_actions;
    ExplorationRates out;
    out.num_states = S;
    out.num_actions = A;
    out.eta.assign(S * A, 0.0);
    for (std::size_t p : cs.forced_infinite) out.eta[p] = kInf;

    if (cs.structurally_infeasible()) {
        out.feasible = false;
        out.infeasible_witness = cs.infeasible_rows.front();
        return out;
    }

    // Rows carrying positive weight on a pinned pair are satisfied by
    // inf * w and drop out of the finite program.
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < cs.rows.size(); ++i) {
        bool satisfied = false;
        for (std::size_t p : cs.forced_infinite) {
            if (cs.weight(i, p) > 0.0) {
                satisfied = true;
                break;
            }
        }
        if (!satisfied) active.push_back(i);
    }

    if (!active.empty()) {
        LpProblem lp;
        lp.costs.resize(cs.cols.size());
        for (std::size_t k = 0; k < cs.cols.size(); ++k)
            lp.costs[k] = gaps.delta[cs.cols[k]];
        lp.rhs.assign(active.size(), cs.rhs);
        lp.constraint_matrix.assign(active.size(), std::vector<double>(cs.cols.size()));
        for (std::size_t i = 0; i < active.size(); ++i)
            for (std::size_t k = 0; k < cs.cols.size(); ++k)
                lp.constraint_matrix[i][k] = cs.weight(active[i], cs.cols[k]);
        LpSolution sol = solve_lp(lp);
        if (sol.status != LpStatus::Optimal)
            throw PlanningError("exploration LP failed: status " + to_string(sol.status) +
                                " on " + std::to_string(active.size()) + " rows, " +
                                std::to_string(cs.cols.size()) + " vars");
        for (std::size_t k = 0; k < cs.cols.size(); ++k) out.eta[cs.cols[k]] = sol.x[k];
    }

    out.objective = 0.0;
    for (std::size_t p = 0; p < S * A; ++p)
        if (std::isfinite(out.eta[p])) out.objective += out.eta[p] * gaps.delta[p];
    return out;
}

bool check_membership(const std::vector<double>& rates, const ConstraintSet& cs) {
    if (cs.structurally_infeasible()) return false;
    std::size_t n = cs.num_states * cs.num_actions;
    for (std::size_t i = 0; i < cs.rows.size(); ++i) {
        double lhs = 0.0;
        for (std::size_t p = 0; p < n; ++p) lhs += cs.weight(i, p) * rates[p];
        if (lhs < cs.rhs - kFeasTol) return false;
    }
    return true;
}

namespace {

std::size_t covering_size(double extent, std::size_t dim, std::size_t full, double L,
                          double alpha, double delta_min, double span) {
    if (L <= 0.0) return full;  // covering radius degenerates, bound falls back
    double radius = std::pow(delta_min / (8.0 * L * (span + 1.0)), 1.0 / alpha);
    double term = std::pow(extent * std::sqrt(static_cast<double>(dim)) / radius + 1.0,
                           static_cast<double>(dim));
    if (!(term < static_cast<double>(full))) return full;
    return static_cast<std::size_t>(std::ceil(term));
}

double max_extent(const std::vector<std::vector<double>>& emb) {
    if (emb.empty()) return 0.0;
    double ext = 0.0;
    for (std::size_t j = 0; j < emb[0].size(); ++j) {
        double lo = emb[0][j], hi = emb[0][j];
        for (const auto& row : emb) {
            lo = std::min(lo, row[j]);
            hi = std::max(hi, row[j]);
        }
        ext = std::max(ext, hi - lo);
    }
    return ext;
}

}  // namespace

CoveringBounds covering_bounds(const Mdp& mdp, const StructureSpec& spec,
                               const GapTable& gaps) {
    if (spec.kind != StructureKind::Lipschitz)
        throw std::invalid_argument("covering_bounds: Lipschitz spec required");
    if (!mdp.has_embeddings())
        throw std::invalid_argument("covering_bounds: embeddings required");
    if (!std::isfinite(gaps.delta_min))
        throw std::invalid_argument("covering_bounds: delta_min must be finite");

    CoveringBounds out;
    out.s_lip = covering_size(max_extent(mdp.state_embedding), mdp.state_embedding[0].size(),
                              mdp.num_states, spec.L, spec.alpha, gaps.delta_min, gaps.span);
    out.a_lip = covering_size(max_extent(mdp.action_embedding),
                              mdp.action_embedding[0].size(), mdp.num_actions, spec.L_prime,
                              spec.alpha_prime, gaps.delta_min, gaps.span);
    double hp1 = gaps.span + 1.0;
    out.k_upper = 8.0 * hp1 * hp1 * hp1 / (gaps.delta_min * gaps.delta_min) *
                  static_cast<double>(out.s_lip) * static_cast<double>(out.a_lip);
    return out;
}

}  // namespace delmdp
