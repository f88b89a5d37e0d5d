#include "delmdp/del.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace delmdp {

const char* to_string(Phase p) {
    switch (p) {
        case Phase::Monotonize: return "monotonize";
        case Phase::Estimate: return "estimate";
        case Phase::Exploit: return "exploit";
        case Phase::Explore: return "explore";
    }
    return "?";
}

Schedule rates_schedule(std::uint64_t t, double gamma, DelMode mode) {
    // log t is redefined as 1[t >= 1] log t; ln ln t is clamped at 0 below e^e.
    double lnt = t >= 1 ? std::log(static_cast<double>(t)) : 0.0;
    double lnlnt = lnt > 0.0 ? std::max(0.0, std::log(lnt)) : 0.0;
    Schedule s;
    if (mode == DelMode::Simplified) {
        s.zeta_t = 0.0;
        s.gamma_t = 2.0 * (1.0 + lnt);
    } else {
        s.zeta_t = 1.0 / (1.0 + lnlnt);
        s.gamma_t = (1.0 + gamma) * (1.0 + lnt);
    }
    return s;
}

Correspondence compute_ct(const AgentState& agent) {
    std::size_t S = agent.empirical.num_states, A = agent.empirical.num_actions;
    Correspondence c;
    c.allowed.resize(S);
    for (State x = 0; x < S; ++x) {
        double lnN = agent.n(x) >= 2 ? std::log(static_cast<double>(agent.n(x))) : 0.0;
        double threshold = lnN * lnN;
        for (Action a = 0; a < A; ++a)
            if (static_cast<double>(agent.n(x, a)) >= threshold) c.allowed[x].push_back(a);
        if (c.allowed[x].empty()) {
            // Balanced counts can leave the raw rule empty; keep the
            // most-visited action so the correspondence stays usable.
            Action best = 0;
            for (Action a = 1; a < A; ++a)
                if (agent.n(x, a) > agent.n(x, best)) best = a;
            c.allowed[x].push_back(best);
        }
    }
    return c;
}

DelAgent::DelAgent(std::size_t num_states, std::size_t num_actions, AgentConfig config,
                   State start_state, std::vector<std::vector<double>> state_embedding,
                   std::vector<std::vector<double>> action_embedding)
    : config_(config) {
    if (config_.mode == DelMode::Simplified) config_.gamma = 1.0;
    if (config_.gamma <= 0.0) throw std::invalid_argument("DelAgent: gamma must be > 0");
    state_.t = 1;
    state_.current_state = start_state;
    state_.state_counts.assign(num_states, 0);
    state_.state_counts[start_state] = 1;
    state_.pair_counts.assign(num_states * num_actions, 0);
    state_.empirical = Mdp::zeros(num_states, num_actions);
    double u = 1.0 / static_cast<double>(num_states);
    std::fill(state_.empirical.transitions.begin(), state_.empirical.transitions.end(), u);
    state_.empirical.state_embedding = std::move(state_embedding);
    state_.empirical.action_embedding = std::move(action_embedding);
    warm_policy_.action_of.assign(num_states, 0);
}

Schedule DelAgent::schedule() const {
    return rates_schedule(state_.t, config_.gamma, config_.mode);
}

Action DelAgent::least_counted(State x, const std::vector<Action>& among) const {
    Action best = among.front();
    for (Action a : among)
        if (state_.n(x, a) < state_.n(x, best)) best = a;
    return best;
}

GapTable DelAgent::current_gap_table() const {
    Correspondence ct = compute_ct(state_);
    auto rs = solve_optimal_restricted(state_.empirical, ct, state_.current_state);
    return gaps_from_restricted(state_.empirical, ct, rs, schedule().zeta_t);
}

DelAgent::Decision DelAgent::select_action(State x) {
    const std::size_t A = state_.empirical.num_actions;
    const std::size_t S = state_.empirical.num_states;
    std::vector<Action> all_actions(A);
    std::iota(all_actions.begin(), all_actions.end(), Action{0});

    Correspondence ct = compute_ct(state_);
    RestrictedSolution rs;
    try {
        rs = solve_optimal_restricted(state_.empirical, ct, x, &warm_policy_);
    } catch (const PlanningError&) {
        state_.last_phase = Phase::Estimate;
        return {least_counted(x, all_actions), Phase::Estimate, true};
    }
    for (State s = 0; s < S; ++s) warm_policy_.action_of[s] = rs.optimal_actions[s].front();
    const auto& ox = rs.optimal_actions[x];

    double lnN = state_.n(x) >= 1 ? std::log(static_cast<double>(state_.n(x))) : 0.0;

    bool all_opt_below = true;
    double mono_threshold = lnN * lnN + 1.0;
    for (Action a : ox)
        if (static_cast<double>(state_.n(x, a)) >= mono_threshold) {
            all_opt_below = false;
            break;
        }
    if (all_opt_below) {
        state_.last_phase = Phase::Monotonize;
        return {least_counted(x, ox), Phase::Monotonize};
    }

    double est_threshold = lnN / (1.0 + (lnN > 0.0 ? std::max(0.0, std::log(lnN)) : 0.0));
    for (Action a = 0; a < A; ++a) {
        if (static_cast<double>(state_.n(x, a)) < est_threshold) {
            state_.last_phase = Phase::Estimate;
            return {least_counted(x, all_actions), Phase::Estimate};
        }
    }

    Schedule sch = schedule();
    bool stale = !cache_.valid || cache_.ct.allowed != ct.allowed ||
                 cache_.optimal_actions != rs.optimal_actions ||
                 (state_.t > cache_.solved_at &&
                  state_.t - cache_.solved_at >= std::max<std::size_t>(config_.resolve_every, 1));
    if (stale) {
        try {
            cache_.gaps = gaps_from_restricted(state_.empirical, ct, rs, sch.zeta_t);
            cache_.constraints =
                build_constraints(state_.empirical, config_.structure, cache_.gaps);
        } catch (const PlanningError&) {
            state_.last_phase = Phase::Estimate;
            return {least_counted(x, all_actions), Phase::Estimate, true};
        }
        cache_.ct = ct;
        cache_.optimal_actions = rs.optimal_actions;
        cache_.solved_at = state_.t;
        cache_.valid = true;
    }

    std::vector<double> rates(S * A);
    for (std::size_t p = 0; p < S * A; ++p)
        rates[p] = static_cast<double>(state_.pair_counts[p]) / sch.gamma_t;
    if (check_membership(rates, cache_.constraints)) {
        state_.last_phase = Phase::Exploit;
        return {least_counted(x, ox), Phase::Exploit};
    }

    std::vector<double> eta;
    if (cache_.constraints.structurally_infeasible()) {
        // F_t is empty: pin eta to infinity on zero gaps, zero elsewhere.
        eta.assign(S * A, 0.0);
        for (std::size_t p = 0; p < S * A; ++p)
            if (cache_.gaps.delta[p] == 0.0) eta[p] = kInf;
    } else {
        try {
            eta = solve_exploration(cache_.constraints, cache_.gaps).eta;
        } catch (const PlanningError&) {
            state_.last_phase = Phase::Estimate;
            return {least_counted(x, all_actions), Phase::Estimate, true};
        }
    }

    std::vector<Action> candidates;
    for (Action a = 0; a < A; ++a) {
        double budget = eta[x * A + a] * sch.gamma_t;  // inf * gamma_t = inf
        if (static_cast<double>(state_.n(x, a)) <= budget) candidates.push_back(a);
    }
    if (candidates.empty()) {
        // The program may bind only at other states; behave as exploit.
        state_.last_phase = Phase::Explore;
        return {least_counted(x, ox), Phase::Explore};
    }
    state_.last_phase = Phase::Explore;
    return {least_counted(x, candidates), Phase::Explore};
}

void DelAgent::observe(const Transition& tr) {
    std::size_t S = state_.empirical.num_states, A = state_.empirical.num_actions;
    if (tr.x >= S || tr.a >= A || tr.y >= S)
        throw std::out_of_range("DelAgent::observe: transition index out of range");

    std::uint64_t n = state_.pair_counts[tr.x * A + tr.a];
    double* row = state_.empirical.transitions.data() + (tr.x * A + tr.a) * S;
    double inv = 1.0 / static_cast<double>(n + 1);
    for (State y = 0; y < S; ++y)
        row[y] = (static_cast<double>(n) * row[y] + (y == tr.y ? 1.0 : 0.0)) * inv;
    double& r = state_.empirical.reward_means[tr.x * A + tr.a];
    r = (static_cast<double>(n) * r + tr.r) * inv;

    state_.pair_counts[tr.x * A + tr.a] = n + 1;
    state_.state_counts[tr.y] += 1;
    state_.t += 1;
    state_.current_state = tr.y;
}

}  // namespace delmdp
