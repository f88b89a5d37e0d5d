#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "delmdp/mdp.hpp"

namespace delmdp {

enum class StructureKind { Unstructured, Lipschitz };

/// Declares the structure used by the lower-bound programs. The Lipschitz
/// kind also needs state/action embeddings, which live on the Mdp.
struct StructureSpec {
    StructureKind kind = StructureKind::Unstructured;
    double L = 0.0;
    double L_prime = 0.0;
    double alpha = 1.0;
    double alpha_prime = 1.0;

    static StructureSpec unstructured() { return {}; }
    static StructureSpec lipschitz(double L, double L_prime, double alpha = 1.0,
                                   double alpha_prime = 1.0) {
        return {StructureKind::Lipschitz, L, L_prime, alpha, alpha_prime};
    }
};

/// Constraint system of a lower-bound program: one row per suboptimal pair
/// with positive (thresholded) gap, weights stored densely over all S*A
/// pairs so that membership tests can credit every column. Pair ids are
/// x*A + a.
struct ConstraintSet {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<std::size_t> rows;             // suboptimal pairs, delta > 0
    std::vector<double> weights;               // rows.size() x (S*A)
    std::vector<std::size_t> cols;             // LP variables: same pair set as rows
    std::vector<std::size_t> forced_infinite;  // delta == 0 pairs pinned to infinity
    std::vector<std::size_t> infeasible_rows;  // suboptimal pairs with delta == 0
    double rhs = 2.0;

    bool structurally_infeasible() const { return !infeasible_rows.empty(); }
    double weight(std::size_t row_idx, std::size_t pair) const {
        return weights[row_idx * num_states * num_actions + pair];
    }
};

/// Exploration rates eta(x,a) and the program value K = sum eta * delta
/// (with the convention inf * 0 = 0).
struct ExplorationRates {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<double> eta;  // kInf marks pinned-to-infinity entries
    double objective = 0.0;
    bool feasible = true;
    std::optional<std::size_t> infeasible_witness;  // pair id

    double at(State x, Action a) const { return eta[x * num_actions + a]; }
};

struct CoveringBounds {
    std::size_t s_lip = 0;
    std::size_t a_lip = 0;
    double k_upper = 0.0;
};

/// Closed-form solution of the unstructured program: eta = 2((H+1)/delta)^2
/// on suboptimal pairs. Reports infeasibility (with a witness) when a
/// suboptimal pair carries a zero thresholded gap.
ExplorationRates eta_unstructured(const GapTable& gaps);

/// Weight of column (x,a) in the row of (x',a'):
/// ([delta(x',a')/(H+1) - 2(L d(x,x')^alpha + L' d(a,a')^alpha')]_+)^2.
double lip_weight(const Mdp& mdp, const StructureSpec& spec, const GapTable& gaps,
                  std::size_t row_pair, std::size_t col_pair);

/// Assembles the Lipschitz constraint system for the gap table.
ConstraintSet build_lip_lp(const Mdp& mdp, const StructureSpec& spec, const GapTable& gaps);

/// Assembles the unstructured (diagonal) constraint system.
ConstraintSet build_un_lp(const GapTable& gaps);

/// Convenience: builds the constraint set matching spec.kind.
ConstraintSet build_constraints(const Mdp& mdp, const StructureSpec& spec,
                                const GapTable& gaps);

/// Solves min sum eta*delta over the constraint set. Rows already satisfied
/// by pinned-to-infinity pairs are dropped before the LP runs.
ExplorationRates solve_exploration(const ConstraintSet& cs, const GapTable& gaps);

/// True iff the finite rate vector (indexed by pair id) satisfies every row
/// at 2 - 1e-9. Structurally infeasible sets are never satisfied.
bool check_membership(const std::vector<double>& rates, const ConstraintSet& cs);

/// Covering-number sizes S_lip, A_lip and the program upper bound
/// 8 (H+1)^3 / delta_min^2 * S_lip * A_lip. Extents D, D' are taken from the
/// embeddings; L = 0 (or L' = 0) degenerates the covering term to S (or A).
CoveringBounds covering_bounds(const Mdp& mdp, const StructureSpec& spec,
                               const GapTable& gaps);

}  // namespace delmdp
