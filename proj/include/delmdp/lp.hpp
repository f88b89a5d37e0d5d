#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace delmdp {

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// minimize costs . x  subject to  constraint_matrix x >= rhs, x >= 0.
struct LpProblem {
    std::vector<double> costs;
    std::vector<std::vector<double>> constraint_matrix;  // rows x vars
    std::vector<double> rhs;
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
};

/// Dense two-phase primal simplex with Bland's anti-cycling rule.
/// Never throws for Infeasible/Unbounded; those are reported via status.
LpSolution solve_lp(const LpProblem& problem);

std::string to_string(LpStatus s);

}  // namespace delmdp
