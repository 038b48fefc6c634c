#ifndef DSC_LP_HPP
#define DSC_LP_HPP

#include <vector>

namespace dsc {

// Dense linear program in the form
//   minimize    c'x
//   subject to  A_ub x <= b_ub
//               A_eq x == b_eq
//               x >= 0
// Rows of A_ub / A_eq are stored contiguously, n_vars entries each.
struct LpProblem {
    int n_vars = 0;
    std::vector<double> c;
    std::vector<double> a_ub;
    std::vector<double> b_ub;
    std::vector<double> a_eq;
    std::vector<double> b_eq;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
    LpStatus status = LpStatus::Optimal;
    std::vector<double> x;
    double objective = 0.0;
    int pivots = 0;
};

// Two-phase primal simplex on a dense tableau. Pivot selection follows
// Bland's rule (lowest eligible index), which is deterministic and cannot
// cycle.
LpResult solve_lp(const LpProblem& problem, int max_pivots = 200000);

}  // namespace dsc

#endif
