#ifndef DSC_SOLVER_HPP
#define DSC_SOLVER_HPP

#include <span>
#include <vector>

#include "dsc/distribution.hpp"

namespace dsc {

struct SolverConfig {
    int max_iterations = 100000;
    double tolerance = 1e-12;  // objective-improvement stopping threshold
};

// A point on the probability simplex over the donor units, with solve
// metadata. Weights are non-negative and sum to 1 exactly after output
// normalization.
struct SimplexWeights {
    std::vector<double> weights;
    double objective = 0.0;
    int iterations = 0;
    bool converged = true;
    // Set by the estimator when the Gram diagnostic warns: the optimum is not
    // unique and the reported weights are one deterministic representative.
    bool degenerate = false;
};

// Euclidean projection onto the probability simplex (sort-and-threshold).
std::vector<double> project_simplex(std::span<const double> v);

// Discretized objective of the continuous program: trapezoid approximation of
// the integral over [q_min, q_max] of |sum_j w_j Q_j(q) - Q_0(q)|^2.
double quantile_mixture_objective(std::span<const double> weights, const EmpiricalQuantile& target,
                                  std::span<const EmpiricalQuantile> controls, double q_min = 0.0,
                                  double q_max = 1.0);

// Objective of the discrete program: integral of |sum_j w_j F_j - F_0| over
// the shared support.
double cdf_mixture_objective(std::span<const double> weights, const DiscreteCDF& target,
                             std::span<const DiscreteCDF> controls);

// Minimizes the discretized squared-L2 quantile objective over the simplex by
// accelerated projected gradient (fixed step 1/L, L = 2 * largest eigenvalue
// of the control Gram matrix, uniform deterministic start). The returned
// objective never exceeds any vertex objective.
SimplexWeights solve_quantile_weights(const EmpiricalQuantile& target,
                                      std::span<const EmpiricalQuantile> controls,
                                      const SolverConfig& cfg, double q_min = 0.0,
                                      double q_max = 1.0);

// Minimizes the weighted L1 CDF objective over the simplex, as a linear
// program with one auxiliary absolute-value variable per support gap, solved
// to optimality by a two-phase simplex method.
SimplexWeights solve_cdf_weights(const DiscreteCDF& target, std::span<const DiscreteCDF> controls,
                                 const SolverConfig& cfg);

}  // namespace dsc

#endif
