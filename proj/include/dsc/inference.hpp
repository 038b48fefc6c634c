#ifndef DSC_INFERENCE_HPP
#define DSC_INFERENCE_HPP

#include <span>
#include <string>
#include <vector>

#include "dsc/estimator.hpp"

namespace dsc {

struct PermutationOptions {
    // Distance restriction for d_t. Continuous outcomes: quantile fractions.
    // Ordinal/share outcomes: outcome-unit bounds on the support.
    double range_min = 0.0;
    double range_max = 1.0;
    bool range_set = false;  // when false, continuous fits inherit the spec's q-range
    bool include_treated_in_placebo_pools = false;
    int threads = 1;
};

struct UnitRatio {
    std::string unit;
    double pre_rmse = 0.0;
    double post_rmse = 0.0;
    double ratio = 0.0;  // +inf when pre_rmse == 0
    bool perfect_pre_fit = false;
    bool failed = false;         // placebo fit threw; excluded from the count
    std::string failure;
};

struct PermutationResult {
    std::vector<UnitRatio> units;  // treated first, then donors in spec order
    double p_value = 1.0;
    int effective_donors = 0;  // successful placebo fits (J after exclusions)
    double range_min = 0.0;
    double range_max = 1.0;
    bool treated_in_pools = false;
};

// sqrt of the mean squared distance over a period window.
double rmse_distance(std::span<const double> distances);

// Fraction of ratios (treated at index 0) at least as large as the treated
// ratio, counting the treated itself; +inf compares >= +inf.
double pvalue_from_ratios(std::span<const double> ratios);

// Runs the full placebo permutation test: refits with each donor as a
// pretend target, computes post/pre RMSE ratios of the per-period distances
// (2-Wasserstein on quantiles, restricted L1 on CDFs), and ranks the treated
// unit among them.
PermutationResult permutation_test(const MicroPanel& panel, const FitSpec& spec,
                                   const SolverConfig& cfg, const PermutationOptions& opt = {});

std::string permutation_json(const PermutationResult& result);

}  // namespace dsc

#endif
