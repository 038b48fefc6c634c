#ifndef DSC_ESTIMATOR_HPP
#define DSC_ESTIMATOR_HPP

#include <span>
#include <string>
#include <vector>

#include "dsc/distribution.hpp"
#include "dsc/panel.hpp"
#include "dsc/solver.hpp"

namespace dsc {

enum class OutcomeKind { Continuous, Ordinal, Share };

OutcomeKind outcome_kind_from_string(const std::string& s);
std::string to_string(OutcomeKind k);

// What to fit: who is treated, which donors in which order, where the
// intervention splits the periods, and how distributions are represented.
struct FitSpec {
    std::string treated;
    std::vector<std::string> donors;
    int t_star = 0;  // pre-periods 1..t_star
    int t_total = 0; // post-periods t_star+1..t_total
    OutcomeKind outcome = OutcomeKind::Continuous;
    QuantileGrid grid;
    double q_min = 0.0;
    double q_max = 1.0;

    void validate() const;
    int num_pre() const { return t_star; }
    int num_post() const { return t_total - t_star; }
};

// Estimated distributions for treated (index 0) and donors (1..J), every
// period. Exactly one of the two representations is populated, by outcome
// kind. Ordinal and share outcomes share one discrete support across all
// units and periods.
struct FitInputs {
    std::vector<std::vector<EmpiricalQuantile>> quantiles;  // [unit][period-1]
    std::vector<std::vector<DiscreteCDF>> cdfs;
    std::vector<double> support;
    int num_units() const {
        return static_cast<int>(quantiles.empty() ? cdfs.size() : quantiles.size());
    }
};

struct DscFit {
    FitSpec spec;
    std::vector<SimplexWeights> per_period_weights;  // one per pre-period
    SimplexWeights averaged_weights;
    // Counterfactual and observed treated distributions for every period
    // 1..t_total, in the representation of the outcome kind.
    std::vector<EmpiricalQuantile> counterfactual_quantiles;
    std::vector<EmpiricalQuantile> observed_quantiles;
    std::vector<DiscreteCDF> counterfactual_cdfs;
    std::vector<DiscreteCDF> observed_cdfs;
    // Pointwise observed minus counterfactual, per period, on the grid
    // (continuous) or support (ordinal/share).
    std::vector<std::vector<double>> effects;
    std::vector<GramDiagnostic> diagnostics;  // one per pre-period
    std::vector<double> support;              // ordinal/share only

    bool degenerate() const;
    bool all_converged() const;
};

FitInputs build_fit_inputs(const MicroPanel& panel, const FitSpec& spec);

// Runs the whole fit on prebuilt inputs: per-pre-period weight programs,
// arithmetic averaging, counterfactuals and effects for every period.
DscFit fit_from_inputs(const FitInputs& inputs, const FitSpec& spec, const SolverConfig& cfg,
                       int threads = 1);

DscFit fit(const MicroPanel& panel, const FitSpec& spec, const SolverConfig& cfg,
           int threads = 1);

EmpiricalQuantile counterfactual_quantile(std::span<const double> weights,
                                          std::span<const EmpiricalQuantile> controls);

DiscreteCDF counterfactual_cdf(std::span<const double> weights,
                               std::span<const DiscreteCDF> controls);

const std::vector<double>& effect_curve(const DscFit& fit, int period);

// Full fit as a JSON document: spec echo, named weights, counterfactual and
// effect arrays per period, diagnostics. Weights below 1e-10 print as 0.
std::string fit_json(const DscFit& fit);

}  // namespace dsc

#endif
