#ifndef DSC_SIMULATION_HPP
#define DSC_SIMULATION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dsc/estimator.hpp"
#include "dsc/panel.hpp"

namespace dsc {

// One-dimensional outcome family with analytic quantile and CDF, the ground
// truth behind simulated cells.
struct Family {
    enum class Kind { Normal, Uniform, Exponential, PointMass, Discrete };
    Kind kind = Kind::Normal;
    double a = 0.0;  // Normal: mean. Uniform: low. Exponential: shift. PointMass: value.
    double b = 1.0;  // Normal: sd. Uniform: high. Exponential: rate.
    std::vector<double> support;  // Discrete only
    std::vector<double> probs;

    void validate() const;
    double quantile(double u) const;
    double cdf(double y) const;
    bool discrete() const { return kind == Kind::PointMass || kind == Kind::Discrete; }
};

// How the treated unit's population distribution combines the donors: as a
// mixture of quantile functions (the exact optimum of the quantile-weight
// program) or as a mixture of CDFs (the exact optimum of the CDF program).
enum class MixtureMode { Quantile, Cdf };

struct EffectSpec {
    enum class Kind { None, QuantileShift, CdfMassShift };
    Kind kind = Kind::None;
    // QuantileShift: add `shift` to post-period treated outcomes whose
    // mixture-CDF position is >= q_from.
    double shift = 0.0;
    double q_from = 0.0;
    // CdfMassShift: move `mass` probability from one support value to
    // another in the post-period treated distribution.
    double mass = 0.0;
    double from_value = 0.0;
    double to_value = 0.0;
};

struct SimSpec {
    int t_total = 0;
    int t_star = 0;
    long n_per_cell = 0;
    std::uint64_t seed = 1;
    OutcomeKind outcome = OutcomeKind::Continuous;
    MixtureMode mixture = MixtureMode::Quantile;
    // donor_families[j] has either one entry (same family every period) or
    // t_total entries.
    std::vector<std::vector<Family>> donor_families;
    std::vector<double> true_weights;
    EffectSpec effect;
    QuantileGrid grid;  // resolution for the recorded population truth

    int num_donors() const { return static_cast<int>(donor_families.size()); }
    const Family& family(int donor, int period) const;
    void validate() const;
};

struct GroundTruth {
    std::vector<double> true_weights;
    // Continuous outcomes: population counterfactual and treated quantile
    // functions per period on the grid (entries may be +-inf at the grid ends
    // for unbounded families). Ordinal/share: population CDFs on `support`.
    std::vector<std::vector<double>> counterfactual;  // per period
    std::vector<std::vector<double>> treated;         // per period, effect included
    std::vector<std::vector<double>> effect;          // treated - counterfactual
    std::vector<double> support;                      // ordinal/share only
};

struct SimOutput {
    MicroPanel panel;
    GroundTruth truth;
    std::string treated_name;
    std::vector<std::string> donor_names;
};

// Draws every cell of the panel (donors from their families, treated from
// the true mixture, post-period treated cells with the effect applied) and
// records the population truth alongside.
SimOutput generate(const SimSpec& sim, int threads = 1);

// Exhaustive simplex grid search at the given step, evaluating the same
// discretized objectives the solver minimizes. Brute-force reference.
SimplexWeights oracle_weights(const EmpiricalQuantile& target,
                              std::span<const EmpiricalQuantile> controls, double step,
                              double q_min = 0.0, double q_max = 1.0);
SimplexWeights oracle_weights(const DiscreteCDF& target, std::span<const DiscreteCDF> controls,
                              double step);

// Direct-count p-value from ratios (treated first), independent of the
// inference module.
double oracle_pvalue(std::span<const double> ratios);

// Shipped scenarios: "null-dgp", "top-quantile-shift", "ordinal-mass-shift".
SimSpec preset_simspec(const std::string& name);

std::string simspec_to_json(const SimSpec& sim);
SimSpec simspec_from_json(const std::string& text);
std::string truth_json(const SimOutput& out);

}  // namespace dsc

#endif
