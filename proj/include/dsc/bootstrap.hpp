#ifndef DSC_BOOTSTRAP_HPP
#define DSC_BOOTSTRAP_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dsc/estimator.hpp"

namespace dsc {

enum class ResampleMode {
    // Standard bootstrap: n draws with replacement from the n observations.
    WithReplacement,
    // Literal reading of the sampling step: draw n indices without
    // replacement from an (n+1)-element index set, i.e. uniformly drop one
    // index; dropping the phantom index keeps the sample intact, dropping a
    // real one leaves a leave-one-out sample.
    PaperLiteral,
};

enum class BandKind { Uniform, Pointwise };

struct BootstrapConfig {
    int draws = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    ResampleMode mode = ResampleMode::WithReplacement;
    BandKind bands = BandKind::Uniform;
    // Donors are always resampled; the treated unit only when set.
    bool resample_treated = false;

    void validate() const;
};

struct Band {
    std::vector<double> center;
    std::vector<double> lower;
    std::vector<double> upper;
    double t_value = 0.0;  // uniform half-width; 0 in pointwise mode
};

struct BootstrapBands {
    FitSpec spec;
    BootstrapConfig config;
    Band weights;                    // indexed by donor
    std::vector<Band> counterfactuals;  // per period 1..t_total
    std::vector<Band> effects;          // per period 1..t_total
    std::vector<double> support;     // ordinal/share only
    int draws_effective = 0;
    int draws_discarded = 0;
};

// Order-statistic quantile: the ceil(level * n)-th smallest value, index
// clamped to [1, n].
double empirical_quantile_of_deviations(std::span<const double> deviations, double level);

// Per-cell resampling, re-estimation, re-averaging, and band construction.
// Uniform bands put a constant half-width t_{1-alpha}, the (1-alpha)
// empirical quantile of the max-over-grid absolute deviation from the base
// fit, around each object; pointwise bands take per-point percentiles of the
// draws instead.
BootstrapBands bootstrap(const MicroPanel& panel, const FitSpec& spec, const SolverConfig& scfg,
                         const BootstrapConfig& bcfg, int threads = 1);

std::string bands_json(const BootstrapBands& bands);

}  // namespace dsc

#endif
