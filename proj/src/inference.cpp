#include "dsc/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dsc/error.hpp"
#include "dsc/parallel.hpp"
#include "json.hpp"

namespace dsc {
namespace {

using ordered_json = nlohmann::ordered_json;

// Post/pre distance ratio for one fitted unit.
UnitRatio ratio_from_fit(const DscFit& fit, const std::string& unit, double range_min,
                         double range_max, bool range_set) {
    const bool continuous = fit.spec.outcome == OutcomeKind::Continuous;
    std::vector<double> pre, post;
    for (int t = 1; t <= fit.spec.t_total; ++t) {
        double d = 0.0;
        if (continuous) {
            const double lo = range_set ? range_min : fit.spec.q_min;
            const double hi = range_set ? range_max : fit.spec.q_max;
            d = wasserstein2(fit.observed_quantiles[t - 1], fit.counterfactual_quantiles[t - 1],
                             lo, hi);
        } else {
            const double lo = range_set ? range_min : -std::numeric_limits<double>::infinity();
            const double hi = range_set ? range_max : std::numeric_limits<double>::infinity();
            d = l1_cdf_distance_restricted(fit.observed_cdfs[t - 1],
                                           fit.counterfactual_cdfs[t - 1], lo, hi);
        }
        (t <= fit.spec.t_star ? pre : post).push_back(d);
    }
    UnitRatio r;
    r.unit = unit;
    r.pre_rmse = rmse_distance(pre);
    r.post_rmse = post.empty() ? 0.0 : rmse_distance(post);
    if (r.pre_rmse == 0.0) {
        r.ratio = std::numeric_limits<double>::infinity();
        r.perfect_pre_fit = true;
    } else {
        r.ratio = r.post_rmse / r.pre_rmse;
    }
    return r;
}

}  // namespace

double rmse_distance(std::span<const double> distances) {
    if (distances.empty()) throw_usage("RMSE of an empty period range");
    double acc = 0.0;
    for (double d : distances) acc += d * d;
    return std::sqrt(acc / static_cast<double>(distances.size()));
}

double pvalue_from_ratios(std::span<const double> ratios) {
    if (ratios.empty()) throw_usage("no ratios");
    const double r0 = ratios[0];
    int count = 0;
    for (double r : ratios)
        if (r >= r0) ++count;
    return static_cast<double>(count) / static_cast<double>(ratios.size());
}

PermutationResult permutation_test(const MicroPanel& panel, const FitSpec& spec,
                                   const SolverConfig& cfg, const PermutationOptions& opt) {
    spec.validate();
    if (spec.donors.size() < 2) throw_data("permutation test needs at least 2 donors");
    if (spec.num_post() < 1) throw_data("permutation test needs at least one post-period");

    PermutationResult res;
    res.range_min = opt.range_set ? opt.range_min
                                  : (spec.outcome == OutcomeKind::Continuous ? spec.q_min
                                                                             : -std::numeric_limits<double>::infinity());
    res.range_max = opt.range_set ? opt.range_max
                                  : (spec.outcome == OutcomeKind::Continuous ? spec.q_max
                                                                             : std::numeric_limits<double>::infinity());
    res.treated_in_pools = opt.include_treated_in_placebo_pools;

    const DscFit treated_fit = fit(panel, spec, cfg, opt.threads);
    res.units.push_back(
        ratio_from_fit(treated_fit, spec.treated, opt.range_min, opt.range_max, opt.range_set));

    const int j_count = static_cast<int>(spec.donors.size());
    std::vector<UnitRatio> placebo(j_count);
    parallel_for(j_count, opt.threads, [&](int j) {
        FitSpec pspec = spec;
        pspec.treated = spec.donors[j];
        pspec.donors.clear();
        for (int k = 0; k < j_count; ++k)
            if (k != j) pspec.donors.push_back(spec.donors[k]);
        if (opt.include_treated_in_placebo_pools) pspec.donors.push_back(spec.treated);
        UnitRatio r;
        r.unit = pspec.treated;
        try {
            const DscFit pfit = fit(panel, pspec, cfg, 1);
            r = ratio_from_fit(pfit, pspec.treated, opt.range_min, opt.range_max, opt.range_set);
        } catch (const Error& e) {
            r.failed = true;
            r.failure = e.what();
        }
        placebo[j] = std::move(r);
    });
    for (auto& r : placebo) res.units.push_back(std::move(r));

    std::vector<double> ratios;
    ratios.push_back(res.units[0].ratio);
    for (int j = 1; j <= j_count; ++j) {
        if (res.units[j].failed) continue;
        ratios.push_back(res.units[j].ratio);
        ++res.effective_donors;
    }
    res.p_value = pvalue_from_ratios(ratios);
    return res;
}

std::string permutation_json(const PermutationResult& result) {
    ordered_json out;
    out["p_value"] = result.p_value;
    out["effective_donors"] = result.effective_donors;
    out["range"] = {{"min", std::isfinite(result.range_min) ? ordered_json(result.range_min)
                                                            : ordered_json(nullptr)},
                    {"max", std::isfinite(result.range_max) ? ordered_json(result.range_max)
                                                            : ordered_json(nullptr)}};
    out["treated_in_placebo_pools"] = result.treated_in_pools;
    ordered_json units = ordered_json::array();
    for (size_t i = 0; i < result.units.size(); ++i) {
        const auto& u = result.units[i];
        ordered_json row;
        row["unit"] = u.unit;
        row["role"] = i == 0 ? "treated" : "placebo";
        if (u.failed) {
            row["failed"] = true;
            row["failure"] = u.failure;
        } else {
            row["pre_rmse"] = u.pre_rmse;
            row["post_rmse"] = u.post_rmse;
            row["ratio"] =
                std::isfinite(u.ratio) ? ordered_json(u.ratio) : ordered_json(nullptr);
            row["perfect_pre_fit"] = u.perfect_pre_fit;
            row["failed"] = false;
        }
        units.push_back(std::move(row));
    }
    out["units"] = std::move(units);
    return out.dump(2) + "\n";
}

}  // namespace dsc
