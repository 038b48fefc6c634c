#include "dsc/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "dsc/error.hpp"
#include "dsc/parallel.hpp"
#include "dsc/rng.hpp"
#include "json.hpp"

namespace dsc {
namespace {

using ordered_json = nlohmann::ordered_json;

// Sorted base sample for one (unit, period) cell, with each observation's
// support index for the ordinal path.
struct SortedCell {
    std::vector<double> values;
    std::vector<int> support_idx;
};

// Multiplicity of each sorted base observation in the resampled multiset.
void resample_counts(ResampleMode mode, int n, Rng& rng, std::vector<int>& counts,
                     int& resampled_n) {
    counts.assign(n, 0);
    if (mode == ResampleMode::WithReplacement) {
        for (int i = 0; i < n; ++i) counts[static_cast<int>(rng.bounded(n))]++;
        resampled_n = n;
        return;
    }
    // Drop one index uniformly from {0,...,n}; 0 is the phantom index whose
    // removal keeps the full sample.
    const int drop = static_cast<int>(rng.bounded(n + 1));
    for (int i = 0; i < n; ++i) counts[i] = 1;
    if (drop > 0) {
        if (n == 1) throw_data("cannot leave one out of a single-observation cell");
        counts[drop - 1] = 0;
        resampled_n = n - 1;
    } else {
        resampled_n = n;
    }
}

// Quantile function of the resampled multiset, read off the sorted base
// values in one pass (order statistic k = ceil(i * n / G), clamped to >= 1).
void resampled_quantile(const SortedCell& cell, const std::vector<int>& counts, int resampled_n,
                        const QuantileGrid& grid, std::vector<double>& out) {
    const int g = grid.g;
    out.resize(g + 1);
    const std::int64_t n64 = resampled_n;
    int idx = 0;
    std::int64_t cum = counts[0];
    for (int i = 0; i <= g; ++i) {
        std::int64_t k = (static_cast<std::int64_t>(i) * n64 + g - 1) / g;
        if (k < 1) k = 1;
        while (cum < k) {
            ++idx;
            cum += counts[idx];
        }
        out[i] = cell.values[idx];
    }
}

// CDF of the resampled multiset on the shared support.
void resampled_cdf(const SortedCell& cell, const std::vector<int>& counts, int resampled_n,
                   int support_size, std::vector<double>& cum_out) {
    std::vector<std::int64_t> per_support(support_size, 0);
    for (size_t i = 0; i < counts.size(); ++i) per_support[cell.support_idx[i]] += counts[i];
    cum_out.resize(support_size);
    std::int64_t cum = 0;
    for (int k = 0; k < support_size; ++k) {
        cum += per_support[k];
        cum_out[k] = static_cast<double>(cum) / static_cast<double>(resampled_n);
    }
}

double max_abs_deviation(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

Band uniform_band(const std::vector<double>& center, std::span<const double> max_devs,
                  double level) {
    Band band;
    band.center = center;
    band.t_value = empirical_quantile_of_deviations(max_devs, level);
    band.lower.resize(center.size());
    band.upper.resize(center.size());
    for (size_t i = 0; i < center.size(); ++i) {
        band.lower[i] = center[i] - band.t_value;
        band.upper[i] = center[i] + band.t_value;
    }
    return band;
}

// Percentile band from per-point draw values, order statistics
// floor(alpha/2 * (B+1)) and ceil((1 - alpha/2) * (B+1)), clamped to [1, B].
// Clamped once more so the center always lies inside.
Band pointwise_band(const std::vector<double>& center,
                    const std::vector<std::vector<double>>& draw_values, double alpha) {
    Band band;
    band.center = center;
    band.lower.resize(center.size());
    band.upper.resize(center.size());
    const int b_n = static_cast<int>(draw_values.size());
    std::vector<double> column(b_n);
    for (size_t i = 0; i < center.size(); ++i) {
        for (int b = 0; b < b_n; ++b) column[b] = draw_values[b][i];
        std::sort(column.begin(), column.end());
        int lo = static_cast<int>(std::floor(alpha / 2.0 * (b_n + 1)));
        int hi = static_cast<int>(std::ceil((1.0 - alpha / 2.0) * (b_n + 1)));
        lo = std::clamp(lo, 1, b_n);
        hi = std::clamp(hi, 1, b_n);
        band.lower[i] = std::min(column[lo - 1], center[i]);
        band.upper[i] = std::max(column[hi - 1], center[i]);
    }
    return band;
}

ordered_json band_json(const Band& band) {
    return {{"center", band.center},
            {"lower", band.lower},
            {"upper", band.upper},
            {"t_value", band.t_value}};
}

}  // namespace

void BootstrapConfig::validate() const {
    if (draws < 1) throw_usage("bootstrap needs at least one draw");
    if (!(alpha > 0.0 && alpha < 1.0)) throw_usage("alpha must lie strictly between 0 and 1");
}

double empirical_quantile_of_deviations(std::span<const double> deviations, double level) {
    if (deviations.empty()) throw_usage("no deviations");
    const int n = static_cast<int>(deviations.size());
    int k = static_cast<int>(std::ceil(level * n));
    k = std::clamp(k, 1, n);
    std::vector<double> sorted(deviations.begin(), deviations.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted[k - 1];
}

BootstrapBands bootstrap(const MicroPanel& panel, const FitSpec& spec, const SolverConfig& scfg,
                         const BootstrapConfig& bcfg, int threads) {
    bcfg.validate();
    const FitInputs base_inputs = build_fit_inputs(panel, spec);
    const DscFit base = fit_from_inputs(base_inputs, spec, scfg, threads);
    const bool continuous = spec.outcome == OutcomeKind::Continuous;
    const int j_count = static_cast<int>(spec.donors.size());
    const int t_total = spec.t_total;
    const int b_n = bcfg.draws;

    // Sort every resampled cell once; draws then run in O(n + grid).
    const int first_resampled = bcfg.resample_treated ? 0 : 1;
    const int unit_count = j_count + 1;
    std::vector<std::vector<SortedCell>> cells(unit_count);
    const std::vector<int> unit_ids = [&] {
        std::vector<int> ids;
        ids.push_back(panel.unit_index(spec.treated));
        for (const auto& d : spec.donors) ids.push_back(panel.unit_index(d));
        return ids;
    }();
    for (int u = first_resampled; u < unit_count; ++u) {
        cells[u].resize(t_total);
        for (int t = 1; t <= t_total; ++t) {
            SortedCell& cell = cells[u][t - 1];
            const auto& raw = panel.cell(unit_ids[u], t);
            cell.values.assign(raw.begin(), raw.end());
            std::sort(cell.values.begin(), cell.values.end());
            if (!continuous) {
                cell.support_idx.resize(cell.values.size());
                for (size_t i = 0; i < cell.values.size(); ++i) {
                    const auto it = std::lower_bound(base_inputs.support.begin(),
                                                     base_inputs.support.end(), cell.values[i]);
                    cell.support_idx[i] =
                        static_cast<int>(it - base_inputs.support.begin());
                }
            }
        }
    }

    struct DrawStats {
        bool ok = false;
        double dev_weights = 0.0;
        std::vector<double> dev_cf;       // per period, max over grid
        std::vector<double> dev_eff;      // per period
        std::vector<double> weights;      // pointwise mode only
        std::vector<std::vector<double>> cf;
        std::vector<std::vector<double>> eff;
    };
    const bool keep_draws = bcfg.bands == BandKind::Pointwise;
    std::vector<DrawStats> draws(b_n);

    parallel_for(b_n, threads, [&](int bi) {
        const int b = bi + 1;
        FitInputs inputs = base_inputs;
        std::vector<int> counts;
        try {
            for (int u = first_resampled; u < unit_count; ++u) {
                for (int t = 1; t <= t_total; ++t) {
                    const SortedCell& cell = cells[u][t - 1];
                    const int n = static_cast<int>(cell.values.size());
                    Rng rng(bcfg.seed, {static_cast<std::uint64_t>(b),
                                        static_cast<std::uint64_t>(u),
                                        static_cast<std::uint64_t>(t)});
                    int resampled_n = 0;
                    resample_counts(bcfg.mode, n, rng, counts, resampled_n);
                    if (continuous) {
                        resampled_quantile(cell, counts, resampled_n, spec.grid,
                                           inputs.quantiles[u][t - 1].values);
                    } else {
                        resampled_cdf(cell, counts, resampled_n,
                                      static_cast<int>(base_inputs.support.size()),
                                      inputs.cdfs[u][t - 1].cum);
                    }
                }
            }
            const DscFit fit_b = fit_from_inputs(inputs, spec, scfg, 1);
            DrawStats& s = draws[bi];
            s.dev_weights = max_abs_deviation(fit_b.averaged_weights.weights,
                                              base.averaged_weights.weights);
            s.dev_cf.resize(t_total);
            s.dev_eff.resize(t_total);
            for (int t = 1; t <= t_total; ++t) {
                const auto& cf_b = continuous ? fit_b.counterfactual_quantiles[t - 1].values
                                              : fit_b.counterfactual_cdfs[t - 1].cum;
                const auto& cf_0 = continuous ? base.counterfactual_quantiles[t - 1].values
                                              : base.counterfactual_cdfs[t - 1].cum;
                s.dev_cf[t - 1] = max_abs_deviation(cf_b, cf_0);
                s.dev_eff[t - 1] = max_abs_deviation(fit_b.effects[t - 1], base.effects[t - 1]);
            }
            if (keep_draws) {
                s.weights = fit_b.averaged_weights.weights;
                s.cf.resize(t_total);
                s.eff.resize(t_total);
                for (int t = 1; t <= t_total; ++t) {
                    s.cf[t - 1] = continuous ? fit_b.counterfactual_quantiles[t - 1].values
                                             : fit_b.counterfactual_cdfs[t - 1].cum;
                    s.eff[t - 1] = fit_b.effects[t - 1];
                }
            }
            s.ok = true;
        } catch (const Error&) {
            draws[bi].ok = false;
        }
    });

    BootstrapBands out;
    out.spec = spec;
    out.config = bcfg;
    out.support = base.support;
    for (const auto& d : draws) (d.ok ? out.draws_effective : out.draws_discarded)++;
    if (out.draws_discarded * 20 > b_n)
        throw_estimation(std::to_string(out.draws_discarded) + " of " + std::to_string(b_n) +
                         " bootstrap draws failed (more than 5%)");

    const double level = 1.0 - bcfg.alpha;
    if (bcfg.bands == BandKind::Uniform) {
        std::vector<double> devs;
        devs.reserve(out.draws_effective);
        for (const auto& d : draws)
            if (d.ok) devs.push_back(d.dev_weights);
        out.weights = uniform_band(base.averaged_weights.weights, devs, level);
        for (int t = 1; t <= t_total; ++t) {
            devs.clear();
            for (const auto& d : draws)
                if (d.ok) devs.push_back(d.dev_cf[t - 1]);
            const auto& cf_center = continuous ? base.counterfactual_quantiles[t - 1].values
                                               : base.counterfactual_cdfs[t - 1].cum;
            out.counterfactuals.push_back(uniform_band(cf_center, devs, level));
            devs.clear();
            for (const auto& d : draws)
                if (d.ok) devs.push_back(d.dev_eff[t - 1]);
            out.effects.push_back(uniform_band(base.effects[t - 1], devs, level));
        }
    } else {
        std::vector<std::vector<double>> w_draws;
        for (const auto& d : draws)
            if (d.ok) w_draws.push_back(d.weights);
        out.weights = pointwise_band(base.averaged_weights.weights, w_draws, bcfg.alpha);
        for (int t = 1; t <= t_total; ++t) {
            std::vector<std::vector<double>> cf_draws, eff_draws;
            for (const auto& d : draws) {
                if (!d.ok) continue;
                cf_draws.push_back(d.cf[t - 1]);
                eff_draws.push_back(d.eff[t - 1]);
            }
            const auto& cf_center = continuous ? base.counterfactual_quantiles[t - 1].values
                                               : base.counterfactual_cdfs[t - 1].cum;
            out.counterfactuals.push_back(pointwise_band(cf_center, cf_draws, bcfg.alpha));
            out.effects.push_back(pointwise_band(base.effects[t - 1], eff_draws, bcfg.alpha));
        }
    }
    return out;
}

std::string bands_json(const BootstrapBands& bands) {
    ordered_json out;
    out["spec"] = {{"treated", bands.spec.treated},
                   {"donors", bands.spec.donors},
                   {"t_star", bands.spec.t_star},
                   {"t_total", bands.spec.t_total},
                   {"outcome", to_string(bands.spec.outcome)},
                   {"grid_size", bands.spec.grid.g},
                   {"q_min", bands.spec.q_min},
                   {"q_max", bands.spec.q_max}};
    out["draws"] = bands.config.draws;
    out["draws_effective"] = bands.draws_effective;
    out["draws_discarded"] = bands.draws_discarded;
    out["alpha"] = bands.config.alpha;
    out["seed"] = bands.config.seed;
    out["mode"] = bands.config.mode == ResampleMode::WithReplacement ? "with-replacement"
                                                                     : "paper-literal";
    out["bands"] = bands.config.bands == BandKind::Uniform ? "uniform" : "pointwise";
    out["resample_treated"] = bands.config.resample_treated;
    if (!bands.support.empty()) out["support"] = bands.support;
    out["weights"] = band_json(bands.weights);
    ordered_json cf = ordered_json::array();
    ordered_json eff = ordered_json::array();
    for (int t = 1; t <= bands.spec.t_total; ++t) {
        ordered_json c = band_json(bands.counterfactuals[t - 1]);
        c["period"] = t;
        cf.push_back(std::move(c));
        ordered_json e = band_json(bands.effects[t - 1]);
        e["period"] = t;
        eff.push_back(std::move(e));
    }
    out["counterfactuals"] = std::move(cf);
    out["effects"] = std::move(eff);
    return out.dump(2) + "\n";
}

}  // namespace dsc
