#include "dsc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dsc/error.hpp"
#include "dsc/parallel.hpp"
#include "json.hpp"

namespace dsc {
namespace {

using ordered_json = nlohmann::ordered_json;

// Serialization rounds weights below this to an exact 0.
constexpr double kWeightPrintFloor = 1e-10;

std::vector<int> resolve_units(const MicroPanel& panel, const FitSpec& spec) {
    std::vector<int> idx;
    idx.reserve(spec.donors.size() + 1);
    const int treated = panel.unit_index(spec.treated);
    if (treated < 0) throw_data("unit \"" + spec.treated + "\" not found in panel");
    idx.push_back(treated);
    for (const auto& d : spec.donors) {
        const int u = panel.unit_index(d);
        if (u < 0) throw_data("unit \"" + d + "\" not found in panel");
        idx.push_back(u);
    }
    return idx;
}

double print_weight(double w) { return w < kWeightPrintFloor ? 0.0 : w; }

ordered_json weights_json(const SimplexWeights& w, const std::vector<std::string>& donors) {
    ordered_json out;
    ordered_json arr = ordered_json::array();
    for (size_t j = 0; j < w.weights.size(); ++j)
        arr.push_back({{"donor", donors[j]}, {"weight", print_weight(w.weights[j])}});
    out["weights"] = std::move(arr);
    out["objective"] = w.objective;
    out["iterations"] = w.iterations;
    out["converged"] = w.converged;
    out["degenerate"] = w.degenerate;
    return out;
}

}  // namespace

OutcomeKind outcome_kind_from_string(const std::string& s) {
    if (s == "continuous") return OutcomeKind::Continuous;
    if (s == "ordinal") return OutcomeKind::Ordinal;
    if (s == "share") return OutcomeKind::Share;
    throw_usage("unknown outcome kind \"" + s + "\" (expected continuous, ordinal, or share)");
}

std::string to_string(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::Continuous: return "continuous";
        case OutcomeKind::Ordinal: return "ordinal";
        case OutcomeKind::Share: return "share";
    }
    throw_internal("unhandled outcome kind");
}

void FitSpec::validate() const {
    if (treated.empty()) throw_usage("treated unit not set");
    if (donors.empty()) throw_usage("donor list is empty");
    std::set<std::string> seen;
    for (const auto& d : donors) {
        if (d == treated) throw_usage("donor list contains the treated unit \"" + d + "\"");
        if (!seen.insert(d).second) throw_usage("donor \"" + d + "\" listed twice");
    }
    if (t_star < 1) throw_usage("need at least one pre-period");
    if (t_total < t_star) throw_usage("total periods cannot precede the intervention");
    if (grid.g < 2) throw_usage("grid size must be at least 2");
    if (!(q_min >= 0.0 && q_min < q_max && q_max <= 1.0))
        throw_usage("quantile range must satisfy 0 <= q_min < q_max <= 1");
}

bool DscFit::degenerate() const {
    for (const auto& w : per_period_weights)
        if (w.degenerate) return true;
    return false;
}

bool DscFit::all_converged() const {
    for (const auto& w : per_period_weights)
        if (!w.converged) return false;
    return true;
}

FitInputs build_fit_inputs(const MicroPanel& panel, const FitSpec& spec) {
    spec.validate();
    if (panel.t_max < spec.t_total)
        throw_data("panel has " + std::to_string(panel.t_max) + " periods but the fit needs " +
                   std::to_string(spec.t_total));
    const std::vector<int> units = resolve_units(panel, spec);
    FitInputs inputs;
    if (spec.outcome == OutcomeKind::Continuous) {
        inputs.quantiles.resize(units.size());
        for (size_t u = 0; u < units.size(); ++u) {
            inputs.quantiles[u].reserve(spec.t_total);
            for (int t = 1; t <= spec.t_total; ++t)
                inputs.quantiles[u].push_back(empirical_quantile(panel.cell(units[u], t), spec.grid));
        }
        return inputs;
    }
    // One shared support across every unit and period keeps all CDFs
    // comparable at common y.
    std::set<double> values;
    for (size_t u = 0; u < units.size(); ++u)
        for (int t = 1; t <= spec.t_total; ++t)
            for (double v : panel.cell(units[u], t)) values.insert(v);
    inputs.support.assign(values.begin(), values.end());
    inputs.cdfs.resize(units.size());
    for (size_t u = 0; u < units.size(); ++u) {
        inputs.cdfs[u].reserve(spec.t_total);
        for (int t = 1; t <= spec.t_total; ++t)
            inputs.cdfs[u].push_back(empirical_cdf(panel.cell(units[u], t), inputs.support));
    }
    return inputs;
}

DscFit fit_from_inputs(const FitInputs& inputs, const FitSpec& spec, const SolverConfig& cfg,
                       int threads) {
    spec.validate();
    const bool continuous = spec.outcome == OutcomeKind::Continuous;
    const int j_count = static_cast<int>(spec.donors.size());
    if (inputs.num_units() != j_count + 1)
        throw_internal("fit inputs cover " + std::to_string(inputs.num_units()) +
                       " units, expected " + std::to_string(j_count + 1));

    DscFit fit;
    fit.spec = spec;
    fit.support = inputs.support;
    fit.per_period_weights.resize(spec.t_star);
    fit.diagnostics.resize(spec.t_star);

    // Rearranged control curves, one contiguous list per period.
    std::vector<std::vector<EmpiricalQuantile>> q_controls;
    std::vector<std::vector<DiscreteCDF>> c_controls;
    for (int t = 1; t <= spec.t_total; ++t) {
        if (continuous) {
            auto& per = q_controls.emplace_back();
            for (int j = 1; j <= j_count; ++j) per.push_back(inputs.quantiles[j][t - 1]);
        } else {
            auto& per = c_controls.emplace_back();
            for (int j = 1; j <= j_count; ++j) per.push_back(inputs.cdfs[j][t - 1]);
        }
    }

    parallel_for(spec.t_star, threads, [&](int i) {
        const int t = i + 1;
        if (continuous) {
            fit.diagnostics[i] = gram_diagnostic(q_controls[t - 1], spec.q_min, spec.q_max);
            fit.per_period_weights[i] = solve_quantile_weights(
                inputs.quantiles[0][t - 1], q_controls[t - 1], cfg, spec.q_min, spec.q_max);
        } else {
            fit.diagnostics[i] = gram_diagnostic(c_controls[t - 1]);
            fit.per_period_weights[i] =
                solve_cdf_weights(inputs.cdfs[0][t - 1], c_controls[t - 1], cfg);
        }
        fit.per_period_weights[i].degenerate = fit.diagnostics[i].warning;
    });

    // Plain arithmetic mean over pre-periods; only numerical clamping, no
    // renormalization.
    SimplexWeights avg;
    avg.weights.assign(j_count, 0.0);
    for (const auto& w : fit.per_period_weights) {
        for (int j = 0; j < j_count; ++j) avg.weights[j] += w.weights[j];
        avg.iterations += w.iterations;
        avg.converged = avg.converged && w.converged;
        avg.degenerate = avg.degenerate || w.degenerate;
    }
    for (int j = 0; j < j_count; ++j) {
        avg.weights[j] /= spec.t_star;
        if (avg.weights[j] < 0.0) avg.weights[j] = 0.0;
    }

    double avg_obj = 0.0;
    for (int t = 1; t <= spec.t_star; ++t) {
        avg_obj += continuous
                       ? quantile_mixture_objective(avg.weights, inputs.quantiles[0][t - 1],
                                                    q_controls[t - 1], spec.q_min, spec.q_max)
                       : cdf_mixture_objective(avg.weights, inputs.cdfs[0][t - 1],
                                               c_controls[t - 1]);
    }
    avg.objective = avg_obj / spec.t_star;
    fit.averaged_weights = std::move(avg);

    for (int t = 1; t <= spec.t_total; ++t) {
        if (continuous) {
            fit.observed_quantiles.push_back(inputs.quantiles[0][t - 1]);
            fit.counterfactual_quantiles.push_back(
                counterfactual_quantile(fit.averaged_weights.weights, q_controls[t - 1]));
            const auto& obs = fit.observed_quantiles.back().values;
            const auto& cf = fit.counterfactual_quantiles.back().values;
            std::vector<double> eff(obs.size());
            for (size_t i = 0; i < obs.size(); ++i) eff[i] = obs[i] - cf[i];
            fit.effects.push_back(std::move(eff));
        } else {
            fit.observed_cdfs.push_back(inputs.cdfs[0][t - 1]);
            fit.counterfactual_cdfs.push_back(
                counterfactual_cdf(fit.averaged_weights.weights, c_controls[t - 1]));
            const auto& obs = fit.observed_cdfs.back().cum;
            const auto& cf = fit.counterfactual_cdfs.back().cum;
            std::vector<double> eff(obs.size());
            for (size_t i = 0; i < obs.size(); ++i) eff[i] = obs[i] - cf[i];
            fit.effects.push_back(std::move(eff));
        }
    }
    return fit;
}

DscFit fit(const MicroPanel& panel, const FitSpec& spec, const SolverConfig& cfg, int threads) {
    return fit_from_inputs(build_fit_inputs(panel, spec), spec, cfg, threads);
}

EmpiricalQuantile counterfactual_quantile(std::span<const double> weights,
                                          std::span<const EmpiricalQuantile> controls) {
    if (controls.empty()) throw_internal("counterfactual: no controls");
    if (weights.size() != controls.size())
        throw_internal("counterfactual: weight count does not match control count");
    EmpiricalQuantile out;
    out.grid = controls[0].grid;
    out.values.assign(controls[0].values.size(), 0.0);
    for (size_t j = 0; j < controls.size(); ++j) {
        if (!(controls[j].grid == out.grid))
            throw_internal("counterfactual: mismatched quantile grids");
        for (size_t i = 0; i < out.values.size(); ++i)
            out.values[i] += weights[j] * controls[j].values[i];
    }
    return out;
}

DiscreteCDF counterfactual_cdf(std::span<const double> weights,
                               std::span<const DiscreteCDF> controls) {
    if (controls.empty()) throw_internal("counterfactual: no controls");
    if (weights.size() != controls.size())
        throw_internal("counterfactual: weight count does not match control count");
    DiscreteCDF out;
    out.support = controls[0].support;
    out.cum.assign(out.support.size(), 0.0);
    for (size_t j = 0; j < controls.size(); ++j) {
        if (controls[j].support != out.support)
            throw_internal("counterfactual: mismatched supports");
        for (size_t k = 0; k < out.cum.size(); ++k) out.cum[k] += weights[j] * controls[j].cum[k];
    }
    return out;
}

const std::vector<double>& effect_curve(const DscFit& fit, int period) {
    if (period < 1 || period > fit.spec.t_total)
        throw_usage("period " + std::to_string(period) + " outside 1.." +
                    std::to_string(fit.spec.t_total));
    return fit.effects[period - 1];
}

std::string fit_json(const DscFit& fit) {
    const bool continuous = fit.spec.outcome == OutcomeKind::Continuous;
    ordered_json out;
    out["spec"] = {{"treated", fit.spec.treated},
                   {"donors", fit.spec.donors},
                   {"t_star", fit.spec.t_star},
                   {"t_total", fit.spec.t_total},
                   {"outcome", to_string(fit.spec.outcome)},
                   {"grid_size", fit.spec.grid.g},
                   {"q_min", fit.spec.q_min},
                   {"q_max", fit.spec.q_max}};
    out["averaged_weights"] = weights_json(fit.averaged_weights, fit.spec.donors);
    ordered_json per = ordered_json::array();
    for (size_t i = 0; i < fit.per_period_weights.size(); ++i) {
        ordered_json w = weights_json(fit.per_period_weights[i], fit.spec.donors);
        w["period"] = static_cast<int>(i) + 1;
        per.push_back(std::move(w));
    }
    out["per_period_weights"] = std::move(per);

    ordered_json diags = ordered_json::array();
    for (size_t i = 0; i < fit.diagnostics.size(); ++i) {
        const auto& d = fit.diagnostics[i];
        diags.push_back({{"period", static_cast<int>(i) + 1},
                         {"min_eigenvalue", d.min_eigenvalue},
                         {"warning", d.warning}});
    }
    out["diagnostics"] = std::move(diags);

    if (!continuous) out["support"] = fit.support;
    ordered_json periods = ordered_json::array();
    for (int t = 1; t <= fit.spec.t_total; ++t) {
        ordered_json p;
        p["period"] = t;
        p["phase"] = t <= fit.spec.t_star ? "pre" : "post";
        if (continuous) {
            p["observed"] = fit.observed_quantiles[t - 1].values;
            p["counterfactual"] = fit.counterfactual_quantiles[t - 1].values;
        } else {
            p["observed"] = fit.observed_cdfs[t - 1].cum;
            p["counterfactual"] = fit.counterfactual_cdfs[t - 1].cum;
        }
        p["effect"] = fit.effects[t - 1];
        periods.push_back(std::move(p));
    }
    out["periods"] = std::move(periods);
    out["degenerate"] = fit.degenerate();
    out["converged"] = fit.all_converged();
    return out.dump(2) + "\n";
}

}  // namespace dsc
