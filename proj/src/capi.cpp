#include "dsc/dsc.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "dsc/bootstrap.hpp"
#include "dsc/error.hpp"
#include "dsc/estimator.hpp"
#include "dsc/inference.hpp"
#include "dsc/panel.hpp"
#include "dsc/parallel.hpp"
#include "dsc/simulation.hpp"
#include "json.hpp"

struct dsc_panel {
    dsc::MicroPanel panel;
    dsc::PanelSchema schema;
};

namespace {

thread_local std::string g_last_error;

dsc_status status_of(const dsc::Error& e) {
    switch (e.kind()) {
        case dsc::ErrorKind::Usage: return DSC_ERR_USAGE;
        case dsc::ErrorKind::Data: return DSC_ERR_DATA;
        case dsc::ErrorKind::Estimation: return DSC_ERR_ESTIMATION;
        case dsc::ErrorKind::Internal: return DSC_ERR_INTERNAL;
    }
    return DSC_ERR_INTERNAL;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Runs the body, translating exceptions into status codes and the
// thread-local error message.
template <typename Fn>
dsc_status guarded(Fn&& fn) {
    try {
        fn();
        return DSC_OK;
    } catch (const dsc::Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DSC_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return DSC_ERR_INTERNAL;
    }
}

dsc_status require(bool ok, const char* message) {
    if (ok) return DSC_OK;
    g_last_error = message;
    return DSC_ERR_USAGE;
}

dsc::FitSpec spec_from_options(const dsc_panel* panel, const dsc_fit_options* opt) {
    dsc::FitSpec spec;
    spec.treated = opt->treated ? opt->treated : "";
    for (int i = 0; i < opt->n_donors; ++i) spec.donors.emplace_back(opt->donors[i]);
    spec.t_star = opt->t_star;
    spec.t_total = opt->t_total > 0 ? opt->t_total : panel->panel.t_max;
    spec.outcome = dsc::outcome_kind_from_string(opt->outcome ? opt->outcome : "continuous");
    spec.grid.g = opt->grid_size;
    spec.q_min = opt->q_min;
    spec.q_max = opt->q_max;
    return spec;
}

dsc::SolverConfig solver_from_options(const dsc_fit_options* opt) {
    dsc::SolverConfig cfg;
    if (opt->max_iterations > 0) cfg.max_iterations = opt->max_iterations;
    if (opt->tolerance > 0.0) cfg.tolerance = opt->tolerance;
    return cfg;
}

int threads_from_options(const dsc_fit_options* opt) {
    return opt->threads > 0 ? opt->threads : dsc::default_threads();
}

}  // namespace

extern "C" {

const char* dsc_version(void) { return "1.0.0"; }

const char* dsc_last_error(void) { return g_last_error.c_str(); }

void dsc_string_free(char* s) { std::free(s); }

void dsc_panel_free(dsc_panel* panel) { delete panel; }

dsc_status dsc_panel_parse_csv(const char* csv, const char* unit_col, const char* period_col,
                               const char* outcome_col, dsc_panel** out) {
    if (dsc_status s = require(csv && out, "csv and out must not be NULL")) return s;
    return guarded([&] {
        auto handle = std::make_unique<dsc_panel>();
        if (unit_col) handle->schema.unit_col = unit_col;
        if (period_col) handle->schema.period_col = period_col;
        if (outcome_col) handle->schema.outcome_col = outcome_col;
        handle->panel = dsc::parse_long_csv(csv, handle->schema);
        *out = handle.release();
    });
}

dsc_status dsc_panel_from_spells_csv(const char* csv, const char* outcome,
                                     const char* const* boundaries, int n_boundaries,
                                     dsc_panel** out, long* excluded_tally) {
    if (dsc_status s = require(csv && outcome && boundaries && out,
                               "csv, outcome, boundaries, and out must not be NULL"))
        return s;
    return guarded([&] {
        const std::string kind = outcome;
        dsc::SpellOutcome so;
        if (kind == "tenure") so = dsc::SpellOutcome::Tenure;
        else if (kind == "title") so = dsc::SpellOutcome::Title;
        else dsc::throw_usage("outcome must be \"tenure\" or \"title\" for spell input");
        std::vector<dsc::Date> dates;
        for (int i = 0; i < n_boundaries; ++i)
            dates.push_back(dsc::parse_date_or_throw(boundaries[i], "quarter boundary"));
        const auto quarters = dsc::quarters_from_boundaries(dates);
        auto result = dsc::spells_to_panel(dsc::parse_spells_csv(csv), quarters, so);
        if (excluded_tally) *excluded_tally = result.excluded_future_start;
        auto handle = std::make_unique<dsc_panel>();
        handle->panel = std::move(result.panel);
        *out = handle.release();
    });
}

dsc_status dsc_panel_to_csv(const dsc_panel* panel, char** out_csv) {
    if (dsc_status s = require(panel && out_csv, "panel and out_csv must not be NULL")) return s;
    return guarded([&] { *out_csv = dup_string(panel->panel.to_csv(panel->schema)); });
}

dsc_status dsc_panel_summary_json(const dsc_panel* panel, char** out_json) {
    if (dsc_status s = require(panel && out_json, "panel and out_json must not be NULL")) return s;
    return guarded([&] { *out_json = dup_string(panel->panel.summary_json()); });
}

dsc_status dsc_panel_filter_donors(const dsc_panel* panel, const char* treated, double min_share,
                                   dsc_panel** out, char** dropped_json) {
    if (dsc_status s = require(panel && treated && out, "panel, treated, and out must not be NULL"))
        return s;
    return guarded([&] {
        auto result = dsc::filter_donors(panel->panel, treated, min_share);
        if (dropped_json) {
            nlohmann::json dropped = result.dropped;
            *dropped_json = dup_string(dropped.dump());
        }
        auto handle = std::make_unique<dsc_panel>();
        handle->panel = std::move(result.panel);
        handle->schema = panel->schema;
        *out = handle.release();
    });
}

void dsc_fit_options_init(dsc_fit_options* opt) {
    *opt = dsc_fit_options{};
    opt->outcome = "continuous";
    opt->grid_size = 1000;
    opt->q_min = 0.0;
    opt->q_max = 1.0;
    opt->max_iterations = 100000;
    opt->tolerance = 1e-12;
    opt->threads = 0;
}

dsc_status dsc_fit(const dsc_panel* panel, const dsc_fit_options* opt, char** out_json) {
    if (dsc_status s = require(panel && opt && out_json, "panel, opt, and out_json must not be NULL"))
        return s;
    return guarded([&] {
        const dsc::DscFit fit = dsc::fit(panel->panel, spec_from_options(panel, opt),
                                         solver_from_options(opt), threads_from_options(opt));
        *out_json = dup_string(dsc::fit_json(fit));
    });
}

dsc_status dsc_gram_diagnostic(const dsc_panel* panel, const dsc_fit_options* opt,
                               char** out_json) {
    if (dsc_status s = require(panel && opt && out_json, "panel, opt, and out_json must not be NULL"))
        return s;
    return guarded([&] {
        const dsc::FitSpec spec = spec_from_options(panel, opt);
        const dsc::FitInputs inputs = dsc::build_fit_inputs(panel->panel, spec);
        nlohmann::ordered_json out;
        out["treated"] = spec.treated;
        out["donors"] = spec.donors;
        out["outcome"] = dsc::to_string(spec.outcome);
        nlohmann::ordered_json periods = nlohmann::ordered_json::array();
        for (int t = 1; t <= spec.t_star; ++t) {
            dsc::GramDiagnostic diag;
            if (spec.outcome == dsc::OutcomeKind::Continuous) {
                std::vector<dsc::EmpiricalQuantile> controls;
                for (size_t j = 1; j < inputs.quantiles.size(); ++j)
                    controls.push_back(inputs.quantiles[j][t - 1]);
                diag = dsc::gram_diagnostic(controls, spec.q_min, spec.q_max);
            } else {
                std::vector<dsc::DiscreteCDF> controls;
                for (size_t j = 1; j < inputs.cdfs.size(); ++j)
                    controls.push_back(inputs.cdfs[j][t - 1]);
                diag = dsc::gram_diagnostic(controls);
            }
            nlohmann::ordered_json p;
            p["period"] = t;
            p["min_eigenvalue"] = diag.min_eigenvalue;
            p["warning"] = diag.warning;
            nlohmann::ordered_json rows = nlohmann::ordered_json::array();
            for (int j = 0; j < diag.size; ++j) {
                std::vector<double> row(diag.matrix.begin() + static_cast<long>(j) * diag.size,
                                        diag.matrix.begin() + static_cast<long>(j + 1) * diag.size);
                rows.push_back(row);
            }
            p["matrix"] = std::move(rows);
            periods.push_back(std::move(p));
        }
        out["periods"] = std::move(periods);
        *out_json = dup_string(out.dump(2) + "\n");
    });
}

void dsc_permute_options_init(dsc_permute_options* opt) {
    *opt = dsc_permute_options{};
    opt->range_min = 0.0;
    opt->range_max = 1.0;
}

dsc_status dsc_permutation_test(const dsc_panel* panel, const dsc_fit_options* opt,
                                const dsc_permute_options* popt, char** out_json) {
    if (dsc_status s = require(panel && opt && popt && out_json,
                               "panel, opt, popt, and out_json must not be NULL"))
        return s;
    return guarded([&] {
        dsc::PermutationOptions po;
        po.range_min = popt->range_min;
        po.range_max = popt->range_max;
        po.range_set = popt->range_set != 0;
        po.include_treated_in_placebo_pools = popt->include_treated_in_placebo_pools != 0;
        po.threads = threads_from_options(opt);
        const dsc::PermutationResult res = dsc::permutation_test(
            panel->panel, spec_from_options(panel, opt), solver_from_options(opt), po);
        *out_json = dup_string(dsc::permutation_json(res));
    });
}

void dsc_bootstrap_options_init(dsc_bootstrap_options* opt) {
    *opt = dsc_bootstrap_options{};
    opt->draws = 1000;
    opt->alpha = 0.05;
    opt->seed = 1;
    opt->mode = "with-replacement";
    opt->bands = "uniform";
}

dsc_status dsc_bootstrap(const dsc_panel* panel, const dsc_fit_options* opt,
                         const dsc_bootstrap_options* bopt, char** out_json) {
    if (dsc_status s = require(panel && opt && bopt && out_json,
                               "panel, opt, bopt, and out_json must not be NULL"))
        return s;
    return guarded([&] {
        dsc::BootstrapConfig bc;
        bc.draws = bopt->draws;
        bc.alpha = bopt->alpha;
        bc.seed = bopt->seed;
        const std::string mode = bopt->mode ? bopt->mode : "with-replacement";
        if (mode == "with-replacement") bc.mode = dsc::ResampleMode::WithReplacement;
        else if (mode == "paper-literal") bc.mode = dsc::ResampleMode::PaperLiteral;
        else dsc::throw_usage("mode must be \"with-replacement\" or \"paper-literal\"");
        const std::string bands = bopt->bands ? bopt->bands : "uniform";
        if (bands == "uniform") bc.bands = dsc::BandKind::Uniform;
        else if (bands == "pointwise") bc.bands = dsc::BandKind::Pointwise;
        else dsc::throw_usage("bands must be \"uniform\" or \"pointwise\"");
        bc.resample_treated = bopt->resample_treated != 0;
        const dsc::BootstrapBands res =
            dsc::bootstrap(panel->panel, spec_from_options(panel, opt), solver_from_options(opt),
                           bc, threads_from_options(opt));
        *out_json = dup_string(dsc::bands_json(res));
    });
}

dsc_status dsc_simspec_preset(const char* name, char** out_json) {
    if (dsc_status s = require(name && out_json, "name and out_json must not be NULL")) return s;
    return guarded([&] { *out_json = dup_string(dsc::simspec_to_json(dsc::preset_simspec(name))); });
}

dsc_status dsc_simulate(const char* simspec_json, int threads, dsc_panel** out_panel,
                        char** out_truth_json) {
    if (dsc_status s = require(simspec_json && out_panel,
                               "simspec_json and out_panel must not be NULL"))
        return s;
    return guarded([&] {
        const dsc::SimSpec sim = dsc::simspec_from_json(simspec_json);
        dsc::SimOutput res = dsc::generate(sim, threads > 0 ? threads : dsc::default_threads());
        if (out_truth_json) *out_truth_json = dup_string(dsc::truth_json(res));
        auto handle = std::make_unique<dsc_panel>();
        handle->panel = std::move(res.panel);
        *out_panel = handle.release();
    });
}

}  // extern "C"
