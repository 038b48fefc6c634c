#include <string>
#include <vector>

#include "doctest.h"
#include "dsc/bootstrap.hpp"
#include "dsc/estimator.hpp"
#include "dsc/inference.hpp"
#include "dsc/panel.hpp"
#include "dsc/rng.hpp"
#include "dsc/simulation.hpp"
#include "schema_check.hpp"

using namespace dsc;
using schema_check::check_json;

namespace {

MicroPanel continuous_panel(std::uint64_t seed) {
    Rng rng(seed);
    MicroPanel panel;
    for (int t = 1; t <= 3; ++t) {
        for (int i = 0; i < 80; ++i) panel.add("treated", t, rng.normal(50.0, 10.0));
        for (int i = 0; i < 80; ++i) panel.add("d1", t, rng.normal(48.0, 9.0));
        for (int i = 0; i < 80; ++i) panel.add("d2", t, rng.normal(55.0, 11.0));
        for (int i = 0; i < 80; ++i) panel.add("d3", t, rng.normal(52.0, 10.0));
    }
    panel.finalize();
    return panel;
}

MicroPanel ordinal_panel(std::uint64_t seed) {
    Rng rng(seed);
    MicroPanel panel;
    for (int t = 1; t <= 3; ++t) {
        for (int i = 0; i < 120; ++i) {
            panel.add("treated", t, static_cast<double>(1 + rng.bounded(5)));
            panel.add("d1", t, static_cast<double>(1 + rng.bounded(5)));
            panel.add("d2", t, static_cast<double>(1 + rng.bounded(4)));
            panel.add("d3", t, static_cast<double>(2 + rng.bounded(4)));
        }
    }
    panel.finalize();
    return panel;
}

FitSpec spec_for(OutcomeKind outcome) {
    FitSpec spec;
    spec.treated = "treated";
    spec.donors = {"d1", "d2", "d3"};
    spec.t_star = 2;
    spec.t_total = 3;
    spec.outcome = outcome;
    spec.grid = QuantileGrid{40};
    return spec;
}

void expect_valid(const std::string& text, const std::string& schema) {
    const std::vector<std::string> errors = check_json(text, schema);
    for (const auto& e : errors) MESSAGE(schema, ": ", e);
    CHECK(errors.empty());
}

}  // namespace

TEST_CASE("fit json matches its schema for both outcome shapes") {
    const DscFit cont = fit(continuous_panel(1), spec_for(OutcomeKind::Continuous), SolverConfig{});
    expect_valid(fit_json(cont), "fit.schema.json");

    const DscFit ord = fit(ordinal_panel(2), spec_for(OutcomeKind::Ordinal), SolverConfig{});
    expect_valid(fit_json(ord), "fit.schema.json");
}

TEST_CASE("panel summary json matches its schema") {
    expect_valid(continuous_panel(3).summary_json(), "summary.schema.json");

    MicroPanel holes;
    holes.add("A", 1, 1.0);
    holes.add("B", 2, 2.0);
    holes.finalize();
    expect_valid(holes.summary_json(), "summary.schema.json");
}

TEST_CASE("permutation json matches its schema") {
    const PermutationResult full =
        permutation_test(continuous_panel(4), spec_for(OutcomeKind::Continuous), SolverConfig{});
    expect_valid(permutation_json(full), "permutation.schema.json");

    PermutationOptions opt;
    opt.range_set = true;
    opt.range_min = 0.1;
    opt.range_max = 0.9;
    opt.include_treated_in_placebo_pools = true;
    const PermutationResult ranged = permutation_test(
        continuous_panel(5), spec_for(OutcomeKind::Continuous), SolverConfig{}, opt);
    expect_valid(permutation_json(ranged), "permutation.schema.json");
}

TEST_CASE("bootstrap bands json matches its schema") {
    BootstrapConfig cfg;
    cfg.draws = 12;
    const BootstrapBands uni =
        bootstrap(continuous_panel(6), spec_for(OutcomeKind::Continuous), SolverConfig{}, cfg);
    expect_valid(bands_json(uni), "bands.schema.json");

    cfg.bands = BandKind::Pointwise;
    cfg.mode = ResampleMode::PaperLiteral;
    const BootstrapBands pw =
        bootstrap(ordinal_panel(7), spec_for(OutcomeKind::Ordinal), SolverConfig{}, cfg);
    expect_valid(bands_json(pw), "bands.schema.json");
}

TEST_CASE("simspec and truth json match their schemas") {
    for (const char* name : {"null-dgp", "top-quantile-shift", "ordinal-mass-shift"}) {
        SimSpec sim = preset_simspec(name);
        expect_valid(simspec_to_json(sim), "simspec.schema.json");
        sim.n_per_cell = 40;  // keep generation cheap
        expect_valid(truth_json(generate(sim)), "truth.schema.json");
    }
}
