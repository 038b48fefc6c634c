#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "dsc/error.hpp"
#include "dsc/estimator.hpp"
#include "dsc/rng.hpp"
#include "dsc/simulation.hpp"
#include "json.hpp"

using namespace dsc;

namespace {

// Panel where the treated unit's samples equal donor "d1"'s in every period.
MicroPanel replication_panel(int t_total, int n_per_cell, bool shift_post = false,
                             int t_star = 2) {
    Rng rng(5150);
    MicroPanel panel;
    for (int t = 1; t <= t_total; ++t) {
        for (int i = 0; i < n_per_cell; ++i) {
            const double y = rng.normal(40.0, 8.0);
            panel.add("d1", t, y);
            panel.add("treated", t, shift_post && t > t_star ? y - 5.0 : y);
            panel.add("d2", t, rng.normal(70.0, 3.0));
        }
    }
    panel.finalize();
    return panel;
}

FitSpec base_spec(int t_star, int t_total) {
    FitSpec spec;
    spec.treated = "treated";
    spec.donors = {"d1", "d2"};
    spec.t_star = t_star;
    spec.t_total = t_total;
    spec.grid = QuantileGrid{100};
    return spec;
}

}  // namespace

TEST_CASE("counterfactual_quantile combines controls pointwise") {
    const QuantileGrid grid{10};
    EmpiricalQuantile a{grid, std::vector<double>(11)}, b{grid, std::vector<double>(11)};
    for (int i = 0; i <= 10; ++i) {
        a.values[i] = grid.point(i);
        b.values[i] = 2.0 * grid.point(i);
    }
    const std::vector<EmpiricalQuantile> controls = {a, b};

    const auto vertex = counterfactual_quantile(std::vector<double>{1.0, 0.0}, controls);
    CHECK(vertex.values == a.values);

    const auto mix = counterfactual_quantile(std::vector<double>{0.5, 0.5}, controls);
    for (int i = 0; i <= 10; ++i)
        CHECK(mix.values[i] == doctest::Approx(1.5 * grid.point(i)).epsilon(1e-15));
    CHECK(std::is_sorted(mix.values.begin(), mix.values.end()));

    const std::vector<EmpiricalQuantile> twins = {a, a};
    const auto same = counterfactual_quantile(std::vector<double>{0.3, 0.7}, twins);
    for (int i = 0; i <= 10; ++i) CHECK(same.values[i] == doctest::Approx(a.values[i]));

    CHECK_THROWS_AS(counterfactual_quantile(std::vector<double>{1.0}, controls), Error);
}

TEST_CASE("counterfactual_cdf combines controls pointwise and stays a CDF") {
    const DiscreteCDF f{{1.0, 2.0, 3.0}, {0.2, 0.6, 1.0}};
    const DiscreteCDF g{{1.0, 2.0, 3.0}, {0.5, 0.8, 1.0}};
    const std::vector<DiscreteCDF> controls = {f, g};

    const auto vertex = counterfactual_cdf(std::vector<double>{0.0, 1.0}, controls);
    CHECK(vertex.cum == g.cum);

    const auto mix = counterfactual_cdf(std::vector<double>{0.25, 0.75}, controls);
    CHECK(mix.cum[0] == doctest::Approx(0.25 * 0.2 + 0.75 * 0.5).epsilon(1e-15));
    CHECK_NOTHROW(mix.validate());

    const DiscreteCDF other{{9.0, 10.0}, {0.5, 1.0}};
    const std::vector<DiscreteCDF> bad = {f, other};
    CHECK_THROWS_AS(counterfactual_cdf(std::vector<double>{0.5, 0.5}, bad), Error);
}

TEST_CASE("fit reproduces an exactly replicated donor") {
    const MicroPanel panel = replication_panel(4, 400);
    const DscFit result = fit(panel, base_spec(2, 4), SolverConfig{});
    CHECK(result.averaged_weights.weights[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(result.averaged_weights.weights[1] == doctest::Approx(0.0).epsilon(1e-7));
    for (int t = 1; t <= 4; ++t)
        for (double e : effect_curve(result, t)) CHECK(std::fabs(e) < 1e-7);
    CHECK(result.all_converged());
    CHECK_FALSE(result.degenerate());
}

TEST_CASE("fit separates a shifted post-period from clean pre-periods") {
    const MicroPanel panel = replication_panel(4, 400, true);
    const DscFit result = fit(panel, base_spec(2, 4), SolverConfig{});
    for (int t = 1; t <= 2; ++t)
        for (double e : effect_curve(result, t)) CHECK(std::fabs(e) < 1e-7);
    for (int t = 3; t <= 4; ++t)
        for (double e : effect_curve(result, t)) CHECK(e == doctest::Approx(-5.0).epsilon(1e-6));
}

TEST_CASE("single pre-period fit averages to that period's weights") {
    const MicroPanel panel = replication_panel(2, 200);
    const DscFit result = fit(panel, base_spec(1, 2), SolverConfig{});
    REQUIRE(result.per_period_weights.size() == 1);
    for (std::size_t j = 0; j < result.averaged_weights.weights.size(); ++j)
        CHECK(result.averaged_weights.weights[j] ==
              doctest::Approx(result.per_period_weights[0].weights[j]).epsilon(1e-15));
}

TEST_CASE("averaged weights are the arithmetic mean of per-period weights") {
    SimSpec sim;
    sim.t_total = 3;
    sim.t_star = 3;
    sim.n_per_cell = 500;
    sim.seed = 99;
    sim.true_weights = {0.5, 0.5};
    Family f1{Family::Kind::Normal, 30.0, 5.0, {}, {}};
    Family f2{Family::Kind::Uniform, 10.0, 90.0, {}, {}};
    // Different families per period so per-period weights genuinely differ.
    Family f1b{Family::Kind::Normal, 45.0, 9.0, {}, {}};
    Family f2b{Family::Kind::Uniform, 0.0, 50.0, {}, {}};
    sim.donor_families = {{f1, f1b, f1}, {f2, f2b, f2}};
    const SimOutput out = generate(sim);

    FitSpec spec;
    spec.treated = out.treated_name;
    spec.donors = out.donor_names;
    spec.t_star = 3;
    spec.t_total = 3;
    spec.grid = QuantileGrid{50};
    const DscFit result = fit(out.panel, spec, SolverConfig{});
    REQUIRE(result.per_period_weights.size() == 3);
    for (std::size_t j = 0; j < result.averaged_weights.weights.size(); ++j) {
        double mean = 0.0;
        for (const auto& w : result.per_period_weights) mean += w.weights[j] / 3.0;
        CHECK(result.averaged_weights.weights[j] == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("averaged-weights objective is never below the per-period optimum") {
    SimSpec sim;
    sim.t_total = 4;
    sim.t_star = 3;
    sim.n_per_cell = 300;
    sim.seed = 314;
    sim.true_weights = {0.3, 0.3, 0.4};
    Family a{Family::Kind::Normal, 30.0, 5.0, {}, {}};
    Family b{Family::Kind::Normal, 50.0, 10.0, {}, {}};
    Family c{Family::Kind::Uniform, 20.0, 80.0, {}, {}};
    sim.donor_families = {{a}, {b}, {c}};
    const SimOutput out = generate(sim);

    FitSpec spec;
    spec.treated = out.treated_name;
    spec.donors = out.donor_names;
    spec.t_star = 3;
    spec.t_total = 4;
    spec.grid = QuantileGrid{80};
    const FitInputs inputs = build_fit_inputs(out.panel, spec);
    const DscFit result = fit_from_inputs(inputs, spec, SolverConfig{});
    for (int t = 1; t <= spec.t_star; ++t) {
        std::vector<EmpiricalQuantile> controls;
        for (int j = 1; j <= 3; ++j) controls.push_back(inputs.quantiles[j][t - 1]);
        const double averaged_objective = quantile_mixture_objective(
            result.averaged_weights.weights, inputs.quantiles[0][t - 1], controls);
        CHECK(averaged_objective >= result.per_period_weights[t - 1].objective - 1e-10);
    }
}

TEST_CASE("ordinal counterfactual is a valid CDF and effects are mass differences") {
    Rng rng(77);
    MicroPanel panel;
    for (int t = 1; t <= 3; ++t) {
        for (int i = 0; i < 400; ++i) {
            panel.add("treated", t, 1.0 + static_cast<double>(rng.bounded(5)));
            panel.add("d1", t, 1.0 + static_cast<double>(rng.bounded(4)));
            panel.add("d2", t, 2.0 + static_cast<double>(rng.bounded(4)));
        }
    }
    panel.finalize();
    FitSpec spec = base_spec(2, 3);
    spec.outcome = OutcomeKind::Ordinal;
    const DscFit result = fit(panel, spec, SolverConfig{});
    REQUIRE_FALSE(result.support.empty());
    for (int t = 1; t <= 3; ++t) {
        CHECK_NOTHROW(result.counterfactual_cdfs[t - 1].validate());
        const auto& eff = effect_curve(result, t);
        REQUIRE(eff.size() == result.support.size());
        for (std::size_t k = 0; k < eff.size(); ++k)
            CHECK(eff[k] == doctest::Approx(result.observed_cdfs[t - 1].cum[k] -
                                            result.counterfactual_cdfs[t - 1].cum[k])
                                .epsilon(1e-12));
    }
}

TEST_CASE("share outcomes reduce to scalar synthetic control on the share") {
    Rng rng(123);
    MicroPanel panel;
    const double shares[3] = {0.35, 0.2, 0.7};  // treated, d1, d2
    const char* names[3] = {"treated", "d1", "d2"};
    for (int u = 0; u < 3; ++u)
        for (int t = 1; t <= 2; ++t)
            for (int i = 0; i < 1000; ++i)
                panel.add(names[u], t, rng.uniform() < shares[u] ? 1.0 : 0.0);
    panel.finalize();
    FitSpec spec = base_spec(1, 2);
    spec.outcome = OutcomeKind::Share;
    const DscFit result = fit(panel, spec, SolverConfig{});
    // Empirical shares of "1" per unit in period 1.
    double s[3];
    for (int u = 0; u < 3; ++u) {
        const auto& cell = panel.cell(u, 1);
        s[u] = std::count(cell.begin(), cell.end(), 1.0) / static_cast<double>(cell.size());
    }
    const auto& w = result.per_period_weights[0];
    const double mix_share = w.weights[0] * s[1] + w.weights[1] * s[2];
    CHECK(w.objective == doctest::Approx(std::fabs(mix_share - s[0])).epsilon(1e-9));
}

TEST_CASE("missing cells are reported by name") {
    MicroPanel panel;
    panel.add("treated", 1, 1.0);
    panel.add("treated", 2, 1.0);
    panel.add("d1", 1, 2.0);
    panel.add("d1", 2, 2.0);
    panel.add("d2", 1, 3.0);  // d2 missing period 2
    panel.finalize();
    FitSpec spec = base_spec(1, 2);
    CHECK_THROWS_WITH_AS(fit(panel, spec, SolverConfig{}), doctest::Contains("d2"), Error);
    CHECK_THROWS_WITH_AS(fit(panel, spec, SolverConfig{}), doctest::Contains("period 2"), Error);
}

TEST_CASE("unknown units are rejected up front") {
    const MicroPanel panel = replication_panel(2, 20);
    FitSpec spec = base_spec(1, 2);
    spec.donors = {"d1", "ghost"};
    CHECK_THROWS_WITH_AS(fit(panel, spec, SolverConfig{}), doctest::Contains("ghost"), Error);
    spec.donors = {"d1", "d2"};
    spec.treated = "nobody";
    CHECK_THROWS_AS(fit(panel, spec, SolverConfig{}), Error);
}

TEST_CASE("FitSpec validation catches bad period splits and duplicate donors") {
    FitSpec spec = base_spec(3, 2);  // t_star > t_total
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = base_spec(0, 2);
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = base_spec(1, 2);
    spec.donors = {"d1", "d1"};
    CHECK_THROWS_AS(spec.validate(), Error);
    spec.donors = {"d1", "treated"};
    CHECK_THROWS_AS(spec.validate(), Error);
    spec.donors = {};
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = base_spec(1, 2);
    spec.q_min = 0.8;
    spec.q_max = 0.2;
    CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("fit results are identical across thread counts") {
    const MicroPanel panel = replication_panel(5, 150);
    const FitSpec spec = base_spec(4, 5);
    const DscFit one = fit(panel, spec, SolverConfig{}, 1);
    const DscFit many = fit(panel, spec, SolverConfig{}, 4);
    CHECK(fit_json(one) == fit_json(many));
}

TEST_CASE("pre-period effects shrink toward zero as cells grow") {
    double sup_small = 0.0, sup_large = 0.0;
    for (const long n : {1000L, 100000L}) {
        SimSpec sim;
        sim.t_total = 3;
        sim.t_star = 3;
        sim.n_per_cell = n;
        sim.seed = 2024;
        sim.true_weights = {0.3, 0.7};
        Family a{Family::Kind::Normal, 40.0, 5.0, {}, {}};
        Family b{Family::Kind::Uniform, 20.0, 90.0, {}, {}};
        sim.donor_families = {{a}, {b}};
        const SimOutput out = generate(sim);
        FitSpec spec;
        spec.treated = out.treated_name;
        spec.donors = out.donor_names;
        spec.t_star = 3;
        spec.t_total = 3;
        spec.grid = QuantileGrid{100};
        const DscFit result = fit(out.panel, spec, SolverConfig{});
        double sup = 0.0;
        for (int t = 1; t <= 3; ++t)
            for (double e : effect_curve(result, t)) sup = std::max(sup, std::fabs(e));
        (n == 1000 ? sup_small : sup_large) = sup;
    }
    CHECK(sup_large < sup_small);
}

TEST_CASE("fit_json carries the full report and zeroes tiny weights") {
    const MicroPanel panel = replication_panel(3, 300);
    const DscFit result = fit(panel, base_spec(2, 3), SolverConfig{});
    const auto doc = nlohmann::json::parse(fit_json(result));
    CHECK(doc["spec"]["treated"] == "treated");
    CHECK(doc["spec"]["donors"].size() == 2);
    CHECK(doc["periods"].size() == 3);
    CHECK(doc["periods"][0]["phase"] == "pre");
    CHECK(doc["periods"][2]["phase"] == "post");
    CHECK(doc["per_period_weights"].size() == 2);
    CHECK(doc["diagnostics"].size() == 2);
    // d2 receives (numerically) zero weight; serialization must print exact 0.
    const auto& w = doc["averaged_weights"]["weights"];
    CHECK(w[0]["donor"] == "d1");
    CHECK(w[1]["weight"].get<double>() == 0.0);
}
