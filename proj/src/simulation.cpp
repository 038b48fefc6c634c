#include "dsc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "dsc/error.hpp"
#include "dsc/parallel.hpp"
#include "dsc/rng.hpp"
#include "json.hpp"

namespace dsc {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Population pmf of the treated mixture on a common support, with the
// post-period mass shift applied when requested.
std::vector<double> mixture_pmf(const SimSpec& sim, int period, const std::vector<double>& support,
                                bool with_effect) {
    std::vector<double> pmf(support.size(), 0.0);
    for (int j = 0; j < sim.num_donors(); ++j) {
        const Family& fam = sim.family(j, period);
        for (size_t k = 0; k < fam.support.size(); ++k) {
            const auto it = std::lower_bound(support.begin(), support.end(), fam.support[k]);
            if (it == support.end() || *it != fam.support[k])
                throw_internal("family support value missing from the union support");
            pmf[it - support.begin()] += sim.true_weights[j] * fam.probs[k];
        }
    }
    if (with_effect && sim.effect.kind == EffectSpec::Kind::CdfMassShift) {
        const auto from = std::lower_bound(support.begin(), support.end(), sim.effect.from_value);
        const auto to = std::lower_bound(support.begin(), support.end(), sim.effect.to_value);
        if (from == support.end() || *from != sim.effect.from_value || to == support.end() ||
            *to != sim.effect.to_value)
            throw_data("mass shift endpoints are not in the outcome support");
        const size_t fi = from - support.begin();
        const size_t ti = to - support.begin();
        if (pmf[fi] < sim.effect.mass - 1e-12)
            throw_data("mass shift exceeds the probability available at the source value");
        pmf[fi] -= sim.effect.mass;
        pmf[ti] += sim.effect.mass;
    }
    return pmf;
}

// Union of donor family supports across all periods, plus mass-shift
// endpoints; one support serves every period.
std::vector<double> population_support(const SimSpec& sim) {
    std::set<double> values;
    for (int j = 0; j < sim.num_donors(); ++j)
        for (int t = 1; t <= sim.t_total; ++t) {
            const Family& fam = sim.family(j, t);
            values.insert(fam.support.begin(), fam.support.end());
        }
    if (sim.effect.kind == EffectSpec::Kind::CdfMassShift) {
        values.insert(sim.effect.from_value);
        values.insert(sim.effect.to_value);
    }
    return {values.begin(), values.end()};
}

double mixture_cdf(const SimSpec& sim, int period, double y) {
    double p = 0.0;
    for (int j = 0; j < sim.num_donors(); ++j)
        p += sim.true_weights[j] * sim.family(j, period).cdf(y);
    return p;
}

// Generalized inverse of the continuous mixture CDF by bisection between the
// extreme component quantiles.
double mixture_cdf_quantile(const SimSpec& sim, int period, double q) {
    double lo = kInf, hi = -kInf;
    for (int j = 0; j < sim.num_donors(); ++j) {
        const double v = sim.family(j, period).quantile(q);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo >= hi) return q <= 0.5 ? lo : hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mixture_cdf(sim, period, mid) >= q) hi = mid;
        else lo = mid;
        if (hi - lo < 1e-13 * std::max(1.0, std::fabs(hi))) break;
    }
    return hi;
}

double quantile_mixture_value(const SimSpec& sim, int period, double q) {
    double y = 0.0;
    for (int j = 0; j < sim.num_donors(); ++j)
        y += sim.true_weights[j] * sim.family(j, period).quantile(q);
    return y;
}

int pick_donor(const SimSpec& sim, double u) {
    double cum = 0.0;
    for (int j = 0; j < sim.num_donors(); ++j) {
        cum += sim.true_weights[j];
        if (u <= cum) return j;
    }
    return sim.num_donors() - 1;
}

std::vector<double> draw_cell(const SimSpec& sim, int unit, int period,
                              const std::vector<double>& support) {
    Rng rng(sim.seed, {static_cast<std::uint64_t>(unit), static_cast<std::uint64_t>(period)});
    std::vector<double> out(sim.n_per_cell);
    const bool post = period > sim.t_star;
    if (unit > 0) {
        const Family& fam = sim.family(unit - 1, period);
        for (auto& y : out) y = fam.quantile(rng.uniform_open());
        return out;
    }
    if (sim.mixture == MixtureMode::Quantile) {
        for (auto& y : out) {
            const double u = rng.uniform_open();
            y = quantile_mixture_value(sim, period, u);
            if (post && sim.effect.kind == EffectSpec::Kind::QuantileShift && u >= sim.effect.q_from)
                y += sim.effect.shift;
        }
        return out;
    }
    if (sim.outcome == OutcomeKind::Continuous) {
        // CDF-mixture sampling by composition; the effect applies by the
        // draw's position in the mixture CDF.
        for (auto& y : out) {
            const int j = pick_donor(sim, rng.uniform_open());
            y = sim.family(j, period).quantile(rng.uniform_open());
            if (post && sim.effect.kind == EffectSpec::Kind::QuantileShift &&
                mixture_cdf(sim, period, y) >= sim.effect.q_from)
                y += sim.effect.shift;
        }
        return out;
    }
    const std::vector<double> pmf = mixture_pmf(sim, period, support, post);
    for (auto& y : out) {
        const double u = rng.uniform_open();
        double cum = 0.0;
        size_t k = 0;
        for (; k + 1 < pmf.size(); ++k) {
            cum += pmf[k];
            if (u <= cum) break;
        }
        y = support[k];
    }
    return out;
}

}  // namespace

void Family::validate() const {
    switch (kind) {
        case Kind::Normal:
        case Kind::Exponential:
            if (!(b > 0.0)) throw_usage("family scale/rate must be positive");
            break;
        case Kind::Uniform:
            if (!(a < b)) throw_usage("uniform family needs low < high");
            break;
        case Kind::PointMass:
            break;
        case Kind::Discrete: {
            if (support.empty() || support.size() != probs.size())
                throw_usage("discrete family needs matching support and probabilities");
            double sum = 0.0;
            for (size_t k = 0; k < support.size(); ++k) {
                if (k && !(support[k] > support[k - 1]))
                    throw_usage("discrete family support must be strictly increasing");
                if (probs[k] < 0.0) throw_usage("discrete family probabilities must be >= 0");
                sum += probs[k];
            }
            if (std::fabs(sum - 1.0) > 1e-9)
                throw_usage("discrete family probabilities must sum to 1");
            break;
        }
    }
}

double Family::quantile(double u) const {
    switch (kind) {
        case Kind::Normal:
            if (u <= 0.0) return -kInf;
            if (u >= 1.0) return kInf;
            return a + b * normal_quantile(u);
        case Kind::Uniform:
            return a + (b - a) * std::clamp(u, 0.0, 1.0);
        case Kind::Exponential:
            if (u <= 0.0) return a;
            if (u >= 1.0) return kInf;
            return a - std::log1p(-u) / b;
        case Kind::PointMass:
            return a;
        case Kind::Discrete: {
            double cum = 0.0;
            for (size_t k = 0; k + 1 < support.size(); ++k) {
                cum += probs[k];
                if (u <= cum) return support[k];
            }
            return support.back();
        }
    }
    throw_internal("unhandled family kind");
}

double Family::cdf(double y) const {
    switch (kind) {
        case Kind::Normal:
            return normal_cdf((y - a) / b);
        case Kind::Uniform:
            return std::clamp((y - a) / (b - a), 0.0, 1.0);
        case Kind::Exponential:
            return y <= a ? 0.0 : 1.0 - std::exp(-b * (y - a));
        case Kind::PointMass:
            return y >= a ? 1.0 : 0.0;
        case Kind::Discrete: {
            double cum = 0.0;
            for (size_t k = 0; k < support.size() && support[k] <= y; ++k) cum += probs[k];
            return cum;
        }
    }
    throw_internal("unhandled family kind");
}

const Family& SimSpec::family(int donor, int period) const {
    const auto& per_donor = donor_families[donor];
    return per_donor.size() == 1 ? per_donor[0] : per_donor[period - 1];
}

void SimSpec::validate() const {
    if (t_star < 1) throw_usage("need at least one pre-period");
    if (t_total < t_star) throw_usage("total periods cannot precede the intervention");
    if (n_per_cell < 1) throw_usage("need at least one observation per cell");
    if (donor_families.empty()) throw_usage("need at least one donor family");
    if (true_weights.size() != donor_families.size())
        throw_usage("true weights must match the donor count");
    double sum = 0.0;
    for (double w : true_weights) {
        if (w < 0.0) throw_usage("true weights must be non-negative");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw_usage("true weights must sum to 1");
    for (const auto& per_donor : donor_families) {
        if (per_donor.size() != 1 && static_cast<int>(per_donor.size()) != t_total)
            throw_usage("each donor needs one family or one per period");
        for (const auto& fam : per_donor) fam.validate();
    }
    const bool discrete_outcome = outcome != OutcomeKind::Continuous;
    if (discrete_outcome) {
        if (mixture != MixtureMode::Cdf)
            throw_usage("ordinal and share outcomes require the cdf mixture mode");
        for (const auto& per_donor : donor_families)
            for (const auto& fam : per_donor)
                if (!fam.discrete())
                    throw_usage("ordinal and share outcomes need discrete families");
    }
    if (outcome == OutcomeKind::Share) {
        for (const auto& per_donor : donor_families)
            for (const auto& fam : per_donor)
                if (fam.kind != Family::Kind::Discrete || fam.support != std::vector<double>{0.0, 1.0})
                    throw_usage("share outcomes need Bernoulli families on support {0, 1}");
    }
    if (effect.kind == EffectSpec::Kind::QuantileShift && discrete_outcome)
        throw_usage("quantile-shift effects need a continuous outcome");
    if (effect.kind == EffectSpec::Kind::CdfMassShift && !discrete_outcome)
        throw_usage("mass-shift effects need an ordinal or share outcome");
    if (effect.kind == EffectSpec::Kind::QuantileShift &&
        !(effect.q_from >= 0.0 && effect.q_from <= 1.0))
        throw_usage("quantile-shift threshold must lie in [0, 1]");
    if (effect.kind == EffectSpec::Kind::CdfMassShift && effect.mass < 0.0)
        throw_usage("mass shift must be non-negative");
}

SimOutput generate(const SimSpec& sim, int threads) {
    sim.validate();
    const int j_count = sim.num_donors();
    const int unit_count = j_count + 1;
    const bool continuous = sim.outcome == OutcomeKind::Continuous;
    const std::vector<double> support = continuous ? std::vector<double>{} : population_support(sim);

    SimOutput out;
    out.treated_name = "treated";
    for (int j = 1; j <= j_count; ++j) out.donor_names.push_back("donor_" + std::to_string(j));

    // Cells are generated in parallel from per-cell derived streams, then
    // assembled in fixed order.
    std::vector<std::vector<double>> cells(static_cast<size_t>(unit_count) * sim.t_total);
    parallel_for(unit_count * sim.t_total, threads, [&](int i) {
        const int u = i / sim.t_total;
        const int t = i % sim.t_total + 1;
        cells[i] = draw_cell(sim, u, t, support);
    });
    for (int u = 0; u < unit_count; ++u) {
        const std::string& name = u == 0 ? out.treated_name : out.donor_names[u - 1];
        for (int t = 1; t <= sim.t_total; ++t)
            for (double y : cells[static_cast<size_t>(u) * sim.t_total + (t - 1)])
                out.panel.add(name, t, y);
    }
    out.panel.finalize();

    GroundTruth& truth = out.truth;
    truth.true_weights = sim.true_weights;
    truth.support = support;
    for (int t = 1; t <= sim.t_total; ++t) {
        const bool post = t > sim.t_star;
        std::vector<double> cf, treated, eff;
        if (continuous) {
            const int g = sim.grid.g;
            cf.resize(g + 1);
            treated.resize(g + 1);
            eff.assign(g + 1, 0.0);
            for (int i = 0; i <= g; ++i) {
                const double q = sim.grid.point(i);
                cf[i] = sim.mixture == MixtureMode::Quantile ? quantile_mixture_value(sim, t, q)
                                                             : mixture_cdf_quantile(sim, t, q);
                double e = 0.0;
                if (post && sim.effect.kind == EffectSpec::Kind::QuantileShift &&
                    q >= sim.effect.q_from)
                    e = sim.effect.shift;
                treated[i] = cf[i] + e;
                eff[i] = e;
            }
        } else {
            const std::vector<double> base_pmf = mixture_pmf(sim, t, support, false);
            const std::vector<double> eff_pmf = mixture_pmf(sim, t, support, post);
            cf.resize(support.size());
            treated.resize(support.size());
            eff.resize(support.size());
            double c1 = 0.0, c2 = 0.0;
            for (size_t k = 0; k < support.size(); ++k) {
                c1 += base_pmf[k];
                c2 += eff_pmf[k];
                cf[k] = c1;
                treated[k] = c2;
                eff[k] = c2 - c1;
            }
        }
        truth.counterfactual.push_back(std::move(cf));
        truth.treated.push_back(std::move(treated));
        truth.effect.push_back(std::move(eff));
    }
    return out;
}

SimplexWeights oracle_weights(const EmpiricalQuantile& target,
                              std::span<const EmpiricalQuantile> controls, double step,
                              double q_min, double q_max) {
    if (!(step > 0.0)) throw_usage("oracle step must be positive");
    const int j_count = static_cast<int>(controls.size());
    const int m = std::max(1, static_cast<int>(std::llround(1.0 / step)));
    SimplexWeights best;
    best.objective = kInf;
    std::vector<int> k(j_count, 0);
    std::vector<double> w(j_count, 0.0);
    int evaluated = 0;
    // Enumerates every lattice point of the simplex with denominator m.
    const auto recurse = [&](auto&& self, int j, int remaining) -> void {
        if (j == j_count - 1) {
            k[j] = remaining;
            for (int i = 0; i < j_count; ++i) w[i] = static_cast<double>(k[i]) / m;
            const double obj = quantile_mixture_objective(w, target, controls, q_min, q_max);
            ++evaluated;
            if (obj < best.objective) {
                best.objective = obj;
                best.weights = w;
            }
            return;
        }
        for (int kk = 0; kk <= remaining; ++kk) {
            k[j] = kk;
            self(self, j + 1, remaining - kk);
        }
    };
    recurse(recurse, 0, m);
    best.iterations = evaluated;
    return best;
}

SimplexWeights oracle_weights(const DiscreteCDF& target, std::span<const DiscreteCDF> controls,
                              double step) {
    if (!(step > 0.0)) throw_usage("oracle step must be positive");
    const int j_count = static_cast<int>(controls.size());
    const int m = std::max(1, static_cast<int>(std::llround(1.0 / step)));
    SimplexWeights best;
    best.objective = kInf;
    std::vector<int> k(j_count, 0);
    std::vector<double> w(j_count, 0.0);
    int evaluated = 0;
    const auto recurse = [&](auto&& self, int j, int remaining) -> void {
        if (j == j_count - 1) {
            k[j] = remaining;
            for (int i = 0; i < j_count; ++i) w[i] = static_cast<double>(k[i]) / m;
            const double obj = cdf_mixture_objective(w, target, controls);
            ++evaluated;
            if (obj < best.objective) {
                best.objective = obj;
                best.weights = w;
            }
            return;
        }
        for (int kk = 0; kk <= remaining; ++kk) {
            k[j] = kk;
            self(self, j + 1, remaining - kk);
        }
    };
    recurse(recurse, 0, m);
    best.iterations = evaluated;
    return best;
}

double oracle_pvalue(std::span<const double> ratios) {
    if (ratios.empty()) throw_usage("no ratios");
    int count = 0;
    for (double r : ratios)
        if (r >= ratios[0]) ++count;
    return static_cast<double>(count) / static_cast<double>(ratios.size());
}

SimSpec preset_simspec(const std::string& name) {
    SimSpec sim;
    sim.t_total = 6;
    sim.t_star = 3;
    if (name == "null-dgp") {
        // Ten exchangeable units: every donor (and hence the treated mixture)
        // is the same normal population, so placebo ranks are uniform.
        sim.n_per_cell = 300;
        sim.seed = 20240901;
        sim.grid = QuantileGrid{200};
        Family f;
        f.kind = Family::Kind::Normal;
        f.a = 50.0;
        f.b = 10.0;
        for (int j = 0; j < 9; ++j) sim.donor_families.push_back({f});
        sim.true_weights.assign(9, 1.0 / 9.0);
        return sim;
    }
    if (name == "top-quantile-shift") {
        sim.n_per_cell = 10000;
        sim.seed = 20240902;
        Family n{Family::Kind::Normal, 55.0, 8.0, {}, {}};
        Family u{Family::Kind::Uniform, 20.0, 80.0, {}, {}};
        Family e{Family::Kind::Exponential, 10.0, 0.05, {}, {}};
        sim.donor_families = {{n}, {u}, {e}};
        sim.true_weights = {0.5, 0.3, 0.2};
        sim.effect.kind = EffectSpec::Kind::QuantileShift;
        sim.effect.shift = -5.0;
        sim.effect.q_from = 0.5;
        return sim;
    }
    if (name == "ordinal-mass-shift") {
        sim.n_per_cell = 5000;
        sim.seed = 20240903;
        sim.outcome = OutcomeKind::Ordinal;
        sim.mixture = MixtureMode::Cdf;
        std::vector<double> levels;
        for (int v = 1; v <= 10; ++v) levels.push_back(v);
        Family low{Family::Kind::Discrete, 0, 1, levels,
                   {0.20, 0.15, 0.15, 0.10, 0.10, 0.10, 0.08, 0.06, 0.04, 0.02}};
        Family flat{Family::Kind::Discrete, 0, 1, levels,
                    {0.10, 0.10, 0.10, 0.10, 0.10, 0.10, 0.10, 0.10, 0.10, 0.10}};
        Family high{Family::Kind::Discrete, 0, 1, levels,
                    {0.02, 0.04, 0.06, 0.08, 0.10, 0.10, 0.10, 0.15, 0.15, 0.20}};
        sim.donor_families = {{low}, {flat}, {high}};
        sim.true_weights = {0.4, 0.4, 0.2};
        sim.effect.kind = EffectSpec::Kind::CdfMassShift;
        sim.effect.mass = 0.04;
        sim.effect.from_value = 5.0;
        sim.effect.to_value = 2.0;
        return sim;
    }
    throw_usage("unknown preset \"" + name +
                "\" (expected null-dgp, top-quantile-shift, or ordinal-mass-shift)");
}

namespace {

std::string family_kind_name(Family::Kind k) {
    switch (k) {
        case Family::Kind::Normal: return "normal";
        case Family::Kind::Uniform: return "uniform";
        case Family::Kind::Exponential: return "exponential";
        case Family::Kind::PointMass: return "point-mass";
        case Family::Kind::Discrete: return "discrete";
    }
    throw_internal("unhandled family kind");
}

Family::Kind family_kind_from(const std::string& s) {
    if (s == "normal") return Family::Kind::Normal;
    if (s == "uniform") return Family::Kind::Uniform;
    if (s == "exponential") return Family::Kind::Exponential;
    if (s == "point-mass") return Family::Kind::PointMass;
    if (s == "discrete") return Family::Kind::Discrete;
    throw_data("unknown family kind \"" + s + "\"");
}

ordered_json family_json(const Family& fam) {
    ordered_json f;
    f["kind"] = family_kind_name(fam.kind);
    if (fam.kind == Family::Kind::Discrete) {
        f["support"] = fam.support;
        f["probs"] = fam.probs;
    } else {
        f["a"] = fam.a;
        f["b"] = fam.b;
    }
    return f;
}

Family family_from_json(const nlohmann::json& f) {
    Family fam;
    fam.kind = family_kind_from(f.at("kind").get<std::string>());
    if (fam.kind == Family::Kind::Discrete) {
        fam.support = f.at("support").get<std::vector<double>>();
        fam.probs = f.at("probs").get<std::vector<double>>();
    } else {
        fam.a = f.value("a", 0.0);
        fam.b = f.value("b", 1.0);
    }
    return fam;
}

}  // namespace

std::string simspec_to_json(const SimSpec& sim) {
    ordered_json out;
    out["t_total"] = sim.t_total;
    out["t_star"] = sim.t_star;
    out["n_per_cell"] = sim.n_per_cell;
    out["seed"] = sim.seed;
    out["outcome"] = to_string(sim.outcome);
    out["mixture"] = sim.mixture == MixtureMode::Quantile ? "quantile" : "cdf";
    out["grid_size"] = sim.grid.g;
    out["true_weights"] = sim.true_weights;
    ordered_json donors = ordered_json::array();
    for (const auto& per_donor : sim.donor_families) {
        ordered_json fams = ordered_json::array();
        for (const auto& fam : per_donor) fams.push_back(family_json(fam));
        donors.push_back(std::move(fams));
    }
    out["donor_families"] = std::move(donors);
    ordered_json eff;
    switch (sim.effect.kind) {
        case EffectSpec::Kind::None:
            eff["kind"] = "none";
            break;
        case EffectSpec::Kind::QuantileShift:
            eff["kind"] = "quantile-shift";
            eff["shift"] = sim.effect.shift;
            eff["q_from"] = sim.effect.q_from;
            break;
        case EffectSpec::Kind::CdfMassShift:
            eff["kind"] = "cdf-mass-shift";
            eff["mass"] = sim.effect.mass;
            eff["from_value"] = sim.effect.from_value;
            eff["to_value"] = sim.effect.to_value;
            break;
    }
    out["effect"] = std::move(eff);
    return out.dump(2) + "\n";
}

SimSpec simspec_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw_data(std::string("cannot parse simulation spec: ") + e.what());
    }
    try {
        SimSpec sim;
        sim.t_total = j.at("t_total").get<int>();
        sim.t_star = j.at("t_star").get<int>();
        sim.n_per_cell = j.at("n_per_cell").get<long>();
        sim.seed = j.value("seed", 1ULL);
        sim.outcome = outcome_kind_from_string(j.value("outcome", "continuous"));
        const std::string mix = j.value("mixture", "quantile");
        if (mix == "quantile") sim.mixture = MixtureMode::Quantile;
        else if (mix == "cdf") sim.mixture = MixtureMode::Cdf;
        else throw_data("unknown mixture mode \"" + mix + "\"");
        sim.grid.g = j.value("grid_size", 1000);
        sim.true_weights = j.at("true_weights").get<std::vector<double>>();
        for (const auto& per_donor : j.at("donor_families")) {
            std::vector<Family> fams;
            for (const auto& f : per_donor) fams.push_back(family_from_json(f));
            sim.donor_families.push_back(std::move(fams));
        }
        if (j.contains("effect")) {
            const auto& eff = j["effect"];
            const std::string kind = eff.value("kind", "none");
            if (kind == "none") {
                sim.effect.kind = EffectSpec::Kind::None;
            } else if (kind == "quantile-shift") {
                sim.effect.kind = EffectSpec::Kind::QuantileShift;
                sim.effect.shift = eff.at("shift").get<double>();
                sim.effect.q_from = eff.value("q_from", 0.0);
            } else if (kind == "cdf-mass-shift") {
                sim.effect.kind = EffectSpec::Kind::CdfMassShift;
                sim.effect.mass = eff.at("mass").get<double>();
                sim.effect.from_value = eff.at("from_value").get<double>();
                sim.effect.to_value = eff.at("to_value").get<double>();
            } else {
                throw_data("unknown effect kind \"" + kind + "\"");
            }
        }
        sim.validate();
        return sim;
    } catch (const nlohmann::json::exception& e) {
        throw_data(std::string("invalid simulation spec: ") + e.what());
    }
}

std::string truth_json(const SimOutput& out) {
    ordered_json doc;
    doc["treated"] = out.treated_name;
    doc["donors"] = out.donor_names;
    doc["true_weights"] = out.truth.true_weights;
    if (!out.truth.support.empty()) doc["support"] = out.truth.support;
    ordered_json periods = ordered_json::array();
    for (size_t t = 0; t < out.truth.counterfactual.size(); ++t) {
        ordered_json p;
        p["period"] = static_cast<int>(t) + 1;
        p["counterfactual"] = out.truth.counterfactual[t];
        p["treated"] = out.truth.treated[t];
        p["effect"] = out.truth.effect[t];
        periods.push_back(std::move(p));
    }
    doc["periods"] = std::move(periods);
    return doc.dump(2) + "\n";
}

}  // namespace dsc
