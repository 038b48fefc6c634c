// Command-line front end for the distributional synthetic controls library.
// Links the C API only; all outputs are plot-ready CSV/JSON.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dsc/dsc.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitEstimation = 3;

struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) { throw CliError{code, message}; }

[[noreturn]] void fail_api(dsc_status status) {
    int code = kExitEstimation;
    if (status == DSC_ERR_USAGE) code = kExitUsage;
    else if (status == DSC_ERR_DATA) code = kExitData;
    fail(code, dsc_last_error());
}

void check(dsc_status status) {
    if (status != DSC_OK) fail_api(status);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(kExitUsage, "cannot open input file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(kExitUsage, "cannot write output file: " + path.string());
    out << content;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Frees C API strings on scope exit.
struct ApiString {
    char* s = nullptr;
    ~ApiString() { dsc_string_free(s); }
    std::string str() const { return s ? s : ""; }
};

struct PanelHandle {
    dsc_panel* p = nullptr;
    ~PanelHandle() { dsc_panel_free(p); }
};

// Options shared by the estimation commands.
struct FitArgs {
    std::string input;
    std::string out_dir = ".";
    std::string treated;
    std::vector<std::string> donors;
    std::string donors_file;
    int pre_periods = 0;
    int post_periods = -1;  // -1: everything after the pre-periods
    std::string outcome = "continuous";
    int grid_size = 1000;
    double q_min = 0.0;
    double q_max = 1.0;
    int threads = 0;
    std::string unit_col = "unit";
    std::string period_col = "period";
    std::string outcome_col = "outcome";
};

void add_fit_flags(CLI::App* cmd, FitArgs& args, bool estimation_outcomes_only = true) {
    cmd->add_option("--input", args.input, "input panel CSV")->required();
    cmd->add_option("--out-dir", args.out_dir, "output directory");
    cmd->add_option("--treated", args.treated, "treated unit id")->required();
    cmd->add_option("--donors", args.donors, "donor unit ids")->delimiter(',');
    cmd->add_option("--donors-file", args.donors_file, "file with one donor unit id per line");
    cmd->add_option("--pre-periods", args.pre_periods, "number of pre-treatment periods")
        ->required();
    cmd->add_option("--post-periods", args.post_periods,
                    "number of post periods (default: rest of panel)");
    if (estimation_outcomes_only)
        cmd->add_option("--outcome", args.outcome, "outcome kind")
            ->check(CLI::IsMember({"continuous", "ordinal", "share"}));
    cmd->add_option("--grid-size", args.grid_size, "quantile grid size G");
    cmd->add_option("--q-min", args.q_min, "lower quantile bound for fitting");
    cmd->add_option("--q-max", args.q_max, "upper quantile bound for fitting");
    cmd->add_option("--threads", args.threads, "worker threads (0 = all cores)");
    cmd->add_option("--unit-col", args.unit_col, "unit column name");
    cmd->add_option("--period-col", args.period_col, "period column name");
    cmd->add_option("--outcome-col", args.outcome_col, "outcome column name");
}

std::vector<std::string> resolve_donors(const FitArgs& args) {
    std::vector<std::string> donors = args.donors;
    if (!args.donors_file.empty()) {
        std::istringstream in(read_file(args.donors_file));
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty() && line[0] != '#') donors.push_back(line);
        }
    }
    if (donors.empty()) fail(kExitUsage, "no donors given (use --donors or --donors-file)");
    return donors;
}

PanelHandle load_panel(const FitArgs& args) {
    const std::string csv = read_file(args.input);
    PanelHandle panel;
    check(dsc_panel_parse_csv(csv.c_str(), args.unit_col.c_str(), args.period_col.c_str(),
                              args.outcome_col.c_str(), &panel.p));
    return panel;
}

struct FitOptionsHolder {
    dsc_fit_options opt{};
    std::vector<std::string> donors;
    std::vector<const char*> donor_ptrs;

    FitOptionsHolder(const FitArgs& args, int panel_periods) {
        dsc_fit_options_init(&opt);
        donors = resolve_donors(args);
        for (const auto& d : donors) donor_ptrs.push_back(d.c_str());
        opt.treated = args.treated.c_str();
        opt.donors = donor_ptrs.data();
        opt.n_donors = static_cast<int>(donor_ptrs.size());
        opt.t_star = args.pre_periods;
        opt.t_total = args.post_periods >= 0 ? args.pre_periods + args.post_periods : 0;
        (void)panel_periods;
        opt.outcome = args.outcome.c_str();
        opt.grid_size = args.grid_size;
        opt.q_min = args.q_min;
        opt.q_max = args.q_max;
        opt.threads = args.threads;
    }
};

// grid/support axis values for one fitted object
std::vector<double> axis_values(const json& doc, int grid_size) {
    if (doc.contains("support")) return doc["support"].get<std::vector<double>>();
    std::vector<double> axis(grid_size + 1);
    for (int i = 0; i <= grid_size; ++i) axis[i] = static_cast<double>(i) / grid_size;
    return axis;
}

void write_effect_csvs(const json& fit, const fs::path& dir) {
    const int grid_size = fit["spec"]["grid_size"].get<int>();
    const bool ordinal = fit.contains("support");
    const std::vector<double> axis = axis_values(fit, grid_size);
    for (const auto& period : fit["periods"]) {
        const int t = period["period"].get<int>();
        std::string csv = ordinal ? "y,observed,counterfactual,effect\n"
                                  : "q,observed,counterfactual,effect\n";
        const auto& obs = period["observed"];
        const auto& cf = period["counterfactual"];
        const auto& eff = period["effect"];
        for (size_t i = 0; i < axis.size(); ++i) {
            csv += fmt(axis[i]) + "," + fmt(obs[i].get<double>()) + "," +
                   fmt(cf[i].get<double>()) + "," + fmt(eff[i].get<double>()) + "\n";
        }
        write_file(dir / ("effect_t" + std::to_string(t) + ".csv"), csv);
    }
}

void write_band_csvs(const json& bands, const fs::path& dir) {
    const int grid_size = bands["spec"]["grid_size"].get<int>();
    const std::vector<double> axis = axis_values(bands, grid_size);
    const bool ordinal = bands.contains("support");
    const std::string axis_name = ordinal ? "y" : "q";
    {
        std::string csv = "donor,center,lower,upper\n";
        const auto& w = bands["weights"];
        const auto& donors = bands["spec"]["donors"];
        for (size_t j = 0; j < donors.size(); ++j) {
            csv += donors[j].get<std::string>() + "," + fmt(w["center"][j].get<double>()) + "," +
                   fmt(w["lower"][j].get<double>()) + "," + fmt(w["upper"][j].get<double>()) + "\n";
        }
        write_file(dir / "band_weights.csv", csv);
    }
    const auto dump_series = [&](const json& series, const std::string& stem) {
        for (const auto& obj : series) {
            const int t = obj["period"].get<int>();
            std::string csv = axis_name + ",center,lower,upper\n";
            for (size_t i = 0; i < axis.size(); ++i) {
                csv += fmt(axis[i]) + "," + fmt(obj["center"][i].get<double>()) + "," +
                       fmt(obj["lower"][i].get<double>()) + "," +
                       fmt(obj["upper"][i].get<double>()) + "\n";
            }
            write_file(dir / (stem + std::to_string(t) + ".csv"), csv);
        }
    };
    dump_series(bands["counterfactuals"], "band_counterfactual_t");
    dump_series(bands["effects"], "band_effect_t");
}

int cmd_ingest(const std::string& input, const std::string& out_dir, const std::string& outcome,
               const std::vector<std::string>& quarter_starts, const std::string& unit_col,
               const std::string& period_col, const std::string& outcome_col,
               const std::string& treated, double min_share) {
    const std::string text = read_file(input);
    PanelHandle panel;
    long excluded = 0;
    if (outcome == "tenure" || outcome == "title") {
        if (quarter_starts.size() < 2)
            fail(kExitUsage, "spell ingestion needs --quarter-starts with at least two dates");
        std::vector<const char*> boundaries;
        for (const auto& d : quarter_starts) boundaries.push_back(d.c_str());
        check(dsc_panel_from_spells_csv(text.c_str(), outcome.c_str(), boundaries.data(),
                                        static_cast<int>(boundaries.size()), &panel.p, &excluded));
    } else {
        check(dsc_panel_parse_csv(text.c_str(), unit_col.c_str(), period_col.c_str(),
                                  outcome_col.c_str(), &panel.p));
    }

    if (!treated.empty() && min_share > 0.0) {
        PanelHandle filtered;
        ApiString dropped;
        check(dsc_panel_filter_donors(panel.p, treated.c_str(), min_share, &filtered.p,
                                      &dropped.s));
        std::swap(panel.p, filtered.p);
        write_file(fs::path(out_dir) / "dropped_units.json", dropped.str() + "\n");
    }

    ApiString csv, summary;
    check(dsc_panel_to_csv(panel.p, &csv.s));
    check(dsc_panel_summary_json(panel.p, &summary.s));
    write_file(fs::path(out_dir) / "panel.csv", csv.str());
    json summary_doc = json::parse(summary.str());
    summary_doc["excluded_future_start_spells"] = excluded;
    write_file(fs::path(out_dir) / "summary.json", summary_doc.dump(2) + "\n");
    std::cout << "panel written to " << (fs::path(out_dir) / "panel.csv").string() << "\n";
    return 0;
}

int cmd_estimate(const FitArgs& args) {
    PanelHandle panel = load_panel(args);
    FitOptionsHolder holder(args, 0);
    ApiString out;
    check(dsc_fit(panel.p, &holder.opt, &out.s));
    const fs::path dir(args.out_dir);
    write_file(dir / "fit.json", out.str());
    const json fit = json::parse(out.str());
    write_effect_csvs(fit, dir);
    std::cout << "averaged weights:\n";
    for (const auto& w : fit["averaged_weights"]["weights"])
        std::cout << "  " << w["donor"].get<std::string>() << " " << fmt(w["weight"].get<double>())
                  << "\n";
    return 0;
}

int cmd_permute(const FitArgs& args, double range_min, double range_max, bool range_set,
                bool include_treated) {
    PanelHandle panel = load_panel(args);
    FitOptionsHolder holder(args, 0);
    dsc_permute_options popt;
    dsc_permute_options_init(&popt);
    popt.range_min = range_min;
    popt.range_max = range_max;
    popt.range_set = range_set ? 1 : 0;
    popt.include_treated_in_placebo_pools = include_treated ? 1 : 0;
    ApiString out;
    check(dsc_permutation_test(panel.p, &holder.opt, &popt, &out.s));
    write_file(fs::path(args.out_dir) / "permutation.json", out.str());
    const json res = json::parse(out.str());
    std::cout << "p-value: " << fmt(res["p_value"].get<double>()) << "\n";
    return 0;
}

int cmd_bootstrap(const FitArgs& args, int draws, double alpha, uint64_t seed,
                  const std::string& mode, const std::string& bands, bool resample_treated) {
    PanelHandle panel = load_panel(args);
    FitOptionsHolder holder(args, 0);
    dsc_bootstrap_options bopt;
    dsc_bootstrap_options_init(&bopt);
    bopt.draws = draws;
    bopt.alpha = alpha;
    bopt.seed = seed;
    bopt.mode = mode.c_str();
    bopt.bands = bands.c_str();
    bopt.resample_treated = resample_treated ? 1 : 0;
    ApiString out;
    check(dsc_bootstrap(panel.p, &holder.opt, &bopt, &out.s));
    const fs::path dir(args.out_dir);
    write_file(dir / "bands.json", out.str());
    write_band_csvs(json::parse(out.str()), dir);
    std::cout << "bands written to " << (dir / "bands.json").string() << "\n";
    return 0;
}

int cmd_simulate(const std::string& preset, const std::string& input, const std::string& out_dir,
                 std::optional<uint64_t> seed, int threads) {
    std::string spec_text;
    if (!preset.empty()) {
        ApiString spec;
        check(dsc_simspec_preset(preset.c_str(), &spec.s));
        spec_text = spec.str();
    } else if (!input.empty()) {
        spec_text = read_file(input);
    } else {
        fail(kExitUsage, "simulate needs --preset or --input");
    }
    if (seed) {
        json doc = json::parse(spec_text, nullptr, false);
        if (doc.is_discarded()) fail(kExitData, "cannot parse simulation spec JSON");
        doc["seed"] = *seed;
        spec_text = doc.dump(2) + "\n";
    }
    PanelHandle panel;
    ApiString truth;
    check(dsc_simulate(spec_text.c_str(), threads, &panel.p, &truth.s));
    ApiString csv;
    check(dsc_panel_to_csv(panel.p, &csv.s));
    const fs::path dir(out_dir);
    write_file(dir / "simspec.json", spec_text);
    write_file(dir / "panel.csv", csv.str());
    write_file(dir / "truth.json", truth.str());
    std::cout << "panel written to " << (dir / "panel.csv").string() << "\n";
    return 0;
}

int cmd_diagnose(const FitArgs& args) {
    PanelHandle panel = load_panel(args);
    FitOptionsHolder holder(args, 0);
    ApiString out;
    check(dsc_gram_diagnostic(panel.p, &holder.opt, &out.s));
    write_file(fs::path(args.out_dir) / "diagnostics.json", out.str());
    const json doc = json::parse(out.str());
    for (const auto& p : doc["periods"]) {
        std::cout << "period " << p["period"].get<int>() << ": min eigenvalue "
                  << fmt(p["min_eigenvalue"].get<double>())
                  << (p["warning"].get<bool>() ? "  (degenerate)" : "") << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributional synthetic controls"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a config file");
    app.set_version_flag("--version", std::string(dsc_version()));

    // ingest
    std::string in_input, in_out_dir = ".", in_outcome = "continuous";
    std::vector<std::string> in_quarters;
    std::string in_unit = "unit", in_period = "period", in_outcome_col = "outcome";
    std::string in_treated;
    double in_min_share = 0.0;
    auto* ingest = app.add_subcommand("ingest", "normalize raw input into a panel CSV");
    ingest->add_option("--input", in_input, "long CSV or spell CSV")->required();
    ingest->add_option("--out-dir", in_out_dir, "output directory");
    ingest->add_option("--outcome", in_outcome, "tenure|title for spell input, passthrough otherwise")
        ->check(CLI::IsMember({"continuous", "ordinal", "share", "tenure", "title"}));
    ingest->add_option("--quarter-starts", in_quarters,
                       "consecutive quarter boundary dates (K+1 dates = K quarters)")
        ->delimiter(',');
    ingest->add_option("--unit-col", in_unit, "unit column name");
    ingest->add_option("--period-col", in_period, "period column name");
    ingest->add_option("--outcome-col", in_outcome_col, "outcome column name");
    ingest->add_option("--treated", in_treated, "treated unit (enables donor filtering)");
    ingest->add_option("--min-share", in_min_share,
                       "drop donors with fewer observations than this share of the treated");

    // estimate
    FitArgs est_args;
    auto* estimate = app.add_subcommand("estimate", "fit weights and counterfactuals");
    add_fit_flags(estimate, est_args);

    // permute
    FitArgs perm_args;
    double perm_range_min = 0.0, perm_range_max = 1.0;
    bool perm_include_treated = false;
    auto* permute = app.add_subcommand("permute", "placebo permutation test");
    add_fit_flags(permute, perm_args);
    auto* rmin = permute->add_option("--range-min", perm_range_min,
                                     "distance restriction lower bound (quantile or outcome units)");
    auto* rmax = permute->add_option("--range-max", perm_range_max,
                                     "distance restriction upper bound");
    permute->add_flag("--include-treated", perm_include_treated,
                      "keep the treated unit in placebo donor pools");

    // bootstrap
    FitArgs boot_args;
    int boot_draws = 1000;
    double boot_alpha = 0.05;
    uint64_t boot_seed = 1;
    std::string boot_mode = "with-replacement", boot_bands = "uniform";
    bool boot_resample_treated = false;
    auto* bootstrap = app.add_subcommand("bootstrap", "confidence bands by donor resampling");
    add_fit_flags(bootstrap, boot_args);
    bootstrap->add_option("--draws", boot_draws, "bootstrap draws B");
    bootstrap->add_option("--alpha", boot_alpha, "significance level");
    bootstrap->add_option("--seed", boot_seed, "RNG seed");
    bootstrap->add_option("--mode", boot_mode, "resampling mode")
        ->check(CLI::IsMember({"with-replacement", "paper-literal"}));
    bootstrap->add_option("--bands", boot_bands, "band construction")
        ->check(CLI::IsMember({"uniform", "pointwise"}));
    bootstrap->add_flag("--resample-treated", boot_resample_treated,
                        "also resample the treated unit's cells");

    // simulate
    std::string sim_preset, sim_input, sim_out_dir = ".";
    uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    int sim_threads = 0;
    auto* simulate = app.add_subcommand("simulate", "draw a synthetic panel with known truth");
    simulate->add_option("--preset", sim_preset, "named scenario")
        ->check(CLI::IsMember({"null-dgp", "top-quantile-shift", "ordinal-mass-shift"}));
    simulate->add_option("--input", sim_input, "simulation spec JSON");
    simulate->add_option("--out-dir", sim_out_dir, "output directory");
    simulate->add_option("--seed", sim_seed, "override the spec's seed")
        ->each([&](const std::string&) { sim_seed_set = true; });
    simulate->add_option("--threads", sim_threads, "worker threads (0 = all cores)");

    // diagnose
    FitArgs diag_args;
    auto* diagnose = app.add_subcommand("diagnose", "Gram conditioning of the donor pool");
    add_fit_flags(diagnose, diag_args);

    try {
        app.parse(argc, argv);
        if (ingest->parsed())
            return cmd_ingest(in_input, in_out_dir, in_outcome, in_quarters, in_unit, in_period,
                              in_outcome_col, in_treated, in_min_share);
        if (estimate->parsed()) return cmd_estimate(est_args);
        if (permute->parsed())
            return cmd_permute(perm_args, perm_range_min, perm_range_max,
                               rmin->count() > 0 || rmax->count() > 0, perm_include_treated);
        if (bootstrap->parsed())
            return cmd_bootstrap(boot_args, boot_draws, boot_alpha, boot_seed, boot_mode,
                                 boot_bands, boot_resample_treated);
        if (simulate->parsed())
            return cmd_simulate(sim_preset, sim_input, sim_out_dir,
                                sim_seed_set ? std::optional<uint64_t>(sim_seed) : std::nullopt,
                                sim_threads);
        if (diagnose->parsed()) return cmd_diagnose(diag_args);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEstimation;
    }
}
