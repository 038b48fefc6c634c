// Exercises the installed command-line binary end to end. The binary path
// arrives in DSC_CLI; outputs land in per-test scratch directories.
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "schema_check.hpp"

namespace {

namespace fs = std::filesystem;

std::string cli_path() {
    const char* env = std::getenv("DSC_CLI");
    REQUIRE(env != nullptr);
    return env;
}

std::string q(const std::string& s) { return "\"" + s + "\""; }

int run(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("dsc_cli_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

std::string slurp(const std::string& path) { return schema_check::slurp(path); }

void expect_valid_json(const std::string& path, const std::string& schema) {
    const std::vector<std::string> errors = schema_check::check_json(slurp(path), schema);
    for (const auto& e : errors) MESSAGE(path, " vs ", schema, ": ", e);
    CHECK(errors.empty());
}

void expect_valid_csv(const std::string& path, const std::string& schema) {
    const std::vector<std::string> errors = schema_check::check_csv(slurp(path), schema);
    for (const auto& e : errors) MESSAGE(path, " vs ", schema, ": ", e);
    CHECK(errors.empty());
}

// Deterministic little panel: three units, three periods, affine ramps.
std::string small_panel_csv() {
    std::string csv = "unit,period,outcome\n";
    for (int t = 1; t <= 3; ++t) {
        for (int i = 0; i < 40; ++i) {
            const double u = (i + 0.5) / 40.0;
            csv += "treated," + std::to_string(t) + "," + std::to_string(20.0 + 30.0 * u + t) + "\n";
            csv += "d1," + std::to_string(t) + "," + std::to_string(18.0 + 30.0 * u + t) + "\n";
            csv += "d2," + std::to_string(t) + "," + std::to_string(30.0 + 40.0 * u + t) + "\n";
        }
    }
    return csv;
}

const char* kSmallSimspec = R"json({
  "t_total": 3,
  "t_star": 2,
  "n_per_cell": 200,
  "seed": 5,
  "outcome": "continuous",
  "mixture": "quantile",
  "grid_size": 50,
  "true_weights": [0.4, 0.6],
  "donor_families": [
    [{"kind": "uniform", "a": 10, "b": 30}],
    [{"kind": "uniform", "a": 20, "b": 60}]
  ],
  "effect": {"kind": "none"}
})json";

}  // namespace

TEST_CASE("version flag exits cleanly and prints something") {
    TempDir dir("version");
    const std::string out = dir.file("out.txt");
    CHECK(run(q(cli_path()) + " --version > " + q(out)) == 0);
    CHECK(!slurp(out).empty());
}

TEST_CASE("running without a subcommand is a usage error") {
    CHECK(run(q(cli_path()) + " > /dev/null 2>&1") == 1);
    CHECK(run(q(cli_path()) + " frobnicate > /dev/null 2>&1") == 1);
}

TEST_CASE("ingest normalizes a long csv") {
    TempDir dir("ingest");
    write(dir.file("raw.csv"), small_panel_csv());
    const int rc = run(q(cli_path()) + " ingest --input " + q(dir.file("raw.csv")) + " --out-dir " +
                       q(dir.path.string()) + " > " + q(dir.file("stdout.txt")));
    REQUIRE(rc == 0);
    expect_valid_csv(dir.file("panel.csv"), "panel.csvschema.json");
    expect_valid_json(dir.file("summary.json"), "summary.schema.json");
    CHECK(slurp(dir.file("stdout.txt")).find("panel written to") != std::string::npos);

    // The emitted panel is already canonical: ingesting it again is a no-op.
    TempDir again("ingest_again");
    REQUIRE(run(q(cli_path()) + " ingest --input " + q(dir.file("panel.csv")) + " --out-dir " +
                q(again.path.string()) + " > /dev/null") == 0);
    CHECK(slurp(again.file("panel.csv")) == slurp(dir.file("panel.csv")));
}

TEST_CASE("ingest filters thin donors when asked") {
    TempDir dir("filter");
    std::string csv = "unit,period,outcome\n";
    for (int i = 0; i < 100; ++i) csv += "treated,1," + std::to_string(i * 1.0) + "\n";
    for (int i = 0; i < 60; ++i) csv += "big,1," + std::to_string(i * 1.0) + "\n";
    for (int i = 0; i < 12; ++i) csv += "mid,1," + std::to_string(i * 1.0) + "\n";
    for (int i = 0; i < 3; ++i) csv += "small,1," + std::to_string(i * 1.0) + "\n";
    write(dir.file("raw.csv"), csv);
    REQUIRE(run(q(cli_path()) + " ingest --input " + q(dir.file("raw.csv")) + " --out-dir " +
                q(dir.path.string()) + " --treated treated --min-share 0.05 > /dev/null") == 0);
    expect_valid_json(dir.file("dropped_units.json"), "dropped_units.schema.json");
    const auto dropped = nlohmann::json::parse(slurp(dir.file("dropped_units.json")));
    REQUIRE(dropped.size() == 1);
    CHECK(dropped[0] == "small");
    CHECK(slurp(dir.file("panel.csv")).find("small") == std::string::npos);
}

TEST_CASE("ingest builds quarterly tenure panels from spells") {
    TempDir dir("spells");
    write(dir.file("spells.csv"),
          "person_id,unit_id,start_date,end_date,title_level\n"
          "p1,acme,2020-01-01,,3\n"
          "p2,acme,2020-02-15,2020-08-14,2\n"
          "p3,globex,2020-03-01,,4\n"
          "p4,globex,2020-11-01,,5\n");
    REQUIRE(run(q(cli_path()) + " ingest --input " + q(dir.file("spells.csv")) +
                " --outcome tenure --quarter-starts 2020-07-01,2020-10-01 --out-dir " +
                q(dir.path.string()) + " > /dev/null") == 0);
    expect_valid_csv(dir.file("panel.csv"), "panel.csvschema.json");
    expect_valid_json(dir.file("summary.json"), "summary.schema.json");
    const auto summary = nlohmann::json::parse(slurp(dir.file("summary.json")));
    CHECK(summary["excluded_future_start_spells"] == 1);

    // Spell input without quarter boundaries cannot work.
    CHECK(run(q(cli_path()) + " ingest --input " + q(dir.file("spells.csv")) +
              " --outcome tenure --out-dir " + q(dir.path.string()) + " > /dev/null 2>&1") == 1);
}

TEST_CASE("simulate presets write spec, panel, and truth") {
    TempDir dir("simulate");
    REQUIRE(run(q(cli_path()) + " simulate --preset ordinal-mass-shift --seed 11 --out-dir " +
                q(dir.path.string()) + " > /dev/null") == 0);
    expect_valid_json(dir.file("simspec.json"), "simspec.schema.json");
    expect_valid_json(dir.file("truth.json"), "truth.schema.json");
    expect_valid_csv(dir.file("panel.csv"), "panel.csvschema.json");
    const auto spec = nlohmann::json::parse(slurp(dir.file("simspec.json")));
    CHECK(spec["seed"] == 11);

    CHECK(run(q(cli_path()) + " simulate --out-dir " + q(dir.path.string()) +
              " > /dev/null 2>&1") == 1);  // needs --preset or --input
    CHECK(run(q(cli_path()) + " simulate --preset bogus --out-dir " + q(dir.path.string()) +
              " > /dev/null 2>&1") == 1);
}

TEST_CASE("estimate fits a simulated panel and writes curves") {
    TempDir dir("estimate");
    write(dir.file("simspec.json"), kSmallSimspec);
    REQUIRE(run(q(cli_path()) + " simulate --input " + q(dir.file("simspec.json")) +
                " --out-dir " + q(dir.path.string()) + " > /dev/null") == 0);
    const int rc = run(q(cli_path()) + " estimate --input " + q(dir.file("panel.csv")) +
                       " --treated treated --donors donor_1,donor_2 --pre-periods 2" +
                       " --grid-size 80 --out-dir " + q(dir.path.string()) + " > " +
                       q(dir.file("stdout.txt")));
    REQUIRE(rc == 0);
    expect_valid_json(dir.file("fit.json"), "fit.schema.json");
    for (int t = 1; t <= 3; ++t)
        expect_valid_csv(dir.file("effect_t" + std::to_string(t) + ".csv"), "effect.csvschema.json");
    CHECK(slurp(dir.file("stdout.txt")).find("averaged weights:") != std::string::npos);
    const auto fit = nlohmann::json::parse(slurp(dir.file("fit.json")));
    CHECK(fit["spec"]["grid_size"] == 80);
    CHECK(fit["spec"]["t_total"] == 3);

    // Donor lists can come from a file with comments.
    write(dir.file("donors.txt"), "# pool\ndonor_1\ndonor_2\n");
    TempDir dir2("estimate_file");
    REQUIRE(run(q(cli_path()) + " estimate --input " + q(dir.file("panel.csv")) +
                " --treated treated --donors-file " + q(dir.file("donors.txt")) +
                " --pre-periods 2 --grid-size 80 --out-dir " + q(dir2.path.string()) +
                " > /dev/null") == 0);
    CHECK(slurp(dir2.file("fit.json")) == slurp(dir.file("fit.json")));
}

TEST_CASE("estimate reads defaults from a config file") {
    TempDir dir("config");
    write(dir.file("simspec.json"), kSmallSimspec);
    REQUIRE(run(q(cli_path()) + " simulate --input " + q(dir.file("simspec.json")) +
                " --out-dir " + q(dir.path.string()) + " > /dev/null") == 0);
    write(dir.file("run.ini"), "[estimate]\ngrid-size=77\n");
    REQUIRE(run(q(cli_path()) + " --config " + q(dir.file("run.ini")) + " estimate --input " +
                q(dir.file("panel.csv")) +
                " --treated treated --donors donor_1,donor_2 --pre-periods 2 --out-dir " +
                q(dir.path.string()) + " > /dev/null") == 0);
    const auto fit = nlohmann::json::parse(slurp(dir.file("fit.json")));
    CHECK(fit["spec"]["grid_size"] == 77);
}

TEST_CASE("estimate handles ordinal outcomes with a support axis") {
    TempDir dir("ordinal");
    REQUIRE(run(q(cli_path()) + " simulate --preset ordinal-mass-shift --out-dir " +
                q(dir.path.string()) + " > /dev/null") == 0);
    REQUIRE(run(q(cli_path()) + " estimate --input " + q(dir.file("panel.csv")) +
                " --treated treated --donors donor_1,donor_2,donor_3 --pre-periods 3" +
                " --outcome ordinal --out-dir " + q(dir.path.string()) + " > /dev/null") == 0);
    expect_valid_json(dir.file("fit.json"), "fit.schema.json");
    expect_valid_csv(dir.file("effect_t6.csv"), "effect.csvschema.json");
    CHECK(slurp(dir.file("effect_t6.csv")).rfind("y,", 0) == 0);
}

TEST_CASE("permute reports a p-value") {
    TempDir dir("permute");
    std::string csv = "unit,period,outcome\n";
    for (int u = 0; u < 5; ++u) {
        const std::string name = u == 0 ? "treated" : "d" + std::to_string(u);
        for (int t = 1; t <= 2; ++t)
            for (int i = 0; i < 30; ++i) {
                const double y = 10.0 + 3.0 * u + 0.4 * i + ((u * 7 + t * 3 + i) % 11) * 0.15;
                csv += name + "," + std::to_string(t) + "," + std::to_string(y) + "\n";
            }
    }
    write(dir.file("panel.csv"), csv);
    const int rc = run(q(cli_path()) + " permute --input " + q(dir.file("panel.csv")) +
                       " --treated treated --donors d1,d2,d3,d4 --pre-periods 1 --grid-size 40" +
                       " --out-dir " + q(dir.path.string()) + " > " + q(dir.file("stdout.txt")));
    REQUIRE(rc == 0);
    expect_valid_json(dir.file("permutation.json"), "permutation.schema.json");
    CHECK(slurp(dir.file("stdout.txt")).find("p-value:") != std::string::npos);
    const auto res = nlohmann::json::parse(slurp(dir.file("permutation.json")));
    CHECK(res["effective_donors"] == 4);
}

TEST_CASE("bootstrap outputs are identical across thread counts") {
    TempDir dir("bootstrap");
    write(dir.file("simspec.json"), kSmallSimspec);
    REQUIRE(run(q(cli_path()) + " simulate --input " + q(dir.file("simspec.json")) +
                " --out-dir " + q(dir.path.string()) + " > /dev/null") == 0);
    const std::string common = q(cli_path()) + " bootstrap --input " + q(dir.file("panel.csv")) +
                               " --treated treated --donors donor_1,donor_2 --pre-periods 2" +
                               " --grid-size 50 --draws 20 --seed 3";
    TempDir one("boot_one");
    TempDir four("boot_four");
    REQUIRE(run(common + " --threads 1 --out-dir " + q(one.path.string()) + " > /dev/null") == 0);
    REQUIRE(run(common + " --threads 4 --out-dir " + q(four.path.string()) + " > /dev/null") == 0);

    expect_valid_json(one.file("bands.json"), "bands.schema.json");
    expect_valid_csv(one.file("band_weights.csv"), "band_weights.csvschema.json");
    for (int t = 1; t <= 3; ++t) {
        expect_valid_csv(one.file("band_counterfactual_t" + std::to_string(t) + ".csv"),
                         "band_curve.csvschema.json");
        expect_valid_csv(one.file("band_effect_t" + std::to_string(t) + ".csv"),
                         "band_curve.csvschema.json");
    }
    CHECK(slurp(one.file("bands.json")) == slurp(four.file("bands.json")));
    CHECK(slurp(one.file("band_weights.csv")) == slurp(four.file("band_weights.csv")));
    for (int t = 1; t <= 3; ++t) {
        const std::string name = "band_effect_t" + std::to_string(t) + ".csv";
        CHECK(slurp(one.file(name)) == slurp(four.file(name)));
    }
}

TEST_CASE("diagnose reports per-period conditioning") {
    TempDir dir("diagnose");
    write(dir.file("panel.csv"), small_panel_csv());
    const int rc = run(q(cli_path()) + " diagnose --input " + q(dir.file("panel.csv")) +
                       " --treated treated --donors d1,d2 --pre-periods 2 --grid-size 60" +
                       " --out-dir " + q(dir.path.string()) + " > " + q(dir.file("stdout.txt")));
    REQUIRE(rc == 0);
    expect_valid_json(dir.file("diagnostics.json"), "diagnostics.schema.json");
    CHECK(slurp(dir.file("stdout.txt")).find("min eigenvalue") != std::string::npos);
}

TEST_CASE("failure modes use distinct exit codes") {
    TempDir dir("errors");
    // Missing input file: usage.
    CHECK(run(q(cli_path()) + " estimate --input " + q(dir.file("nope.csv")) +
              " --treated t --donors a --pre-periods 1 > /dev/null 2>&1") == 1);

    // Malformed row: data error, with the line number on stderr.
    write(dir.file("bad.csv"), "unit,period,outcome\nA,1,oops\n");
    CHECK(run(q(cli_path()) + " estimate --input " + q(dir.file("bad.csv")) +
              " --treated A --donors B --pre-periods 1 > /dev/null 2> " +
              q(dir.file("stderr.txt"))) == 2);
    CHECK(slurp(dir.file("stderr.txt")).find("line 2") != std::string::npos);

    // Unknown donor: data error.
    write(dir.file("panel.csv"), small_panel_csv());
    CHECK(run(q(cli_path()) + " estimate --input " + q(dir.file("panel.csv")) +
              " --treated treated --donors d1,ghost --pre-periods 2 > /dev/null 2>&1") == 2);

    // Unknown flag: usage.
    CHECK(run(q(cli_path()) + " estimate --nonsense > /dev/null 2>&1") == 1);
}
