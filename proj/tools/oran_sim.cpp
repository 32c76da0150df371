// oran-sim: run scenarios, sweep one parameter, lint A1 policy documents.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "oran/policy/a1_policy.hpp"
#include "oran/scenario/config.hpp"
#include "oran/scenario/runner.hpp"

namespace {

using oran::scenario::RunError;
using oran::scenario::ScenarioError;

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kConfigError = 2;

void print_diagnostics(const std::string& file, const std::vector<std::string>& diags) {
    for (const auto& d : diags) std::cerr << file << ": " << d << '\n';
}

std::vector<std::string> split_values(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(csv);
    while (std::getline(in, cur, ',')) out.push_back(cur);
    if (!csv.empty() && csv.back() == ',') out.emplace_back();
    return out;
}

int cmd_run(const std::string& file, std::optional<std::uint64_t> seed, const std::string& out,
            const std::vector<std::string>& sets) {
    try {
        std::map<std::string, nlohmann::json> overrides;
        for (const auto& s : sets) {
            auto [key, value] = oran::scenario::parse_assignment(s);
            overrides[key] = value;
        }
        if (seed) overrides["seed"] = *seed;
        const auto cfg = oran::scenario::load_scenario(file, overrides);
        const auto dir = out.empty() ? oran::scenario::default_output_dir(cfg) : std::filesystem::path(out);
        oran::scenario::run_to_directory(cfg, dir);
        std::cout << "wrote " << (dir / "report.md").string() << '\n';
        return kOk;
    } catch (const ScenarioError& e) {
        print_diagnostics(file, e.diagnostics());
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << file << ": " << e.what() << '\n';
        return kRuntimeError;
    }
}

int cmd_sweep(const std::string& file, const std::string& param, const std::string& values, int seeds,
              const std::string& out, bool keep_runs) {
    try {
        std::ifstream in(file);
        if (!in) throw ScenarioError({"cannot open"});
        const nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
        if (doc.is_discarded()) throw ScenarioError({"not valid JSON"});
        oran::scenario::SweepOptions opts;
        opts.param = param;
        opts.seeds = seeds;
        opts.keep_runs = keep_runs;
        for (const auto& v : split_values(values)) opts.values.push_back(oran::scenario::parse_value(v));

        std::filesystem::path dir;
        if (!out.empty()) {
            dir = out;
        } else {
            // Validate the base document before touching the filesystem.
            const auto base = oran::scenario::parse_scenario(doc);
            dir = oran::scenario::default_output_dir(base) / ("sweep-" + param);
        }
        const auto rows = oran::scenario::sweep(doc, opts, dir);
        oran::scenario::write_sweep_csv(std::cout, param, rows);
        return kOk;
    } catch (const ScenarioError& e) {
        print_diagnostics(file, e.diagnostics());
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << file << ": " << e.what() << '\n';
        return kRuntimeError;
    }
}

int cmd_lint(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        std::cerr << file << ": cannot open\n";
        return 1;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto parsed = oran::policy::parse(ss.str());
    if (!parsed) {
        std::cerr << file << ": " << parsed.error().path << ": " << parsed.error().message << '\n';
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"O-RAN near-RT RIC and xApp simulator"};
    app.require_subcommand(1);

    std::string run_file;
    std::uint64_t run_seed = 0;
    std::string run_out;
    std::vector<std::string> run_sets;
    auto* run = app.add_subcommand("run", "Run a scenario and write CSVs plus report.md");
    run->add_option("file", run_file, "Scenario JSON")->required();
    auto* seed_opt = run->add_option("--seed", run_seed, "Override the scenario seed");
    run->add_option("--out", run_out, "Output directory");
    run->add_option("--set", run_sets, "Override a field, key=value with a dotted key");

    std::string sweep_file;
    std::string sweep_param;
    std::string sweep_values;
    int sweep_seeds = 1;
    std::string sweep_out;
    bool keep_runs = false;
    auto* sw = app.add_subcommand("sweep", "Run the scenario for each value of one parameter");
    sw->add_option("file", sweep_file, "Scenario JSON")->required();
    sw->add_option("--param", sweep_param, "Dotted key to vary")->required();
    sw->add_option("--values", sweep_values, "Comma-separated values")->required();
    sw->add_option("--seeds", sweep_seeds, "Seeds per value (base seed + i)")->check(CLI::PositiveNumber);
    sw->add_option("--out", sweep_out, "Output directory");
    sw->add_flag("--keep-runs", keep_runs, "Also write every run's CSVs");

    std::string lint_file;
    auto* pol = app.add_subcommand("policy", "A1 policy tools");
    pol->require_subcommand(1);
    auto* lint = pol->add_subcommand("lint", "Validate one A1 policy document");
    lint->add_option("file", lint_file, "Policy JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    if (run->parsed()) {
        return cmd_run(run_file, seed_opt->count() > 0 ? std::optional<std::uint64_t>(run_seed) : std::nullopt,
                       run_out, run_sets);
    }
    if (sw->parsed()) return cmd_sweep(sweep_file, sweep_param, sweep_values, sweep_seeds, sweep_out, keep_runs);
    if (lint->parsed()) return cmd_lint(lint_file);
    return kConfigError;
}
