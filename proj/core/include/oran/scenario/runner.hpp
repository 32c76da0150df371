#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "oran/ransim/trace.hpp"
#include "oran/ric/ric.hpp"
#include "oran/scenario/config.hpp"
#include "oran/xapp/qra.hpp"
#include "oran/xapp/ssd.hpp"
#include "oran/xapp/ts.hpp"

namespace oran::scenario {

/// Thrown when a valid scenario fails while running; maps to exit code 1.
class RunError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BmmSummary {
    std::int64_t monitor_failures = 0;
    std::int64_t node_reported_failures = 0;
    std::int64_t emergency_entries = 0;
    std::int64_t stay = 0;
    std::int64_t lookahead_switch = 0;
    std::int64_t emergency_rsrp = 0;
};

struct RunArtifacts {
    ransim::SimulationTrace trace;
    std::vector<ric::ConflictRecord> conflicts;
    std::vector<ric::ControlLogEntry> control_log;
    std::vector<std::string> message_log;
    std::optional<std::vector<xapp::AssociationRow>> association;
    std::optional<std::vector<xapp::UeShareRecord>> qra_shares;
    std::optional<std::vector<xapp::SsdWindowRecord>> ssd_windows;
    std::optional<std::vector<xapp::RejectionRow>> ssd_rejections;
    std::optional<BmmSummary> bmm;
    /// Headline numbers in a fixed order; the sweep aggregates these.
    std::vector<std::pair<std::string, double>> metrics;

    std::optional<double> metric(const std::string& name) const;
};

/// Trains whatever the enabled xApps need, then runs the scenario once.
/// Throws RunError.
RunArtifacts run_scenario(const ScenarioConfig& cfg);

/// Writes every CSV of one run into `dir` (created if missing).
void write_run_outputs(const RunArtifacts& run, const ScenarioConfig& cfg, const std::filesystem::path& dir);

/// Runs the base scenario, or every variant into `dir/<variant>/` when the
/// scenario defines variants, and writes report.md. Returns the directories
/// written, in run order.
std::vector<std::filesystem::path> run_to_directory(const ScenarioConfig& cfg, const std::filesystem::path& dir);

/// Where a run writes when no --out is given.
std::filesystem::path default_output_dir(const ScenarioConfig& cfg);

// ---------------------------------------------------------------- reports

/// A parsed CSV file: header plus rows, RFC 4180 quoting.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);
std::string csv_quote(const std::string& field);

/// Markdown report for one run directory, built from the CSVs found there.
std::string render_run_report(const std::filesystem::path& run_dir, const std::string& title);
/// Report over variant directories; adds the policy/association table when
/// the variants carry ts_association.csv and are named POLICY@cell.
std::string render_variant_report(const std::filesystem::path& dir, const std::string& title,
                                  const std::vector<std::string>& variants);
std::string render_sweep_report(const std::filesystem::path& sweep_csv, const std::string& title);

// ---------------------------------------------------------------- sweeps

struct SweepOptions {
    std::string param;
    std::vector<nlohmann::json> values;
    int seeds = 1;
    /// Also write every run's CSVs under runs/<value>/seed-<seed>/.
    bool keep_runs = false;
};

struct SweepRow {
    std::string value;  // as written in sweep.csv
    int runs = 0;
    std::vector<std::string> metric_names;
    std::vector<xapp::MeanStd> stats;
};

/// One run per value per seed (seed = base seed + i) of the base scenario.
/// Throws ScenarioError for a key that does not name a scalar field or a
/// value the scenario rejects.
std::vector<SweepRow> sweep(const nlohmann::json& base_doc, const SweepOptions& options,
                            const std::optional<std::filesystem::path>& out_dir = std::nullopt);

void write_sweep_csv(std::ostream& os, const std::string& param, const std::vector<SweepRow>& rows);

}  // namespace oran::scenario
