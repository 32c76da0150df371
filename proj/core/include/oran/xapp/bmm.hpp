#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oran/ransim/types.hpp"
#include "oran/ric/ric.hpp"
#include "oran/ric/xapp.hpp"
#include "oran/rng.hpp"
#include "oran/wireless/radio.hpp"

namespace oran::xapp {

struct GridParams {
    wireless::Position origin;  // lower-left corner
    double cell_size_m = 5.0;
    int nx = 1;
    int ny = 1;
    double speed_bin_mps = 5.0;
    int speed_bins = 10;
    int bearing_bins = 16;
};

/// Radio environment map of one cell: per grid bin, the mean RSRP of every
/// beam (averaged in dB) and a histogram of observed motion.
class RemGrid {
public:
    RemGrid(GridParams params, int beam_count);

    const GridParams& params() const { return params_; }
    int beam_count() const { return beam_count_; }
    bool contains(const wireless::Position& p) const { return bin_of(p).has_value(); }
    std::optional<std::size_t> bin_of(const wireless::Position& p) const;

    void add_rsrp(std::size_t bin, std::span<const double> beam_rsrp_dbm);
    void add_motion(std::size_t bin, const ransim::Velocity& v);

    std::optional<double> mean_rsrp(std::size_t bin, int beam) const;
    std::int64_t rsrp_samples(std::size_t bin) const { return rsrp_count_[bin]; }
    std::int64_t motion_samples(std::size_t bin) const { return motion_total_[bin]; }
    /// Share of the bin's motion samples in (speed bin, bearing bin).
    double motion_probability(std::size_t bin, int speed_bin, int bearing_bin) const;
    /// Mean speed and circular-mean bearing of the most populated motion bin
    /// (lowest index on ties); nullopt when the bin saw no motion.
    std::optional<ransim::Velocity> modal_motion(std::size_t bin) const;

private:
    struct MotionCell {
        std::int64_t count = 0;
        double speed_sum = 0.0;
        double sin_sum = 0.0;
        double cos_sum = 0.0;
    };

    std::size_t motion_index(std::size_t bin, int speed_bin, int bearing_bin) const;

    GridParams params_;
    int beam_count_;
    std::vector<double> rsrp_sum_;  // [bin * beams + beam]
    std::vector<std::int64_t> rsrp_count_;
    std::vector<MotionCell> motion_;
    std::vector<std::int64_t> motion_total_;
    std::vector<std::size_t> modal_;  // motion index of the modal cell per bin
};

struct RemSample {
    wireless::Position pos;  // true position
    std::vector<double> beam_rsrp_dbm;
    std::optional<ransim::Velocity> motion;
};

/// Incremental form of build_rem for training passes too long to buffer.
class RemBuilder {
public:
    RemBuilder(GridParams params, int beam_count, wireless::LocalizationTechnique tech, Rng rng);
    /// Bins the sample at a position perturbed by the localization error;
    /// samples that land off the grid are dropped.
    void add(const RemSample& s);
    RemGrid finish() && { return std::move(grid_); }

private:
    RemGrid grid_;
    wireless::LocalizationTechnique tech_;
    Rng rng_;
};

RemGrid build_rem(std::span<const RemSample> samples, wireless::LocalizationTechnique tech, const GridParams& params,
                  int beam_count, Rng& rng);

/// Follows the modal motion of each visited bin for `horizon` steps. Stops
/// at the grid edge; repeats the position where a bin has no motion data.
std::vector<wireless::Position> predict_path(const wireless::Position& pos, const RemGrid& rem, int horizon,
                                             double tick_s);

enum class BeamReason { Stay, LookaheadSwitch, EmergencyRsrp };
std::string_view to_string(BeamReason r);

struct BeamDecision {
    std::string ue_id;
    int beam_id = -1;
    BeamReason reason = BeamReason::Stay;
};

struct SelectParams {
    int horizon = 25;
    double tick_s = 0.02;
    double failure_threshold_dbm = -100.0;
    double margin_db = 3.0;
};

/// Lookahead beam choice over the reported position and its predicted path.
/// The current beam is kept when it clears threshold + margin on every point;
/// otherwise the beam with the longest satisfying prefix wins (then highest
/// REM RSRP at the position, then lowest id), and a current beam tied on
/// prefix length is kept. Off-grid positions yield EMERGENCY_RSRP with the
/// current beam, leaving the choice to emergency_select.
BeamDecision select_beam(const std::string& ue_id, const wireless::Position& reported_pos, int current_beam,
                         const RemGrid& rem, const SelectParams& params);

/// Strongest measured beam, lowest id on ties. Throws for an empty report.
int emergency_select(std::span<const double> beam_rsrp_dbm);

/// Per-UE failure counting with the node's rule, plus a running window total.
class BeamFailureMonitor {
public:
    BeamFailureMonitor(double threshold_dbm, int n_consecutive);

    bool observe(const std::string& ue_id, double rsrp_dbm);
    void reset(const std::string& ue_id);
    std::int64_t window_failures() const { return window_; }
    std::int64_t total_failures() const { return total_; }
    /// Returns the finished window's count and starts a new one.
    std::int64_t close_window();

private:
    double threshold_dbm_;
    int n_consecutive_;
    std::map<std::string, wireless::BeamFailureCounter, std::less<>> counters_;
    std::int64_t window_ = 0;
    std::int64_t total_ = 0;
};

/// Global fallback switch: on after a window with more than `limit`
/// failures, off again after `exit_windows` consecutive windows at or
/// below it.
class EmergencyMode {
public:
    EmergencyMode(std::int64_t limit, int exit_windows) : limit_(limit), exit_windows_(exit_windows) {}

    void on_window(std::int64_t failures);
    bool active() const { return active_; }
    std::int64_t entries() const { return entries_; }

private:
    std::int64_t limit_;
    int exit_windows_;
    bool active_ = false;
    int clean_ = 0;
    std::int64_t entries_ = 0;
};

/// A trained REM for one cell, shipped as enrichment information.
class RemDocument final : public ric::EiDocument {
public:
    static constexpr std::string_view kKind = "rem";

    RemDocument(std::string cell_id, std::shared_ptr<const RemGrid> grid)
        : cell_id_(std::move(cell_id)), grid_(std::move(grid)) {}

    std::string_view ei_kind() const override { return kKind; }
    nlohmann::json summary() const override;
    const std::string& cell_id() const { return cell_id_; }
    const RemGrid& grid() const { return *grid_; }

private:
    std::string cell_id_;
    std::shared_ptr<const RemGrid> grid_;
};

enum class BmmMode { Rem, RsrpOnly };
std::string_view to_string(BmmMode m);
std::optional<BmmMode> parse_bmm_mode(std::string_view s);

struct BmmParams {
    BmmMode mode = BmmMode::Rem;
    SelectParams select;
    int failure_n_consecutive = 3;
    double report_period_s = 0.02;
    double stats_period_s = 1.0;
    std::int64_t emergency_limit = 50;
    int emergency_exit_windows = 3;
};

class BeamManagementXApp final : public ric::XApp {
public:
    explicit BeamManagementXApp(BmmParams params, std::string id = "bmm");

    const std::string& id() const override { return id_; }
    void start(ric::Ric& ric) override;
    void on_report(const ric::RicMessage& msg, ric::Ric& ric) override;
    void on_enrichment(const ric::RicMessage& msg, ric::Ric& ric) override;
    void on_tick_end(SimTime t, ric::Ric& ric) override;

    const BeamFailureMonitor& monitor() const { return monitor_; }
    const EmergencyMode& emergency() const { return emergency_; }
    std::int64_t node_reported_failures() const { return node_failures_; }
    std::int64_t decisions(BeamReason r) const;

private:
    struct Pending {
        std::string cell_id;
        int serving_beam = -1;
        std::vector<double> beam_rsrp;
    };

    std::string id_;
    BmmParams params_;
    BeamFailureMonitor monitor_;
    EmergencyMode emergency_;
    std::map<std::string, std::shared_ptr<const ric::EiDocument>> rems_;  // keeps RemDocument alive
    std::map<std::string, const RemGrid*> grids_;
    std::map<std::string, wireless::Position> locations_;
    std::map<std::string, std::string> last_serving_cell_;
    std::map<std::string, Pending> pending_;
    bool window_closed_ = false;
    std::int64_t node_failures_ = 0;
    std::map<BeamReason, std::int64_t> decision_counts_;
};

}  // namespace oran::xapp
