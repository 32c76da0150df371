#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oran/expected.hpp"
#include "oran/policy/a1_policy.hpp"
#include "oran/ransim/trace.hpp"
#include "oran/ric/ric.hpp"
#include "oran/ric/xapp.hpp"

namespace oran::xapp {

struct WindowStats {
    SimTime start = 0;
    SimTime end = 0;
    std::int64_t request_count = 0;
    std::map<std::int64_t, std::int64_t> ta_histogram;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample (n - 1) deviation; 0 below two samples
    std::int64_t n = 0;
};

MeanStd mean_std(std::span<const double> xs);

/// Long-term baseline: request-count statistics per time-of-day bucket and
/// per-window statistics of every TA bin ever seen.
struct KpiProfile {
    double bucket_len_s = 3600.0;
    std::vector<MeanStd> buckets;
    std::map<std::int64_t, MeanStd> ta_bins;

    /// Time-of-day bucket of a window, keyed by its start.
    std::size_t bucket_of(SimTime window_start) const;
    /// Zero statistics for a bin never seen in training.
    MeanStd ta_stats(std::int64_t ta) const;
};

Expected<KpiProfile, std::string> build_profile(std::span<const WindowStats> windows, double bucket_len_s,
                                                std::int64_t min_training_windows);

struct AnomalyPoint {
    double z_count = 0.0;
    double z_ta_peak = 0.0;
};

/// z_count scores the window's request count against its bucket; z_ta_peak
/// scores the fullest TA bin (lowest index on ties) against that bin's
/// statistics. Deviations below `std_floor` are raised to it. An empty window
/// has z_ta_peak 0.
AnomalyPoint anomaly_point(const WindowStats& w, const KpiProfile& profile, double std_floor);

inline constexpr int kNoise = -1;

/// Textbook DBSCAN with inclusive eps and the point itself counted towards
/// min_pts. Points are visited in index order; clusters are numbered from 0.
std::vector<int> dbscan(std::span<const AnomalyPoint> points, double eps, std::size_t min_pts);

/// Answers "would this point be DBSCAN noise next to the history?" without
/// re-clustering. A point is noise iff it is not core itself and none of its
/// eps-neighbours is core once the point is added.
class NoiseModel {
public:
    NoiseModel() = default;
    NoiseModel(std::vector<AnomalyPoint> history, double eps, std::size_t min_pts);

    bool is_noise(const AnomalyPoint& p) const;
    std::size_t size() const { return history_.size(); }

private:
    std::vector<AnomalyPoint> history_;
    std::vector<std::size_t> neighbours_;  // including self
    double eps_ = 0.0;
    std::size_t min_pts_ = 1;
};

/// Storm iff the window's point is noise when clustered with the history.
bool detect(const WindowStats& w, const KpiProfile& profile, std::span<const AnomalyPoint> history, double eps,
            std::size_t min_pts, double std_floor);

/// Every TA bin whose count exceeds mean + k_sigma * max(std, std_floor).
/// Nullopt when no bin qualifies.
std::optional<policy::TaBlacklistBody> blacklist_from_ta(const WindowStats& w, const KpiProfile& profile,
                                                         double k_sigma, double std_floor,
                                                         const std::string& cell_id, double ttl_s);

/// Profile and normal-history points for one cell, computed offline.
class KpiProfileDocument final : public ric::EiDocument {
public:
    static constexpr std::string_view kKind = "kpi_profile";

    KpiProfileDocument(std::string cell_id, KpiProfile profile, std::vector<AnomalyPoint> history)
        : cell_id_(std::move(cell_id)), profile_(std::move(profile)), history_(std::move(history)) {}

    std::string_view ei_kind() const override { return kKind; }
    nlohmann::json summary() const override;

    const std::string& cell_id() const { return cell_id_; }
    const KpiProfile& profile() const { return profile_; }
    const std::vector<AnomalyPoint>& history() const { return history_; }

private:
    std::string cell_id_;
    KpiProfile profile_;
    std::vector<AnomalyPoint> history_;
};

struct SsdParams {
    double window_s = 300.0;
    double bucket_len_s = 3600.0;
    double eps = 3.0;
    std::size_t min_pts = 4;
    double std_floor = 0.5;
    double k_sigma = 3.0;
    double ttl_s = 300.0;
    std::int64_t min_training_windows = 2;
};

struct SsdWindowRecord {
    std::string cell_id;
    WindowStats window;
    std::optional<AnomalyPoint> point;  // absent while no profile is known
    bool storm = false;
    std::vector<std::int64_t> blacklisted;
};

class SignalingStormXApp final : public ric::XApp {
public:
    explicit SignalingStormXApp(SsdParams params, std::string id = "ssd");

    const std::string& id() const override { return id_; }
    void start(ric::Ric& ric) override;
    void on_report(const ric::RicMessage& msg, ric::Ric& ric) override;
    void on_enrichment(const ric::RicMessage& msg, ric::Ric& ric) override;
    /// Operator-issued TA blacklists are forwarded to the node unchanged.
    bool accepts(policy::PolicyType type) const override { return type == policy::PolicyType::TaBlacklist; }
    void on_a1_policy(const policy::A1Policy& p, ric::Ric& ric) override;

    const std::vector<SsdWindowRecord>& windows() const { return windows_; }

private:
    struct CellModel {
        KpiProfile profile;
        NoiseModel noise;
    };

    std::string id_;
    SsdParams params_;
    std::map<std::string, CellModel> models_;
    std::vector<SsdWindowRecord> windows_;
};

/// Collects CONN_STATS windows; used to gather training data offline.
class WindowRecorder final : public ric::XApp {
public:
    explicit WindowRecorder(double window_s, std::string id = "ssd-recorder");

    const std::string& id() const override { return id_; }
    void start(ric::Ric& ric) override;
    void on_report(const ric::RicMessage& msg, ric::Ric& ric) override;

    const std::map<std::string, std::vector<WindowStats>>& windows() const { return windows_; }

private:
    std::string id_;
    double window_s_;
    std::map<std::string, std::vector<WindowStats>> windows_;
};

struct RejectionRow {
    ransim::UeKind kind = ransim::UeKind::IotLegit;
    std::int64_t attempts = 0;
    std::int64_t rejected = 0;
    double ratio = 0.0;
};

/// Attempts and blacklist rejections per UE kind, in enum order, kinds
/// without attempts omitted.
std::vector<RejectionRow> rejection_summary(const ransim::SimulationTrace& trace);
/// Rejected share of legitimate IoT attempts; 0 when there were none.
double rejected_legit_ratio(const ransim::SimulationTrace& trace);

void write_ssd_windows_csv(std::ostream& os, const std::vector<SsdWindowRecord>& rows);
void write_ssd_rejections_csv(std::ostream& os, const std::vector<RejectionRow>& rows);

}  // namespace oran::xapp
