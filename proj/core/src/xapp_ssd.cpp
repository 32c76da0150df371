#include "oran/xapp/ssd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace oran::xapp {

namespace {

constexpr double kSecondsPerDay = 86400.0;

bool within(const AnomalyPoint& a, const AnomalyPoint& b, double eps) {
    const double dx = a.z_count - b.z_count;
    const double dy = a.z_ta_peak - b.z_ta_peak;
    return dx * dx + dy * dy <= eps * eps;
}

double z(double value, const MeanStd& s, double std_floor) { return (value - s.mean) / std::max(s.std, std_floor); }

}  // namespace

MeanStd mean_std(std::span<const double> xs) {
    MeanStd out;
    out.n = static_cast<std::int64_t>(xs.size());
    if (xs.empty()) return out;
    out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return out;
}

std::size_t KpiProfile::bucket_of(SimTime window_start) const {
    const double tod = std::fmod(to_seconds(window_start), kSecondsPerDay);
    const auto b = static_cast<std::size_t>(std::floor(tod / bucket_len_s));
    return std::min(b, buckets.empty() ? 0 : buckets.size() - 1);
}

MeanStd KpiProfile::ta_stats(std::int64_t ta) const {
    const auto it = ta_bins.find(ta);
    return it == ta_bins.end() ? MeanStd{} : it->second;
}

Expected<KpiProfile, std::string> build_profile(std::span<const WindowStats> windows, double bucket_len_s,
                                                std::int64_t min_training_windows) {
    if (!(bucket_len_s > 0.0) || bucket_len_s > kSecondsPerDay) {
        return std::string("bucket length must be in (0, 86400] s");
    }
    KpiProfile profile;
    profile.bucket_len_s = bucket_len_s;
    const auto n_buckets = static_cast<std::size_t>(std::ceil(kSecondsPerDay / bucket_len_s - 1e-9));
    profile.buckets.resize(n_buckets);

    std::vector<std::vector<double>> counts(n_buckets);
    for (const auto& w : windows) counts[profile.bucket_of(w.start)].push_back(static_cast<double>(w.request_count));
    for (std::size_t b = 0; b < n_buckets; ++b) {
        if (static_cast<std::int64_t>(counts[b].size()) < min_training_windows) {
            return "bucket " + std::to_string(b) + " has " + std::to_string(counts[b].size()) +
                   " training windows, needs " + std::to_string(min_training_windows);
        }
        profile.buckets[b] = mean_std(counts[b]);
    }

    std::map<std::int64_t, std::vector<double>> per_bin;
    for (const auto& w : windows) {
        for (const auto& [ta, _] : w.ta_histogram) per_bin.try_emplace(ta);
    }
    for (auto& [ta, xs] : per_bin) {
        xs.reserve(windows.size());
        for (const auto& w : windows) {
            const auto it = w.ta_histogram.find(ta);
            xs.push_back(it == w.ta_histogram.end() ? 0.0 : static_cast<double>(it->second));
        }
        profile.ta_bins[ta] = mean_std(xs);
    }
    return profile;
}

AnomalyPoint anomaly_point(const WindowStats& w, const KpiProfile& profile, double std_floor) {
    AnomalyPoint p;
    p.z_count = z(static_cast<double>(w.request_count), profile.buckets.at(profile.bucket_of(w.start)), std_floor);
    if (!w.ta_histogram.empty()) {
        auto peak = w.ta_histogram.begin();
        for (auto it = w.ta_histogram.begin(); it != w.ta_histogram.end(); ++it) {
            if (it->second > peak->second) peak = it;
        }
        p.z_ta_peak = z(static_cast<double>(peak->second), profile.ta_stats(peak->first), std_floor);
    }
    return p;
}

std::vector<int> dbscan(std::span<const AnomalyPoint> points, double eps, std::size_t min_pts) {
    constexpr int kUnvisited = -2;
    const std::size_t n = points.size();
    std::vector<int> labels(n, kUnvisited);
    const auto region = [&](std::size_t i) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < n; ++j) {
            if (within(points[i], points[j], eps)) out.push_back(j);
        }
        return out;
    };

    int cluster = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != kUnvisited) continue;
        auto seeds = region(i);
        if (seeds.size() < min_pts) {
            labels[i] = kNoise;
            continue;
        }
        labels[i] = cluster;
        for (std::size_t k = 0; k < seeds.size(); ++k) {
            const std::size_t q = seeds[k];
            if (labels[q] == kNoise) labels[q] = cluster;
            if (labels[q] != kUnvisited) continue;
            labels[q] = cluster;
            auto more = region(q);
            if (more.size() >= min_pts) seeds.insert(seeds.end(), more.begin(), more.end());
        }
        ++cluster;
    }
    return labels;
}

NoiseModel::NoiseModel(std::vector<AnomalyPoint> history, double eps, std::size_t min_pts)
    : history_(std::move(history)), neighbours_(history_.size(), 0), eps_(eps), min_pts_(min_pts) {
    for (std::size_t i = 0; i < history_.size(); ++i) {
        for (std::size_t j = i; j < history_.size(); ++j) {
            if (!within(history_[i], history_[j], eps_)) continue;
            ++neighbours_[i];
            if (j != i) ++neighbours_[j];
        }
    }
}

bool NoiseModel::is_noise(const AnomalyPoint& p) const {
    std::size_t own = 1;
    bool near_core = false;
    for (std::size_t i = 0; i < history_.size(); ++i) {
        if (!within(p, history_[i], eps_)) continue;
        ++own;
        // The new point raises this neighbour's count by one.
        if (neighbours_[i] + 1 >= min_pts_) near_core = true;
    }
    return own < min_pts_ && !near_core;
}

bool detect(const WindowStats& w, const KpiProfile& profile, std::span<const AnomalyPoint> history, double eps,
            std::size_t min_pts, double std_floor) {
    std::vector<AnomalyPoint> all(history.begin(), history.end());
    all.push_back(anomaly_point(w, profile, std_floor));
    return dbscan(all, eps, min_pts).back() == kNoise;
}

std::optional<policy::TaBlacklistBody> blacklist_from_ta(const WindowStats& w, const KpiProfile& profile,
                                                         double k_sigma, double std_floor,
                                                         const std::string& cell_id, double ttl_s) {
    policy::TaBlacklistBody body;
    body.cell_id = cell_id;
    body.ttl_s = ttl_s;
    for (const auto& [ta, count] : w.ta_histogram) {
        const MeanStd s = profile.ta_stats(ta);
        if (static_cast<double>(count) > s.mean + k_sigma * std::max(s.std, std_floor)) body.ta_indices.insert(ta);
    }
    if (body.ta_indices.empty()) return std::nullopt;
    return body;
}

nlohmann::json KpiProfileDocument::summary() const {
    return {{"cell_id", cell_id_},
            {"bucket_len_s", profile_.bucket_len_s},
            {"buckets", profile_.buckets.size()},
            {"ta_bins", profile_.ta_bins.size()},
            {"history_points", history_.size()}};
}

SignalingStormXApp::SignalingStormXApp(SsdParams params, std::string id) : id_(std::move(id)), params_(params) {}

void SignalingStormXApp::start(ric::Ric& ric) {
    auto sub = ric.subscribe(id_, {{}, ric::ReportKind::ConnStats, params_.window_s});
    if (!sub) throw std::runtime_error("ssd subscription failed: " + sub.error());
    ric.subscribe_ei(id_, KpiProfileDocument::kKind);
}

void SignalingStormXApp::on_enrichment(const ric::RicMessage& msg, ric::Ric& /*ric*/) {
    const auto& doc = std::get<ric::EiPayload>(msg.payload);
    const auto* profile = dynamic_cast<const KpiProfileDocument*>(doc.get());
    if (profile == nullptr) return;
    models_.insert_or_assign(profile->cell_id(),
                             CellModel{profile->profile(), NoiseModel(profile->history(), params_.eps, params_.min_pts)});
}

void SignalingStormXApp::on_a1_policy(const policy::A1Policy& p, ric::Ric& ric) {
    ric.submit_policy(id_, std::get<policy::TaBlacklistBody>(p.body));
}

void SignalingStormXApp::on_report(const ric::RicMessage& msg, ric::Ric& ric) {
    const auto* stats = std::get_if<ric::ConnStatsReport>(&std::get<ric::ReportPayload>(msg.payload));
    if (stats == nullptr) return;
    SsdWindowRecord rec;
    rec.cell_id = stats->cell_id;
    rec.window = {stats->window_start, stats->window_end, stats->request_count, stats->ta_histogram};

    const auto it = models_.find(stats->cell_id);
    if (it != models_.end()) {
        const auto& model = it->second;
        rec.point = anomaly_point(rec.window, model.profile, params_.std_floor);
        rec.storm = model.noise.is_noise(*rec.point);
        if (rec.storm) {
            auto body = blacklist_from_ta(rec.window, model.profile, params_.k_sigma, params_.std_floor, stats->cell_id,
                                          params_.ttl_s);
            if (body) {
                rec.blacklisted.assign(body->ta_indices.begin(), body->ta_indices.end());
                ric.submit_policy(id_, std::move(*body));
            }
        }
    }
    windows_.push_back(std::move(rec));
}

WindowRecorder::WindowRecorder(double window_s, std::string id) : id_(std::move(id)), window_s_(window_s) {}

void WindowRecorder::start(ric::Ric& ric) {
    auto sub = ric.subscribe(id_, {{}, ric::ReportKind::ConnStats, window_s_});
    if (!sub) throw std::runtime_error("recorder subscription failed: " + sub.error());
}

void WindowRecorder::on_report(const ric::RicMessage& msg, ric::Ric& /*ric*/) {
    const auto* stats = std::get_if<ric::ConnStatsReport>(&std::get<ric::ReportPayload>(msg.payload));
    if (stats == nullptr) return;
    windows_[stats->cell_id].push_back(
        {stats->window_start, stats->window_end, stats->request_count, stats->ta_histogram});
}

std::vector<RejectionRow> rejection_summary(const ransim::SimulationTrace& trace) {
    std::map<ransim::UeKind, RejectionRow> rows;
    for (const auto& a : trace.attempts) {
        auto& r = rows[a.ue_kind];
        r.kind = a.ue_kind;
        ++r.attempts;
        if (a.outcome == ransim::AttemptOutcome::RejectedBlacklist) ++r.rejected;
    }
    std::vector<RejectionRow> out;
    for (auto& [_, r] : rows) {
        r.ratio = static_cast<double>(r.rejected) / static_cast<double>(r.attempts);
        out.push_back(r);
    }
    return out;
}

double rejected_legit_ratio(const ransim::SimulationTrace& trace) {
    for (const auto& r : rejection_summary(trace)) {
        if (r.kind == ransim::UeKind::IotLegit) return r.ratio;
    }
    return 0.0;
}

void write_ssd_windows_csv(std::ostream& os, const std::vector<SsdWindowRecord>& rows) {
    os << "window_start_s,window_end_s,cell_id,count,z_count,z_ta_peak,storm_flag,blacklisted_tas\n";
    for (const auto& r : rows) {
        os << ransim::format_time(r.window.start) << ',' << ransim::format_time(r.window.end) << ',' << r.cell_id << ','
           << r.window.request_count << ',';
        if (r.point) {
            os << ransim::format_double(r.point->z_count) << ',' << ransim::format_double(r.point->z_ta_peak);
        } else {
            os << ',';
        }
        os << ',' << (r.storm ? 1 : 0) << ',';
        for (std::size_t i = 0; i < r.blacklisted.size(); ++i) os << (i ? ";" : "") << r.blacklisted[i];
        os << '\n';
    }
}

void write_ssd_rejections_csv(std::ostream& os, const std::vector<RejectionRow>& rows) {
    os << "ue_kind,attempts,rejected,ratio\n";
    for (const auto& r : rows) {
        os << ransim::to_string(r.kind) << ',' << r.attempts << ',' << r.rejected << ',' << ransim::format_double(r.ratio)
           << '\n';
    }
}

}  // namespace oran::xapp
