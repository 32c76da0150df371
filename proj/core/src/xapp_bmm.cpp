#include "oran/xapp/bmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace oran::xapp {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

RemGrid::RemGrid(GridParams params, int beam_count) : params_(params), beam_count_(beam_count) {
    if (!(params_.cell_size_m > 0.0) || params_.nx < 1 || params_.ny < 1) {
        throw std::invalid_argument("REM grid needs a positive cell size and at least one bin per axis");
    }
    if (beam_count_ < 1) throw std::invalid_argument("REM needs at least one beam");
    if (!(params_.speed_bin_mps > 0.0) || params_.speed_bins < 1 || params_.bearing_bins < 1) {
        throw std::invalid_argument("REM motion histogram needs positive bin counts");
    }
    const auto bins = static_cast<std::size_t>(params_.nx) * static_cast<std::size_t>(params_.ny);
    rsrp_sum_.assign(bins * static_cast<std::size_t>(beam_count_), 0.0);
    rsrp_count_.assign(bins, 0);
    motion_.assign(bins * static_cast<std::size_t>(params_.speed_bins * params_.bearing_bins), MotionCell{});
    motion_total_.assign(bins, 0);
    modal_.assign(bins, 0);
}

std::optional<std::size_t> RemGrid::bin_of(const wireless::Position& p) const {
    const double fx = (p.x - params_.origin.x) / params_.cell_size_m;
    const double fy = (p.y - params_.origin.y) / params_.cell_size_m;
    if (!(fx >= 0.0) || !(fy >= 0.0) || fx >= params_.nx || fy >= params_.ny) return std::nullopt;
    const auto ix = static_cast<std::size_t>(fx);
    const auto iy = static_cast<std::size_t>(fy);
    return iy * static_cast<std::size_t>(params_.nx) + ix;
}

void RemGrid::add_rsrp(std::size_t bin, std::span<const double> beam_rsrp_dbm) {
    if (beam_rsrp_dbm.size() != static_cast<std::size_t>(beam_count_)) {
        throw std::invalid_argument("REM sample beam count mismatch");
    }
    for (int b = 0; b < beam_count_; ++b) rsrp_sum_[bin * beam_count_ + b] += beam_rsrp_dbm[b];
    ++rsrp_count_[bin];
}

std::size_t RemGrid::motion_index(std::size_t bin, int speed_bin, int bearing_bin) const {
    return (bin * params_.speed_bins + speed_bin) * params_.bearing_bins + bearing_bin;
}

void RemGrid::add_motion(std::size_t bin, const ransim::Velocity& v) {
    const int sb = std::clamp(static_cast<int>(std::floor(v.speed_mps / params_.speed_bin_mps)), 0, params_.speed_bins - 1);
    const double bearing = wireless::normalize_angle_deg(v.bearing_deg);
    const int bb = std::min(static_cast<int>(bearing / (360.0 / params_.bearing_bins)), params_.bearing_bins - 1);
    const std::size_t idx = motion_index(bin, sb, bb);
    auto& cell = motion_[idx];
    ++cell.count;
    // Counts only grow, so the modal cell changes only to the one just bumped.
    const auto& best = motion_[modal_[bin]];
    if (motion_total_[bin] == 0 || cell.count > best.count || (cell.count == best.count && idx < modal_[bin])) {
        modal_[bin] = idx;
    }
    cell.speed_sum += v.speed_mps;
    cell.sin_sum += std::sin(v.bearing_deg * kDegToRad);
    cell.cos_sum += std::cos(v.bearing_deg * kDegToRad);
    ++motion_total_[bin];
}

std::optional<double> RemGrid::mean_rsrp(std::size_t bin, int beam) const {
    if (beam < 0 || beam >= beam_count_ || rsrp_count_[bin] == 0) return std::nullopt;
    return rsrp_sum_[bin * beam_count_ + beam] / static_cast<double>(rsrp_count_[bin]);
}

double RemGrid::motion_probability(std::size_t bin, int speed_bin, int bearing_bin) const {
    if (motion_total_[bin] == 0) return 0.0;
    return static_cast<double>(motion_[motion_index(bin, speed_bin, bearing_bin)].count) /
           static_cast<double>(motion_total_[bin]);
}

std::optional<ransim::Velocity> RemGrid::modal_motion(std::size_t bin) const {
    if (motion_total_[bin] == 0) return std::nullopt;
    const MotionCell* best = &motion_[modal_[bin]];
    const double n = static_cast<double>(best->count);
    return ransim::Velocity{best->speed_sum / n,
                            wireless::normalize_angle_deg(std::atan2(best->sin_sum, best->cos_sum) / kDegToRad)};
}

RemBuilder::RemBuilder(GridParams params, int beam_count, wireless::LocalizationTechnique tech, Rng rng)
    : grid_(params, beam_count), tech_(tech), rng_(rng) {}

void RemBuilder::add(const RemSample& s) {
    const auto bin = grid_.bin_of(wireless::noisy_position(s.pos, tech_, rng_));
    if (!bin) return;
    grid_.add_rsrp(*bin, s.beam_rsrp_dbm);
    if (s.motion) grid_.add_motion(*bin, *s.motion);
}

RemGrid build_rem(std::span<const RemSample> samples, wireless::LocalizationTechnique tech, const GridParams& params,
                  int beam_count, Rng& rng) {
    RemBuilder builder(params, beam_count, tech, rng);
    for (const auto& s : samples) builder.add(s);
    return std::move(builder).finish();
}

std::vector<wireless::Position> predict_path(const wireless::Position& pos, const RemGrid& rem, int horizon,
                                             double tick_s) {
    std::vector<wireless::Position> path;
    wireless::Position p = pos;
    for (int i = 0; i < horizon; ++i) {
        const auto bin = rem.bin_of(p);
        if (!bin) break;
        if (const auto m = rem.modal_motion(*bin)) {
            p.x += m->speed_mps * tick_s * std::cos(m->bearing_deg * kDegToRad);
            p.y += m->speed_mps * tick_s * std::sin(m->bearing_deg * kDegToRad);
            if (!rem.contains(p)) break;
        }
        path.push_back(p);
    }
    return path;
}

std::string_view to_string(BeamReason r) {
    switch (r) {
        case BeamReason::Stay: return "STAY";
        case BeamReason::LookaheadSwitch: return "LOOKAHEAD_SWITCH";
        case BeamReason::EmergencyRsrp: return "EMERGENCY_RSRP";
    }
    return "";
}

BeamDecision select_beam(const std::string& ue_id, const wireless::Position& reported_pos, int current_beam,
                         const RemGrid& rem, const SelectParams& params) {
    const auto here = rem.bin_of(reported_pos);
    if (!here) return {ue_id, current_beam, BeamReason::EmergencyRsrp};

    std::vector<std::size_t> bins{*here};
    for (const auto& p : predict_path(reported_pos, rem, params.horizon, params.tick_s)) bins.push_back(*rem.bin_of(p));

    const double floor = params.failure_threshold_dbm + params.margin_db;
    const auto prefix = [&](int beam) {
        std::size_t n = 0;
        for (std::size_t bin : bins) {
            const auto r = rem.mean_rsrp(bin, beam);
            if (!r || *r < floor) break;
            ++n;
        }
        return n;
    };

    const bool has_current = current_beam >= 0 && current_beam < rem.beam_count();
    std::size_t current_run = 0;
    if (has_current) {
        current_run = prefix(current_beam);
        if (current_run == bins.size()) return {ue_id, current_beam, BeamReason::Stay};
    }

    int best = -1;
    std::size_t best_run = 0;
    double best_here = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < rem.beam_count(); ++b) {
        const std::size_t run = b == current_beam ? current_run : prefix(b);
        const double at = rem.mean_rsrp(*here, b).value_or(-std::numeric_limits<double>::infinity());
        if (best < 0 || run > best_run || (run == best_run && at > best_here)) {
            best = b;
            best_run = run;
            best_here = at;
        }
    }
    if (has_current && current_run == best_run) return {ue_id, current_beam, BeamReason::Stay};
    return {ue_id, best, BeamReason::LookaheadSwitch};
}

int emergency_select(std::span<const double> beam_rsrp_dbm) {
    if (beam_rsrp_dbm.empty()) throw std::invalid_argument("empty RSRP report");
    return static_cast<int>(std::max_element(beam_rsrp_dbm.begin(), beam_rsrp_dbm.end()) - beam_rsrp_dbm.begin());
}

BeamFailureMonitor::BeamFailureMonitor(double threshold_dbm, int n_consecutive)
    : threshold_dbm_(threshold_dbm), n_consecutive_(n_consecutive) {
    if (n_consecutive_ < 1) throw std::invalid_argument("n_consecutive must be >= 1");
}

bool BeamFailureMonitor::observe(const std::string& ue_id, double rsrp_dbm) {
    auto it = counters_.find(ue_id);
    if (it == counters_.end()) {
        it = counters_.emplace(ue_id, wireless::BeamFailureCounter(threshold_dbm_, n_consecutive_)).first;
    }
    if (!it->second.observe(rsrp_dbm)) return false;
    ++window_;
    ++total_;
    return true;
}

void BeamFailureMonitor::reset(const std::string& ue_id) {
    if (auto it = counters_.find(ue_id); it != counters_.end()) it->second.reset();
}

std::int64_t BeamFailureMonitor::close_window() {
    const std::int64_t n = window_;
    window_ = 0;
    return n;
}

void EmergencyMode::on_window(std::int64_t failures) {
    if (!active_) {
        if (failures > limit_) {
            active_ = true;
            clean_ = 0;
            ++entries_;
        }
        return;
    }
    clean_ = failures > limit_ ? 0 : clean_ + 1;
    if (clean_ >= exit_windows_) active_ = false;
}

nlohmann::json RemDocument::summary() const {
    const auto& p = grid_->params();
    return {{"cell_id", cell_id_},
            {"nx", p.nx},
            {"ny", p.ny},
            {"cell_size_m", p.cell_size_m},
            {"beams", grid_->beam_count()}};
}

std::string_view to_string(BmmMode m) { return m == BmmMode::Rem ? "rem" : "rsrp_only"; }

std::optional<BmmMode> parse_bmm_mode(std::string_view s) {
    if (s == "rem") return BmmMode::Rem;
    if (s == "rsrp_only") return BmmMode::RsrpOnly;
    return std::nullopt;
}

BeamManagementXApp::BeamManagementXApp(BmmParams params, std::string id)
    : id_(std::move(id)),
      params_(params),
      monitor_(params.select.failure_threshold_dbm, params.failure_n_consecutive),
      emergency_(params.emergency_limit, params.emergency_exit_windows) {}

void BeamManagementXApp::start(ric::Ric& ric) {
    auto rsrp = ric.subscribe(id_, {{}, ric::ReportKind::RsrpMeas, params_.report_period_s});
    if (!rsrp) throw std::runtime_error("bmm subscription failed: " + rsrp.error());
    auto stats = ric.subscribe(id_, {{}, ric::ReportKind::BeamStats, params_.stats_period_s});
    if (!stats) throw std::runtime_error("bmm subscription failed: " + stats.error());
    ric.subscribe_ei(id_, ric::LocationBatch::kKind);
    ric.subscribe_ei(id_, RemDocument::kKind);
}

void BeamManagementXApp::on_enrichment(const ric::RicMessage& msg, ric::Ric& /*ric*/) {
    const auto& doc = std::get<ric::EiPayload>(msg.payload);
    if (const auto* batch = dynamic_cast<const ric::LocationBatch*>(doc.get())) {
        for (const auto& l : batch->locations()) locations_[l.ue_id] = l.position;
    } else if (const auto* rem = dynamic_cast<const RemDocument*>(doc.get())) {
        rems_[rem->cell_id()] = doc;
        grids_[rem->cell_id()] = &rem->grid();
    }
}

void BeamManagementXApp::on_report(const ric::RicMessage& msg, ric::Ric& /*ric*/) {
    const auto& payload = std::get<ric::ReportPayload>(msg.payload);
    if (const auto* stats = std::get_if<ric::BeamStatsReport>(&payload)) {
        node_failures_ += stats->failures;
        window_closed_ = true;
        return;
    }
    const auto* report = std::get_if<ric::RsrpReport>(&payload);
    if (report == nullptr) return;
    for (const auto& m : report->measurements) {
        if (m.serving_cell != report->cell_id || m.beam_rsrp_dbm.empty()) continue;
        const int beam = m.serving_beam.value_or(-1);
        auto& last = last_serving_cell_[m.ue_id];
        if (last != report->cell_id) {
            monitor_.reset(m.ue_id);
            last = report->cell_id;
        }
        if (beam >= 0 && beam < static_cast<int>(m.beam_rsrp_dbm.size())) monitor_.observe(m.ue_id, m.beam_rsrp_dbm[beam]);
        pending_[m.ue_id] = Pending{report->cell_id, beam, m.beam_rsrp_dbm};
    }
}

void BeamManagementXApp::on_tick_end(SimTime /*t*/, ric::Ric& ric) {
    if (window_closed_) {
        emergency_.on_window(monitor_.close_window());
        window_closed_ = false;
    }
    const bool analytic = params_.mode == BmmMode::RsrpOnly || emergency_.active();
    for (const auto& [ue, p] : pending_) {
        BeamDecision d{ue, p.serving_beam, BeamReason::Stay};
        const auto grid = grids_.find(p.cell_id);
        const auto loc = locations_.find(ue);
        if (analytic) {
            d = {ue, emergency_select(p.beam_rsrp), BeamReason::EmergencyRsrp};
        } else if (grid != grids_.end() && loc != locations_.end()) {
            d = select_beam(ue, loc->second, p.serving_beam, *grid->second, params_.select);
            if (d.reason == BeamReason::EmergencyRsrp) d.beam_id = emergency_select(p.beam_rsrp);
        } else if (p.serving_beam < 0) {
            d = {ue, emergency_select(p.beam_rsrp), BeamReason::EmergencyRsrp};
        }
        ++decision_counts_[d.reason];
        if (d.beam_id == p.serving_beam || d.beam_id < 0) continue;
        ric.submit_control(id_, ric::BeamSwitchControl{ue, p.cell_id, d.beam_id, std::string(to_string(d.reason))});
    }
    pending_.clear();
}

std::int64_t BeamManagementXApp::decisions(BeamReason r) const {
    const auto it = decision_counts_.find(r);
    return it == decision_counts_.end() ? 0 : it->second;
}

}  // namespace oran::xapp
