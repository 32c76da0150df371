#include "oran/ransim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oran/ransim/traffic.hpp"

namespace oran::ransim {

namespace {

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += "; ";
        out += p;
    }
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::invalid_argument("invalid simulation config: " + join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::map<std::string, int> largest_remainder(const std::map<std::string, double>& shares, int total) {
    double sum = 0.0;
    for (const auto& [_, s] : shares) sum += s;
    const int target = std::min(total, static_cast<int>(std::floor(total * sum + 1e-9)));

    std::map<std::string, int> out;
    std::vector<std::pair<double, std::string>> remainders;
    int assigned = 0;
    for (const auto& [slice, s] : shares) {
        const double exact = s * total;
        const int base = static_cast<int>(std::floor(exact + 1e-9));
        out[slice] = base;
        assigned += base;
        remainders.emplace_back(exact - base, slice);
    }
    // Larger remainder first; map order already sorts keys, and stable_sort keeps it for ties.
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < target && i < remainders.size(); ++i, ++assigned) {
        ++out[remainders[i].second];
    }
    return out;
}

bool CellState::blacklisted(std::int64_t ta, SimTime t) const {
    const auto it = blacklist.find(ta);
    return it != blacklist.end() && t < it->second;
}

Simulator::Simulator(SimConfig cfg) : cfg_(std::move(cfg)), location_rng_(Rng::derive(cfg_.seed, cfg_.rng_phase + "/location")) {
    if (auto errors = validate(cfg_); !errors.empty()) throw ConfigError(std::move(errors));

    for (std::size_t c = 0; c < cfg_.cells.size(); ++c) {
        cells_.push_back(CellState{cfg_.cells[c], {}, {}, {}});
        cell_by_id_.emplace(cfg_.cells[c].id, c);
        trace_.cell_ids.push_back(cfg_.cells[c].id);
    }
    for (std::size_t u = 0; u < cfg_.ues.size(); ++u) {
        const auto& uc = cfg_.ues[u];
        UeState st;
        st.config = uc;
        st.pos = uc.pos;
        st.velocity = uc.velocity;
        Rng shadow = Rng::derive(cfg_.seed, cfg_.rng_phase + "/shadowing/" + uc.id);
        for (const auto& cell : cfg_.cells) {
            st.shadowing_db.push_back(cell.prop.shadowing_sigma_db > 0.0 ? shadow.normal(0.0, cell.prop.shadowing_sigma_db)
                                                                          : 0.0);
        }
        ues_.push_back(std::move(st));
        ue_by_id_.emplace(uc.id, u);
        trace_.ue_ids.push_back(uc.id);
        trace_.ue_kinds.push_back(uc.kind);
        if (uc.kind == UeKind::Mobile) mobile_.push_back(u);
    }
    ue_rank_.resize(ues_.size());
    std::uint32_t rank = 0;
    for (const auto& [id, idx] : ue_by_id_) ue_rank_[idx] = rank++;

    attempts_by_cell_.resize(cells_.size());
    failures_by_cell_.assign(cells_.size(), 0);
    switches_by_cell_.assign(cells_.size(), 0);
    measurements_.assign(ues_.size(), std::vector<Measurement>(cells_.size()));
    duration_ = from_seconds(cfg_.duration_s);
    tick_ = from_seconds(cfg_.tick_s);
    trace_.duration_s = cfg_.duration_s;
    trace_.tick_s = cfg_.tick_s;
}

std::vector<std::string> Simulator::cell_ids() const { return trace_.cell_ids; }

bool Simulator::has_cell(std::string_view id) const { return cell_by_id_.find(id) != cell_by_id_.end(); }

bool Simulator::has_ue(std::string_view id) const { return ue_by_id_.find(id) != ue_by_id_.end(); }

std::optional<std::size_t> Simulator::cell_index(std::string_view id) const {
    const auto it = cell_by_id_.find(id);
    return it == cell_by_id_.end() ? std::nullopt : std::optional(it->second);
}

std::optional<std::size_t> Simulator::ue_index(std::string_view id) const {
    const auto it = ue_by_id_.find(id);
    return it == ue_by_id_.end() ? std::nullopt : std::optional(it->second);
}

std::vector<double> Simulator::beam_rsrp(std::size_t u, std::size_t c) const {
    const auto& cell = cells_[c].config;
    const auto& ue = ues_[u];
    // Closer than 1 m is treated as 1 m; mobile UEs may drive over a site.
    const double d = std::max(wireless::distance(ue.pos, cell.pos), 1.0);
    const double base = cell.prop.tx_power_dbm - wireless::pathloss_db(d, cell.prop) + ue.shadowing_db[c];
    if (cell.beams.empty()) return {base};
    const double az = wireless::azimuth_deg(cell.pos, ue.pos);
    std::vector<double> out;
    out.reserve(cell.beams.size());
    for (const auto& beam : cell.beams) {
        out.push_back(base + wireless::beam_gain_db(beam, az) -
                      wireless::zone_attenuation_db(cell.zones, beam.beam_id, ue.pos));
    }
    return out;
}

double Simulator::cell_rsrp(std::size_t u, std::size_t c) const {
    const auto beams = beam_rsrp(u, c);
    return *std::max_element(beams.begin(), beams.end());
}

void Simulator::attach_all() {
    for (std::size_t u = 0; u < ues_.size(); ++u) {
        auto& ue = ues_[u];
        std::size_t best = 0;
        std::vector<double> best_beams = beam_rsrp(u, 0);
        double best_rsrp = *std::max_element(best_beams.begin(), best_beams.end());
        for (std::size_t c = 1; c < cells_.size(); ++c) {
            auto beams = beam_rsrp(u, c);
            const double r = *std::max_element(beams.begin(), beams.end());
            if (r > best_rsrp) {
                best = c;
                best_rsrp = r;
                best_beams = std::move(beams);
            }
        }
        ue.serving_cell = static_cast<std::int32_t>(best);
        ue.serving_beam = cells_[best].config.beams.empty()
                              ? -1
                              : static_cast<std::int32_t>(std::max_element(best_beams.begin(), best_beams.end()) -
                                                          best_beams.begin());
        const auto& cc = cells_[best].config;
        ue.failure_counter = wireless::BeamFailureCounter(cc.failure_threshold_dbm, cc.failure_n_consecutive);
    }
}

void Simulator::push(SimTime t, EventKind kind, std::uint32_t rank, std::uint64_t arg) {
    queue_.push(Event{t, kind, rank, seq_++, arg});
}

void Simulator::schedule_traffic() {
    for (std::size_t u = 0; u < ues_.size(); ++u) {
        const auto& uc = ues_[u].config;
        Rng rng = Rng::derive(cfg_.seed, cfg_.rng_phase + "/traffic/" + uc.id);
        if (const auto* p = std::get_if<PoissonTraffic>(&uc.traffic)) {
            for (double t : legit_traffic(p->rate_per_hour, cfg_.duration_s, rng)) {
                push(from_seconds(t), EventKind::ConnectionRequest, ue_rank_[u], u);
            }
        } else if (const auto* a = std::get_if<AttackTraffic>(&uc.traffic)) {
            const auto schedule = adversary_traffic(a->attacks_per_day, a->burst_len, a->burst_gap_s, cfg_.duration_s, rng);
            for (double t : schedule.burst_starts) push(from_seconds(t), EventKind::AttackBurstStart, ue_rank_[u], u);
            for (double t : schedule.requests) push(from_seconds(t), EventKind::ConnectionRequest, ue_rank_[u], u);
        }
    }
}

void Simulator::on_subscription(const ric::Subscription& sub) {
    const SimTime now = ric_ != nullptr ? ric_->now() : 0;
    SubCursor cursor;
    cursor.sub = sub;
    cursor.last_report = now;
    for (const auto& cell : sub.cell_ids) {
        const std::size_t c = cell_by_id_.at(cell);
        cursor.attempt_cursor[cell] = attempts_by_cell_[c].size();
        cursor.failures_seen[cell] = failures_by_cell_[c];
        cursor.switches_seen[cell] = switches_by_cell_[c];
    }
    cursors_.push_back(std::move(cursor));
    const SimTime first = (now / sub.period + 1) * sub.period;
    if (first <= duration_) push(first, EventKind::ReportDue, 0, cursors_.size() - 1);
}

ConnectionAttempt Simulator::handle_connection_request(std::size_t c, std::size_t u, SimTime t) {
    const auto& cell = cells_[c];
    const auto& ue = ues_[u];
    ConnectionAttempt a;
    a.time = t;
    a.ue_id = ue.config.id;
    a.cell_id = cell.config.id;
    a.ta = wireless::ta_index(wireless::distance(ue.pos, cell.config.pos), cell.config.ta);
    a.outcome = cell.blacklisted(a.ta, t) ? AttemptOutcome::RejectedBlacklist : AttemptOutcome::Accepted;
    a.ue_kind = ue.config.kind;
    attempts_by_cell_[c].push_back(trace_.attempts.size());
    trace_.attempts.push_back(a);
    return a;
}

void Simulator::refresh_measurements(SimTime t) {
    if (measured_at_ == t) return;
    for (std::size_t u : mobile_) {
        for (std::size_t c = 0; c < cells_.size(); ++c) {
            auto& m = measurements_[u][c];
            m.beams = beam_rsrp(u, c);
            m.cell_rsrp = *std::max_element(m.beams.begin(), m.beams.end());
        }
    }
    measured_at_ = t;
}

void Simulator::on_move_tick() {
    for (std::size_t u : mobile_) advance(ues_[u].pos, ues_[u].velocity, to_seconds(tick_), cfg_.bounds);
}

void Simulator::on_measurement_tick(SimTime t) {
    refresh_measurements(t);
    ++trace_.ticks;
    for (std::size_t u : mobile_) {
        auto& ue = ues_[u];
        if (ue.serving_cell < 0 || ue.serving_beam < 0) continue;
        const double rsrp = measurements_[u][ue.serving_cell].beams[ue.serving_beam];
        if (ue.failure_counter.observe(rsrp)) {
            trace_.beam_failures.push_back({t, ue.config.id, cells_[ue.serving_cell].config.id, ue.serving_beam});
            ++failures_by_cell_[ue.serving_cell];
        }
    }
    if (ric_ != nullptr && ric_->has_ei_subscribers(ric::LocationBatch::kKind)) {
        std::vector<ric::ReportedLocation> locations;
        locations.reserve(mobile_.size());
        for (std::size_t u : mobile_) {
            locations.push_back({ues_[u].config.id, wireless::noisy_position(ues_[u].pos, cfg_.localization, location_rng_), t});
        }
        ric_->publish_ei("app-server", std::make_shared<ric::LocationBatch>(std::move(locations)));
    }
}

ric::ReportPayload Simulator::build_report(SubCursor& cursor, const std::string& cell_id, SimTime t) {
    const std::size_t c = cell_by_id_.at(cell_id);
    const auto& cell = cells_[c];
    switch (cursor.sub.report_kind) {
        case ric::ReportKind::RsrpMeas: {
            refresh_measurements(t);
            ric::RsrpReport rep;
            rep.cell_id = cell_id;
            rep.measurements.reserve(mobile_.size());
            for (std::size_t u : mobile_) {
                const auto& ue = ues_[u];
                ric::UeMeasurement m;
                m.ue_id = ue.config.id;
                if (ue.serving_cell >= 0) m.serving_cell = cells_[ue.serving_cell].config.id;
                if (ue.serving_beam >= 0) m.serving_beam = ue.serving_beam;
                m.cell_rsrp_dbm = measurements_[u][c].cell_rsrp;
                if (!cell.config.beams.empty()) m.beam_rsrp_dbm = measurements_[u][c].beams;
                rep.measurements.push_back(std::move(m));
            }
            return rep;
        }
        case ric::ReportKind::ConnStats: {
            ric::ConnStatsReport rep;
            rep.cell_id = cell_id;
            rep.window_start = cursor.last_report;
            rep.window_end = t;
            auto& pos = cursor.attempt_cursor[cell_id];
            const auto& idx = attempts_by_cell_[c];
            for (; pos < idx.size(); ++pos) {
                ++rep.request_count;
                ++rep.ta_histogram[trace_.attempts[idx[pos]].ta];
            }
            return rep;
        }
        case ric::ReportKind::BeamStats: {
            ric::BeamStatsReport rep;
            rep.cell_id = cell_id;
            rep.window_start = cursor.last_report;
            rep.window_end = t;
            rep.failures = failures_by_cell_[c] - cursor.failures_seen[cell_id];
            rep.beam_switches = switches_by_cell_[c] - cursor.switches_seen[cell_id];
            cursor.failures_seen[cell_id] = failures_by_cell_[c];
            cursor.switches_seen[cell_id] = switches_by_cell_[c];
            return rep;
        }
        case ric::ReportKind::SliceLoad: {
            ric::SliceLoadReport rep;
            rep.cell_id = cell_id;
            rep.prb_count = cell.config.prb_count;
            rep.per_prb_rate_bps = cell.config.per_prb_rate_bps;
            for (const auto& ue : ues_) {
                if (ue.serving_cell == static_cast<std::int32_t>(c)) {
                    rep.ues_by_five_qi[ue.config.five_qi].push_back(ue.config.id);
                }
            }
            for (auto& [_, ids] : rep.ues_by_five_qi) std::sort(ids.begin(), ids.end());
            return rep;
        }
    }
    throw std::logic_error("unhandled report kind");
}

void Simulator::on_report_due(std::size_t index, SimTime t) {
    // Copy: publishing may add subscriptions and reallocate cursors_.
    const ric::Subscription sub = cursors_[index].sub;
    for (const auto& cell : sub.cell_ids) {
        ric::ReportPayload payload = build_report(cursors_[index], cell, t);
        ric_->publish_report(sub.sub_id, std::move(payload));
    }
    cursors_[index].last_report = t;
    if (t + sub.period <= duration_) push(t + sub.period, EventKind::ReportDue, 0, index);
}

void Simulator::record_serving(SimTime t) {
    for (std::size_t u : mobile_) {
        trace_.serving.push_back({t, static_cast<std::uint32_t>(u), ues_[u].serving_cell, ues_[u].serving_beam});
    }
}

std::optional<std::string> Simulator::apply_control(const ric::ControlPayload& ctrl, std::string_view xapp_id, SimTime t) {
    if (const auto* h = std::get_if<ric::HandoverControl>(&ctrl)) {
        const auto u = ue_index(h->ue_id);
        if (!u) return "unknown UE " + h->ue_id;
        auto& ue = ues_[*u];
        if (h->target_cell.empty()) {
            if (ue.serving_cell < 0) return std::nullopt;
            trace_.handovers.push_back({t, ue.config.id, cells_[ue.serving_cell].config.id, "", std::string(xapp_id)});
            ue.serving_cell = -1;
            ue.serving_beam = -1;
            return std::nullopt;
        }
        const auto c = cell_index(h->target_cell);
        if (!c) return "unknown target cell " + h->target_cell;
        if (ue.serving_cell == static_cast<std::int32_t>(*c)) return std::nullopt;
        trace_.handovers.push_back({t, ue.config.id, ue.serving_cell >= 0 ? cells_[ue.serving_cell].config.id : "",
                                    h->target_cell, std::string(xapp_id)});
        ue.serving_cell = static_cast<std::int32_t>(*c);
        ue.serving_beam = -1;
        const auto& cc = cells_[*c].config;
        ue.failure_counter = wireless::BeamFailureCounter(cc.failure_threshold_dbm, cc.failure_n_consecutive);
        return std::nullopt;
    }
    if (const auto* b = std::get_if<ric::BeamSwitchControl>(&ctrl)) {
        const auto u = ue_index(b->ue_id);
        const auto c = cell_index(b->cell_id);
        if (!u) return "unknown UE " + b->ue_id;
        if (!c) return "unknown cell " + b->cell_id;
        auto& ue = ues_[*u];
        if (ue.serving_cell != static_cast<std::int32_t>(*c)) return "UE " + b->ue_id + " is not served by " + b->cell_id;
        if (b->beam_id < 0 || b->beam_id >= static_cast<int>(cells_[*c].config.beams.size())) {
            return "unknown beam " + std::to_string(b->beam_id) + " in cell " + b->cell_id;
        }
        if (ue.serving_beam == b->beam_id) return std::nullopt;
        trace_.beam_events.push_back({t, ue.config.id, b->cell_id, ue.serving_beam, b->beam_id, b->reason, std::string(xapp_id)});
        // The below-threshold run is per UE, so a switch onto another weak
        // beam does not clear it.
        ue.serving_beam = b->beam_id;
        ++switches_by_cell_[*c];
        return std::nullopt;
    }
    const auto& split = std::get<ric::PrbSplitControl>(ctrl);
    const auto c = cell_index(split.cell_id);
    if (!c) return "unknown cell " + split.cell_id;
    auto& cell = cells_[*c];
    cell.prb_shares = split.shares;
    cell.prb_split = largest_remainder(split.shares, cell.config.prb_count);
    for (const auto& [slice, share] : split.shares) {
        trace_.prb_allocations.push_back({t, split.cell_id, slice, share, cell.prb_split[slice]});
    }
    return std::nullopt;
}

std::optional<std::string> Simulator::apply_policy(const ric::E2PolicyPayload& policy, SimTime t) {
    const auto c = cell_index(policy.cell_id);
    if (!c) return "unknown cell " + policy.cell_id;
    auto& cell = cells_[*c];
    const SimTime expiry = t + from_seconds(policy.ttl_s);
    for (std::int64_t ta : policy.ta_indices) {
        auto& slot = cell.blacklist[ta];
        slot = std::max(slot, expiry);
        trace_.blacklists.push_back({t, policy.cell_id, ta, slot});
    }
    if (expiry <= duration_) push(expiry, EventKind::PolicyExpiry, 0, *c);
    return std::nullopt;
}

SimulationTrace Simulator::run(ric::Ric& ric, const std::function<void(ric::Ric&)>& bootstrap) {
    ric_ = &ric;
    ric.connect(*this);
    attach_all();
    ric.start(0);
    if (bootstrap) bootstrap(ric);
    schedule_traffic();

    const bool rsrp_subscribed = std::any_of(cursors_.begin(), cursors_.end(), [](const SubCursor& s) {
        return s.sub.report_kind == ric::ReportKind::RsrpMeas;
    });
    ticking_ = !mobile_.empty() || rsrp_subscribed;
    if (ticking_ && tick_ <= duration_) {
        push(tick_, EventKind::MoveTick, 0, 1);
        push(tick_, EventKind::MeasurementTick, 0, 1);
    }

    SimTime last = 0;
    while (!queue_.empty()) {
        const SimTime t = queue_.top().time;
        if (t > duration_) break;
        if (t < last) throw std::logic_error("event processed out of time order");
        last = t;
        ric.advance_to(t);
        bool measured = false;
        while (!queue_.empty() && queue_.top().time == t) {
            const Event e = queue_.top();
            queue_.pop();
            switch (e.kind) {
                case EventKind::MoveTick:
                    on_move_tick();
                    if ((e.arg + 1) * static_cast<std::uint64_t>(tick_) <= static_cast<std::uint64_t>(duration_)) {
                        push(static_cast<SimTime>(e.arg + 1) * tick_, EventKind::MoveTick, 0, e.arg + 1);
                    }
                    break;
                case EventKind::MeasurementTick:
                    on_measurement_tick(t);
                    measured = true;
                    if ((e.arg + 1) * static_cast<std::uint64_t>(tick_) <= static_cast<std::uint64_t>(duration_)) {
                        push(static_cast<SimTime>(e.arg + 1) * tick_, EventKind::MeasurementTick, 0, e.arg + 1);
                    }
                    break;
                case EventKind::ConnectionRequest: {
                    auto& ue = ues_[e.arg];
                    std::size_t c = ue.serving_cell >= 0 ? static_cast<std::size_t>(ue.serving_cell) : 0;
                    handle_connection_request(c, e.arg, t);
                    break;
                }
                case EventKind::AttackBurstStart:
                    trace_.attack_bursts.push_back({t, ues_[e.arg].config.id});
                    break;
                case EventKind::ReportDue:
                    on_report_due(e.arg, t);
                    break;
                case EventKind::PolicyExpiry: {
                    auto& bl = cells_[e.arg].blacklist;
                    std::erase_if(bl, [t](const auto& entry) { return entry.second <= t; });
                    break;
                }
            }
        }
        ric.end_tick(t);
        if (measured && cfg_.record_serving) record_serving(t);
    }
    ric_ = nullptr;
    return trace_;
}

}  // namespace oran::ransim
