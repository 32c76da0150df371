#include "oran/xapp/ts.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace oran::xapp {

double calibration_offset(double exponent) {
    if (!(exponent > 0.0)) throw std::invalid_argument("path-loss exponent must be > 0");
    return 10.0 * exponent * std::log10(3.0);
}

std::optional<std::string> decide(const std::map<std::string, double>& rsrp_dbm,
                                  const std::optional<std::string>& serving,
                                  const policy::TsPreferenceBody* prefs, double offset_db, double hysteresis_db) {
    std::optional<std::string> best;
    double best_score = 0.0;
    std::optional<double> serving_score;
    for (const auto& [cell, rsrp] : rsrp_dbm) {
        double score = rsrp;
        if (prefs != nullptr) {
            if (const auto it = prefs->cells.find(cell); it != prefs->cells.end()) {
                if (it->second == policy::CellLabel::Forbid) continue;
                score += it->second == policy::CellLabel::Prefer ? offset_db : -offset_db;
            }
        }
        if (serving && cell == *serving) serving_score = score;
        if (!best || score > best_score) {
            best = cell;
            best_score = score;
        }
    }
    if (serving_score && !(best_score > *serving_score + hysteresis_db)) return serving;
    return best;
}

TrafficSteeringXApp::TrafficSteeringXApp(TsParams params, std::string id) : id_(std::move(id)), params_(params) {}

void TrafficSteeringXApp::start(ric::Ric& ric) {
    auto sub = ric.subscribe(id_, {{}, ric::ReportKind::RsrpMeas, params_.period_s});
    if (!sub) throw std::runtime_error("ts subscription failed: " + sub.error());
}

void TrafficSteeringXApp::on_report(const ric::RicMessage& msg, ric::Ric& /*ric*/) {
    const auto* report = std::get_if<ric::RsrpReport>(&std::get<ric::ReportPayload>(msg.payload));
    if (report == nullptr) return;
    for (const auto& m : report->measurements) {
        auto& view = pending_[m.ue_id];
        view.serving = m.serving_cell;
        view.rsrp[report->cell_id] = m.cell_rsrp_dbm;
    }
}

void TrafficSteeringXApp::on_a1_policy(const policy::A1Policy& p, ric::Ric& /*ric*/) {
    prefs_.insert_or_assign(p.scope.id, std::get<policy::TsPreferenceBody>(p.body));
}

void TrafficSteeringXApp::on_tick_end(SimTime /*t*/, ric::Ric& ric) {
    for (const auto& [ue, view] : pending_) {
        const auto it = prefs_.find(ue);
        const auto target = decide(view.rsrp, view.serving, it == prefs_.end() ? nullptr : &it->second,
                                   params_.preference_offset_db, params_.hysteresis_db);
        if (target == view.serving) continue;
        ++requested_;
        ric.submit_control(id_, ric::HandoverControl{ue, target.value_or("")});
    }
    pending_.clear();
}

std::vector<AssociationRow> association(const ransim::SimulationTrace& trace) {
    std::vector<std::int64_t> ticks(trace.cell_ids.size(), 0);
    std::int64_t unserved = 0;
    std::int64_t total = 0;
    for (const auto& s : trace.serving) {
        ++total;
        if (s.cell >= 0) {
            ++ticks[s.cell];
        } else {
            ++unserved;
        }
    }
    std::vector<AssociationRow> rows;
    const auto add = [&](const std::string& cell, std::int64_t n) {
        rows.push_back({cell, to_seconds(n * from_seconds(trace.tick_s)),
                        total > 0 ? static_cast<double>(n) / static_cast<double>(total) : 0.0});
    };
    for (std::size_t c = 0; c < trace.cell_ids.size(); ++c) add(trace.cell_ids[c], ticks[c]);
    if (unserved > 0) add("", unserved);
    return rows;
}

void write_ts_association_csv(std::ostream& os, const std::vector<AssociationRow>& rows) {
    os << "cell_id,seconds_served,fraction\n";
    for (const auto& r : rows) {
        os << r.cell_id << ',' << ransim::format_double(r.seconds) << ',' << ransim::format_double(r.fraction) << '\n';
    }
}

}  // namespace oran::xapp
