#include "oran/ric/message.hpp"

#include <sstream>

namespace oran::ric {

using nlohmann::json;

std::string_view to_string(MessageKind k) {
    switch (k) {
        case MessageKind::Subscription: return "SUBSCRIPTION";
        case MessageKind::Report: return "REPORT";
        case MessageKind::Control: return "CONTROL";
        case MessageKind::Policy: return "POLICY";
        case MessageKind::Insert: return "INSERT";
        case MessageKind::A1Policy: return "A1_POLICY";
        case MessageKind::A1Ei: return "A1_EI";
    }
    return "";
}

std::string_view to_string(ServiceModel m) { return m == ServiceModel::Kpm ? "KPM" : "RC"; }

std::string_view to_string(ReportKind k) {
    switch (k) {
        case ReportKind::RsrpMeas: return "RSRP_MEAS";
        case ReportKind::ConnStats: return "CONN_STATS";
        case ReportKind::BeamStats: return "BEAM_STATS";
        case ReportKind::SliceLoad: return "SLICE_LOAD";
    }
    return "";
}

ControlTarget target_of(const ControlPayload& c) {
    return std::visit(
        [](const auto& ctrl) -> ControlTarget {
            using C = std::decay_t<decltype(ctrl)>;
            if constexpr (std::is_same_v<C, HandoverControl>) {
                return {ctrl.ue_id, "serving"};
            } else if constexpr (std::is_same_v<C, BeamSwitchControl>) {
                return {ctrl.ue_id, "serving"};
            } else {
                return {ctrl.cell_id, "prb_split"};
            }
        },
        c);
}

namespace {

json control_json(const ControlPayload& c) {
    return std::visit(
        [](const auto& ctrl) -> json {
            using C = std::decay_t<decltype(ctrl)>;
            if constexpr (std::is_same_v<C, HandoverControl>) {
                return {{"type", "HANDOVER"}, {"ue_id", ctrl.ue_id}, {"target_cell", ctrl.target_cell}};
            } else if constexpr (std::is_same_v<C, BeamSwitchControl>) {
                return {{"type", "BEAM_SWITCH"},
                        {"ue_id", ctrl.ue_id},
                        {"cell_id", ctrl.cell_id},
                        {"beam_id", ctrl.beam_id},
                        {"reason", ctrl.reason}};
            } else {
                return {{"type", "PRB_SPLIT"}, {"cell_id", ctrl.cell_id}, {"shares", ctrl.shares}};
            }
        },
        c);
}

json report_json(const ReportPayload& r) {
    return std::visit(
        [](const auto& rep) -> json {
            using R = std::decay_t<decltype(rep)>;
            if constexpr (std::is_same_v<R, RsrpReport>) {
                json ms = json::array();
                for (const auto& m : rep.measurements) {
                    json j{{"ue_id", m.ue_id}, {"cell_rsrp_dbm", m.cell_rsrp_dbm}};
                    j["serving_cell"] = m.serving_cell ? json(*m.serving_cell) : json(nullptr);
                    j["serving_beam"] = m.serving_beam ? json(*m.serving_beam) : json(nullptr);
                    if (!m.beam_rsrp_dbm.empty()) j["beam_rsrp_dbm"] = m.beam_rsrp_dbm;
                    ms.push_back(std::move(j));
                }
                return {{"report_kind", "RSRP_MEAS"}, {"cell_id", rep.cell_id}, {"measurements", std::move(ms)}};
            } else if constexpr (std::is_same_v<R, ConnStatsReport>) {
                json hist = json::object();
                for (const auto& [ta, n] : rep.ta_histogram) hist[std::to_string(ta)] = n;
                return {{"report_kind", "CONN_STATS"},
                        {"cell_id", rep.cell_id},
                        {"window_start_s", to_seconds(rep.window_start)},
                        {"window_end_s", to_seconds(rep.window_end)},
                        {"request_count", rep.request_count},
                        {"ta_histogram", std::move(hist)}};
            } else if constexpr (std::is_same_v<R, BeamStatsReport>) {
                return {{"report_kind", "BEAM_STATS"},
                        {"cell_id", rep.cell_id},
                        {"window_start_s", to_seconds(rep.window_start)},
                        {"window_end_s", to_seconds(rep.window_end)},
                        {"failures", rep.failures},
                        {"beam_switches", rep.beam_switches}};
            } else {
                json slices = json::object();
                for (const auto& [qi, ues] : rep.ues_by_five_qi) slices[std::to_string(qi)] = ues;
                return {{"report_kind", "SLICE_LOAD"},
                        {"cell_id", rep.cell_id},
                        {"prb_count", rep.prb_count},
                        {"per_prb_rate_bps", rep.per_prb_rate_bps},
                        {"ues_by_five_qi", std::move(slices)}};
            }
        },
        r);
}

json blacklist_json(const E2PolicyPayload& p) {
    return {{"cell_id", p.cell_id},
            {"ta_indices", std::vector<std::int64_t>(p.ta_indices.begin(), p.ta_indices.end())},
            {"ttl_s", p.ttl_s}};
}

}  // namespace

std::string describe(const ControlPayload& c) { return control_json(c).dump(); }

json LocationBatch::summary() const {
    json arr = json::array();
    for (const auto& l : locations_) {
        arr.push_back({{"ue_id", l.ue_id}, {"x", l.position.x}, {"y", l.position.y},
                       {"measured_at_s", to_seconds(l.measured_at)}});
    }
    return {{"locations", std::move(arr)}};
}

json to_json(const RicMessage& m) {
    json payload = std::visit(
        [](const auto& p) -> json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, std::monostate>) {
                return nullptr;
            } else if constexpr (std::is_same_v<P, SubscriptionPayload>) {
                return {{"sub_id", p.sub_id},
                        {"xapp_id", p.subscription.xapp_id},
                        {"cell_ids", p.subscription.cell_ids},
                        {"report_kind", to_string(p.subscription.report_kind)},
                        {"period_s", to_seconds(p.subscription.period)}};
            } else if constexpr (std::is_same_v<P, ReportPayload>) {
                return report_json(p);
            } else if constexpr (std::is_same_v<P, ControlPayload>) {
                return control_json(p);
            } else if constexpr (std::is_same_v<P, E2PolicyPayload>) {
                return blacklist_json(p);
            } else if constexpr (std::is_same_v<P, InsertPayload>) {
                return {{"detail", p.detail}};
            } else if constexpr (std::is_same_v<P, policy::A1Policy>) {
                return policy::to_json(p);
            } else {
                if (!p) return nullptr;
                return {{"ei_kind", p->ei_kind()}, {"summary", p->summary()}};
            }
        },
        m.payload);
    return {{"msg_id", m.msg_id},
            {"time", to_seconds(m.time)},
            {"kind", to_string(m.kind)},
            {"service_model", m.service_model ? json(to_string(*m.service_model)) : json(nullptr)},
            {"source", m.source},
            {"target", m.target},
            {"payload", std::move(payload)}};
}

}  // namespace oran::ric
