#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "oran/policy/a1_policy.hpp"
#include "oran/sim_time.hpp"
#include "oran/wireless/radio.hpp"

namespace oran::ric {

using MsgId = std::uint64_t;
using SubId = std::uint64_t;

enum class MessageKind { Subscription, Report, Control, Policy, Insert, A1Policy, A1Ei };
enum class ServiceModel { Kpm, Rc };
enum class ReportKind { RsrpMeas, ConnStats, BeamStats, SliceLoad };

std::string_view to_string(MessageKind k);
std::string_view to_string(ServiceModel m);
std::string_view to_string(ReportKind k);

struct SubscriptionSpec {
    /// Empty means every cell known to the E2 agent.
    std::vector<std::string> cell_ids;
    ReportKind report_kind = ReportKind::RsrpMeas;
    double period_s = 0.02;
};

struct Subscription {
    SubId sub_id = 0;
    std::string xapp_id;
    std::vector<std::string> cell_ids;  // sorted, expanded
    ReportKind report_kind = ReportKind::RsrpMeas;
    SimTime period = 0;
};

// ---- E2 REPORT payloads -------------------------------------------------

struct UeMeasurement {
    std::string ue_id;
    std::optional<std::string> serving_cell;
    std::optional<int> serving_beam;
    /// Best-beam RSRP of the reporting cell (plain RSRP for beamless cells).
    double cell_rsrp_dbm = 0.0;
    /// Indexed by beam id; empty for beamless cells.
    std::vector<double> beam_rsrp_dbm;
};

struct RsrpReport {
    std::string cell_id;
    std::vector<UeMeasurement> measurements;
};

struct ConnStatsReport {
    std::string cell_id;
    SimTime window_start = 0;
    SimTime window_end = 0;
    std::int64_t request_count = 0;
    std::map<std::int64_t, std::int64_t> ta_histogram;
};

struct BeamStatsReport {
    std::string cell_id;
    SimTime window_start = 0;
    SimTime window_end = 0;
    std::int64_t failures = 0;
    std::int64_t beam_switches = 0;
};

struct SliceLoadReport {
    std::string cell_id;
    int prb_count = 0;
    double per_prb_rate_bps = 0.0;
    /// 5QI -> sorted ids of the connected UEs using it.
    std::map<int, std::vector<std::string>> ues_by_five_qi;
};

using ReportPayload = std::variant<RsrpReport, ConnStatsReport, BeamStatsReport, SliceLoadReport>;

// ---- E2 CONTROL payloads ------------------------------------------------

/// An empty target releases the UE (no cell may serve it).
struct HandoverControl {
    std::string ue_id;
    std::string target_cell;
};

/// Beam switch is not an E2 RC action today; the simulator defines it.
struct BeamSwitchControl {
    std::string ue_id;
    std::string cell_id;
    int beam_id = 0;
    std::string reason;
};

struct PrbSplitControl {
    std::string cell_id;
    /// slice id -> share of the cell's PRBs; shares sum to at most 1.
    std::map<std::string, double> shares;
};

using ControlPayload = std::variant<HandoverControl, BeamSwitchControl, PrbSplitControl>;

/// The (entity, parameter) pair a control writes; used for conflict grouping.
struct ControlTarget {
    std::string entity;
    std::string parameter;

    friend auto operator<=>(const ControlTarget&, const ControlTarget&) = default;
};

ControlTarget target_of(const ControlPayload& c);
std::string describe(const ControlPayload& c);

// ---- E2 POLICY / INSERT ------------------------------------------------

/// Node-enforced policy; the only kind is the TA blacklist.
using E2PolicyPayload = policy::TaBlacklistBody;

struct InsertPayload {
    std::string detail;
};

// ---- A1 enrichment information ------------------------------------------

/// Immutable enrichment document shared by pointer across the bus.
class EiDocument {
public:
    virtual ~EiDocument() = default;
    virtual std::string_view ei_kind() const = 0;
    /// Compact description for the message log.
    virtual nlohmann::json summary() const = 0;
};

using EiPayload = std::shared_ptr<const EiDocument>;

struct ReportedLocation {
    std::string ue_id;
    wireless::Position position;
    SimTime measured_at = 0;
};

/// Positions from the external application server, as measured by the
/// deployment's localization technique.
class LocationBatch final : public EiDocument {
public:
    static constexpr std::string_view kKind = "location";

    explicit LocationBatch(std::vector<ReportedLocation> locations) : locations_(std::move(locations)) {}
    std::string_view ei_kind() const override { return kKind; }
    nlohmann::json summary() const override;
    const std::vector<ReportedLocation>& locations() const { return locations_; }

private:
    std::vector<ReportedLocation> locations_;
};

struct SubscriptionPayload {
    SubId sub_id = 0;
    Subscription subscription;
};

using Payload = std::variant<std::monostate, SubscriptionPayload, ReportPayload, ControlPayload, E2PolicyPayload,
                             InsertPayload, policy::A1Policy, EiPayload>;

struct RicMessage {
    MsgId msg_id = 0;
    SimTime time = 0;
    MessageKind kind = MessageKind::Report;
    std::optional<ServiceModel> service_model;
    std::string source;
    std::string target;
    Payload payload;
};

/// One NDJSON record; field names match the RicMessage members.
nlohmann::json to_json(const RicMessage& m);

}  // namespace oran::ric
