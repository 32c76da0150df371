#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oran/expected.hpp"
#include "oran/ric/message.hpp"
#include "oran/ric/xapp.hpp"

namespace oran::ric {

/// The RAN side of the E2 interface as seen by the RIC.
class E2Agent {
public:
    virtual ~E2Agent() = default;

    virtual std::vector<std::string> cell_ids() const = 0;
    virtual bool has_cell(std::string_view cell_id) const = 0;
    virtual bool has_ue(std::string_view ue_id) const = 0;
    /// A new subscription exists; the agent schedules its REPORT_DUE events.
    virtual void on_subscription(const Subscription& sub) = 0;
    /// Applies an arbitrated control. Returns a diagnostic when the node
    /// refuses it (unknown cell or beam), in which case state is unchanged.
    virtual std::optional<std::string> apply_control(const ControlPayload& ctrl, std::string_view xapp_id,
                                                     SimTime t) = 0;
    virtual std::optional<std::string> apply_policy(const E2PolicyPayload& policy, SimTime t) = 0;
};

struct ControlSubmission {
    MsgId msg_id = 0;
    std::string xapp_id;
    ControlPayload control;
};

struct ConflictRecord {
    SimTime time = 0;
    std::vector<MsgId> msg_ids;
    ControlTarget target;
    std::string winner;
    std::vector<std::string> losers;
};

struct Arbitration {
    std::vector<ControlSubmission> applied;
    std::vector<ControlSubmission> lost;
    std::vector<ConflictRecord> conflicts;
};

/// Static-priority arbitration of one tick's controls. Controls are grouped
/// by (entity, parameter); in each group the xApp earliest in `priority`
/// wins, xApps missing from the list rank after it in id order, and the
/// earliest message breaks the remaining ties.
Arbitration arbitrate(std::vector<ControlSubmission> queued, std::span<const std::string> priority, SimTime t);

struct SubmitResult {
    bool accepted = false;
    std::optional<MsgId> msg_id;
    std::string diagnostic;
};

struct ControlLogEntry {
    enum class Status { Applied, LostArbitration, Rejected };
    SimTime time = 0;
    MsgId msg_id = 0;
    std::string xapp_id;
    std::string description;
    Status status = Status::Applied;
    std::string diagnostic;
};

std::string_view to_string(ControlLogEntry::Status s);

struct RicOptions {
    std::vector<std::string> priority;
    bool log_messages = false;
    /// Fixed delivery delay for A1 enrichment information.
    SimTime ei_delay = 0;
};

/// Near-RT RIC core: in-process message bus between the E2 agent and the
/// hosted xApps. Single-threaded; payloads are immutable values.
class Ric {
public:
    explicit Ric(RicOptions options = {});

    Ric(const Ric&) = delete;
    Ric& operator=(const Ric&) = delete;

    /// Non-owning; the xApp must outlive the Ric.
    void add_xapp(XApp& app);
    void connect(E2Agent& agent);
    void start(SimTime t);

    SimTime now() const { return now_; }
    void advance_to(SimTime t);

    Expected<SubId, std::string> subscribe(std::string_view xapp_id, const SubscriptionSpec& spec);
    const std::vector<Subscription>& subscriptions() const { return subscriptions_; }
    const Subscription* find_subscription(SubId id) const;

    /// Delivers a report to the subscriber synchronously.
    void publish_report(SubId sub_id, ReportPayload payload);

    SubmitResult submit_control(std::string_view xapp_id, ControlPayload ctrl);
    SubmitResult submit_policy(std::string_view xapp_id, E2PolicyPayload policy);
    /// INSERT is part of the E2 service set but no xApp here uses it.
    SubmitResult submit_insert(std::string_view xapp_id, InsertPayload insert);

    /// Validates and distributes an A1 policy document.
    SubmitResult ingest_a1(const nlohmann::json& doc);
    SubmitResult ingest_a1(const policy::A1Policy& p);
    std::vector<policy::A1Policy> active_policies() const;

    void subscribe_ei(std::string_view xapp_id, std::string_view ei_kind);
    bool has_ei_subscribers(std::string_view ei_kind) const;
    /// Delivered after the configured EI delay (immediately when it is 0).
    void publish_ei(std::string_view source, EiPayload doc);

    /// Closes the tick: delivers due enrichment, runs xApp tick hooks,
    /// arbitrates and applies queued controls, then applies E2 policies.
    void end_tick(SimTime t);

    const std::vector<ConflictRecord>& conflicts() const { return conflicts_; }
    const std::vector<ControlLogEntry>& control_log() const { return control_log_; }
    const std::vector<std::string>& message_log() const { return message_log_; }

private:
    struct PendingEi {
        SimTime deliver_at;
        RicMessage msg;
    };
    struct PendingPolicy {
        MsgId msg_id;
        std::string xapp_id;
        E2PolicyPayload policy;
    };

    MsgId next_id() { return ++last_msg_id_; }
    void log(const RicMessage& m);
    XApp* find_xapp(std::string_view id) const;
    void deliver_ei(const RicMessage& msg);

    RicOptions options_;
    std::vector<XApp*> xapps_;
    E2Agent* agent_ = nullptr;
    SimTime now_ = 0;
    MsgId last_msg_id_ = 0;
    SubId last_sub_id_ = 0;
    std::vector<Subscription> subscriptions_;
    std::vector<ControlSubmission> queued_controls_;
    std::vector<PendingPolicy> queued_policies_;
    std::vector<PendingEi> pending_ei_;
    std::map<std::string, std::vector<std::string>, std::less<>> ei_subscribers_;
    std::map<std::pair<policy::PolicyType, policy::Scope>, policy::A1Policy> active_a1_;
    std::vector<ConflictRecord> conflicts_;
    std::vector<ControlLogEntry> control_log_;
    std::vector<std::string> message_log_;
};

}  // namespace oran::ric
