#include "oran/ric/ric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oran::ric {

std::string_view to_string(ControlLogEntry::Status s) {
    switch (s) {
        case ControlLogEntry::Status::Applied: return "APPLIED";
        case ControlLogEntry::Status::LostArbitration: return "LOST_ARBITRATION";
        case ControlLogEntry::Status::Rejected: return "REJECTED";
    }
    return "";
}

Arbitration arbitrate(std::vector<ControlSubmission> queued, std::span<const std::string> priority, SimTime t) {
    const auto rank = [&](const std::string& xapp) {
        const auto it = std::find(priority.begin(), priority.end(), xapp);
        return static_cast<std::size_t>(it - priority.begin());
    };
    std::map<ControlTarget, std::vector<ControlSubmission>> groups;
    for (auto& c : queued) {
        groups[target_of(c.control)].push_back(std::move(c));
    }

    Arbitration out;
    for (auto& [target, group] : groups) {
        std::sort(group.begin(), group.end(), [&](const ControlSubmission& a, const ControlSubmission& b) {
            return std::tuple(rank(a.xapp_id), a.xapp_id, a.msg_id) < std::tuple(rank(b.xapp_id), b.xapp_id, b.msg_id);
        });
        if (group.size() > 1) {
            ConflictRecord rec;
            rec.time = t;
            rec.target = target;
            rec.winner = group.front().xapp_id;
            for (std::size_t i = 0; i < group.size(); ++i) {
                rec.msg_ids.push_back(group[i].msg_id);
                if (i > 0) {
                    rec.losers.push_back(group[i].xapp_id);
                    out.lost.push_back(group[i]);
                }
            }
            std::sort(rec.msg_ids.begin(), rec.msg_ids.end());
            out.conflicts.push_back(std::move(rec));
        }
        out.applied.push_back(std::move(group.front()));
    }
    std::sort(out.applied.begin(), out.applied.end(),
              [](const ControlSubmission& a, const ControlSubmission& b) { return a.msg_id < b.msg_id; });
    return out;
}

Ric::Ric(RicOptions options) : options_(std::move(options)) {}

void Ric::add_xapp(XApp& app) {
    if (find_xapp(app.id()) != nullptr) {
        throw std::invalid_argument("duplicate xApp id " + app.id());
    }
    xapps_.push_back(&app);
}

void Ric::connect(E2Agent& agent) { agent_ = &agent; }

void Ric::start(SimTime t) {
    now_ = t;
    for (XApp* app : xapps_) app->start(*this);
}

void Ric::advance_to(SimTime t) {
    if (t < now_) throw std::logic_error("RIC clock moved backwards");
    now_ = t;
}

XApp* Ric::find_xapp(std::string_view id) const {
    const auto it = std::find_if(xapps_.begin(), xapps_.end(), [&](const XApp* a) { return a->id() == id; });
    return it == xapps_.end() ? nullptr : *it;
}

void Ric::log(const RicMessage& m) {
    if (options_.log_messages) message_log_.push_back(to_json(m).dump());
}

Expected<SubId, std::string> Ric::subscribe(std::string_view xapp_id, const SubscriptionSpec& spec) {
    if (agent_ == nullptr) return std::string("no E2 agent connected");
    if (find_xapp(xapp_id) == nullptr) return "unknown xApp " + std::string(xapp_id);
    if (!(spec.period_s > 0.0) || !std::isfinite(spec.period_s)) return std::string("subscription period must be > 0");
    const SimTime period = from_seconds(spec.period_s);
    if (period <= 0) return std::string("subscription period below clock resolution");

    std::vector<std::string> cells = spec.cell_ids.empty() ? agent_->cell_ids() : spec.cell_ids;
    for (const auto& c : cells) {
        if (!agent_->has_cell(c)) return "unknown cell " + c;
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

    for (const auto& s : subscriptions_) {
        if (s.xapp_id == xapp_id && s.report_kind == spec.report_kind && s.period == period && s.cell_ids == cells) {
            return s.sub_id;
        }
    }
    Subscription sub{++last_sub_id_, std::string(xapp_id), std::move(cells), spec.report_kind, period};
    subscriptions_.push_back(sub);
    log(RicMessage{next_id(), now_, MessageKind::Subscription, ServiceModel::Kpm, std::string(xapp_id), "e2",
                   SubscriptionPayload{sub.sub_id, sub}});
    agent_->on_subscription(sub);
    return sub.sub_id;
}

const Subscription* Ric::find_subscription(SubId id) const {
    const auto it = std::find_if(subscriptions_.begin(), subscriptions_.end(),
                                 [id](const Subscription& s) { return s.sub_id == id; });
    return it == subscriptions_.end() ? nullptr : &*it;
}

void Ric::publish_report(SubId sub_id, ReportPayload payload) {
    const Subscription* sub = find_subscription(sub_id);
    if (sub == nullptr) throw std::logic_error("report without an active subscription");
    XApp* app = find_xapp(sub->xapp_id);
    const std::string source = std::visit([](const auto& r) { return r.cell_id; }, payload);
    RicMessage msg{next_id(), now_, MessageKind::Report, ServiceModel::Kpm, source, sub->xapp_id, std::move(payload)};
    log(msg);
    app->on_report(msg, *this);
}

namespace {

std::optional<std::string> malformed(const ControlPayload& c) {
    return std::visit(
        [](const auto& ctrl) -> std::optional<std::string> {
            using C = std::decay_t<decltype(ctrl)>;
            if constexpr (std::is_same_v<C, HandoverControl>) {
                if (ctrl.ue_id.empty()) return "HANDOVER needs ue_id";
            } else if constexpr (std::is_same_v<C, BeamSwitchControl>) {
                if (ctrl.ue_id.empty() || ctrl.cell_id.empty()) return "BEAM_SWITCH needs ue_id and cell_id";
                if (ctrl.beam_id < 0) return "BEAM_SWITCH beam_id must be >= 0";
            } else {
                if (ctrl.cell_id.empty()) return "PRB_SPLIT needs cell_id";
                if (ctrl.shares.empty()) return "PRB_SPLIT needs at least one slice share";
                double total = 0.0;
                for (const auto& [slice, share] : ctrl.shares) {
                    if (!std::isfinite(share) || share < 0.0 || share > 1.0) return "PRB_SPLIT share out of [0,1] for " + slice;
                    total += share;
                }
                if (total > 1.0 + 1e-9) return "PRB_SPLIT shares sum above 1";
            }
            return std::nullopt;
        },
        c);
}

std::optional<std::string> ue_of(const ControlPayload& c) {
    if (const auto* h = std::get_if<HandoverControl>(&c)) return h->ue_id;
    if (const auto* b = std::get_if<BeamSwitchControl>(&c)) return b->ue_id;
    return std::nullopt;
}

}  // namespace

SubmitResult Ric::submit_control(std::string_view xapp_id, ControlPayload ctrl) {
    if (find_xapp(xapp_id) == nullptr) return {false, std::nullopt, "unknown xApp " + std::string(xapp_id)};
    const MsgId id = next_id();
    RicMessage msg{id, now_, MessageKind::Control, ServiceModel::Rc, std::string(xapp_id), "e2", ctrl};
    log(msg);
    std::optional<std::string> problem = malformed(ctrl);
    if (!problem) {
        if (const auto ue = ue_of(ctrl); ue && (agent_ == nullptr || !agent_->has_ue(*ue))) {
            problem = "unknown UE " + *ue;
        }
    }
    if (problem) {
        control_log_.push_back({now_, id, std::string(xapp_id), describe(ctrl), ControlLogEntry::Status::Rejected, *problem});
        return {false, id, *problem};
    }
    queued_controls_.push_back({id, std::string(xapp_id), std::move(ctrl)});
    return {true, id, {}};
}

SubmitResult Ric::submit_policy(std::string_view xapp_id, E2PolicyPayload policy) {
    if (find_xapp(xapp_id) == nullptr) return {false, std::nullopt, "unknown xApp " + std::string(xapp_id)};
    const MsgId id = next_id();
    log(RicMessage{id, now_, MessageKind::Policy, ServiceModel::Rc, std::string(xapp_id), policy.cell_id, policy});
    if (policy.ta_indices.empty() || !(policy.ttl_s > 0.0)) {
        return {false, id, "TA blacklist needs indices and a positive ttl"};
    }
    if (agent_ == nullptr || !agent_->has_cell(policy.cell_id)) {
        return {false, id, "unknown cell " + policy.cell_id};
    }
    queued_policies_.push_back({id, std::string(xapp_id), std::move(policy)});
    return {true, id, {}};
}

SubmitResult Ric::submit_insert(std::string_view xapp_id, InsertPayload insert) {
    const MsgId id = next_id();
    log(RicMessage{id, now_, MessageKind::Insert, ServiceModel::Rc, std::string(xapp_id), "e2", std::move(insert)});
    return {false, id, "E2 INSERT service is not supported"};
}

SubmitResult Ric::ingest_a1(const nlohmann::json& doc) {
    auto parsed = policy::from_json(doc);
    if (!parsed) {
        return {false, std::nullopt, parsed.error().path + ": " + parsed.error().message};
    }
    return ingest_a1(parsed.value());
}

SubmitResult Ric::ingest_a1(const policy::A1Policy& p) {
    // Round-trip through the validator so hand-built values get the same checks.
    if (auto reparsed = policy::from_json(policy::to_json(p)); !reparsed) {
        return {false, std::nullopt, reparsed.error().path + ": " + reparsed.error().message};
    }
    for (auto it = active_a1_.begin(); it != active_a1_.end();) {
        it = it->second.policy_id == p.policy_id ? active_a1_.erase(it) : std::next(it);
    }
    active_a1_.insert_or_assign({p.type(), p.scope}, p);
    const MsgId id = next_id();
    for (XApp* app : xapps_) {
        if (!app->accepts(p.type())) continue;
        RicMessage msg{id, now_, MessageKind::A1Policy, std::nullopt, "non-rt-ric", app->id(), p};
        log(msg);
        app->on_a1_policy(p, *this);
    }
    return {true, id, {}};
}

std::vector<policy::A1Policy> Ric::active_policies() const {
    std::vector<policy::A1Policy> out;
    out.reserve(active_a1_.size());
    for (const auto& [_, p] : active_a1_) out.push_back(p);
    return out;
}

void Ric::subscribe_ei(std::string_view xapp_id, std::string_view ei_kind) {
    auto& subs = ei_subscribers_[std::string(ei_kind)];
    if (std::find(subs.begin(), subs.end(), xapp_id) == subs.end()) subs.emplace_back(xapp_id);
}

bool Ric::has_ei_subscribers(std::string_view ei_kind) const {
    const auto it = ei_subscribers_.find(ei_kind);
    return it != ei_subscribers_.end() && !it->second.empty();
}

void Ric::deliver_ei(const RicMessage& msg) {
    const auto& doc = std::get<EiPayload>(msg.payload);
    const auto it = ei_subscribers_.find(doc->ei_kind());
    if (it == ei_subscribers_.end()) return;
    for (const auto& xapp_id : it->second) {
        if (XApp* app = find_xapp(xapp_id)) {
            RicMessage copy = msg;
            copy.target = xapp_id;
            log(copy);
            app->on_enrichment(copy, *this);
        }
    }
}

void Ric::publish_ei(std::string_view source, EiPayload doc) {
    if (!doc) throw std::invalid_argument("null enrichment document");
    RicMessage msg{next_id(), now_, MessageKind::A1Ei, std::nullopt, std::string(source), "*", std::move(doc)};
    if (options_.ei_delay <= 0) {
        deliver_ei(msg);
    } else {
        pending_ei_.push_back({now_ + options_.ei_delay, std::move(msg)});
    }
}

void Ric::end_tick(SimTime t) {
    advance_to(t);
    if (!pending_ei_.empty()) {
        std::vector<PendingEi> due;
        auto split = std::stable_partition(pending_ei_.begin(), pending_ei_.end(),
                                           [t](const PendingEi& p) { return p.deliver_at > t; });
        due.assign(std::make_move_iterator(split), std::make_move_iterator(pending_ei_.end()));
        pending_ei_.erase(split, pending_ei_.end());
        for (const auto& p : due) deliver_ei(p.msg);
    }

    for (XApp* app : xapps_) app->on_tick_end(t, *this);

    if (!queued_controls_.empty()) {
        Arbitration result = arbitrate(std::move(queued_controls_), options_.priority, t);
        queued_controls_.clear();
        for (const auto& s : result.lost) {
            const ControlTarget target = target_of(s.control);
            control_log_.push_back({t, s.msg_id, s.xapp_id, describe(s.control), ControlLogEntry::Status::LostArbitration,
                                    "lost arbitration on " + target.entity + "/" + target.parameter});
        }
        conflicts_.insert(conflicts_.end(), result.conflicts.begin(), result.conflicts.end());
        for (const auto& s : result.applied) {
            auto refusal = agent_->apply_control(s.control, s.xapp_id, t);
            control_log_.push_back({t, s.msg_id, s.xapp_id, describe(s.control),
                                    refusal ? ControlLogEntry::Status::Rejected : ControlLogEntry::Status::Applied,
                                    refusal.value_or("")});
        }
    }

    if (!queued_policies_.empty()) {
        auto policies = std::move(queued_policies_);
        queued_policies_.clear();
        for (const auto& p : policies) agent_->apply_policy(p.policy, t);
    }
}

}  // namespace oran::ric
