#include <doctest.h>

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "oran/ric/ric.hpp"

using namespace oran;
using namespace oran::ric;

namespace {

struct FakeAgent final : E2Agent {
    std::vector<std::string> cells{"c1", "c2"};
    std::vector<std::string> ues{"ue1", "ue2"};
    std::vector<Subscription> subs;
    std::vector<std::string> applied;  // "<xapp>:<description>"
    std::vector<E2PolicyPayload> policies;

    std::vector<std::string> cell_ids() const override { return cells; }
    bool has_cell(std::string_view id) const override { return std::find(cells.begin(), cells.end(), id) != cells.end(); }
    bool has_ue(std::string_view id) const override { return std::find(ues.begin(), ues.end(), id) != ues.end(); }
    void on_subscription(const Subscription& s) override { subs.push_back(s); }
    std::optional<std::string> apply_control(const ControlPayload& c, std::string_view xapp, SimTime) override {
        if (const auto* b = std::get_if<BeamSwitchControl>(&c); b && b->beam_id > 7) return "no beam " + std::to_string(b->beam_id);
        applied.push_back(std::string(xapp) + ":" + describe(c));
        return std::nullopt;
    }
    std::optional<std::string> apply_policy(const E2PolicyPayload& p, SimTime) override {
        policies.push_back(p);
        return std::nullopt;
    }
};

struct Recorder final : XApp {
    explicit Recorder(std::string name, bool ts = false) : name(std::move(name)), wants_ts(ts) {}
    std::string name;
    bool wants_ts;
    std::vector<RicMessage> reports;
    std::vector<policy::A1Policy> a1;
    std::vector<std::string> ei;
    const std::string& id() const override { return name; }
    void on_report(const RicMessage& m, Ric&) override { reports.push_back(m); }
    bool accepts(policy::PolicyType t) const override { return wants_ts && t == policy::PolicyType::TsPreferences; }
    void on_a1_policy(const policy::A1Policy& p, Ric&) override { a1.push_back(p); }
    void on_enrichment(const RicMessage& m, Ric&) override { ei.push_back(m.source); }
};

struct Note final : EiDocument {
    std::string_view ei_kind() const override { return "note"; }
    nlohmann::json summary() const override { return {}; }
};

ControlSubmission ho(MsgId id, std::string xapp, std::string ue, std::string cell) {
    return {id, std::move(xapp), HandoverControl{std::move(ue), std::move(cell)}};
}

nlohmann::json ts_doc(const std::string& id, const std::string& label) {
    return {{"policy_id", id}, {"policy_type", "TS_PREFERENCES"}, {"scope", {{"ue_id", "ue1"}}},
            {"body", {{"cells", {{"c1", label}}}}}};
}

}  // namespace

TEST_CASE("arbitrate: disjoint targets all apply") {
    const std::vector<std::string> prio;
    auto r = arbitrate({ho(1, "ts", "ue1", "c2"), ho(2, "ts", "ue2", "c1"),
                        {3, "qra", PrbSplitControl{"c1", {{"a", 1.0}}}}},
                       prio, 0);
    CHECK(r.applied.size() == 3);
    CHECK(r.conflicts.empty());
    CHECK(r.lost.empty());
}

TEST_CASE("arbitrate: priority list decides; handover and beam switch share a target") {
    const std::vector<std::string> prio{"bmm", "ts"};
    auto r = arbitrate({ho(1, "ts", "ue1", "c2"), {2, "bmm", BeamSwitchControl{"ue1", "c1", 3, "x"}}}, prio, 40);
    REQUIRE(r.conflicts.size() == 1);
    CHECK(r.conflicts[0].winner == "bmm");
    CHECK(r.conflicts[0].losers == std::vector<std::string>{"ts"});
    CHECK(r.conflicts[0].target.entity == "ue1");
    CHECK(r.conflicts[0].time == 40);
    CHECK(r.conflicts[0].msg_ids == std::vector<MsgId>{1, 2});
    REQUIRE(r.applied.size() == 1);
    CHECK(r.applied[0].xapp_id == "bmm");
}

TEST_CASE("arbitrate: unlisted xApps rank after listed ones, by id") {
    const std::vector<std::string> prio{"ts"};
    auto r = arbitrate({ho(5, "zeta", "ue1", "c1"), ho(6, "alpha", "ue1", "c2"), ho(7, "ts", "ue1", "c1")}, prio, 0);
    REQUIRE(r.conflicts.size() == 1);
    CHECK(r.conflicts[0].winner == "ts");
    CHECK(r.conflicts[0].losers == std::vector<std::string>{"alpha", "zeta"});

    auto s = arbitrate({ho(5, "zeta", "ue1", "c1"), ho(6, "alpha", "ue1", "c2")}, {}, 0);
    CHECK(s.conflicts[0].winner == "alpha");
}

TEST_CASE("arbitrate: same xApp twice keeps the earliest message") {
    auto r = arbitrate({ho(9, "ts", "ue1", "c1"), ho(4, "ts", "ue1", "c2")}, {}, 0);
    REQUIRE(r.applied.size() == 1);
    CHECK(r.applied[0].msg_id == 4);
    CHECK(r.conflicts.size() == 1);
}

TEST_CASE("ric: subscriptions are validated and idempotent") {
    FakeAgent agent;
    Ric ric;
    Recorder app("a");
    ric.add_xapp(app);
    ric.connect(agent);
    const auto s1 = ric.subscribe("a", {{}, ReportKind::RsrpMeas, 0.02});
    const auto s2 = ric.subscribe("a", {{"c2", "c1"}, ReportKind::RsrpMeas, 0.02});
    REQUIRE(s1.has_value());
    REQUIRE(s2.has_value());
    CHECK(s1.value() == s2.value());
    CHECK(agent.subs.size() == 1);
    CHECK(agent.subs[0].period == 20000);
    CHECK_FALSE(ric.subscribe("a", {{"c9"}, ReportKind::RsrpMeas, 0.02}).has_value());
    CHECK_FALSE(ric.subscribe("nobody", {{}, ReportKind::RsrpMeas, 0.02}).has_value());
    CHECK_FALSE(ric.subscribe("a", {{}, ReportKind::RsrpMeas, 0.0}).has_value());
    CHECK(ric.subscribe("a", {{}, ReportKind::ConnStats, 300.0}).value() != s1.value());

    ric.publish_report(s1.value(), RsrpReport{"c1", {}});
    REQUIRE(app.reports.size() == 1);
    CHECK(std::get<RsrpReport>(std::get<ReportPayload>(app.reports[0].payload)).measurements.empty());
    CHECK_THROWS(ric.add_xapp(app));
}

TEST_CASE("ric: controls are validated, arbitrated and logged") {
    FakeAgent agent;
    Ric ric(RicOptions{{"ts", "bmm"}, true, 0});
    Recorder ts("ts"), bmm("bmm");
    ric.add_xapp(ts);
    ric.add_xapp(bmm);
    ric.connect(agent);
    ric.start(0);

    CHECK_FALSE(ric.submit_control("ts", HandoverControl{"ue9", "c1"}).accepted);
    CHECK_FALSE(ric.submit_control("ghost", HandoverControl{"ue1", "c1"}).accepted);
    CHECK_FALSE(ric.submit_control("qra", PrbSplitControl{"c1", {{"a", 0.7}, {"b", 0.7}}}).accepted);
    CHECK(ric.submit_control("ts", HandoverControl{"ue1", "c2"}).accepted);
    CHECK(ric.submit_control("bmm", HandoverControl{"ue1", "c1"}).accepted);
    CHECK(ric.submit_control("bmm", BeamSwitchControl{"ue2", "c1", 9, "x"}).accepted);
    ric.end_tick(20000);

    REQUIRE(ric.conflicts().size() == 1);
    CHECK(ric.conflicts()[0].winner == "ts");
    CHECK(agent.applied.size() == 1);
    CHECK(agent.applied[0].rfind("ts:", 0) == 0);

    int applied = 0, lost = 0, rejected = 0;
    for (const auto& e : ric.control_log()) {
        applied += e.status == ControlLogEntry::Status::Applied;
        lost += e.status == ControlLogEntry::Status::LostArbitration;
        rejected += e.status == ControlLogEntry::Status::Rejected;
    }
    CHECK(applied == 1);
    CHECK(lost == 1);
    CHECK(rejected == 2);  // unknown UE, and the node refusing beam 9
    CHECK_FALSE(ric.message_log().empty());
    for (const auto& line : ric.message_log()) CHECK(nlohmann::json::accept(line));
}

TEST_CASE("ric: A1 ingestion replaces by id and reaches the accepting xApp only") {
    FakeAgent agent;
    Ric ric;
    Recorder ts("ts", true), other("other");
    ric.add_xapp(ts);
    ric.add_xapp(other);
    ric.connect(agent);

    CHECK(ric.ingest_a1(ts_doc("p1", "PREFER")).accepted);
    CHECK(ric.ingest_a1(ts_doc("p1", "AVOID")).accepted);
    CHECK(ts.a1.size() == 2);
    CHECK(other.a1.empty());
    const auto active = ric.active_policies();
    REQUIRE(active.size() == 1);
    CHECK(std::get<policy::TsPreferenceBody>(active[0].body).cells.at("c1") == policy::CellLabel::Avoid);

    const auto bad = ric.ingest_a1(ts_doc("p2", "MAYBE"));
    CHECK_FALSE(bad.accepted);
    CHECK(bad.diagnostic.find("$.body.cells.c1") != std::string::npos);
    CHECK(ric.active_policies().size() == 1);
}

TEST_CASE("ric: enrichment honours the delivery delay") {
    FakeAgent agent;
    Ric ric(RicOptions{{}, false, 1000});
    Recorder a("a");
    ric.add_xapp(a);
    ric.connect(agent);
    ric.subscribe_ei("a", "note");
    CHECK(ric.has_ei_subscribers("note"));
    CHECK_FALSE(ric.has_ei_subscribers("rem"));
    ric.publish_ei("server", std::make_shared<Note>());
    CHECK(a.ei.empty());
    ric.end_tick(999);
    CHECK(a.ei.empty());
    ric.end_tick(1000);
    CHECK(a.ei == std::vector<std::string>{"server"});
}

TEST_CASE("ric: E2 policies reach the node at tick end") {
    FakeAgent agent;
    Ric ric;
    Recorder ssd("ssd");
    ric.add_xapp(ssd);
    ric.connect(agent);
    CHECK_FALSE(ric.submit_policy("ssd", {"c9", {1}, 10.0}).accepted);
    CHECK_FALSE(ric.submit_policy("ssd", {"c1", {}, 10.0}).accepted);
    CHECK(ric.submit_policy("ssd", {"c1", {3, 4}, 10.0}).accepted);
    CHECK(agent.policies.empty());
    ric.end_tick(0);
    REQUIRE(agent.policies.size() == 1);
    CHECK(agent.policies[0].ta_indices == std::set<std::int64_t>{3, 4});
    CHECK_FALSE(ric.submit_insert("ssd", {"x"}).accepted);
}
