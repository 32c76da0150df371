#include <doctest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oran/ransim/simulator.hpp"
#include "oran/ransim/traffic.hpp"
#include "oran/ric/ric.hpp"

using namespace oran;
using namespace oran::ransim;

namespace {

CellConfig cell(std::string id, double x, int beams = 0) {
    CellConfig c;
    c.id = std::move(id);
    c.pos = {x, 0.0};
    if (beams > 0) c.beams = wireless::make_grid_of_beams(beams, 0.0, 120.0, 15.0, 0.0, 30.0);
    return c;
}

UeConfig ue(std::string id, double x, double speed = 0.0, UeKind kind = UeKind::Mobile) {
    UeConfig u;
    u.id = std::move(id);
    u.pos = {x, 0.0};
    u.velocity = {speed, 0.0};
    u.kind = kind;
    return u;
}

SimConfig two_cells(double duration) {
    SimConfig cfg;
    cfg.duration_s = duration;
    cfg.bounds = {0.0, -10.0, 200.0, 10.0, BoundaryMode::Bounce};
    cfg.cells = {cell("c1", 0.0, 8), cell("c2", 200.0)};
    cfg.ues = {ue("ue1", 50.0, 10.0), ue("ue2", 150.0)};
    return cfg;
}

/// Runs a callback at chosen ticks and records reports.
struct Script final : ric::XApp {
    std::string name = "ts";
    std::vector<ric::SubscriptionSpec> specs;
    std::function<void(SimTime, ric::Ric&)> tick;
    std::vector<ric::ReportPayload> reports;
    const std::string& id() const override { return name; }
    void start(ric::Ric& r) override {
        for (const auto& s : specs) REQUIRE(r.subscribe(name, s).has_value());
    }
    void on_report(const ric::RicMessage& m, ric::Ric&) override {
        reports.push_back(std::get<ric::ReportPayload>(m.payload));
    }
    void on_tick_end(SimTime t, ric::Ric& r) override {
        if (tick) tick(t, r);
    }
};

}  // namespace

TEST_CASE("legit traffic: exponential gaps") {
    Rng rng(3);
    CHECK(legit_traffic(5.0, 0.0, rng).empty());
    const auto t = legit_traffic(5.0, 720.0 * 10000, rng);
    REQUIRE(t.size() > 9000);
    double gaps = t.front();
    for (std::size_t i = 1; i < t.size(); ++i) {
        CHECK(t[i] > t[i - 1]);
        gaps += t[i] - t[i - 1];
    }
    CHECK(std::abs(gaps / static_cast<double>(t.size()) - 720.0) < 0.03 * 720.0);
    CHECK_THROWS(legit_traffic(0.0, 10.0, rng));
}

TEST_CASE("adversary traffic: bursts") {
    Rng rng(4);
    const auto s = adversary_traffic(3.0, 100, 5.0, 10 * 86400.0, rng);
    CHECK(std::abs(static_cast<double>(s.requests.size()) - 3000.0) < 750.0);
    CHECK(std::is_sorted(s.requests.begin(), s.requests.end()));
    for (double r : s.requests) {
        CHECK(r >= 0.0);
        CHECK(r < 10 * 86400.0);
    }
    const auto one = adversary_traffic(3.0, 1, 5.0, 10 * 86400.0, rng);
    CHECK(one.requests == one.burst_starts);
}

TEST_CASE("largest remainder rounding") {
    CHECK(largest_remainder({{"a", 0.25}, {"b", 0.75}}, 100) == std::map<std::string, int>{{"a", 25}, {"b", 75}});
    const auto thirds = largest_remainder({{"a", 1.0 / 3}, {"b", 1.0 / 3}, {"c", 1.0 / 3}}, 100);
    CHECK(thirds == std::map<std::string, int>{{"a", 34}, {"b", 33}, {"c", 33}});
    const auto partial = largest_remainder({{"a", 0.305}, {"b", 0.2}}, 10);
    CHECK(partial.at("a") + partial.at("b") == 5);
}

TEST_CASE("advance reflects and wraps") {
    Bounds b{0, 0, 10, 10, BoundaryMode::Bounce};
    wireless::Position p{9, 5};
    Velocity v{2, 0};
    advance(p, v, 1.0, b);
    CHECK(p.x == doctest::Approx(9.0));
    CHECK(std::cos(v.bearing_deg * M_PI / 180.0) == doctest::Approx(-1.0));
    b.mode = BoundaryMode::Wrap;
    p = {9, 5};
    v = {2, 0};
    advance(p, v, 1.0, b);
    CHECK(p.x == doctest::Approx(1.0));
    CHECK(v.bearing_deg == doctest::Approx(0.0));
}

TEST_CASE("config validation lists field diagnostics") {
    SimConfig cfg = two_cells(1.0);
    CHECK(validate(cfg).empty());
    cfg.duration_s = -1.0;
    cfg.ues.push_back(ue("ue1", 10.0));
    const auto errs = validate(cfg);
    CHECK(errs.size() >= 2);
    CHECK_THROWS_AS(Simulator{cfg}, ConfigError);
}

TEST_CASE("zero duration gives an empty trace") {
    Simulator sim(two_cells(0.0));
    ric::Ric ric;
    const auto trace = sim.run(ric);
    CHECK(trace.handovers.empty());
    CHECK(trace.attempts.empty());
}

TEST_CASE("connection requests obey the TA blacklist and its expiry") {
    SimConfig cfg = two_cells(1.0);
    cfg.ues.push_back(ue("iot", 100.0, 0.0, UeKind::IotLegit));
    Simulator sim(cfg);
    sim.attach_all();
    const std::size_t iot = *sim.ue_index("iot");
    const auto first = sim.handle_connection_request(0, iot, 0);
    CHECK(first.outcome == AttemptOutcome::Accepted);
    CHECK(first.ta == wireless::ta_index(100.0, cfg.cells[0].ta));

    sim.apply_policy({"c1", {first.ta}, 2.0}, 0);
    CHECK(sim.handle_connection_request(0, iot, from_seconds(1.0)).outcome == AttemptOutcome::RejectedBlacklist);
    CHECK(sim.handle_connection_request(0, iot, from_seconds(2.0)).outcome == AttemptOutcome::Accepted);
    CHECK(sim.apply_policy({"c9", {1}, 2.0}, 0).has_value());
}

TEST_CASE("controls change state or are refused") {
    Simulator sim(two_cells(1.0));
    sim.attach_all();
    const std::size_t u1 = *sim.ue_index("ue1");
    CHECK(sim.ues()[u1].serving_cell == 0);

    CHECK(sim.apply_control(ric::BeamSwitchControl{"ue1", "c1", 9, "x"}, "bmm", 0).has_value());
    CHECK_FALSE(sim.apply_control(ric::BeamSwitchControl{"ue1", "c1", 5, "x"}, "bmm", 0).has_value());
    CHECK(sim.ues()[u1].serving_beam == 5);

    CHECK_FALSE(sim.apply_control(ric::HandoverControl{"ue1", "c2"}, "ts", 0).has_value());
    CHECK(sim.ues()[u1].serving_cell == 1);
    CHECK(sim.apply_control(ric::HandoverControl{"ue1", "c7"}, "ts", 0).has_value());
    CHECK(sim.ues()[u1].serving_cell == 1);
    CHECK(sim.apply_control(ric::BeamSwitchControl{"ue1", "c1", 2, "x"}, "bmm", 0).has_value());

    CHECK_FALSE(sim.apply_control(ric::HandoverControl{"ue1", ""}, "ts", 0).has_value());
    CHECK(sim.ues()[u1].serving_cell == -1);
    CHECK(sim.trace().handovers.size() == 2);
    CHECK(sim.trace().handovers.back().to_cell.empty());

    CHECK_FALSE(sim.apply_control(ric::PrbSplitControl{"c1", {{"a", 0.25}, {"b", 0.75}}}, "qra", 0).has_value());
    CHECK(sim.cells()[0].prb_split == std::map<std::string, int>{{"a", 25}, {"b", 75}});
}

TEST_CASE("handover issued in a tick shows in the next serving record") {
    SimConfig cfg = two_cells(0.1);
    Simulator sim(cfg);
    ric::Ric ric;
    Script s;
    s.tick = [](SimTime t, ric::Ric& r) {
        if (t == 20000) r.submit_control("ts", ric::HandoverControl{"ue1", "c2"});
    };
    ric.add_xapp(s);
    const auto trace = sim.run(ric);
    const auto ue1_cell = [&](SimTime t) {
        for (const auto& rec : trace.serving)
            if (rec.time == t && rec.ue == 0) return rec.cell;
        return -2;
    };
    CHECK(ue1_cell(20000) == 1);  // recorded after the tick's controls
    CHECK(ue1_cell(40000) == 1);
    REQUIRE(trace.handovers.size() == 1);
    CHECK(trace.handovers[0].time == 20000);
    CHECK(trace.ticks == 5);
}

TEST_CASE("reports: rsrp every tick, conn stats windowed counts") {
    SimConfig cfg = two_cells(1.0);
    cfg.ues.push_back(ue("iot", 100.0, 0.0, UeKind::IotLegit));
    Simulator sim(cfg);
    ric::Ric ric;
    Script s;
    s.name = "ssd";
    s.specs = {{{"c2"}, ric::ReportKind::RsrpMeas, 0.02}, {{"c1"}, ric::ReportKind::ConnStats, 0.5}};
    ric.add_xapp(s);
    const auto trace = sim.run(ric, [&](ric::Ric&) {
        const std::size_t iot = *sim.ue_index("iot");
        sim.handle_connection_request(0, iot, 0);
        sim.handle_connection_request(0, iot, 0);
    });
    int rsrp = 0, conn = 0;
    for (const auto& r : s.reports) {
        if (const auto* m = std::get_if<ric::RsrpReport>(&r)) {
            ++rsrp;
            CHECK(m->measurements.size() == 2);  // mobile UEs only
        } else if (const auto* c = std::get_if<ric::ConnStatsReport>(&r)) {
            if (conn++ == 0) {
                CHECK(c->request_count == 2);
                CHECK(c->ta_histogram.size() == 1);
                CHECK(c->window_start == 0);
                CHECK(c->window_end == 500000);
            } else {
                CHECK(c->request_count == 0);
            }
        }
    }
    CHECK(rsrp == 50);
    CHECK(conn == 2);
    CHECK(trace.attempts.size() == 2);
}

TEST_CASE("same seed, same trace") {
    SimConfig cfg = two_cells(5.0);
    cfg.cells[0].prop.shadowing_sigma_db = 4.0;
    cfg.localization = wireless::LocalizationTechnique::Gps;
    for (int i = 0; i < 5; ++i) {
        UeConfig u = ue("iot" + std::to_string(i), 20.0 + 30.0 * i, 0.0, UeKind::IotLegit);
        u.traffic = PoissonTraffic{3600.0};
        cfg.ues.push_back(u);
    }
    const auto once = [&](std::uint64_t seed) {
        SimConfig c = cfg;
        c.seed = seed;
        Simulator sim(c);
        ric::Ric ric;
        return sim.run(ric).checksum();
    };
    CHECK(once(1) == once(1));
    CHECK(once(1) != once(2));
}

TEST_CASE("trace csv headers") {
    SimulationTrace t;
    std::ostringstream a, h, b, f, p, s;
    write_attempts_csv(a, t);
    write_handovers_csv(h, t);
    write_beam_events_csv(b, t);
    write_beam_failures_csv(f, t);
    write_prb_alloc_csv(p, t);
    write_serving_csv(s, t);
    CHECK(a.str() == "time_s,ue_id,ue_kind,cell_id,ta,outcome\n");
    CHECK(h.str() == "time_s,ue_id,from_cell,to_cell,xapp_id\n");
    CHECK(b.str() == "time_s,ue_id,cell_id,old_beam,new_beam,reason,xapp_id\n");
    CHECK(f.str() == "time_s,ue_id,cell_id,beam_id\n");
    CHECK(p.str() == "time_s,cell_id,slice_id,share,prbs\n");
    CHECK(s.str() == "time_s,ue_id,cell_id,beam_id\n");
    CHECK(format_time(1500000) == "1.500000");
    CHECK(format_double(0.1) == "0.1");
}
