#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oran/wireless/radio.hpp"
#include "oran/xapp/ts.hpp"

using namespace oran;
using namespace oran::xapp;
using policy::CellLabel;
using policy::TsPreferenceBody;

TEST_CASE("decide: argmax, labels, forbid") {
    const std::map<std::string, double> r{{"c1", -80.0}, {"c2", -70.0}};
    CHECK(decide(r, std::nullopt, nullptr, 15.0, 0.0) == "c2");

    TsPreferenceBody prefer{{{"c1", CellLabel::Prefer}}};
    CHECK(decide(r, std::nullopt, &prefer, 15.0, 0.0) == "c1");
    CHECK(decide(r, std::nullopt, &prefer, 5.0, 0.0) == "c2");

    TsPreferenceBody avoid{{{"c2", CellLabel::Avoid}}};
    CHECK(decide(r, std::nullopt, &avoid, 15.0, 0.0) == "c1");

    TsPreferenceBody forbid{{{"c1", CellLabel::Forbid}}};
    CHECK(decide({{"c1", -60.0}, {"c2", -100.0}}, std::nullopt, &forbid, 9.0, 0.0) == "c2");

    TsPreferenceBody all{{{"c1", CellLabel::Forbid}, {"c2", CellLabel::Forbid}}};
    CHECK_FALSE(decide(r, std::nullopt, &all, 9.0, 0.0).has_value());
}

TEST_CASE("decide: hysteresis and ties") {
    const std::map<std::string, double> r{{"c1", -80.0}, {"c2", -78.0}};
    CHECK(decide(r, std::string("c1"), nullptr, 0.0, 3.0) == "c1");
    CHECK(decide(r, std::string("c1"), nullptr, 0.0, 1.0) == "c2");
    CHECK(decide({{"c1", -80.0}, {"c2", -80.0}}, std::nullopt, nullptr, 0.0, 0.0) == "c1");
    CHECK(decide({{"c1", -80.0}, {"c2", -80.0}}, std::string("c2"), nullptr, 0.0, 0.0) == "c2");
    // a forbidden serving cell is left even inside the hysteresis band
    TsPreferenceBody forbid{{{"c1", CellLabel::Forbid}}};
    CHECK(decide({{"c1", -60.0}, {"c2", -61.0}}, std::string("c1"), &forbid, 9.0, 5.0) == "c2");
}

TEST_CASE("calibration offset: closed form") {
    CHECK(calibration_offset(2.0) == doctest::Approx(9.5424).epsilon(1e-4));
    CHECK(calibration_offset(1.0) == doctest::Approx(4.7712).epsilon(1e-4));
}

TEST_CASE("calibration offset moves the crossover to three quarters") {
    // Brute-force oracle: scan positions between two cells for the point
    // where the preferred cell's boosted RSRP meets the other cell's.
    for (double n : {2.0, 3.0, 3.5}) {
        const wireless::PropagationParams p{40.0, n, 30.0, 0.0};
        const double offset = calibration_offset(n);
        const double span = 200.0;
        double crossover = -1.0;
        for (int i = 1; i < 200000; ++i) {
            const double x = span * i / 200000.0;
            const double s1 = wireless::rsrp_dbm({x, 0}, {0, 0}, nullptr, p, 0.0) + offset;
            const double s2 = wireless::rsrp_dbm({x, 0}, {span, 0}, nullptr, p, 0.0);
            if (s1 < s2) {
                crossover = x;
                break;
            }
        }
        CHECK(crossover / span == doctest::Approx(0.75).epsilon(1e-3));
    }
}

TEST_CASE("association sums serving time per cell") {
    ransim::SimulationTrace t;
    t.tick_s = 0.02;
    t.cell_ids = {"c1", "c2"};
    t.ue_ids = {"u"};
    t.ue_kinds = {ransim::UeKind::Mobile};
    for (int i = 0; i < 4; ++i) t.serving.push_back({(i + 1) * 20000, 0, i < 3 ? 0 : -1, -1});
    const auto rows = association(t);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].cell_id == "c1");
    CHECK(rows[0].seconds == doctest::Approx(0.06));
    CHECK(rows[0].fraction == doctest::Approx(0.75));
    CHECK(rows[1].fraction == 0.0);
    CHECK(rows[2].cell_id.empty());
    CHECK(rows[2].fraction == doctest::Approx(0.25));

    std::ostringstream os;
    write_ts_association_csv(os, rows);
    CHECK(os.str().rfind("cell_id,seconds_served,fraction\n", 0) == 0);
}
