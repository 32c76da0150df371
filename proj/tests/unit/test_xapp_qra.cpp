#include <doctest.h>

#include <sstream>

#include "oran/xapp/qra.hpp"

using namespace oran;
using namespace oran::xapp;
using policy::AllocationSchema;

namespace {

std::vector<SliceView> four_slices() {
    std::vector<SliceView> s;
    for (int q = 1; q <= 4; ++q) s.push_back({slice_id("c1", q), q, {"u" + std::to_string(q)}});
    return s;
}

const AllocationSchema kEqual{AllocationSchema::Kind::Equal, 0};
const AllocationSchema kReserve{AllocationSchema::Kind::Reserve, 0};
AllocationSchema prefer(int q) { return {AllocationSchema::Kind::PreferX, q}; }

}  // namespace

TEST_CASE("rational arithmetic") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(1, -3) == Rational(-1, 3));
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(5, 8) / Rational(2) == Rational(5, 16));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(5, 16).to_string() == "5/16");
    CHECK(Rational(4, 2).to_string() == "2");
    CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("allocate: the three schemas") {
    const auto slices = four_slices();
    const auto eq = allocate(slices, kEqual).value();
    for (const auto& [_, s] : eq) CHECK(s == Rational(1, 4));

    const auto pref = allocate(slices, prefer(3)).value();
    CHECK(pref.at(slice_id("c1", 3)) == Rational(5, 8));
    CHECK(pref.at(slice_id("c1", 1)) == Rational(1, 8));

    const auto res = allocate(slices, kReserve).value();
    for (int q = 1; q <= 4; ++q) CHECK(res.at(slice_id("c1", q)) == Rational(q, 10));

    for (const auto* m : {&eq, &pref, &res}) {
        Rational total;
        for (const auto& [_, s] : *m) total += s;
        CHECK(total == Rational(1));
    }
}

TEST_CASE("allocate: edge cases") {
    const std::vector<SliceView> one{{slice_id("c1", 7), 7, {"u"}}};
    for (const auto& schema : {kEqual, kReserve, prefer(7)}) {
        CHECK(allocate(one, schema).value().at(slice_id("c1", 7)) == Rational(1));
    }
    CHECK_FALSE(allocate(four_slices(), prefer(9)).has_value());
    CHECK_FALSE(allocate({}, kEqual).has_value());
}

TEST_CASE("per-UE shares") {
    CHECK(per_ue_share(Rational(1, 4), 2) == Rational(1, 8));
    CHECK(per_ue_share(Rational(5, 8), 1) == Rational(5, 8));
    CHECK(per_ue_share(Rational(2, 5), 1) == Rational(2, 5));
    CHECK_THROWS(per_ue_share(Rational(1, 2), 0));
}

TEST_CASE("sla_adjust") {
    const std::map<std::string, double> shares{{"a", 0.5}, {"b", 0.5}};
    SUBCASE("no limits is the identity") {
        const auto r = sla_adjust(shares, {{"a", {}}}, 100e6);
        CHECK(r.feasible);
        CHECK(r.shares.at("a") == doctest::Approx(0.5));
        CHECK(r.shares.at("b") == doctest::Approx(0.5));
    }
    SUBCASE("cap at half the equal share moves the rest over") {
        policy::SlaTargetBody cap;
        cap.max_throughput_bps = 25e6;
        const auto r = sla_adjust(shares, {{"a", cap}}, 100e6);
        CHECK(r.feasible);
        CHECK(r.shares.at("a") == doctest::Approx(0.25));
        CHECK(r.shares.at("b") == doctest::Approx(0.75));
    }
    SUBCASE("per-UE cap scales with the UE count") {
        policy::SlaTargetBody cap;
        cap.max_ue_throughput_bps = 10e6;
        const auto r = sla_adjust(shares, {{"a", cap}}, 100e6, {{"a", 2}, {"b", 1}});
        CHECK(r.shares.at("a") == doctest::Approx(0.2));
        CHECK(r.shares.at("b") == doctest::Approx(0.8));
    }
    SUBCASE("infeasible guarantees scale down") {
        policy::SlaTargetBody g;
        g.guaranteed_throughput_bps = 80e6;
        const auto r = sla_adjust(shares, {{"a", g}, {"b", g}}, 100e6);
        CHECK_FALSE(r.feasible);
        CHECK(r.shares.at("a") == doctest::Approx(0.5));
        CHECK(r.shares.at("a") + r.shares.at("b") <= doctest::Approx(1.0));
    }
    SUBCASE("every slice capped leaves capacity idle") {
        policy::SlaTargetBody cap;
        cap.max_throughput_bps = 10e6;
        const auto r = sla_adjust(shares, {{"a", cap}, {"b", cap}}, 100e6);
        CHECK(r.shares.at("a") == doctest::Approx(0.1));
        CHECK(r.idle_share == doctest::Approx(0.8));
    }
}

TEST_CASE("share csv header") {
    std::ostringstream os;
    write_qra_ue_share_csv(os, {});
    CHECK(os.str().rfind("time_s,cell_id,slice_id,ue_id,", 0) == 0);
}
