#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oran/policy/a1_policy.hpp"
#include "oran/rng.hpp"

using namespace oran;
using namespace oran::policy;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

A1Policy must_parse(const std::string& text) {
    auto r = parse(text);
    REQUIRE_MESSAGE(r.has_value(), (r.has_value() ? "" : r.error().path + ": " + r.error().message));
    return r.value();
}

A1Policy ts(const std::string& id, const std::string& ue, std::map<std::string, CellLabel> cells) {
    return A1Policy{id, Scope{Scope::Kind::Ue, ue}, TsPreferenceBody{std::move(cells)}};
}

const fs::path kCorpus = fs::path(ORAN_SOURCE_DIR) / "tests" / "data" / "policies";

}  // namespace

TEST_CASE("parse: documented examples") {
    const auto p = must_parse(
        R"({"policy_id":"p1","policy_type":"TS_PREFERENCES","scope":{"ue_id":"u1"},"body":{"cells":{"c1":"PREFER"}}})");
    CHECK(p.type() == PolicyType::TsPreferences);
    CHECK(p.scope.kind == Scope::Kind::Ue);
    CHECK(std::get<TsPreferenceBody>(p.body).cells.at("c1") == CellLabel::Prefer);

    auto bad = parse(
        R"({"policy_id":"p1","policy_type":"TS_PREFERENCES","scope":{"ue_id":"u1"},"body":{"cells":{"c1":"MAYBE"}}})");
    REQUIRE_FALSE(bad.has_value());
    CHECK(bad.error().path == "$.body.cells.c1");

    auto order = parse(R"({"policy_id":"s","policy_type":"SLA_TARGET","scope":{"cell_id":"c1"},
        "body":{"guaranteed_throughput_bps":10e6,"max_throughput_bps":5e6}})");
    REQUIRE_FALSE(order.has_value());
    CHECK(order.error().path == "$.body");
}

TEST_CASE("parse: allocation schemas") {
    CHECK(parse_allocation_schema("PREFER_3")->preferred_five_qi == 3);
    CHECK(parse_allocation_schema("EQUAL")->kind == AllocationSchema::Kind::Equal);
    CHECK_FALSE(parse_allocation_schema("PREFER_").has_value());
    CHECK_FALSE(parse_allocation_schema("PREFER_x").has_value());
    CHECK_FALSE(parse_allocation_schema("prefer_3").has_value());
    CHECK(to_string(*parse_allocation_schema("PREFER_12")) == "PREFER_12");
}

TEST_CASE("corpus: valid documents parse and round-trip") {
    int n = 0;
    for (const auto& e : fs::directory_iterator(kCorpus / "valid")) {
        CAPTURE(e.path().filename().string());
        const auto p = must_parse(slurp(e.path()));
        const auto again = must_parse(serialize(p));
        CHECK(again == p);
        CHECK(to_json(again) == to_json(p));
        ++n;
    }
    CHECK(n >= 10);
}

TEST_CASE("corpus: invalid documents fail at the labelled path") {
    const auto expected = nlohmann::json::parse(slurp(kCorpus / "invalid_paths.json"));
    int n = 0;
    for (const auto& e : fs::directory_iterator(kCorpus / "invalid")) {
        const std::string name = e.path().filename().string();
        CAPTURE(name);
        REQUIRE(expected.contains(name));
        const auto r = parse(slurp(e.path()));
        REQUIRE_FALSE(r.has_value());
        CHECK(r.error().path == expected.at(name).get<std::string>());
        CHECK_FALSE(r.error().message.empty());
        ++n;
    }
    CHECK(n == static_cast<int>(expected.size()));
    CHECK(n >= 15);
}

TEST_CASE("from_json prefixes paths with the given root") {
    const auto doc = nlohmann::json::parse(R"({"policy_id":"p","policy_type":"TS_PREFERENCES",
        "scope":{"ue_id":"u"},"body":{"cells":{}}})");
    const auto r = policy::from_json(doc, std::string("$.policies[2]"));
    REQUIRE_FALSE(r.has_value());
    CHECK(r.error().path == "$.policies[2].body.cells");
}

TEST_CASE("cross_check rules") {
    const auto cand = ts("a", "ue1", {{"c1", CellLabel::Prefer}});
    CHECK(cross_check({}, cand).empty());

    SUBCASE("contradictory label") {
        const std::vector<A1Policy> active{ts("b", "ue1", {{"c1", CellLabel::Forbid}})};
        // same type and scope under another id also collides
        const auto c = cross_check(active, cand);
        REQUIRE(c.size() == 2);
        CHECK(c[0].kind == PolicyConflict::Kind::ScopeCollision);
        CHECK(c[1].kind == PolicyConflict::Kind::ContradictoryLabel);
    }
    SUBCASE("no serviceable cell") {
        const std::vector<std::string> cells{"c1", "c2"};
        const auto all = ts("f", "ue1", {{"c1", CellLabel::Forbid}, {"c2", CellLabel::Forbid}});
        const auto c = cross_check({}, all, cells);
        REQUIRE(c.size() == 1);
        CHECK(c[0].kind == PolicyConflict::Kind::NoServiceableCell);
        const auto one = ts("f", "ue1", {{"c1", CellLabel::Forbid}});
        CHECK(cross_check({}, one, cells).empty());
    }
    SUBCASE("replacement by id is not a conflict") {
        const std::vector<A1Policy> active{ts("a", "ue1", {{"c1", CellLabel::Forbid}})};
        CHECK(cross_check(active, cand).empty());
    }
    SUBCASE("order of the active set does not matter") {
        std::vector<A1Policy> active{ts("b", "ue1", {{"c1", CellLabel::Forbid}}),
                                     ts("c", "ue1", {{"c1", CellLabel::Avoid}}),
                                     ts("d", "ue2", {{"c1", CellLabel::Forbid}})};
        const auto first = cross_check(active, cand);
        std::reverse(active.begin(), active.end());
        CHECK(cross_check(active, cand) == first);
        std::rotate(active.begin(), active.begin() + 1, active.end());
        CHECK(cross_check(active, cand) == first);
    }
}

TEST_CASE("parser is total on random bytes") {
    Rng rng(99);
    const std::string seed_doc =
        R"({"policy_id":"p1","policy_type":"TA_BLACKLIST","scope":{"cell_id":"c1"},"body":{"cell_id":"c1","ta_indices":[1,2],"ttl_s":5}})";
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        if (i % 2 == 0) {
            s.resize(rng.below(64));
            for (auto& ch : s) ch = static_cast<char>(rng.below(256));
        } else {
            s = seed_doc;
            for (int k = 0; k < 3; ++k) s[rng.below(s.size())] = static_cast<char>(rng.below(256));
        }
        ParseResult r = parse(s);
        if (!r.has_value()) CHECK_FALSE(r.error().path.empty());
    }
}
