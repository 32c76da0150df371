#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "oran/expected.hpp"

namespace oran::policy {

enum class PolicyType { TsPreferences, SlaTarget, TaBlacklist };

std::string_view to_string(PolicyType t);
std::optional<PolicyType> parse_policy_type(std::string_view s);

enum class CellLabel { Prefer, Avoid, Forbid };

std::string_view to_string(CellLabel l);
std::optional<CellLabel> parse_cell_label(std::string_view s);

struct Scope {
    enum class Kind { Ue, Slice, Cell };
    Kind kind = Kind::Ue;
    std::string id;

    friend auto operator<=>(const Scope&, const Scope&) = default;
};

std::string_view scope_key(Scope::Kind k);

struct TsPreferenceBody {
    std::map<std::string, CellLabel> cells;

    friend bool operator==(const TsPreferenceBody&, const TsPreferenceBody&) = default;
};

/// Slice PRB split rule. PREFER_X favours the slice whose 5QI equals X.
struct AllocationSchema {
    enum class Kind { Equal, PreferX, Reserve };
    Kind kind = Kind::Equal;
    int preferred_five_qi = 0;

    friend bool operator==(const AllocationSchema&, const AllocationSchema&) = default;
};

std::string to_string(const AllocationSchema& s);
/// Accepts "EQUAL", "RESERVE" and "PREFER_<5qi>".
std::optional<AllocationSchema> parse_allocation_schema(std::string_view s);

struct SlaTargetBody {
    std::optional<double> guaranteed_throughput_bps;
    std::optional<double> max_throughput_bps;
    std::optional<double> max_ue_throughput_bps;
    std::optional<std::int64_t> max_ues;
    std::optional<AllocationSchema> allocation_schema;

    friend bool operator==(const SlaTargetBody&, const SlaTargetBody&) = default;
};

struct TaBlacklistBody {
    std::string cell_id;
    std::set<std::int64_t> ta_indices;
    double ttl_s = 300.0;

    friend bool operator==(const TaBlacklistBody&, const TaBlacklistBody&) = default;
};

using PolicyBody = std::variant<TsPreferenceBody, SlaTargetBody, TaBlacklistBody>;

struct A1Policy {
    std::string policy_id;
    Scope scope;
    PolicyBody body;

    PolicyType type() const { return static_cast<PolicyType>(body.index()); }

    friend bool operator==(const A1Policy&, const A1Policy&) = default;
};

/// Validation failure located by a JSONPath-style pointer such as `$.body.cells.c1`.
struct PolicyError {
    std::string path;
    std::string message;
};

using ParseResult = Expected<A1Policy, PolicyError>;

/// Parses and validates one A1 policy document. Never throws.
ParseResult parse(std::string_view text);
/// Validates an already-parsed JSON value; `root` prefixes error paths.
ParseResult from_json(const nlohmann::json& doc, const std::string& root = "$");

nlohmann::json to_json(const A1Policy& p);
std::string serialize(const A1Policy& p);

struct PolicyConflict {
    enum class Kind { DuplicateId, ScopeCollision, NoServiceableCell, ContradictoryLabel };
    Kind kind;
    std::vector<std::string> policy_ids;
    std::string detail;

    friend auto operator<=>(const PolicyConflict&, const PolicyConflict&) = default;
};

std::string_view to_string(PolicyConflict::Kind k);

/// Checks a candidate against the policies already in force. An active
/// document with the candidate's id is treated as the one being replaced.
/// `known_cells`, when non-empty, is the full set of cells a TS preference may
/// refer to; otherwise the cells named across the TS documents for the UE are
/// used. Results are sorted, so the order of `active` does not matter.
std::vector<PolicyConflict> cross_check(std::span<const A1Policy> active, const A1Policy& candidate,
                                        std::span<const std::string> known_cells = {});

}  // namespace oran::policy
