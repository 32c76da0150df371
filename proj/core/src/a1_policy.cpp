#include "oran/policy/a1_policy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <tuple>

namespace oran::policy {

using nlohmann::json;

std::string_view to_string(PolicyType t) {
    switch (t) {
        case PolicyType::TsPreferences: return "TS_PREFERENCES";
        case PolicyType::SlaTarget: return "SLA_TARGET";
        case PolicyType::TaBlacklist: return "TA_BLACKLIST";
    }
    return "";
}

std::optional<PolicyType> parse_policy_type(std::string_view s) {
    if (s == "TS_PREFERENCES") return PolicyType::TsPreferences;
    if (s == "SLA_TARGET") return PolicyType::SlaTarget;
    if (s == "TA_BLACKLIST") return PolicyType::TaBlacklist;
    return std::nullopt;
}

std::string_view to_string(CellLabel l) {
    switch (l) {
        case CellLabel::Prefer: return "PREFER";
        case CellLabel::Avoid: return "AVOID";
        case CellLabel::Forbid: return "FORBID";
    }
    return "";
}

std::optional<CellLabel> parse_cell_label(std::string_view s) {
    if (s == "PREFER") return CellLabel::Prefer;
    if (s == "AVOID") return CellLabel::Avoid;
    if (s == "FORBID") return CellLabel::Forbid;
    return std::nullopt;
}

std::string_view scope_key(Scope::Kind k) {
    switch (k) {
        case Scope::Kind::Ue: return "ue_id";
        case Scope::Kind::Slice: return "slice_id";
        case Scope::Kind::Cell: return "cell_id";
    }
    return "";
}

std::string to_string(const AllocationSchema& s) {
    switch (s.kind) {
        case AllocationSchema::Kind::Equal: return "EQUAL";
        case AllocationSchema::Kind::Reserve: return "RESERVE";
        case AllocationSchema::Kind::PreferX: return "PREFER_" + std::to_string(s.preferred_five_qi);
    }
    return "";
}

std::optional<AllocationSchema> parse_allocation_schema(std::string_view s) {
    if (s == "EQUAL") return AllocationSchema{AllocationSchema::Kind::Equal, 0};
    if (s == "RESERVE") return AllocationSchema{AllocationSchema::Kind::Reserve, 0};
    constexpr std::string_view prefix = "PREFER_";
    if (s.substr(0, prefix.size()) != prefix || s.size() == prefix.size()) {
        return std::nullopt;
    }
    const auto digits = s.substr(prefix.size());
    int x = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), x);
    if (ec != std::errc{} || end != digits.data() + digits.size() || x < 1 || digits.front() == '0') {
        return std::nullopt;
    }
    return AllocationSchema{AllocationSchema::Kind::PreferX, x};
}

namespace {

struct Invalid {
    PolicyError error;
};

[[noreturn]] void fail(std::string path, std::string message) {
    throw Invalid{PolicyError{std::move(path), std::move(message)}};
}

std::string describe(const json& v) {
    switch (v.type()) {
        case json::value_t::null: return "null";
        case json::value_t::boolean: return "boolean";
        case json::value_t::string: return "string";
        case json::value_t::array: return "array";
        case json::value_t::object: return "object";
        case json::value_t::binary: return "binary";
        case json::value_t::discarded: return "discarded";
        default: return "number";
    }
}

void require_object(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected object, got " + describe(v));
}

void allow_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> keys) {
    for (const auto& [k, _] : obj.items()) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
            fail(path + "." + k, "unknown field");
        }
    }
}

const json& require_field(const json& obj, const std::string& path, const std::string& key) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing required field");
    return *it;
}

std::string require_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected string, got " + describe(v));
    auto s = v.get<std::string>();
    if (s.empty()) fail(path, "must not be empty");
    return s;
}

double require_positive_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected number, got " + describe(v));
    const double x = v.get<double>();
    if (!std::isfinite(x) || !(x > 0.0)) fail(path, "must be a finite number > 0");
    return x;
}

std::int64_t require_integer(const json& v, const std::string& path, std::int64_t min_value) {
    if (!v.is_number_integer()) fail(path, "expected integer, got " + describe(v));
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
        fail(path, "integer out of range");
    }
    const auto x = v.get<std::int64_t>();
    if (x < min_value) fail(path, "must be >= " + std::to_string(min_value));
    return x;
}

Scope parse_scope(const json& v, const std::string& path) {
    require_object(v, path);
    allow_keys(v, path, {"ue_id", "slice_id", "cell_id"});
    if (v.size() != 1) fail(path, "exactly one of ue_id, slice_id, cell_id must be set");
    const auto& [key, value] = *v.items().begin();
    Scope s;
    if (key == "ue_id") s.kind = Scope::Kind::Ue;
    else if (key == "slice_id") s.kind = Scope::Kind::Slice;
    else s.kind = Scope::Kind::Cell;
    s.id = require_string(value, path + "." + key);
    return s;
}

TsPreferenceBody parse_ts(const json& body, const std::string& path) {
    allow_keys(body, path, {"cells"});
    const std::string cells_path = path + ".cells";
    const auto& cells = require_field(body, path, "cells");
    require_object(cells, cells_path);
    if (cells.empty()) fail(cells_path, "at least one cell must be listed");
    TsPreferenceBody out;
    for (const auto& [cell, label] : cells.items()) {
        const std::string p = cells_path + "." + cell;
        if (cell.empty()) fail(p, "cell id must not be empty");
        if (!label.is_string()) fail(p, "expected label string, got " + describe(label));
        const auto parsed = parse_cell_label(label.get<std::string>());
        if (!parsed) fail(p, "label must be PREFER, AVOID or FORBID");
        out.cells.emplace(cell, *parsed);
    }
    return out;
}

SlaTargetBody parse_sla(const json& body, const std::string& path) {
    allow_keys(body, path,
               {"guaranteed_throughput_bps", "max_throughput_bps", "max_ue_throughput_bps", "max_ues",
                "allocation_schema"});
    SlaTargetBody out;
    for (const char* key : {"guaranteed_throughput_bps", "max_throughput_bps", "max_ue_throughput_bps"}) {
        if (const auto it = body.find(key); it != body.end()) {
            const double x = require_positive_number(*it, path + "." + key);
            if (std::string_view(key) == "guaranteed_throughput_bps") out.guaranteed_throughput_bps = x;
            else if (std::string_view(key) == "max_throughput_bps") out.max_throughput_bps = x;
            else out.max_ue_throughput_bps = x;
        }
    }
    if (const auto it = body.find("max_ues"); it != body.end()) {
        out.max_ues = require_integer(*it, path + ".max_ues", 1);
    }
    if (const auto it = body.find("allocation_schema"); it != body.end()) {
        const std::string p = path + ".allocation_schema";
        if (!it->is_string()) fail(p, "expected string, got " + describe(*it));
        out.allocation_schema = parse_allocation_schema(it->get<std::string>());
        if (!out.allocation_schema) fail(p, "schema must be EQUAL, RESERVE or PREFER_<5qi>");
    }
    if (out.guaranteed_throughput_bps && out.max_throughput_bps &&
        *out.guaranteed_throughput_bps > *out.max_throughput_bps) {
        fail(path, "guaranteed_throughput_bps exceeds max_throughput_bps");
    }
    return out;
}

TaBlacklistBody parse_blacklist(const json& body, const std::string& path) {
    allow_keys(body, path, {"cell_id", "ta_indices", "ttl_s"});
    TaBlacklistBody out;
    out.cell_id = require_string(require_field(body, path, "cell_id"), path + ".cell_id");
    const std::string ta_path = path + ".ta_indices";
    const auto& tas = require_field(body, path, "ta_indices");
    if (!tas.is_array()) fail(ta_path, "expected array, got " + describe(tas));
    if (tas.empty()) fail(ta_path, "at least one TA index is required");
    for (std::size_t i = 0; i < tas.size(); ++i) {
        const std::string p = ta_path + "[" + std::to_string(i) + "]";
        if (!out.ta_indices.insert(require_integer(tas[i], p, 0)).second) {
            fail(p, "duplicate TA index");
        }
    }
    out.ttl_s = require_positive_number(require_field(body, path, "ttl_s"), path + ".ttl_s");
    return out;
}

A1Policy parse_document(const json& doc, const std::string& root) {
    require_object(doc, root);
    allow_keys(doc, root, {"policy_id", "policy_type", "scope", "body"});
    A1Policy p;
    p.policy_id = require_string(require_field(doc, root, "policy_id"), root + ".policy_id");

    const std::string type_path = root + ".policy_type";
    const auto& type_field = require_field(doc, root, "policy_type");
    if (!type_field.is_string()) fail(type_path, "expected string, got " + describe(type_field));
    const auto type = parse_policy_type(type_field.get<std::string>());
    if (!type) fail(type_path, "unknown policy_type '" + type_field.get<std::string>() + "'");

    const std::string scope_path = root + ".scope";
    p.scope = parse_scope(require_field(doc, root, "scope"), scope_path);

    const std::string body_path = root + ".body";
    const auto& body = require_field(doc, root, "body");
    require_object(body, body_path);
    switch (*type) {
        case PolicyType::TsPreferences:
            if (p.scope.kind != Scope::Kind::Ue) fail(scope_path, "TS_PREFERENCES must be scoped to a ue_id");
            p.body = parse_ts(body, body_path);
            break;
        case PolicyType::SlaTarget:
            if (p.scope.kind == Scope::Kind::Ue) fail(scope_path, "SLA_TARGET must be scoped to a slice_id or cell_id");
            p.body = parse_sla(body, body_path);
            break;
        case PolicyType::TaBlacklist: {
            if (p.scope.kind != Scope::Kind::Cell) fail(scope_path, "TA_BLACKLIST must be scoped to a cell_id");
            auto bl = parse_blacklist(body, body_path);
            if (bl.cell_id != p.scope.id) fail(body_path + ".cell_id", "does not match scope.cell_id");
            p.body = std::move(bl);
            break;
        }
    }
    return p;
}

}  // namespace

ParseResult from_json(const json& doc, const std::string& root) {
    try {
        return parse_document(doc, root);
    } catch (const Invalid& e) {
        return e.error;
    } catch (const std::exception& e) {
        return PolicyError{root, e.what()};
    }
}

ParseResult parse(std::string_view text) {
    json doc = json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
        // Re-run with exceptions to recover the byte offset for the message.
        try {
            const json again = json::parse(text.begin(), text.end());
            static_cast<void>(again);
        } catch (const json::parse_error& e) {
            return PolicyError{"$", std::string("syntax error: ") + e.what()};
        } catch (const std::exception& e) {
            return PolicyError{"$", std::string("syntax error: ") + e.what()};
        }
        return PolicyError{"$", "syntax error"};
    }
    return policy::from_json(doc, "$");
}

json to_json(const A1Policy& p) {
    json body = json::object();
    std::visit(
        [&body](const auto& b) {
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<B, TsPreferenceBody>) {
                json cells = json::object();
                for (const auto& [cell, label] : b.cells) cells[cell] = std::string(to_string(label));
                body["cells"] = std::move(cells);
            } else if constexpr (std::is_same_v<B, SlaTargetBody>) {
                if (b.guaranteed_throughput_bps) body["guaranteed_throughput_bps"] = *b.guaranteed_throughput_bps;
                if (b.max_throughput_bps) body["max_throughput_bps"] = *b.max_throughput_bps;
                if (b.max_ue_throughput_bps) body["max_ue_throughput_bps"] = *b.max_ue_throughput_bps;
                if (b.max_ues) body["max_ues"] = *b.max_ues;
                if (b.allocation_schema) body["allocation_schema"] = to_string(*b.allocation_schema);
            } else {
                body["cell_id"] = b.cell_id;
                body["ta_indices"] = json(std::vector<std::int64_t>(b.ta_indices.begin(), b.ta_indices.end()));
                body["ttl_s"] = b.ttl_s;
            }
        },
        p.body);
    return json{{"policy_id", p.policy_id},
                {"policy_type", std::string(to_string(p.type()))},
                {"scope", json{{std::string(scope_key(p.scope.kind)), p.scope.id}}},
                {"body", std::move(body)}};
}

std::string serialize(const A1Policy& p) { return to_json(p).dump(); }

std::string_view to_string(PolicyConflict::Kind k) {
    switch (k) {
        case PolicyConflict::Kind::DuplicateId: return "duplicate-id";
        case PolicyConflict::Kind::ScopeCollision: return "scope-collision";
        case PolicyConflict::Kind::NoServiceableCell: return "no-serviceable-cell";
        case PolicyConflict::Kind::ContradictoryLabel: return "contradictory-label";
    }
    return "";
}

std::vector<PolicyConflict> cross_check(std::span<const A1Policy> active, const A1Policy& candidate,
                                        std::span<const std::string> known_cells) {
    std::vector<PolicyConflict> out;
    std::vector<const A1Policy*> others;
    for (const auto& a : active) {
        if (a.policy_id == candidate.policy_id) {
            if (a.type() != candidate.type() || a.scope != candidate.scope) {
                out.push_back({PolicyConflict::Kind::DuplicateId, {a.policy_id},
                               "policy id already in force for a different type or scope"});
            }
            continue;  // replaced by the candidate
        }
        if (a.type() == candidate.type() && a.scope == candidate.scope) {
            out.push_back({PolicyConflict::Kind::ScopeCollision, {a.policy_id, candidate.policy_id},
                           std::string(to_string(a.type())) + " already in force for " +
                               std::string(scope_key(a.scope.kind)) + " " + a.scope.id});
        }
        others.push_back(&a);
    }

    const auto* ts = std::get_if<TsPreferenceBody>(&candidate.body);
    if (ts != nullptr) {
        const std::string& ue = candidate.scope.id;
        // Effective labels for the UE once the candidate is in force.
        std::map<std::string, CellLabel> merged = ts->cells;
        for (const A1Policy* a : others) {
            const auto* other = std::get_if<TsPreferenceBody>(&a->body);
            if (other == nullptr || a->scope.kind != Scope::Kind::Ue || a->scope.id != ue) continue;
            for (const auto& [cell, label] : other->cells) {
                const auto it = ts->cells.find(cell);
                if (it != ts->cells.end() && it->second != label) {
                    out.push_back({PolicyConflict::Kind::ContradictoryLabel, {a->policy_id, candidate.policy_id},
                                   "cell " + cell + " labelled " + std::string(to_string(label)) + " and " +
                                       std::string(to_string(it->second)) + " for ue " + ue});
                }
                merged.emplace(cell, label);
            }
        }
        std::set<std::string> universe(known_cells.begin(), known_cells.end());
        if (universe.empty()) {
            for (const auto& [cell, _] : merged) universe.insert(cell);
        }
        const bool all_forbidden = std::all_of(universe.begin(), universe.end(), [&](const std::string& c) {
            const auto it = merged.find(c);
            return it != merged.end() && it->second == CellLabel::Forbid;
        });
        if (!universe.empty() && all_forbidden) {
            out.push_back({PolicyConflict::Kind::NoServiceableCell, {candidate.policy_id},
                           "no serviceable cell: every cell is FORBID for ue " + ue});
        }
    }

    for (auto& c : out) std::sort(c.policy_ids.begin(), c.policy_ids.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace oran::policy
