#include "oran/scenario/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace oran::scenario {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
    return out;
}

/// Collects every problem in the document instead of stopping at the first.
class Reader {
public:
    std::vector<std::string> errors;

    void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

    bool object(const json& o, const std::string& path, std::initializer_list<std::string_view> allowed) {
        if (!o.is_object()) {
            fail(path, "expected an object");
            return false;
        }
        for (const auto& [key, _] : o.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(path + "." + key, "unknown key");
        }
        return true;
    }

    const json* child(const json& o, const std::string& key) const {
        const auto it = o.find(key);
        return it == o.end() ? nullptr : &*it;
    }

    double number(const json& o, const std::string& path, const std::string& key, double fallback) {
        const json* v = child(o, key);
        if (v == nullptr) return fallback;
        if (!v->is_number()) {
            fail(path + "." + key, "expected a number");
            return fallback;
        }
        const double d = v->get<double>();
        if (!std::isfinite(d)) fail(path + "." + key, "must be finite");
        return d;
    }

    double number_min(const json& o, const std::string& path, const std::string& key, double fallback, double lo,
                      bool inclusive) {
        const double d = number(o, path, key, fallback);
        if (child(o, key) != nullptr && (inclusive ? d < lo : d <= lo)) {
            std::ostringstream msg;
            msg << "must be " << (inclusive ? ">= " : "> ") << lo;
            fail(path + "." + key, msg.str());
        }
        return d;
    }

    std::int64_t integer(const json& o, const std::string& path, const std::string& key, std::int64_t fallback,
                         std::int64_t lo) {
        const json* v = child(o, key);
        if (v == nullptr) return fallback;
        if (!v->is_number_integer()) {
            fail(path + "." + key, "expected an integer");
            return fallback;
        }
        const auto i = v->get<std::int64_t>();
        if (i < lo) fail(path + "." + key, "must be >= " + std::to_string(lo));
        return i;
    }

    std::string string(const json& o, const std::string& path, const std::string& key, std::string fallback) {
        const json* v = child(o, key);
        if (v == nullptr) return fallback;
        if (!v->is_string()) {
            fail(path + "." + key, "expected a string");
            return fallback;
        }
        return v->get<std::string>();
    }

    bool boolean(const json& o, const std::string& path, const std::string& key, bool fallback) {
        const json* v = child(o, key);
        if (v == nullptr) return fallback;
        if (!v->is_boolean()) {
            fail(path + "." + key, "expected true or false");
            return fallback;
        }
        return v->get<bool>();
    }
};

wireless::PropagationParams read_propagation(Reader& r, const json& o, const std::string& path,
                                             wireless::PropagationParams p) {
    if (!r.object(o, path, {"ref_loss_db", "exponent", "tx_power_dbm", "shadowing_sigma_db"})) return p;
    p.ref_loss_db = r.number_min(o, path, "ref_loss_db", p.ref_loss_db, 0.0, false);
    p.exponent = r.number_min(o, path, "exponent", p.exponent, 0.0, false);
    p.tx_power_dbm = r.number(o, path, "tx_power_dbm", p.tx_power_dbm);
    p.shadowing_sigma_db = r.number_min(o, path, "shadowing_sigma_db", p.shadowing_sigma_db, 0.0, true);
    return p;
}

wireless::TaConfig read_ta(Reader& r, const json& o, const std::string& path, wireless::TaConfig ta) {
    if (!r.object(o, path, {"scs_khz"})) return ta;
    ta.scs_khz = static_cast<int>(r.integer(o, path, "scs_khz", ta.scs_khz, 1));
    if (!wireless::is_valid_scs_khz(ta.scs_khz)) r.fail(path + ".scs_khz", "must be 15, 30, 60, 120 or 240");
    return ta;
}

ransim::TrafficSpec read_traffic(Reader& r, const json& o, const std::string& path) {
    if (!r.object(o, path, {"type", "rate_per_hour", "attacks_per_day", "burst_len", "burst_gap_s"})) return {};
    const std::string type = r.string(o, path, "type", "");
    if (type == "none") return ransim::NoTraffic{};
    if (type == "poisson") {
        return ransim::PoissonTraffic{r.number_min(o, path, "rate_per_hour", 5.0, 0.0, false)};
    }
    if (type == "attack") {
        ransim::AttackTraffic a;
        a.attacks_per_day = r.number_min(o, path, "attacks_per_day", a.attacks_per_day, 0.0, true);
        a.burst_len = static_cast<int>(r.integer(o, path, "burst_len", a.burst_len, 1));
        a.burst_gap_s = r.number_min(o, path, "burst_gap_s", a.burst_gap_s, 0.0, false);
        return a;
    }
    r.fail(path + ".type", "expected \"none\", \"poisson\" or \"attack\"");
    return {};
}

ransim::UeKind read_kind(Reader& r, const json& o, const std::string& path) {
    const std::string s = r.string(o, path, "kind", "MOBILE");
    const auto k = ransim::parse_ue_kind(s);
    if (!k) r.fail(path + ".kind", "expected MOBILE, IOT_LEGIT or IOT_ADVERSARY");
    return k.value_or(ransim::UeKind::Mobile);
}

ransim::CellConfig read_cell(Reader& r, const json& o, const std::string& path, const wireless::PropagationParams& prop,
                             const wireless::TaConfig& ta) {
    ransim::CellConfig c;
    c.prop = prop;
    c.ta = ta;
    if (!r.object(o, path,
                  {"id", "x", "y", "prb_count", "per_prb_rate_bps", "propagation", "ta", "beams",
                   "failure_threshold_dbm", "failure_n_consecutive", "zones"})) {
        return c;
    }
    c.id = r.string(o, path, "id", "");
    if (c.id.empty()) r.fail(path + ".id", "required");
    c.pos = {r.number(o, path, "x", 0.0), r.number(o, path, "y", 0.0)};
    c.prb_count = static_cast<int>(r.integer(o, path, "prb_count", c.prb_count, 1));
    c.per_prb_rate_bps = r.number_min(o, path, "per_prb_rate_bps", c.per_prb_rate_bps, 0.0, false);
    if (const json* p = r.child(o, "propagation")) c.prop = read_propagation(r, *p, path + ".propagation", prop);
    if (const json* t = r.child(o, "ta")) c.ta = read_ta(r, *t, path + ".ta", ta);
    c.failure_threshold_dbm = r.number(o, path, "failure_threshold_dbm", c.failure_threshold_dbm);
    c.failure_n_consecutive = static_cast<int>(r.integer(o, path, "failure_n_consecutive", c.failure_n_consecutive, 1));
    if (const json* b = r.child(o, "beams")) {
        const std::string bp = path + ".beams";
        if (r.object(*b, bp,
                     {"count", "sector_center_deg", "sector_width_deg", "beamwidth_3db_deg", "max_gain_db",
                      "max_attenuation_db"})) {
            const auto count = r.integer(*b, bp, "count", 8, 1);
            const double center = r.number(*b, bp, "sector_center_deg", 0.0);
            const double width = r.number_min(*b, bp, "sector_width_deg", 120.0, 0.0, false);
            const double bw = r.number_min(*b, bp, "beamwidth_3db_deg", 15.0, 0.0, false);
            const double gain = r.number(*b, bp, "max_gain_db", 0.0);
            const double att = r.number_min(*b, bp, "max_attenuation_db", 30.0, 0.0, false);
            c.beams = wireless::make_grid_of_beams(static_cast<int>(count), center, width, bw, gain, att);
        }
    }
    if (const json* zs = r.child(o, "zones")) {
        if (!zs->is_array()) {
            r.fail(path + ".zones", "expected an array");
        } else {
            for (std::size_t i = 0; i < zs->size(); ++i) {
                const std::string zp = path + ".zones[" + std::to_string(i) + "]";
                const json& z = (*zs)[i];
                if (!r.object(z, zp, {"x_min", "y_min", "x_max", "y_max", "beam_ids", "attenuation_db"})) continue;
                wireless::AttenuationZone zone;
                zone.x_min = r.number(z, zp, "x_min", 0.0);
                zone.y_min = r.number(z, zp, "y_min", 0.0);
                zone.x_max = r.number(z, zp, "x_max", 0.0);
                zone.y_max = r.number(z, zp, "y_max", 0.0);
                if (!(zone.x_min <= zone.x_max) || !(zone.y_min <= zone.y_max)) r.fail(zp, "min must not exceed max");
                zone.attenuation_db = r.number_min(z, zp, "attenuation_db", 0.0, 0.0, true);
                if (const json* ids = r.child(z, "beam_ids")) {
                    if (!ids->is_array()) {
                        r.fail(zp + ".beam_ids", "expected an array of beam ids");
                    } else {
                        for (const auto& id : *ids) {
                            if (!id.is_number_integer() || id.get<int>() < 0) {
                                r.fail(zp + ".beam_ids", "beam ids must be non-negative integers");
                            } else {
                                zone.beam_ids.push_back(id.get<int>());
                            }
                        }
                    }
                }
                c.zones.push_back(std::move(zone));
            }
        }
    }
    return c;
}

ransim::UeConfig read_ue(Reader& r, const json& o, const std::string& path) {
    ransim::UeConfig u;
    if (!r.object(o, path, {"id", "x", "y", "speed_mps", "bearing_deg", "five_qi", "kind", "traffic"})) return u;
    u.id = r.string(o, path, "id", "");
    if (u.id.empty()) r.fail(path + ".id", "required");
    u.pos = {r.number(o, path, "x", 0.0), r.number(o, path, "y", 0.0)};
    u.velocity = {r.number_min(o, path, "speed_mps", 0.0, 0.0, true), r.number(o, path, "bearing_deg", 0.0)};
    u.five_qi = static_cast<int>(r.integer(o, path, "five_qi", 1, 1));
    u.kind = read_kind(r, o, path);
    if (const json* t = r.child(o, "traffic")) u.traffic = read_traffic(r, *t, path + ".traffic");
    return u;
}

UeGroup read_group(Reader& r, const json& o, const std::string& path) {
    UeGroup g;
    if (!r.object(o, path,
                  {"prefix", "count", "kind", "five_qi", "placement", "speed_mps", "bearing_deg", "traffic"})) {
        return g;
    }
    g.prefix = r.string(o, path, "prefix", "");
    if (g.prefix.empty()) r.fail(path + ".prefix", "required");
    g.count = static_cast<int>(r.integer(o, path, "count", 0, 0));
    g.kind = read_kind(r, o, path);
    g.five_qi = static_cast<int>(r.integer(o, path, "five_qi", 1, 1));
    g.speed_mps = r.number_min(o, path, "speed_mps", 0.0, 0.0, true);
    g.bearing_deg = r.number(o, path, "bearing_deg", 0.0);
    if (const json* t = r.child(o, "traffic")) g.traffic = read_traffic(r, *t, path + ".traffic");
    const json* p = r.child(o, "placement");
    const std::string pp = path + ".placement";
    if (p == nullptr) {
        r.fail(pp, "required");
    } else if (r.object(*p, pp, {"type", "cx", "cy", "radius_m", "x_min", "y_min", "x_max", "y_max"})) {
        const std::string type = r.string(*p, pp, "type", "");
        if (type == "disk") {
            g.placement = DiskPlacement{{r.number(*p, pp, "cx", 0.0), r.number(*p, pp, "cy", 0.0)},
                                        r.number_min(*p, pp, "radius_m", 0.0, 0.0, false)};
        } else if (type == "rect") {
            RectPlacement rect{r.number(*p, pp, "x_min", 0.0), r.number(*p, pp, "y_min", 0.0),
                               r.number(*p, pp, "x_max", 0.0), r.number(*p, pp, "y_max", 0.0)};
            if (!(rect.x_min <= rect.x_max) || !(rect.y_min <= rect.y_max)) r.fail(pp, "min must not exceed max");
            g.placement = rect;
        } else {
            r.fail(pp + ".type", "expected \"disk\" or \"rect\"");
        }
    }
    return g;
}

void read_xapps(Reader& r, const json& o, const std::string& path, ScenarioConfig& cfg) {
    if (!r.object(o, path, {"ts", "qra", "ssd", "bmm"})) return;
    if (const json* ts = r.child(o, "ts")) {
        const std::string p = path + ".ts";
        TsSettings s;
        if (r.object(*ts, p, {"preference_offset_db", "hysteresis_db", "period_s"})) {
            if (r.child(*ts, "preference_offset_db")) {
                s.preference_offset_db = r.number_min(*ts, p, "preference_offset_db", 0.0, 0.0, false);
            }
            s.hysteresis_db = r.number_min(*ts, p, "hysteresis_db", s.hysteresis_db, 0.0, true);
            s.period_s = r.number_min(*ts, p, "period_s", s.period_s, 0.0, false);
        }
        cfg.ts = s;
    }
    if (const json* qra = r.child(o, "qra")) {
        const std::string p = path + ".qra";
        xapp::QraParams q;
        if (r.object(*qra, p, {"period_s", "default_schema"})) {
            q.period_s = r.number_min(*qra, p, "period_s", q.period_s, 0.0, false);
            const std::string schema = r.string(*qra, p, "default_schema", "EQUAL");
            if (const auto parsed = policy::parse_allocation_schema(schema)) {
                q.default_schema = *parsed;
            } else {
                r.fail(p + ".default_schema", "expected EQUAL, RESERVE or PREFER_<5qi>");
            }
        }
        cfg.qra = q;
    }
    if (const json* ssd = r.child(o, "ssd")) {
        const std::string p = path + ".ssd";
        SsdSettings s;
        auto& q = s.params;
        if (r.object(*ssd, p,
                     {"window_s", "bucket_len_s", "eps", "min_pts", "std_floor", "k_sigma", "ttl_s",
                      "min_training_windows", "training_days"})) {
            q.window_s = r.number_min(*ssd, p, "window_s", q.window_s, 0.0, false);
            q.bucket_len_s = r.number_min(*ssd, p, "bucket_len_s", q.bucket_len_s, 0.0, false);
            q.eps = r.number_min(*ssd, p, "eps", q.eps, 0.0, false);
            q.min_pts = static_cast<std::size_t>(r.integer(*ssd, p, "min_pts", static_cast<std::int64_t>(q.min_pts), 1));
            q.std_floor = r.number_min(*ssd, p, "std_floor", q.std_floor, 0.0, false);
            q.k_sigma = r.number_min(*ssd, p, "k_sigma", q.k_sigma, 0.0, false);
            q.ttl_s = r.number_min(*ssd, p, "ttl_s", q.ttl_s, 0.0, false);
            q.min_training_windows = r.integer(*ssd, p, "min_training_windows", q.min_training_windows, 1);
            s.training_days = r.number_min(*ssd, p, "training_days", s.training_days, 0.0, false);
        }
        cfg.ssd = s;
    }
    if (const json* bmm = r.child(o, "bmm")) {
        const std::string p = path + ".bmm";
        BmmSettings s;
        auto& q = s.params;
        if (r.object(*bmm, p,
                     {"mode", "horizon", "margin_db", "failure_threshold_dbm", "failure_n_consecutive",
                      "report_period_s", "stats_period_s", "emergency_limit", "emergency_exit_windows", "training_s",
                      "grid_cell_m", "speed_bin_mps", "speed_bins", "bearing_bins"})) {
            const std::string mode = r.string(*bmm, p, "mode", "rem");
            if (const auto m = xapp::parse_bmm_mode(mode)) {
                q.mode = *m;
            } else {
                r.fail(p + ".mode", "expected \"rem\" or \"rsrp_only\"");
            }
            q.select.horizon = static_cast<int>(r.integer(*bmm, p, "horizon", q.select.horizon, 0));
            q.select.margin_db = r.number_min(*bmm, p, "margin_db", q.select.margin_db, 0.0, true);
            q.select.failure_threshold_dbm =
                r.number(*bmm, p, "failure_threshold_dbm",
                         cfg.cells.empty() ? q.select.failure_threshold_dbm : cfg.cells.front().failure_threshold_dbm);
            q.failure_n_consecutive = static_cast<int>(
                r.integer(*bmm, p, "failure_n_consecutive",
                          cfg.cells.empty() ? q.failure_n_consecutive : cfg.cells.front().failure_n_consecutive, 1));
            q.report_period_s = r.number_min(*bmm, p, "report_period_s", cfg.tick_s, 0.0, false);
            q.select.tick_s = q.report_period_s;
            q.stats_period_s = r.number_min(*bmm, p, "stats_period_s", q.stats_period_s, 0.0, false);
            q.emergency_limit = r.integer(*bmm, p, "emergency_limit", q.emergency_limit, 0);
            q.emergency_exit_windows = static_cast<int>(r.integer(*bmm, p, "emergency_exit_windows", q.emergency_exit_windows, 1));
            s.training_s = r.number_min(*bmm, p, "training_s", s.training_s, 0.0, true);
            s.grid_cell_m = r.number_min(*bmm, p, "grid_cell_m", s.grid_cell_m, 0.0, false);
            s.speed_bin_mps = r.number_min(*bmm, p, "speed_bin_mps", s.speed_bin_mps, 0.0, false);
            s.speed_bins = static_cast<int>(r.integer(*bmm, p, "speed_bins", s.speed_bins, 1));
            s.bearing_bins = static_cast<int>(r.integer(*bmm, p, "bearing_bins", s.bearing_bins, 1));
        }
        cfg.bmm = s;
    }
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> diagnostics)
    : std::runtime_error(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

void set_dotted(json& doc, const std::string& key, json value) {
    if (key.empty()) throw ScenarioError({"override: empty key"});
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ScenarioError({"override " + key + ": empty path segment"});
        json* next = nullptr;
        if (node->is_array()) {
            std::size_t idx = 0;
            const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), idx);
            if (ec != std::errc{} || ptr != part.data() + part.size() || idx >= node->size()) {
                throw ScenarioError({"override " + key + ": no array element " + part});
            }
            next = &(*node)[idx];
        } else {
            if (node->is_null()) *node = json::object();
            if (!node->is_object()) throw ScenarioError({"override " + key + ": " + part + " is not inside an object"});
            next = &(*node)[part];
        }
        if (dot == std::string::npos) {
            *next = std::move(value);
            return;
        }
        node = next;
        start = dot + 1;
    }
}

json parse_value(const std::string& text) {
    json v = json::parse(text, nullptr, false);
    if (v.is_discarded()) return json(text);
    return v;
}

std::pair<std::string, json> parse_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ScenarioError({"override " + text + ": expected key=value"});
    return {text.substr(0, eq), parse_value(text.substr(eq + 1))};
}

ScenarioConfig parse_scenario(const json& doc) {
    Reader r;
    ScenarioConfig cfg;
    cfg.source = doc;
    const std::string root = "$";
    if (!r.object(doc, root,
                  {"name", "description", "seed", "duration_s", "tick_s", "bounds", "ta", "propagation", "cells", "ues",
                   "ue_groups", "localization", "ei_delay_s", "record_serving", "xapps", "xapp_priority", "policies",
                   "message_log", "output_dir", "variants"})) {
        throw ScenarioError(r.errors);
    }
    cfg.name = r.string(doc, root, "name", "scenario");
    r.string(doc, root, "description", "");
    if (const json* s = r.child(doc, "seed")) {
        if (s->is_number_unsigned() || (s->is_number_integer() && s->get<std::int64_t>() >= 0)) {
            cfg.seed = s->get<std::uint64_t>();
        } else {
            r.fail("$.seed", "expected a non-negative integer");
        }
    }
    if (r.child(doc, "duration_s") == nullptr) r.fail("$.duration_s", "required");
    cfg.duration_s = r.number_min(doc, root, "duration_s", 0.0, 0.0, true);
    cfg.tick_s = r.number_min(doc, root, "tick_s", cfg.tick_s, 0.0, false);
    cfg.ei_delay_s = r.number_min(doc, root, "ei_delay_s", 0.0, 0.0, true);
    cfg.record_serving = r.boolean(doc, root, "record_serving", true);
    cfg.message_log = r.boolean(doc, root, "message_log", false);
    cfg.output_dir = r.string(doc, root, "output_dir", "");

    if (const json* b = r.child(doc, "bounds")) {
        if (r.object(*b, "$.bounds", {"x_min", "y_min", "x_max", "y_max", "boundary"})) {
            auto& bd = cfg.bounds;
            bd.x_min = r.number(*b, "$.bounds", "x_min", bd.x_min);
            bd.y_min = r.number(*b, "$.bounds", "y_min", bd.y_min);
            bd.x_max = r.number(*b, "$.bounds", "x_max", bd.x_max);
            bd.y_max = r.number(*b, "$.bounds", "y_max", bd.y_max);
            if (!(bd.x_min < bd.x_max) || !(bd.y_min < bd.y_max)) r.fail("$.bounds", "min must be below max");
            const std::string mode = r.string(*b, "$.bounds", "boundary", "bounce");
            if (mode == "bounce") {
                bd.mode = ransim::BoundaryMode::Bounce;
            } else if (mode == "wrap") {
                bd.mode = ransim::BoundaryMode::Wrap;
            } else {
                r.fail("$.bounds.boundary", "expected \"bounce\" or \"wrap\"");
            }
        }
    }

    wireless::PropagationParams prop;
    if (const json* p = r.child(doc, "propagation")) prop = read_propagation(r, *p, "$.propagation", prop);
    wireless::TaConfig ta;
    if (const json* t = r.child(doc, "ta")) ta = read_ta(r, *t, "$.ta", ta);

    if (const json* cells = r.child(doc, "cells"); cells != nullptr && cells->is_array()) {
        for (std::size_t i = 0; i < cells->size(); ++i) {
            cfg.cells.push_back(read_cell(r, (*cells)[i], "$.cells[" + std::to_string(i) + "]", prop, ta));
        }
    } else {
        r.fail("$.cells", "required array");
    }
    if (const json* ues = r.child(doc, "ues")) {
        if (!ues->is_array()) {
            r.fail("$.ues", "expected an array");
        } else {
            for (std::size_t i = 0; i < ues->size(); ++i) {
                cfg.ues.push_back(read_ue(r, (*ues)[i], "$.ues[" + std::to_string(i) + "]"));
            }
        }
    }
    if (const json* groups = r.child(doc, "ue_groups")) {
        if (!groups->is_array()) {
            r.fail("$.ue_groups", "expected an array");
        } else {
            for (std::size_t i = 0; i < groups->size(); ++i) {
                cfg.groups.push_back(read_group(r, (*groups)[i], "$.ue_groups[" + std::to_string(i) + "]"));
            }
        }
    }

    {
        std::set<std::string> seen;
        for (std::size_t i = 0; i < cfg.cells.size(); ++i) {
            if (!seen.insert(cfg.cells[i].id).second) {
                r.fail("$.cells[" + std::to_string(i) + "].id", "duplicate cell id " + cfg.cells[i].id);
            }
        }
        seen.clear();
        for (std::size_t i = 0; i < cfg.ues.size(); ++i) {
            if (!seen.insert(cfg.ues[i].id).second) {
                r.fail("$.ues[" + std::to_string(i) + "].id", "duplicate ue id " + cfg.ues[i].id);
            }
        }
    }

    const std::string loc = r.string(doc, root, "localization", "PERFECT");
    if (const auto tech = wireless::parse_localization(loc)) {
        cfg.localization = *tech;
    } else {
        r.fail("$.localization", "expected PERFECT, RTK, DGPS or GPS");
    }

    if (const json* x = r.child(doc, "xapps")) read_xapps(r, *x, "$.xapps", cfg);

    const std::set<std::string> known_xapps{"ts", "qra", "ssd", "bmm"};
    if (const json* pr = r.child(doc, "xapp_priority")) {
        if (!pr->is_array()) {
            r.fail("$.xapp_priority", "expected an array of xApp ids");
        } else {
            for (std::size_t i = 0; i < pr->size(); ++i) {
                const json& id = (*pr)[i];
                const std::string at = "$.xapp_priority[" + std::to_string(i) + "]";
                if (!id.is_string() || known_xapps.count(id.get<std::string>()) == 0) {
                    r.fail(at, "expected one of ts, qra, ssd, bmm");
                } else if (std::find(cfg.priority.begin(), cfg.priority.end(), id.get<std::string>()) !=
                           cfg.priority.end()) {
                    r.fail(at, "listed twice");
                } else {
                    cfg.priority.push_back(id.get<std::string>());
                }
            }
        }
    }

    std::vector<std::string> cell_ids;
    for (const auto& c : cfg.cells) cell_ids.push_back(c.id);
    if (const json* ps = r.child(doc, "policies")) {
        if (!ps->is_array()) {
            r.fail("$.policies", "expected an array of A1 policy documents");
        } else {
            for (std::size_t i = 0; i < ps->size(); ++i) {
                const std::string at = "$.policies[" + std::to_string(i) + "]";
                auto parsed = policy::from_json((*ps)[i], at);
                if (!parsed) {
                    r.fail(parsed.error().path, parsed.error().message);
                    continue;
                }
                for (const auto& conflict : policy::cross_check(cfg.policies, parsed.value(), cell_ids)) {
                    r.fail(at, std::string(policy::to_string(conflict.kind)) + ": " + conflict.detail);
                }
                cfg.policies.push_back(parsed.value());
            }
        }
    }

    if (const json* vs = r.child(doc, "variants")) {
        if (!vs->is_array()) {
            r.fail("$.variants", "expected an array");
        } else {
            std::set<std::string> names;
            for (std::size_t i = 0; i < vs->size(); ++i) {
                const std::string at = "$.variants[" + std::to_string(i) + "]";
                const json& v = (*vs)[i];
                if (!r.object(v, at, {"name", "set"})) continue;
                Variant variant;
                variant.name = r.string(v, at, "name", "");
                if (variant.name.empty() || !names.insert(variant.name).second) {
                    r.fail(at + ".name", "must be unique and non-empty");
                }
                if (const json* set = r.child(v, "set"); set != nullptr && set->is_object()) {
                    for (const auto& [key, value] : set->items()) {
                        if (key == "variants") {
                            r.fail(at + ".set", "variants cannot nest");
                        } else {
                            variant.set.emplace(key, value);
                        }
                    }
                } else {
                    r.fail(at + ".set", "required object of dotted keys");
                }
                cfg.variants.push_back(std::move(variant));
            }
        }
    }

    if (r.errors.empty()) {
        try {
            for (auto& e : ransim::validate(expand(cfg))) r.fail("$", e);
        } catch (const std::exception& e) {
            r.fail("$", e.what());
        }
    }
    if (!r.errors.empty()) throw ScenarioError(r.errors);
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path, const std::map<std::string, json>& overrides) {
    std::ifstream in(path);
    if (!in) throw ScenarioError({path + ": cannot open"});
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ScenarioError({path + ": not valid JSON"});
    for (const auto& [key, value] : overrides) set_dotted(doc, key, value);
    return parse_scenario(doc);
}

ScenarioConfig variant_config(const ScenarioConfig& base, const Variant& v) {
    json doc = base.source;
    doc.erase("variants");
    for (const auto& [key, value] : v.set) set_dotted(doc, key, value);
    try {
        return parse_scenario(doc);
    } catch (const ScenarioError& e) {
        std::vector<std::string> diags;
        for (const auto& d : e.diagnostics()) diags.push_back("variant " + v.name + ": " + d);
        throw ScenarioError(diags);
    }
}

ransim::SimConfig expand(const ScenarioConfig& cfg, const std::string& placement_phase) {
    ransim::SimConfig sim;
    sim.seed = cfg.seed;
    sim.duration_s = cfg.duration_s;
    sim.tick_s = cfg.tick_s;
    sim.bounds = cfg.bounds;
    sim.cells = cfg.cells;
    sim.ues = cfg.ues;
    sim.localization = cfg.localization;
    sim.record_serving = cfg.record_serving;
    for (const auto& g : cfg.groups) {
        Rng rng = Rng::derive(cfg.seed, placement_phase + "/placement/" + g.prefix);
        const int width = static_cast<int>(std::to_string(std::max(g.count - 1, 0)).size());
        for (int i = 0; i < g.count; ++i) {
            ransim::UeConfig u;
            std::string idx = std::to_string(i);
            u.id = g.prefix + "-" + std::string(static_cast<std::size_t>(width) - idx.size(), '0') + idx;
            if (const auto* d = std::get_if<DiskPlacement>(&g.placement)) {
                const double r = d->radius_m * std::sqrt(rng.uniform());
                const double a = 2.0 * std::numbers::pi * rng.uniform();
                u.pos = {d->center.x + r * std::cos(a), d->center.y + r * std::sin(a)};
            } else {
                const auto& rect = std::get<RectPlacement>(g.placement);
                u.pos = {rng.uniform(rect.x_min, rect.x_max), rng.uniform(rect.y_min, rect.y_max)};
            }
            u.velocity = {g.speed_mps, g.bearing_deg};
            u.five_qi = g.five_qi;
            u.kind = g.kind;
            u.traffic = g.traffic;
            sim.ues.push_back(std::move(u));
        }
    }
    return sim;
}

}  // namespace oran::scenario
