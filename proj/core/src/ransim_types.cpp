#include "oran/ransim/types.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace oran::ransim {

std::string_view to_string(UeKind k) {
    switch (k) {
        case UeKind::Mobile: return "MOBILE";
        case UeKind::IotLegit: return "IOT_LEGIT";
        case UeKind::IotAdversary: return "IOT_ADVERSARY";
    }
    return "";
}

std::optional<UeKind> parse_ue_kind(std::string_view s) {
    if (s == "MOBILE") return UeKind::Mobile;
    if (s == "IOT_LEGIT") return UeKind::IotLegit;
    if (s == "IOT_ADVERSARY") return UeKind::IotAdversary;
    return std::nullopt;
}

std::vector<std::string> validate(const SimConfig& cfg) {
    std::vector<std::string> errors;
    if (!std::isfinite(cfg.duration_s) || cfg.duration_s < 0.0) errors.emplace_back("duration_s: must be >= 0");
    if (!std::isfinite(cfg.tick_s) || !(cfg.tick_s > 0.0)) errors.emplace_back("tick_s: must be > 0");
    const auto& b = cfg.bounds;
    if (!(b.x_min < b.x_max) || !(b.y_min < b.y_max)) errors.emplace_back("bounds: min must be below max");
    if (cfg.cells.empty()) errors.emplace_back("cells: at least one cell is required");

    std::set<std::string> ids;
    for (std::size_t i = 0; i < cfg.cells.size(); ++i) {
        const auto& c = cfg.cells[i];
        const std::string at = "cells[" + std::to_string(i) + "]";
        if (c.id.empty() || !ids.insert(c.id).second) errors.push_back(at + ".id: must be unique and non-empty");
        if (c.prb_count <= 0) errors.push_back(at + ".prb_count: must be > 0");
        if (!(c.per_prb_rate_bps > 0.0)) errors.push_back(at + ".per_prb_rate_bps: must be > 0");
        if (c.failure_n_consecutive < 1) errors.push_back(at + ".failure_n_consecutive: must be >= 1");
        if (!wireless::is_valid_scs_khz(c.ta.scs_khz)) errors.push_back(at + ".scs_khz: must be 15, 30, 60, 120 or 240");
        try {
            wireless::validate(c.prop);
        } catch (const std::exception& e) {
            errors.push_back(at + ".propagation: " + e.what());
        }
        std::set<int> beam_ids;
        for (const auto& beam : c.beams) {
            if (!beam_ids.insert(beam.beam_id).second) errors.push_back(at + ".beams: duplicate beam id");
            if (beam.beam_id < 0 || beam.beam_id >= static_cast<int>(c.beams.size())) {
                errors.push_back(at + ".beams: ids must be 0..B-1");
            }
            if (!(beam.beamwidth_3db_deg > 0.0) || !(beam.max_attenuation_db > 0.0)) {
                errors.push_back(at + ".beams: beamwidth and max attenuation must be > 0");
            }
        }
    }

    std::set<std::string> ue_ids;
    for (std::size_t i = 0; i < cfg.ues.size(); ++i) {
        const auto& u = cfg.ues[i];
        const std::string at = "ues[" + std::to_string(i) + "]";
        if (u.id.empty() || !ue_ids.insert(u.id).second) errors.push_back(at + ".id: must be unique and non-empty");
        if (!b.contains(u.pos)) errors.push_back(at + ".position: outside bounds");
        if (u.five_qi < 1) errors.push_back(at + ".five_qi: must be >= 1");
        if (!(u.velocity.speed_mps >= 0.0) || !std::isfinite(u.velocity.speed_mps)) {
            errors.push_back(at + ".speed_mps: must be >= 0");
        }
        if (const auto* p = std::get_if<PoissonTraffic>(&u.traffic); p && !(p->rate_per_hour > 0.0)) {
            errors.push_back(at + ".traffic.rate_per_hour: must be > 0");
        }
        if (const auto* a = std::get_if<AttackTraffic>(&u.traffic)) {
            if (a->burst_len < 1) errors.push_back(at + ".traffic.burst_len: must be >= 1");
            if (!(a->burst_gap_s > 0.0)) errors.push_back(at + ".traffic.burst_gap_s: must be > 0");
            if (!(a->attacks_per_day >= 0.0)) errors.push_back(at + ".traffic.attacks_per_day: must be >= 0");
        }
    }
    return errors;
}

namespace {

// Folds a coordinate back into [lo, hi]; returns true when the fold leaves
// it on a backward leg, i.e. after an odd number of reflections.
bool reflect(double& v, double lo, double hi) {
    const double span = hi - lo;
    double r = std::fmod(v - lo, 2.0 * span);
    if (r < 0.0) r += 2.0 * span;
    const bool backward = r > span;
    v = backward ? lo + 2.0 * span - r : lo + r;
    return backward;
}

double wrap(double v, double lo, double hi) {
    const double span = hi - lo;
    double r = std::fmod(v - lo, span);
    if (r < 0.0) r += span;
    return lo + r;
}

}  // namespace

void advance(wireless::Position& pos, Velocity& vel, double dt, const Bounds& bounds) {
    if (vel.speed_mps == 0.0 || dt == 0.0) return;
    const double rad = vel.bearing_deg * std::numbers::pi / 180.0;
    double vx = vel.speed_mps * std::cos(rad);
    double vy = vel.speed_mps * std::sin(rad);
    double x = pos.x + vx * dt;
    double y = pos.y + vy * dt;
    if (bounds.mode == BoundaryMode::Wrap) {
        pos = {wrap(x, bounds.x_min, bounds.x_max), wrap(y, bounds.y_min, bounds.y_max)};
        return;
    }
    bool flipped = false;
    if (x < bounds.x_min || x > bounds.x_max) {
        if (reflect(x, bounds.x_min, bounds.x_max)) {
            vx = -vx;
            flipped = true;
        }
    }
    if (y < bounds.y_min || y > bounds.y_max) {
        if (reflect(y, bounds.y_min, bounds.y_max)) {
            vy = -vy;
            flipped = true;
        }
    }
    pos = {x, y};
    if (flipped) {
        vel.bearing_deg = wireless::normalize_angle_deg(std::atan2(vy, vx) * 180.0 / std::numbers::pi);
    }
}

}  // namespace oran::ransim
