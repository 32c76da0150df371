#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "oran/wireless/radio.hpp"

namespace oran::ransim {

enum class UeKind { Mobile, IotLegit, IotAdversary };

std::string_view to_string(UeKind k);
std::optional<UeKind> parse_ue_kind(std::string_view s);

struct Velocity {
    double speed_mps = 0.0;
    /// Degrees counter-clockwise from +x; 90 is "north".
    double bearing_deg = 0.0;
};

struct NoTraffic {};

/// Connection requests with exponential inter-arrival gaps.
struct PoissonTraffic {
    double rate_per_hour = 5.0;
};

/// Poisson-timed attacks, each a burst of evenly spaced requests.
struct AttackTraffic {
    double attacks_per_day = 3.0;
    int burst_len = 100;
    double burst_gap_s = 5.0;
};

using TrafficSpec = std::variant<NoTraffic, PoissonTraffic, AttackTraffic>;

struct CellConfig {
    std::string id;
    wireless::Position pos;
    std::vector<wireless::Beam> beams;
    int prb_count = 100;
    wireless::PropagationParams prop;
    wireless::TaConfig ta;
    double per_prb_rate_bps = 1.0e6;
    double failure_threshold_dbm = -100.0;
    int failure_n_consecutive = 3;
    std::vector<wireless::AttenuationZone> zones;
};

struct UeConfig {
    std::string id;
    wireless::Position pos;
    Velocity velocity;
    int five_qi = 1;
    UeKind kind = UeKind::Mobile;
    TrafficSpec traffic = NoTraffic{};
};

enum class BoundaryMode { Bounce, Wrap };

struct Bounds {
    double x_min = -1000.0;
    double y_min = -1000.0;
    double x_max = 1000.0;
    double y_max = 1000.0;
    BoundaryMode mode = BoundaryMode::Bounce;

    bool contains(const wireless::Position& p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }
};

/// Fully expanded simulation input: every UE is listed explicitly.
struct SimConfig {
    std::uint64_t seed = 1;
    double duration_s = 0.0;
    double tick_s = 0.02;
    Bounds bounds;
    std::vector<CellConfig> cells;
    std::vector<UeConfig> ues;
    wireless::LocalizationTechnique localization = wireless::LocalizationTechnique::Perfect;
    /// Keep one serving record per mobile UE per tick.
    bool record_serving = true;
    /// Namespace for traffic and shadowing streams, so a training pass can
    /// reuse the deployment while drawing fresh traffic.
    std::string rng_phase = "eval";
};

/// Field-level diagnostics; empty when the config is runnable.
std::vector<std::string> validate(const SimConfig& cfg);

/// Advances a position along a velocity for dt seconds, reflecting or
/// wrapping at the bounds. The bearing is updated on reflection.
void advance(wireless::Position& pos, Velocity& vel, double dt, const Bounds& bounds);

}  // namespace oran::ransim
