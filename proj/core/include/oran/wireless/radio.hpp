#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "oran/rng.hpp"

namespace oran::wireless {

struct Position {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

double distance(const Position& a, const Position& b);

/// Azimuth of `to` seen from `from`, degrees counter-clockwise from +x, in [0, 360).
double azimuth_deg(const Position& from, const Position& to);

/// Maps an angle difference to [-180, 180].
double wrap_angle_deg(double deg);

/// Normalizes an angle to [0, 360).
double normalize_angle_deg(double deg);

struct PropagationParams {
    double ref_loss_db = 40.0;
    double exponent = 2.0;
    double tx_power_dbm = 30.0;
    double shadowing_sigma_db = 0.0;
};

/// Throws std::invalid_argument unless exponent > 0, ref_loss_db > 0 and sigma >= 0.
void validate(const PropagationParams& p);

struct Beam {
    int beam_id = 0;
    double boresight_deg = 0.0;
    double beamwidth_3db_deg = 15.0;
    double max_gain_db = 0.0;
    double max_attenuation_db = 30.0;
};

/// `count` beams with boresights evenly spread over a sector, each aimed at the
/// centre of its slice of the sector.
std::vector<Beam> make_grid_of_beams(int count, double sector_center_deg, double sector_width_deg,
                                     double beamwidth_3db_deg, double max_gain_db,
                                     double max_attenuation_db);

enum class LocalizationTechnique { Perfect, Rtk, Dgps, Gps };

/// Per-axis standard deviation of the position error in meters.
double localization_sigma_m(LocalizationTechnique tech);
std::string_view to_string(LocalizationTechnique tech);
std::optional<LocalizationTechnique> parse_localization(std::string_view name);

struct TaConfig {
    int scs_khz = 30;

    /// log2(scs / 15 kHz). Throws std::invalid_argument for a non-5G spacing.
    int mu() const;
    /// Distance covered by one timing-advance step, 78.125 / 2^mu meters.
    double resolution_m() const;
};

bool is_valid_scs_khz(int scs_khz);

/// Log-distance path loss. Throws std::domain_error for d <= 0.
double pathloss_db(double d_m, const PropagationParams& p);

/// Parabolic main lobe clipped at the attenuation floor.
double beam_gain_db(const Beam& beam, double azimuth_deg);

/// Throws std::domain_error when the UE sits on the cell site.
double rsrp_dbm(const Position& ue, const Position& cell, const Beam* beam,
                const PropagationParams& p, double shadowing_db);

/// Timing-advance index for a UE at distance d. Throws std::domain_error for d < 0.
std::int64_t ta_index(double d_m, const TaConfig& ta);

Position noisy_position(const Position& true_pos, LocalizationTechnique tech, Rng& rng);

/// Rectangular region where the listed beams (all beams when empty) suffer
/// extra attenuation, e.g. a building blocking part of the sector.
struct AttenuationZone {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;
    std::vector<int> beam_ids;
    double attenuation_db = 0.0;

    bool contains(const Position& p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }
    bool affects(int beam_id) const;
};

double zone_attenuation_db(std::span<const AttenuationZone> zones, int beam_id, const Position& p);

/// Radio-link monitoring rule shared by the E2 node and the beam-management
/// xApp: a failure fires when RSRP stays below the threshold for
/// `n_consecutive` ticks in a row, after which the run counter restarts.
class BeamFailureCounter {
public:
    BeamFailureCounter(double threshold_dbm, int n_consecutive);

    /// Feeds one tick; returns true when a failure fires on this tick.
    bool observe(double rsrp_dbm);
    void reset() { run_ = 0; }
    int run_length() const { return run_; }

private:
    double threshold_dbm_;
    int n_consecutive_;
    int run_ = 0;
};

}  // namespace oran::wireless
