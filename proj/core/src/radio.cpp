#include "oran/wireless/radio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace oran::wireless {

namespace {
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double normalize_angle_deg(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r < 0.0) {
        r += 360.0;
    }
    return r >= 360.0 ? 0.0 : r;
}

double wrap_angle_deg(double deg) {
    double r = normalize_angle_deg(deg);
    return r > 180.0 ? r - 360.0 : r;
}

double azimuth_deg(const Position& from, const Position& to) {
    return normalize_angle_deg(std::atan2(to.y - from.y, to.x - from.x) * kRadToDeg);
}

void validate(const PropagationParams& p) {
    if (!(p.exponent > 0.0) || !std::isfinite(p.exponent)) {
        throw std::invalid_argument("propagation exponent must be > 0");
    }
    if (!(p.ref_loss_db > 0.0) || !std::isfinite(p.ref_loss_db)) {
        throw std::invalid_argument("propagation ref_loss_db must be > 0");
    }
    if (!(p.shadowing_sigma_db >= 0.0) || !std::isfinite(p.shadowing_sigma_db)) {
        throw std::invalid_argument("propagation shadowing_sigma_db must be >= 0");
    }
    if (!std::isfinite(p.tx_power_dbm)) {
        throw std::invalid_argument("propagation tx_power_dbm must be finite");
    }
}

std::vector<Beam> make_grid_of_beams(int count, double sector_center_deg, double sector_width_deg,
                                     double beamwidth_3db_deg, double max_gain_db,
                                     double max_attenuation_db) {
    std::vector<Beam> beams;
    beams.reserve(static_cast<std::size_t>(std::max(count, 0)));
    const double step = sector_width_deg / count;
    const double first = sector_center_deg - sector_width_deg / 2.0 + step / 2.0;
    for (int i = 0; i < count; ++i) {
        beams.push_back(Beam{i, normalize_angle_deg(first + step * i), beamwidth_3db_deg,
                             max_gain_db, max_attenuation_db});
    }
    return beams;
}

double localization_sigma_m(LocalizationTechnique tech) {
    switch (tech) {
        case LocalizationTechnique::Perfect: return 0.0;
        case LocalizationTechnique::Rtk: return 0.01;
        case LocalizationTechnique::Dgps: return 1.0;
        case LocalizationTechnique::Gps: return 6.0;
    }
    return 0.0;
}

std::string_view to_string(LocalizationTechnique tech) {
    switch (tech) {
        case LocalizationTechnique::Perfect: return "PERFECT";
        case LocalizationTechnique::Rtk: return "RTK";
        case LocalizationTechnique::Dgps: return "DGPS";
        case LocalizationTechnique::Gps: return "GPS";
    }
    return "PERFECT";
}

std::optional<LocalizationTechnique> parse_localization(std::string_view name) {
    if (name == "PERFECT") return LocalizationTechnique::Perfect;
    if (name == "RTK") return LocalizationTechnique::Rtk;
    if (name == "DGPS") return LocalizationTechnique::Dgps;
    if (name == "GPS") return LocalizationTechnique::Gps;
    return std::nullopt;
}

bool is_valid_scs_khz(int scs_khz) {
    return scs_khz == 15 || scs_khz == 30 || scs_khz == 60 || scs_khz == 120 || scs_khz == 240;
}

int TaConfig::mu() const {
    switch (scs_khz) {
        case 15: return 0;
        case 30: return 1;
        case 60: return 2;
        case 120: return 3;
        case 240: return 4;
        default:
            throw std::invalid_argument("unsupported subcarrier spacing " + std::to_string(scs_khz) +
                                        " kHz");
    }
}

double TaConfig::resolution_m() const {
    // c * 16 * 64 * Tc / 2^(mu+1), Tc = 1 / (480000 * 4096) s. The product is
    // exactly 78.125 m at mu = 0 when c = 3e8 m/s.
    return 78.125 / static_cast<double>(1 << mu());
}

double pathloss_db(double d_m, const PropagationParams& p) {
    if (!(d_m > 0.0)) {
        throw std::domain_error("pathloss distance must be > 0");
    }
    return p.ref_loss_db + 10.0 * p.exponent * std::log10(d_m);
}

double beam_gain_db(const Beam& beam, double azimuth) {
    const double offset = wrap_angle_deg(azimuth - beam.boresight_deg) / beam.beamwidth_3db_deg;
    return beam.max_gain_db - std::min(12.0 * offset * offset, beam.max_attenuation_db);
}

double rsrp_dbm(const Position& ue, const Position& cell, const Beam* beam,
                const PropagationParams& p, double shadowing_db) {
    const double d = distance(ue, cell);
    if (!(d > 0.0)) {
        throw std::domain_error("UE position coincides with the cell site");
    }
    double gain = 0.0;
    if (beam != nullptr) {
        gain = beam_gain_db(*beam, azimuth_deg(cell, ue));
    }
    return p.tx_power_dbm - pathloss_db(d, p) + gain + shadowing_db;
}

std::int64_t ta_index(double d_m, const TaConfig& ta) {
    if (!(d_m >= 0.0)) {
        throw std::domain_error("timing-advance distance must be >= 0");
    }
    const double step = ta.resolution_m();
    auto k = static_cast<std::int64_t>(std::floor(d_m / step));
    // The quotient can round across a bin edge; settle on the bin whose
    // product with the step actually brackets d.
    if (static_cast<double>(k) * step > d_m) {
        --k;
    } else if (static_cast<double>(k + 1) * step <= d_m) {
        ++k;
    }
    return k;
}

Position noisy_position(const Position& true_pos, LocalizationTechnique tech, Rng& rng) {
    const double sigma = localization_sigma_m(tech);
    if (sigma == 0.0) {
        return true_pos;
    }
    const double dx = rng.normal(0.0, sigma);
    const double dy = rng.normal(0.0, sigma);
    return Position{true_pos.x + dx, true_pos.y + dy};
}

bool AttenuationZone::affects(int beam_id) const {
    return beam_ids.empty() || std::find(beam_ids.begin(), beam_ids.end(), beam_id) != beam_ids.end();
}

double zone_attenuation_db(std::span<const AttenuationZone> zones, int beam_id, const Position& p) {
    double total = 0.0;
    for (const auto& z : zones) {
        if (z.affects(beam_id) && z.contains(p)) {
            total += z.attenuation_db;
        }
    }
    return total;
}

BeamFailureCounter::BeamFailureCounter(double threshold_dbm, int n_consecutive)
    : threshold_dbm_(threshold_dbm), n_consecutive_(n_consecutive) {
    if (n_consecutive < 1) {
        throw std::invalid_argument("n_consecutive must be >= 1");
    }
}

bool BeamFailureCounter::observe(double rsrp) {
    if (rsrp >= threshold_dbm_) {
        run_ = 0;
        return false;
    }
    if (++run_ >= n_consecutive_) {
        run_ = 0;
        return true;
    }
    return false;
}

}  // namespace oran::wireless
