#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "oran/ransim/types.hpp"
#include "oran/xapp/bmm.hpp"
#include "oran/xapp/qra.hpp"
#include "oran/xapp/ssd.hpp"
#include "oran/xapp/ts.hpp"

namespace oran::scenario {

/// Raised for anything wrong with a scenario file; maps to exit code 2.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<std::string> diagnostics);
    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

struct DiskPlacement {
    wireless::Position center;
    double radius_m = 0.0;
};

struct RectPlacement {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;
};

using Placement = std::variant<DiskPlacement, RectPlacement>;

/// `count` UEs drawn from a placement area; ids are "<prefix>-<index>" with
/// the index zero-padded so ids sort in creation order.
struct UeGroup {
    std::string prefix;
    int count = 0;
    ransim::UeKind kind = ransim::UeKind::Mobile;
    int five_qi = 1;
    Placement placement = RectPlacement{};
    double speed_mps = 0.0;
    double bearing_deg = 0.0;
    ransim::TrafficSpec traffic = ransim::NoTraffic{};
};

struct TsSettings {
    /// Defaults to calibration_offset() of the first cell's exponent.
    std::optional<double> preference_offset_db;
    double hysteresis_db = 0.0;
    double period_s = 0.02;
};

struct SsdSettings {
    xapp::SsdParams params;
    double training_days = 7.0;
};

struct BmmSettings {
    xapp::BmmParams params;
    double training_s = 60.0;
    double grid_cell_m = 5.0;
    double speed_bin_mps = 5.0;
    int speed_bins = 10;
    int bearing_bins = 16;
};

struct Variant {
    std::string name;
    /// Dotted key -> replacement value, applied to the base document.
    std::map<std::string, nlohmann::json> set;
};

struct ScenarioConfig {
    std::string name;
    std::uint64_t seed = 1;
    double duration_s = 0.0;
    double tick_s = 0.02;
    ransim::Bounds bounds;
    std::vector<ransim::CellConfig> cells;
    std::vector<ransim::UeConfig> ues;
    std::vector<UeGroup> groups;
    wireless::LocalizationTechnique localization = wireless::LocalizationTechnique::Perfect;
    double ei_delay_s = 0.0;
    bool record_serving = true;
    std::optional<TsSettings> ts;
    std::optional<xapp::QraParams> qra;
    std::optional<SsdSettings> ssd;
    std::optional<BmmSettings> bmm;
    std::vector<std::string> priority;
    std::vector<policy::A1Policy> policies;
    bool message_log = false;
    std::string output_dir;
    std::vector<Variant> variants;

    /// The document this config was parsed from (after overrides).
    nlohmann::json source;
};

/// Sets `value` at a dotted key ("ta.scs_khz", "cells.0.x"); intermediate
/// objects are created, array indices must exist. Throws ScenarioError.
void set_dotted(nlohmann::json& doc, const std::string& key, nlohmann::json value);

/// Parses "key=value"; the value is read as JSON when possible, otherwise
/// taken as a plain string.
std::pair<std::string, nlohmann::json> parse_assignment(const std::string& text);
nlohmann::json parse_value(const std::string& text);

/// Validates a scenario document with every unknown key rejected. Throws
/// ScenarioError carrying one diagnostic per problem.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::string& path, const std::map<std::string, nlohmann::json>& overrides = {});

/// The base document with one variant's assignments applied.
ScenarioConfig variant_config(const ScenarioConfig& base, const Variant& v);

/// Materializes UE groups into explicit UEs. `placement_phase` names the
/// placement stream, so a training pass can draw a fresh population.
ransim::SimConfig expand(const ScenarioConfig& cfg, const std::string& placement_phase = "eval");

}  // namespace oran::scenario
