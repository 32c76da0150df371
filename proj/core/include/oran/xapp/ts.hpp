#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oran/policy/a1_policy.hpp"
#include "oran/ransim/trace.hpp"
#include "oran/ric/ric.hpp"
#include "oran/ric/xapp.hpp"

namespace oran::xapp {

/// Preference offset that moves the equal-score point of two cells to 3/4 of
/// the segment between them under log-distance path loss: 10 n log10(3) dB.
double calibration_offset(double exponent);

struct TsParams {
    double preference_offset_db = 9.542425094393248;
    double hysteresis_db = 0.0;
    double period_s = 0.02;
};

/// Serving-cell decision for one UE. FORBID removes a cell outright; PREFER
/// and AVOID shift its score by +-offset. The serving cell is kept unless
/// another candidate beats it by more than the hysteresis; remaining ties go
/// to the smaller cell id. Returns nullopt when every reported cell is
/// forbidden.
std::optional<std::string> decide(const std::map<std::string, double>& rsrp_dbm,
                                  const std::optional<std::string>& serving,
                                  const policy::TsPreferenceBody* prefs, double offset_db, double hysteresis_db);

class TrafficSteeringXApp final : public ric::XApp {
public:
    explicit TrafficSteeringXApp(TsParams params, std::string id = "ts");

    const std::string& id() const override { return id_; }
    void start(ric::Ric& ric) override;
    void on_report(const ric::RicMessage& msg, ric::Ric& ric) override;
    bool accepts(policy::PolicyType type) const override { return type == policy::PolicyType::TsPreferences; }
    void on_a1_policy(const policy::A1Policy& p, ric::Ric& ric) override;
    void on_tick_end(SimTime t, ric::Ric& ric) override;

    const TsParams& params() const { return params_; }
    std::size_t handovers_requested() const { return requested_; }

private:
    struct UeView {
        std::optional<std::string> serving;
        std::map<std::string, double> rsrp;
    };

    std::string id_;
    TsParams params_;
    std::map<std::string, policy::TsPreferenceBody> prefs_;  // by UE id
    std::map<std::string, UeView> pending_;
    std::size_t requested_ = 0;
};

struct AssociationRow {
    std::string cell_id;  // empty for time spent unserved
    double seconds = 0.0;
    double fraction = 0.0;
};

/// Serving time per cell summed over every mobile UE's per-tick records.
/// Cells are listed in trace order; an unserved row follows when nonzero.
std::vector<AssociationRow> association(const ransim::SimulationTrace& trace);

void write_ts_association_csv(std::ostream& os, const std::vector<AssociationRow>& rows);

}  // namespace oran::xapp
