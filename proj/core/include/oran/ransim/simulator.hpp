#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <tuple>
#include <string>
#include <string_view>
#include <vector>

#include "oran/rng.hpp"
#include "oran/ric/ric.hpp"
#include "oran/ransim/trace.hpp"
#include "oran/ransim/types.hpp"
#include "oran/wireless/radio.hpp"

namespace oran::ransim {

/// Thrown for a config that fails validation; carries every diagnostic.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<std::string> diagnostics);
    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

/// Events at the same instant run in this order, then by UE id.
enum class EventKind : std::uint8_t {
    MoveTick,
    MeasurementTick,
    ConnectionRequest,
    AttackBurstStart,
    ReportDue,
    PolicyExpiry,
};

/// Splits `total` PRBs by the largest-remainder method. Shares must be
/// non-negative and sum to at most 1; the result sums to
/// floor(total * sum(shares)) and equals `total` when the shares sum to 1.
/// Remainder ties go to the earlier key.
std::map<std::string, int> largest_remainder(const std::map<std::string, double>& shares, int total);

struct CellState {
    CellConfig config;
    /// TA index -> expiry time; an entry blocks requests while t < expiry.
    std::map<std::int64_t, SimTime> blacklist;
    std::map<std::string, double> prb_shares;
    std::map<std::string, int> prb_split;

    bool blacklisted(std::int64_t ta, SimTime t) const;
};

struct UeState {
    UeConfig config;
    wireless::Position pos;
    Velocity velocity;
    std::int32_t serving_cell = -1;
    std::int32_t serving_beam = -1;
    std::vector<double> shadowing_db;  // per cell, fixed for the run
    wireless::BeamFailureCounter failure_counter{-100.0, 3};
};

/// Deterministic discrete-event RAN: one abstract E2 node per cell.
class Simulator final : public ric::E2Agent {
public:
    explicit Simulator(SimConfig cfg);

    /// Runs the event loop over [0, duration]. `bootstrap` runs after the xApps
    /// have started and initial attach is done, before the first event.
    SimulationTrace run(ric::Ric& ric, const std::function<void(ric::Ric&)>& bootstrap = {});

    // E2Agent
    std::vector<std::string> cell_ids() const override;
    bool has_cell(std::string_view cell_id) const override;
    bool has_ue(std::string_view ue_id) const override;
    void on_subscription(const ric::Subscription& sub) override;
    std::optional<std::string> apply_control(const ric::ControlPayload& ctrl, std::string_view xapp_id,
                                             SimTime t) override;
    std::optional<std::string> apply_policy(const ric::E2PolicyPayload& policy, SimTime t) override;

    /// Applies the TA rule to one request and records the attempt.
    ConnectionAttempt handle_connection_request(std::size_t cell, std::size_t ue, SimTime t);

    /// Initial access: every UE camps on its strongest cell and beam.
    void attach_all();

    const SimConfig& config() const { return cfg_; }
    std::span<const CellState> cells() const { return cells_; }
    std::span<const UeState> ues() const { return ues_; }
    const SimulationTrace& trace() const { return trace_; }
    std::optional<std::size_t> cell_index(std::string_view id) const;
    std::optional<std::size_t> ue_index(std::string_view id) const;

    /// Per-beam RSRP (dBm) of UE u from cell c, including shadowing and
    /// attenuation zones. A beamless cell yields a single entry.
    std::vector<double> beam_rsrp(std::size_t ue, std::size_t cell) const;
    double cell_rsrp(std::size_t ue, std::size_t cell) const;

private:
    struct Event {
        SimTime time;
        EventKind kind;
        std::uint32_t rank;
        std::uint64_t seq;
        std::uint64_t arg;

        bool operator>(const Event& o) const {
            return std::tie(time, kind, rank, seq) > std::tie(o.time, o.kind, o.rank, o.seq);
        }
    };

    struct SubCursor {
        ric::Subscription sub;
        SimTime last_report = 0;
        std::map<std::string, std::size_t> attempt_cursor;  // per cell
        std::map<std::string, std::int64_t> failures_seen;
        std::map<std::string, std::int64_t> switches_seen;
    };

    struct Measurement {
        double cell_rsrp = 0.0;
        std::vector<double> beams;
    };

    void push(SimTime t, EventKind kind, std::uint32_t rank, std::uint64_t arg);
    void schedule_traffic();
    void on_move_tick();
    void on_measurement_tick(SimTime t);
    void on_report_due(std::size_t cursor, SimTime t);
    void record_serving(SimTime t);
    void refresh_measurements(SimTime t);
    ric::ReportPayload build_report(SubCursor& cursor, const std::string& cell_id, SimTime t);

    SimConfig cfg_;
    std::vector<CellState> cells_;
    std::vector<UeState> ues_;
    std::vector<std::uint32_t> ue_rank_;
    std::map<std::string, std::size_t, std::less<>> cell_by_id_;
    std::map<std::string, std::size_t, std::less<>> ue_by_id_;
    std::vector<std::size_t> mobile_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    std::uint64_t seq_ = 0;
    ric::Ric* ric_ = nullptr;
    SimTime duration_ = 0;
    SimTime tick_ = 0;
    bool ticking_ = false;
    std::vector<SubCursor> cursors_;
    std::vector<std::vector<std::size_t>> attempts_by_cell_;
    std::vector<std::int64_t> failures_by_cell_;
    std::vector<std::int64_t> switches_by_cell_;
    std::vector<std::vector<Measurement>> measurements_;  // [ue][cell]
    SimTime measured_at_ = -1;
    Rng location_rng_;
    SimulationTrace trace_;
};

}  // namespace oran::ransim
