#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "oran/ransim/types.hpp"
#include "oran/sim_time.hpp"

namespace oran::ransim {

enum class AttemptOutcome { Accepted, RejectedBlacklist };

std::string_view to_string(AttemptOutcome o);

struct ConnectionAttempt {
    SimTime time = 0;
    std::string ue_id;
    std::string cell_id;
    std::int64_t ta = 0;
    AttemptOutcome outcome = AttemptOutcome::Accepted;
    UeKind ue_kind = UeKind::Mobile;
};

struct HandoverRecord {
    SimTime time = 0;
    std::string ue_id;
    std::string from_cell;  // empty when the UE was unserved
    std::string to_cell;
    std::string xapp_id;
};

struct BeamEvent {
    SimTime time = 0;
    std::string ue_id;
    std::string cell_id;
    int old_beam = -1;
    int new_beam = -1;
    std::string reason;
    std::string xapp_id;
};

struct BeamFailureEvent {
    SimTime time = 0;
    std::string ue_id;
    std::string cell_id;
    int beam_id = -1;
};

struct PrbAllocation {
    SimTime time = 0;
    std::string cell_id;
    std::string slice_id;
    double share = 0.0;
    int prbs = 0;
};

/// Serving state after the tick's controls were applied; -1 means none.
struct ServingRecord {
    SimTime time = 0;
    std::uint32_t ue = 0;
    std::int32_t cell = -1;
    std::int32_t beam = -1;
};

struct AttackBurst {
    SimTime time = 0;
    std::string ue_id;
};

struct BlacklistRecord {
    SimTime time = 0;
    std::string cell_id;
    std::int64_t ta = 0;
    SimTime expires = 0;
};

struct SimulationTrace {
    double duration_s = 0.0;
    double tick_s = 0.0;
    std::int64_t ticks = 0;
    std::vector<std::string> cell_ids;
    std::vector<std::string> ue_ids;
    std::vector<UeKind> ue_kinds;

    std::vector<ConnectionAttempt> attempts;
    std::vector<HandoverRecord> handovers;
    std::vector<BeamEvent> beam_events;
    std::vector<BeamFailureEvent> beam_failures;
    std::vector<PrbAllocation> prb_allocations;
    std::vector<ServingRecord> serving;
    std::vector<AttackBurst> attack_bursts;
    std::vector<BlacklistRecord> blacklists;

    std::size_t mobile_ue_count() const;
    /// FNV-1a over every CSV export; equal traces hash equal.
    std::uint64_t checksum() const;
};

/// CSV exports with fixed headers and column order.
void write_attempts_csv(std::ostream& os, const SimulationTrace& t);
void write_handovers_csv(std::ostream& os, const SimulationTrace& t);
void write_beam_events_csv(std::ostream& os, const SimulationTrace& t);
void write_beam_failures_csv(std::ostream& os, const SimulationTrace& t);
void write_prb_alloc_csv(std::ostream& os, const SimulationTrace& t);
void write_serving_csv(std::ostream& os, const SimulationTrace& t);

/// Seconds on the microsecond clock, always six decimals.
std::string format_time(SimTime t);
/// Shortest round-trip representation of a double.
std::string format_double(double v);

}  // namespace oran::ransim
