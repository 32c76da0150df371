#include "oran/ransim/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "oran/rng.hpp"

namespace oran::ransim {

std::string_view to_string(AttemptOutcome o) {
    return o == AttemptOutcome::Accepted ? "ACCEPTED" : "REJECTED_BLACKLIST";
}

std::string format_time(SimTime t) {
    const char* sign = t < 0 ? "-" : "";
    const auto mag = static_cast<unsigned long long>(t < 0 ? -t : t);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%llu.%06llu", sign, mag / 1'000'000ULL, mag % 1'000'000ULL);
    return buf;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::size_t SimulationTrace::mobile_ue_count() const {
    return static_cast<std::size_t>(std::count(ue_kinds.begin(), ue_kinds.end(), UeKind::Mobile));
}

void write_attempts_csv(std::ostream& os, const SimulationTrace& t) {
    os << "time_s,ue_id,ue_kind,cell_id,ta,outcome\n";
    for (const auto& a : t.attempts) {
        os << format_time(a.time) << ',' << a.ue_id << ',' << to_string(a.ue_kind) << ',' << a.cell_id << ','
           << a.ta << ',' << to_string(a.outcome) << '\n';
    }
}

void write_handovers_csv(std::ostream& os, const SimulationTrace& t) {
    os << "time_s,ue_id,from_cell,to_cell,xapp_id\n";
    for (const auto& h : t.handovers) {
        os << format_time(h.time) << ',' << h.ue_id << ',' << h.from_cell << ',' << h.to_cell << ',' << h.xapp_id
           << '\n';
    }
}

void write_beam_events_csv(std::ostream& os, const SimulationTrace& t) {
    os << "time_s,ue_id,cell_id,old_beam,new_beam,reason,xapp_id\n";
    for (const auto& b : t.beam_events) {
        os << format_time(b.time) << ',' << b.ue_id << ',' << b.cell_id << ',' << b.old_beam << ',' << b.new_beam
           << ',' << b.reason << ',' << b.xapp_id << '\n';
    }
}

void write_beam_failures_csv(std::ostream& os, const SimulationTrace& t) {
    os << "time_s,ue_id,cell_id,beam_id\n";
    for (const auto& f : t.beam_failures) {
        os << format_time(f.time) << ',' << f.ue_id << ',' << f.cell_id << ',' << f.beam_id << '\n';
    }
}

void write_prb_alloc_csv(std::ostream& os, const SimulationTrace& t) {
    os << "time_s,cell_id,slice_id,share,prbs\n";
    for (const auto& p : t.prb_allocations) {
        os << format_time(p.time) << ',' << p.cell_id << ',' << p.slice_id << ',' << format_double(p.share) << ','
           << p.prbs << '\n';
    }
}

void write_serving_csv(std::ostream& os, const SimulationTrace& t) {
    os << "time_s,ue_id,cell_id,beam_id\n";
    for (const auto& s : t.serving) {
        os << format_time(s.time) << ',' << t.ue_ids[s.ue] << ',' << (s.cell >= 0 ? t.cell_ids[s.cell] : "") << ','
           << s.beam << '\n';
    }
}

std::uint64_t SimulationTrace::checksum() const {
    std::ostringstream os;
    write_attempts_csv(os, *this);
    write_handovers_csv(os, *this);
    write_beam_events_csv(os, *this);
    write_beam_failures_csv(os, *this);
    write_prb_alloc_csv(os, *this);
    write_serving_csv(os, *this);
    for (const auto& b : attack_bursts) os << b.time << ',' << b.ue_id << '\n';
    for (const auto& b : blacklists) os << b.time << ',' << b.cell_id << ',' << b.ta << ',' << b.expires << '\n';
    return fnv1a64(os.str());
}

}  // namespace oran::ransim
