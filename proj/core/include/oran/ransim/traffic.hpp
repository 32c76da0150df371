#pragma once

#include <vector>

#include "oran/rng.hpp"

namespace oran::ransim {

/// Arrival times in [0, duration) with i.i.d. exponential gaps of mean
/// 3600 / rate seconds; strictly increasing. Throws for rate <= 0.
std::vector<double> legit_traffic(double rate_per_hour, double duration_s, Rng& rng);

struct AttackSchedule {
    std::vector<double> burst_starts;
    /// Every request of every burst, sorted, all in [0, duration).
    std::vector<double> requests;
};

/// Attack starts form a Poisson process with the given daily rate; each
/// attack issues burst_len requests spaced burst_gap_s apart.
AttackSchedule adversary_traffic(double attacks_per_day, int burst_len, double burst_gap_s, double duration_s,
                                 Rng& rng);

}  // namespace oran::ransim
