#include "oran/ransim/traffic.hpp"

#include <algorithm>
#include <stdexcept>

#include "oran/sim_time.hpp"

namespace oran::ransim {

namespace {

double positive_gap(double mean, Rng& rng) {
    double gap = rng.exponential(mean);
    while (gap <= 0.0) gap = rng.exponential(mean);
    return gap;
}

}  // namespace

std::vector<double> legit_traffic(double rate_per_hour, double duration_s, Rng& rng) {
    if (!(rate_per_hour > 0.0)) throw std::invalid_argument("traffic rate must be > 0");
    std::vector<double> times;
    const double mean_gap = 3600.0 / rate_per_hour;
    for (double t = positive_gap(mean_gap, rng); t < duration_s; t += positive_gap(mean_gap, rng)) {
        times.push_back(t);
    }
    return times;
}

AttackSchedule adversary_traffic(double attacks_per_day, int burst_len, double burst_gap_s, double duration_s,
                                 Rng& rng) {
    if (burst_len < 1) throw std::invalid_argument("burst_len must be >= 1");
    if (!(burst_gap_s > 0.0)) throw std::invalid_argument("burst_gap_s must be > 0");
    AttackSchedule out;
    if (!(attacks_per_day > 0.0)) return out;
    const double mean_gap = 86400.0 / attacks_per_day;
    for (double arrival = positive_gap(mean_gap, rng); arrival < duration_s; arrival += positive_gap(mean_gap, rng)) {
        // Snap the start to the clock grid so every in-burst gap is exact.
        const double t = to_seconds(from_seconds(arrival));
        out.burst_starts.push_back(t);
        for (int i = 0; i < burst_len; ++i) {
            const double r = t + burst_gap_s * i;
            if (r >= duration_s) break;
            out.requests.push_back(r);
        }
    }
    std::sort(out.requests.begin(), out.requests.end());
    return out;
}

}  // namespace oran::ransim
