#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "oran/rng.hpp"
#include "oran/wireless/radio.hpp"

using namespace oran;
using namespace oran::wireless;

TEST_CASE("pathloss follows the log-distance law") {
    PropagationParams p{40.0, 2.0, 30.0, 0.0};
    CHECK(pathloss_db(1.0, p) == doctest::Approx(40.0));
    CHECK(pathloss_db(100.0, p) == doctest::Approx(80.0));
    p.exponent = 3.5;
    CHECK(pathloss_db(10.0, p) == doctest::Approx(75.0));
    CHECK_THROWS_AS(pathloss_db(0.0, p), std::domain_error);
    CHECK_THROWS_AS(pathloss_db(-3.0, p), std::domain_error);
}

TEST_CASE("beam gain: parabolic lobe with floor") {
    Beam b{0, 30.0, 15.0, 20.0, 30.0};
    CHECK(beam_gain_db(b, 30.0) == doctest::Approx(20.0));
    CHECK(beam_gain_db(b, 45.0) == doctest::Approx(8.0));
    CHECK(beam_gain_db(b, 15.0) == doctest::Approx(8.0));
    CHECK(beam_gain_db(b, 210.0) == doctest::Approx(-10.0));
    // wraps across 0/360
    Beam w{0, 355.0, 10.0, 0.0, 30.0};
    CHECK(beam_gain_db(w, 5.0) == doctest::Approx(-12.0));
}

TEST_CASE("grid of beams spreads boresights over the sector") {
    const auto beams = make_grid_of_beams(8, 0.0, 120.0, 15.0, 20.0, 30.0);
    REQUIRE(beams.size() == 8);
    for (int i = 0; i < 8; ++i) {
        CHECK(beams[i].beam_id == i);
        CHECK(wrap_angle_deg(beams[i].boresight_deg - (-52.5 + 15.0 * i)) == doctest::Approx(0.0));
    }
}

TEST_CASE("rsrp adds tx, pathloss, gain and shadowing") {
    PropagationParams p{40.0, 2.0, 30.0, 0.0};
    CHECK(rsrp_dbm({1, 0}, {0, 0}, nullptr, p, 0.0) == doctest::Approx(-10.0));
    const double a = rsrp_dbm({30, 40}, {0, 0}, nullptr, p, 0.0);
    CHECK(rsrp_dbm({30, 40}, {0, 0}, nullptr, p, 5.0) - a == doctest::Approx(5.0));
    Beam b{0, azimuth_deg({0, 0}, {30, 40}), 15.0, 20.0, 30.0};
    CHECK(rsrp_dbm({30, 40}, {0, 0}, &b, p, 0.0) - a == doctest::Approx(20.0));
    CHECK_THROWS_AS(rsrp_dbm({2, 2}, {2, 2}, nullptr, p, 0.0), std::domain_error);
}

TEST_CASE("timing advance examples") {
    CHECK(TaConfig{15}.resolution_m() == 78.125);
    CHECK(TaConfig{240}.resolution_m() == 4.8828125);
    for (int scs : {15, 30, 60, 120, 240}) CHECK(ta_index(0.0, TaConfig{scs}) == 0);
    CHECK(ta_index(100.0, TaConfig{15}) == 1);
    CHECK(ta_index(100.0, TaConfig{240}) == 20);
    CHECK(ta_index(78.125, TaConfig{15}) == 1);
    CHECK_THROWS_AS(ta_index(-0.5, TaConfig{15}), std::domain_error);
    CHECK_THROWS_AS(TaConfig{45}.mu(), std::invalid_argument);
    CHECK_FALSE(is_valid_scs_khz(480));
}

TEST_CASE("timing advance brackets every distance") {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const double d = rng.uniform(0.0, 2000.0);
        for (int scs : {15, 30, 60, 120, 240}) {
            const TaConfig ta{scs};
            const double step = 78.125 / std::pow(2.0, ta.mu());
            const double residual = d - static_cast<double>(ta_index(d, ta)) * step;
            CHECK(residual >= 0.0);
            CHECK(residual < step);
        }
    }
}

TEST_CASE("localization noise statistics") {
    Rng rng(5);
    const Position p{12.0, -3.0};
    CHECK(noisy_position(p, LocalizationTechnique::Perfect, rng) == p);

    constexpr int n = 100000;
    double sx = 0, sxx = 0;
    for (int i = 0; i < n; ++i) {
        const double dx = noisy_position(p, LocalizationTechnique::Rtk, rng).x - p.x;
        sx += dx;
        sxx += dx * dx;
    }
    const double mean = sx / n;
    const double sd = std::sqrt((sxx - n * mean * mean) / (n - 1));
    CHECK(std::abs(sd - 0.01) < 0.0005);

    double gx = 0, gy = 0;
    for (int i = 0; i < n; ++i) {
        const auto q = noisy_position(p, LocalizationTechnique::Gps, rng);
        gx += q.x - p.x;
        gy += q.y - p.y;
    }
    CHECK(std::abs(gx / n) < 0.1);
    CHECK(std::abs(gy / n) < 0.1);

    CHECK(localization_sigma_m(LocalizationTechnique::Dgps) == 1.0);
    CHECK(localization_sigma_m(LocalizationTechnique::Gps) == 6.0);
    CHECK(parse_localization("GPS") == LocalizationTechnique::Gps);
    CHECK_FALSE(parse_localization("GLONASS").has_value());
}

TEST_CASE("attenuation zones apply to listed beams only") {
    std::vector<AttenuationZone> zones{{0, 0, 10, 10, {2}, 15.0}, {5, 5, 20, 20, {}, 4.0}};
    CHECK(zone_attenuation_db(zones, 2, {1, 1}) == 15.0);
    CHECK(zone_attenuation_db(zones, 1, {1, 1}) == 0.0);
    CHECK(zone_attenuation_db(zones, 2, {6, 6}) == 19.0);
    CHECK(zone_attenuation_db(zones, 7, {15, 15}) == 4.0);
    CHECK(zone_attenuation_db(zones, 7, {25, 15}) == 0.0);
}

TEST_CASE("beam failure counter restarts after firing") {
    BeamFailureCounter c(-100.0, 2);
    int fired = 0;
    for (int i = 0; i < 5; ++i) fired += c.observe(-110.0);
    CHECK(fired == 2);
    CHECK(c.run_length() == 1);
    CHECK_FALSE(c.observe(-90.0));
    CHECK(c.run_length() == 0);
    CHECK_FALSE(c.observe(-100.0));  // at threshold is not below it
}

TEST_CASE("angles") {
    CHECK(azimuth_deg({0, 0}, {0, 1}) == doctest::Approx(90.0));
    CHECK(azimuth_deg({0, 0}, {0, -1}) == doctest::Approx(270.0));
    CHECK(wrap_angle_deg(190.0) == doctest::Approx(-170.0));
    CHECK(normalize_angle_deg(-10.0) == doctest::Approx(350.0));
}

TEST_CASE("rng streams are reproducible and distinct") {
    Rng a = Rng::derive(7, "traffic/ue-1");
    Rng b = Rng::derive(7, "traffic/ue-1");
    Rng c = Rng::derive(7, "traffic/ue-2");
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 16; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        seen.insert(c.next_u64());
    }
    CHECK(seen.size() == 16);
    for (int i = 0; i < 1000; ++i) CHECK(a.below(7) < 7);
}
