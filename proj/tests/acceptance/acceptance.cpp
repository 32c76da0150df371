// Acceptance checks. Prints one PASS/FAIL line per criterion; the exit code
// is nonzero when any sub-check fails that is not listed in --expect-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "../support/dbscan_oracle.hpp"
#include "oran/policy/a1_policy.hpp"
#include "oran/rng.hpp"
#include "oran/scenario/config.hpp"
#include "oran/scenario/runner.hpp"
#include "oran/wireless/radio.hpp"
#include "oran/xapp/rational.hpp"
#include "oran/xapp/ssd.hpp"

using namespace oran;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kRoot = ORAN_SOURCE_DIR;

struct Check {
    std::string id;  // "3.c"
    bool ok = false;
    std::string detail;
};

struct Outcome {
    std::vector<Check> checks;
    void add(std::string id, bool ok, std::string detail) { checks.push_back({std::move(id), ok, std::move(detail)}); }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load_doc(const std::string& name) { return json::parse(slurp(kRoot / "scenarios" / name)); }

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("oran-acceptance-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// ---------------------------------------------------------------- 1

Outcome ts_table() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto base = scenario::load_scenario((kRoot / "scenarios" / "ts_table.json").string());
    // variant -> expected percent on c1 (c2 is the rest)
    const std::map<std::string, double> expected{{"NONE", 50},      {"PREFER@c1", 75}, {"PREFER@c2", 25},
                                                 {"AVOID@c1", 25},  {"AVOID@c2", 75},  {"FORBID@c1", 0},
                                                 {"FORBID@c2", 100}};
    std::set<std::string> seen;
    bool within = true, forbid_exact = true;
    std::ostringstream detail;
    for (const auto& v : base.variants) {
        const auto run = scenario::run_scenario(scenario::variant_config(base, v));
        const double c1 = 100.0 * run.metric("ts_fraction_c1").value_or(-1);
        const double c2 = 100.0 * run.metric("ts_fraction_c2").value_or(-1);
        const auto it = expected.find(v.name);
        if (it == expected.end()) continue;
        seen.insert(v.name);
        detail << v.name << "=" << fmt("%.2f", c1) << "/" << fmt("%.2f", c2) << " ";
        within = within && std::abs(c1 - it->second) <= 2.0 && std::abs(c2 - (100.0 - it->second)) <= 2.0;
        if (v.name.rfind("FORBID", 0) == 0) forbid_exact = forbid_exact && c1 == it->second && c2 == 100.0 - it->second;
    }
    const double elapsed = seconds_since(t0);
    out.add("1.a", seen.size() == expected.size(), "rows " + std::to_string(seen.size()) + "/7");
    out.add("1.b", within, detail.str());
    out.add("1.c", forbid_exact, "FORBID exact");
    out.add("1.d", elapsed < 5.0, fmt("%.2fs", elapsed));
    return out;
}

// ---------------------------------------------------------------- 2

Outcome qra_table() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    using xapp::Rational;
    // Bandwidth part per UE in percent.
    const std::map<std::string, std::vector<Rational>> expected_pct{
        {"EQUAL", {Rational(25, 2), Rational(25, 2), 25, Rational(25, 2), 25, Rational(25, 2)}},
        {"PREFER-3", {Rational(25, 4), Rational(25, 4), Rational(25, 2), Rational(25, 4), Rational(125, 2), Rational(25, 4)}},
        {"RESERVE", {5, 10, 40, 10, 30, 5}}};
    const auto base = scenario::load_scenario((kRoot / "scenarios" / "qra_table.json").string());
    int matched = 0;
    std::ostringstream bad;
    for (const auto& v : base.variants) {
        const auto it = expected_pct.find(v.name);
        if (it == expected_pct.end()) continue;
        const auto run = scenario::run_scenario(scenario::variant_config(base, v));
        std::map<std::string, std::optional<Rational>> latest;
        for (const auto& r : run.qra_shares.value_or(std::vector<xapp::UeShareRecord>{})) latest[r.ue_id] = r.exact;
        for (int i = 0; i < 6; ++i) {
            const std::string ue = "ue-" + std::to_string(i + 1);
            const auto got = latest.count(ue) ? latest[ue] : std::nullopt;
            if (got && *got * Rational(100) == it->second[i]) {
                ++matched;
            } else {
                bad << v.name << "/" << ue << "=" << (got ? (*got * Rational(100)).to_string() : "none") << " ";
            }
        }
    }
    const double elapsed = seconds_since(t0);
    out.add("2.a", matched == 18, std::to_string(matched) + "/18 exact " + bad.str());
    out.add("2.b", elapsed < 5.0, fmt("%.2fs", elapsed));
    return out;
}

// ---------------------------------------------------------------- 3

double mean_of(const scenario::SweepRow& row, const std::string& metric) {
    for (std::size_t i = 0; i < row.metric_names.size(); ++i)
        if (row.metric_names[i] == metric) return row.stats[i].mean;
    return std::nan("");
}

Outcome ssd_sweep() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    scenario::SweepOptions opts;
    opts.param = "ta.scs_khz";
    opts.values = {15, 30, 60, 120, 240};
    opts.seeds = 20;
    const auto rows = scenario::sweep(load_doc("ssd_scs_sweep.json"), opts);
    const double elapsed = seconds_since(t0);
    std::vector<double> r;
    std::ostringstream detail;
    for (const auto& row : rows) {
        r.push_back(mean_of(row, "rejected_legit_ratio"));
        detail << row.value << "kHz=" << fmt("%.4f", 100.0 * r.back()) << "% ";
    }
    bool monotone = r.size() == 5;
    for (std::size_t i = 1; i < r.size(); ++i) monotone = monotone && r[i] <= r[i - 1];
    out.add("3.a", monotone, detail.str());
    out.add("3.b", r.size() == 5 && r[4] < 0.05, "240kHz < 5%");
    out.add("3.c", !r.empty() && r[0] > 0.40, "15kHz > 40%");
    out.add("3.d", elapsed < 120.0, fmt("%.1fs", elapsed));
    return out;
}

// ---------------------------------------------------------------- 4

Outcome bmm_sweep() {
    Outcome out;
    const json doc = load_doc("bmm_loc_sweep.json");
    const auto cfg = scenario::parse_scenario(doc);
    const auto sim = scenario::expand(cfg);
    out.add("4.a", sim.ues.size() == 300 && cfg.duration_s == 60.0,
            std::to_string(sim.ues.size()) + " UEs, " + fmt("%.0f s", cfg.duration_s));

    const auto t0 = std::chrono::steady_clock::now();
    scenario::SweepOptions opts;
    opts.param = "localization";
    opts.values = {"RTK", "DGPS", "GPS"};
    opts.seeds = 10;
    const auto rows = scenario::sweep(doc, opts);
    const double elapsed = seconds_since(t0);
    std::vector<double> f;
    for (const auto& row : rows) f.push_back(mean_of(row, "failures_per_user_s"));
    const bool have = f.size() == 3 && f[0] > 0.0;
    const double dgps = have ? f[1] / f[0] : 0.0;
    const double gps = have ? f[2] / f[0] : 0.0;
    out.add("4.b", have && f[0] < f[1] && f[1] < f[2],
            have ? "RTK=" + fmt("%.4f", f[0]) + " DGPS=" + fmt("%.4f", f[1]) + " GPS=" + fmt("%.4f", f[2]) : "no data");
    out.add("4.c", std::abs(dgps - 1.62) <= 0.5 * 1.62, "DGPS/RTK=" + fmt("%.2f", dgps));
    out.add("4.d", std::abs(gps - 4.19) <= 0.5 * 4.19, "GPS/RTK=" + fmt("%.2f", gps));
    out.add("4.e", elapsed < 180.0, fmt("%.1fs", elapsed));
    return out;
}

// ---------------------------------------------------------------- 5

// Relabels clusters by first appearance so two labelings of the same
// partition compare equal.
std::vector<int> canonical(const std::vector<int>& labels) {
    std::map<int, int> map;
    std::vector<int> out;
    for (int l : labels) {
        if (l < 0) {
            out.push_back(-1);
            continue;
        }
        const auto it = map.try_emplace(l, static_cast<int>(map.size())).first;
        out.push_back(it->second);
    }
    return out;
}

Outcome dbscan_oracle() {
    Outcome out;
    Rng rng(20240101);
    int agree = 0, noise_agree = 0;
    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t n = rng.below(51);
        const double scale = rng.uniform(1.0, 10.0);
        std::vector<xapp::AnomalyPoint> pts;
        std::vector<oracle::Pt> ref;
        for (std::size_t i = 0; i < n; ++i) {
            // half the instances on a lattice, where exact-eps distances occur
            double x = rng.uniform(0.0, scale), y = rng.uniform(0.0, scale);
            if (inst % 2 == 0) {
                x = std::round(x * 2.0) / 2.0;
                y = std::round(y * 2.0) / 2.0;
            }
            pts.push_back({x, y});
            ref.push_back({x, y});
        }
        const double eps = inst % 2 == 0 ? 0.5 * static_cast<double>(rng.below(4) + 1) : rng.uniform(0.1, 2.0);
        const std::size_t min_pts = rng.below(6) + 1;
        const auto got = xapp::dbscan(pts, eps, min_pts);
        const auto want = oracle::dbscan(ref, eps, min_pts);
        bool same_noise = got.size() == want.size();
        for (std::size_t i = 0; same_noise && i < got.size(); ++i) same_noise = (got[i] < 0) == (want[i] < 0);
        noise_agree += same_noise;
        agree += canonical(got) == canonical(want);
    }
    out.add("5.a", noise_agree == 200, "noise sets " + std::to_string(noise_agree) + "/200");
    out.add("5.b", agree == 200, "partitions " + std::to_string(agree) + "/200");
    return out;
}

// ---------------------------------------------------------------- 6

Outcome ta_quantization() {
    Outcome out;
    Rng rng(6);
    std::vector<double> d(10000);
    for (auto& x : d) x = rng.uniform(0.0, 2000.0);
    bool residual_ok = true;
    std::vector<std::size_t> distinct;
    for (int mu = 0; mu <= 4; ++mu) {
        const wireless::TaConfig ta{15 << mu};
        const double step = 78.125 / static_cast<double>(1 << mu);
        std::set<std::int64_t> bins;
        for (double x : d) {
            const auto k = wireless::ta_index(x, ta);
            const double r = x - static_cast<double>(k) * step;
            residual_ok = residual_ok && r >= 0.0 && r < step;
            bins.insert(k);
        }
        distinct.push_back(bins.size());
    }
    std::ostringstream detail;
    for (std::size_t i = 0; i < distinct.size(); ++i) detail << (i ? "," : "") << distinct[i];
    out.add("6.a", residual_ok, "residual in [0, step)");
    out.add("6.b", std::is_sorted(distinct.begin(), distinct.end()), "distinct bins by mu " + detail.str());
    return out;
}

// ---------------------------------------------------------------- 7

Outcome policy_corpus() {
    Outcome out;
    const fs::path corpus = kRoot / "tests" / "data" / "policies";
    int valid = 0, invalid = 0, right = 0;
    for (const char* label : {"valid", "invalid"}) {
        for (const auto& e : fs::directory_iterator(corpus / label)) {
            const bool ok = policy::parse(slurp(e.path())).has_value();
            const bool want = std::string(label) == "valid";
            (want ? valid : invalid)++;
            right += ok == want;
        }
    }
    out.add("7.a", valid >= 10 && invalid >= 15, std::to_string(valid) + " valid, " + std::to_string(invalid) + " invalid");
    out.add("7.b", right == valid + invalid, std::to_string(right) + "/" + std::to_string(valid + invalid) + " agree");

    Rng rng(7);
    int survived = 0, accepted = 0;
    for (int i = 0; i < 10000; ++i) {
        std::string s(rng.below(200), '\0');
        for (auto& c : s) c = static_cast<char>(rng.below(256));
        try {
            accepted += policy::parse(s).has_value();
            ++survived;
        } catch (...) {
        }
    }
    out.add("7.c", survived == 10000, "fuzz " + std::to_string(survived) + "/10000 without exception, " +
                                         std::to_string(accepted) + " accepted");
    return out;
}

// ---------------------------------------------------------------- 8

std::map<std::string, std::string> files_under(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = slurp(e.path());
    }
    return out;
}

Outcome determinism() {
    Outcome out;
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(kRoot / "scenarios"))
        if (e.path().extension() == ".json") names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    int identical = 0;
    std::ostringstream detail;
    for (const auto& name : names) {
        const auto cfg = scenario::load_scenario((kRoot / "scenarios" / name).string());
        const auto a = scratch("det-a"), b = scratch("det-b");
        scenario::run_to_directory(cfg, a);
        scenario::run_to_directory(cfg, b);
        const auto fa = files_under(a), fb = files_under(b);
        const std::size_t csvs = std::count_if(fa.begin(), fa.end(), [](const auto& kv) {
            return kv.first.size() > 4 && kv.first.substr(kv.first.size() - 4) == ".csv";
        });
        const bool same = fa == fb && csvs > 0;
        identical += same;
        detail << name << (same ? " same(" + std::to_string(csvs) + " csv) " : " DIFFERENT ");
        fs::remove_all(a);
        fs::remove_all(b);
    }
    out.add("8.a", identical == static_cast<int>(names.size()) && !names.empty(), detail.str());
    return out;
}

// ---------------------------------------------------------------- 9

Outcome conflicts() {
    Outcome out;
    const auto cfg = scenario::load_scenario((kRoot / "scenarios" / "conflict_ts_bmm.json").string());
    out.add("9.a", cfg.ts.has_value() && cfg.bmm.has_value(), "TS and BMM enabled");
    const auto run = scenario::run_scenario(cfg);
    out.add("9.b", !run.conflicts.empty(), std::to_string(run.conflicts.size()) + " conflict records");

    // Re-derive each control's (entity, parameter) from its logged payload.
    std::map<std::pair<SimTime, std::string>, int> applied;
    for (const auto& e : run.control_log) {
        if (e.status != ric::ControlLogEntry::Status::Applied) continue;
        const json c = json::parse(e.description);
        const std::string type = c.at("type");
        const std::string key = type == "PRB_SPLIT" ? c.at("cell_id").get<std::string>() + "/prb_split"
                                                    : c.at("ue_id").get<std::string>() + "/serving";
        ++applied[{e.time, key}];
    }
    int worst = 0;
    for (const auto& [_, n] : applied) worst = std::max(worst, n);
    int exactly_one = 0;
    for (const auto& rec : run.conflicts) {
        const auto it = applied.find({rec.time, rec.target.entity + "/" + rec.target.parameter});
        exactly_one += it != applied.end() && it->second == 1;
    }
    out.add("9.c", exactly_one == static_cast<int>(run.conflicts.size()) && worst <= 1,
            std::to_string(exactly_one) + "/" + std::to_string(run.conflicts.size()) +
                " conflicts with one applied control; max applied per target per tick " + std::to_string(worst));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    std::vector<int> only;
    std::vector<std::string> expect_fail;
    app.add_option("--criterion", only, "Run only these criteria (1-9)")->check(CLI::Range(1, 9));
    app.add_option("--expect-fail", expect_fail, "Sub-checks known to fail, e.g. 3.c");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<int, std::function<Outcome()>>> all{
        {1, ts_table},      {2, qra_table},       {3, ssd_sweep},   {4, bmm_sweep},  {5, dbscan_oracle},
        {6, ta_quantization}, {7, policy_corpus}, {8, determinism}, {9, conflicts}};

    int unexpected = 0;
    for (const auto& [n, fn] : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), n) == only.end()) continue;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.add(std::to_string(n) + ".x", false, std::string("threw: ") + e.what());
        }
        bool pass = true;
        std::ostringstream line;
        for (const auto& c : o.checks) {
            pass = pass && c.ok;
            line << " [" << c.id << (c.ok ? " ok" : " FAIL") << ": " << c.detail << "]";
            const bool known = std::find(expect_fail.begin(), expect_fail.end(), c.id) != expect_fail.end();
            if (!c.ok && !known) ++unexpected;
            if (c.ok && known) ++unexpected;  // a recorded deviation that now passes needs a look
        }
        std::cout << "criterion " << n << ": " << (pass ? "PASS" : "FAIL") << line.str() << std::endl;
    }
    return unexpected == 0 ? 0 : 1;
}
