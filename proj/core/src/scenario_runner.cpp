#include "oran/scenario/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>

#include "oran/ransim/simulator.hpp"
#include "oran/xapp/bmm.hpp"

namespace oran::scenario {

namespace fs = std::filesystem;
using ransim::format_double;
using ransim::format_time;

namespace {

/// Samples true positions and per-beam RSRP straight from the simulator to
/// build REMs during the training pass.
class RemCollector final : public ric::XApp {
public:
    RemCollector(const ransim::Simulator& sim, std::vector<xapp::RemBuilder>& builders)
        : sim_(sim), builders_(builders) {}

    const std::string& id() const override { return id_; }

    void on_tick_end(SimTime /*t*/, ric::Ric& /*ric*/) override {
        const auto ues = sim_.ues();
        for (std::size_t u = 0; u < ues.size(); ++u) {
            if (ues[u].config.kind != ransim::UeKind::Mobile) continue;
            for (std::size_t c = 0; c < builders_.size(); ++c) {
                builders_[c].add({ues[u].pos, sim_.beam_rsrp(u, c), ues[u].velocity});
            }
        }
    }

private:
    std::string id_ = "rem-collector";
    const ransim::Simulator& sim_;
    std::vector<xapp::RemBuilder>& builders_;
};

std::vector<ric::EiPayload> train_ssd(const ScenarioConfig& cfg, const ransim::SimConfig& eval) {
    const auto& s = *cfg.ssd;
    ransim::SimConfig train = eval;
    train.rng_phase = "train";
    train.duration_s = s.training_days * 86400.0;
    train.record_serving = false;
    std::erase_if(train.ues, [](const ransim::UeConfig& u) { return u.kind == ransim::UeKind::IotAdversary; });

    ransim::Simulator sim(train);
    ric::Ric ric;
    xapp::WindowRecorder recorder(s.params.window_s);
    ric.add_xapp(recorder);
    sim.run(ric);

    std::vector<ric::EiPayload> docs;
    for (const auto& cell : eval.cells) {
        const auto it = recorder.windows().find(cell.id);
        const std::vector<xapp::WindowStats> empty;
        const auto& windows = it == recorder.windows().end() ? empty : it->second;
        auto profile = xapp::build_profile(windows, s.params.bucket_len_s, s.params.min_training_windows);
        if (!profile) {
            throw ScenarioError({"$.xapps.ssd.training_days: cell " + cell.id + ": " + profile.error()});
        }
        std::vector<xapp::AnomalyPoint> history;
        history.reserve(windows.size());
        for (const auto& w : windows) history.push_back(xapp::anomaly_point(w, profile.value(), s.params.std_floor));
        docs.push_back(std::make_shared<xapp::KpiProfileDocument>(cell.id, std::move(profile).value(), std::move(history)));
    }
    return docs;
}

xapp::GridParams grid_for(const ScenarioConfig& cfg) {
    const auto& s = *cfg.bmm;
    xapp::GridParams g;
    g.origin = {cfg.bounds.x_min, cfg.bounds.y_min};
    g.cell_size_m = s.grid_cell_m;
    g.nx = static_cast<int>(std::ceil((cfg.bounds.x_max - cfg.bounds.x_min) / s.grid_cell_m));
    g.ny = static_cast<int>(std::ceil((cfg.bounds.y_max - cfg.bounds.y_min) / s.grid_cell_m));
    g.speed_bin_mps = s.speed_bin_mps;
    g.speed_bins = s.speed_bins;
    g.bearing_bins = s.bearing_bins;
    const double motion_cells = static_cast<double>(g.nx) * g.ny * g.speed_bins * g.bearing_bins;
    if (motion_cells > 2.0e7) {
        throw ScenarioError({"$.xapps.bmm.grid_cell_m: REM grid too large for the bounds (" +
                             format_double(motion_cells) + " motion bins)"});
    }
    return g;
}

std::vector<ric::EiPayload> train_bmm(const ScenarioConfig& cfg) {
    const auto& s = *cfg.bmm;
    ransim::SimConfig train = expand(cfg, "train");
    train.rng_phase = "train";
    train.duration_s = s.training_s;
    train.record_serving = false;

    const auto grid = grid_for(cfg);
    std::vector<xapp::RemBuilder> builders;
    for (const auto& cell : train.cells) {
        const int beams = std::max<int>(1, static_cast<int>(cell.beams.size()));
        builders.emplace_back(grid, beams, cfg.localization, Rng::derive(cfg.seed, "train/rem/" + cell.id));
    }
    ransim::Simulator sim(train);
    ric::Ric ric;
    RemCollector collector(sim, builders);
    ric.add_xapp(collector);
    sim.run(ric);

    std::vector<ric::EiPayload> docs;
    for (std::size_t c = 0; c < builders.size(); ++c) {
        auto rem = std::make_shared<const xapp::RemGrid>(std::move(builders[c]).finish());
        docs.push_back(std::make_shared<xapp::RemDocument>(train.cells[c].id, std::move(rem)));
    }
    return docs;
}

template <class Fn>
void write_file(const fs::path& path, Fn&& fn) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw RunError("cannot write " + path.string());
    fn(os);
    if (!os) throw RunError("write failed: " + path.string());
}

std::string join(const std::vector<std::string>& xs, char sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) out += sep;
        out += xs[i];
    }
    return out;
}

}  // namespace

std::optional<double> RunArtifacts::metric(const std::string& name) const {
    for (const auto& [k, v] : metrics) {
        if (k == name) return v;
    }
    return std::nullopt;
}

RunArtifacts run_scenario(const ScenarioConfig& cfg) {
    const ransim::SimConfig sim_cfg = expand(cfg);
    std::vector<ric::EiPayload> ei;
    if (cfg.ssd) {
        auto docs = train_ssd(cfg, sim_cfg);
        ei.insert(ei.end(), docs.begin(), docs.end());
    }
    if (cfg.bmm && cfg.bmm->params.mode == xapp::BmmMode::Rem) {
        auto docs = train_bmm(cfg);
        ei.insert(ei.end(), docs.begin(), docs.end());
    }

    ric::RicOptions options;
    options.priority = cfg.priority;
    options.log_messages = cfg.message_log;
    options.ei_delay = from_seconds(cfg.ei_delay_s);
    ric::Ric ric(options);

    std::unique_ptr<xapp::TrafficSteeringXApp> ts;
    std::unique_ptr<xapp::ResourceAllocationXApp> qra;
    std::unique_ptr<xapp::SignalingStormXApp> ssd;
    std::unique_ptr<xapp::BeamManagementXApp> bmm;
    if (cfg.ts) {
        xapp::TsParams p;
        p.preference_offset_db =
            cfg.ts->preference_offset_db.value_or(xapp::calibration_offset(cfg.cells.front().prop.exponent));
        p.hysteresis_db = cfg.ts->hysteresis_db;
        p.period_s = cfg.ts->period_s;
        ts = std::make_unique<xapp::TrafficSteeringXApp>(p);
        ric.add_xapp(*ts);
    }
    if (cfg.qra) {
        qra = std::make_unique<xapp::ResourceAllocationXApp>(*cfg.qra);
        ric.add_xapp(*qra);
    }
    if (cfg.ssd) {
        ssd = std::make_unique<xapp::SignalingStormXApp>(cfg.ssd->params);
        ric.add_xapp(*ssd);
    }
    if (cfg.bmm) {
        bmm = std::make_unique<xapp::BeamManagementXApp>(cfg.bmm->params);
        ric.add_xapp(*bmm);
    }

    ransim::Simulator sim(sim_cfg);
    const auto bootstrap = [&](ric::Ric& r) {
        for (const auto& doc : ei) r.publish_ei("trainer", doc);
        for (const auto& p : cfg.policies) {
            const auto res = r.ingest_a1(p);
            if (!res.accepted) throw RunError("policy " + p.policy_id + " refused: " + res.diagnostic);
        }
    };

    RunArtifacts out;
    try {
        out.trace = sim.run(ric, bootstrap);
    } catch (const ScenarioError&) {
        throw;
    } catch (const RunError&) {
        throw;
    } catch (const std::exception& e) {
        throw RunError(e.what());
    }
    out.conflicts = ric.conflicts();
    out.control_log = ric.control_log();
    out.message_log = ric.message_log();

    auto& m = out.metrics;
    const auto& tr = out.trace;
    const double mobile = static_cast<double>(tr.mobile_ue_count());
    const auto rejected_controls = std::count_if(out.control_log.begin(), out.control_log.end(), [](const auto& e) {
        return e.status == ric::ControlLogEntry::Status::Rejected;
    });
    m.emplace_back("ues", static_cast<double>(tr.ue_ids.size()));
    m.emplace_back("mobile_ues", mobile);
    m.emplace_back("handovers", static_cast<double>(tr.handovers.size()));
    m.emplace_back("beam_switches", static_cast<double>(tr.beam_events.size()));
    m.emplace_back("beam_failures", static_cast<double>(tr.beam_failures.size()));
    m.emplace_back("attempts", static_cast<double>(tr.attempts.size()));
    m.emplace_back("conflicts", static_cast<double>(out.conflicts.size()));
    m.emplace_back("rejected_controls", static_cast<double>(rejected_controls));

    if (ts) {
        out.association = xapp::association(tr);
        for (const auto& row : *out.association) {
            m.emplace_back("ts_fraction_" + (row.cell_id.empty() ? std::string("unserved") : row.cell_id),
                           row.fraction);
        }
    }
    if (qra) {
        out.qra_shares = qra->ue_shares();
        m.emplace_back("qra_feasible", qra->all_feasible() ? 1.0 : 0.0);
    }
    if (ssd) {
        out.ssd_windows = ssd->windows();
        out.ssd_rejections = xapp::rejection_summary(tr);
        double adversary = 0.0;
        for (const auto& r : *out.ssd_rejections) {
            if (r.kind == ransim::UeKind::IotAdversary) adversary = r.ratio;
        }
        const auto storms = std::count_if(out.ssd_windows->begin(), out.ssd_windows->end(),
                                          [](const auto& w) { return w.storm; });
        m.emplace_back("rejected_legit_ratio", xapp::rejected_legit_ratio(tr));
        m.emplace_back("rejected_adversary_ratio", adversary);
        m.emplace_back("storm_windows", static_cast<double>(storms));
    }
    if (bmm) {
        BmmSummary b;
        b.monitor_failures = bmm->monitor().total_failures();
        b.node_reported_failures = bmm->node_reported_failures();
        b.emergency_entries = bmm->emergency().entries();
        b.stay = bmm->decisions(xapp::BeamReason::Stay);
        b.lookahead_switch = bmm->decisions(xapp::BeamReason::LookaheadSwitch);
        b.emergency_rsrp = bmm->decisions(xapp::BeamReason::EmergencyRsrp);
        out.bmm = b;
        const double user_s = mobile * cfg.duration_s;
        const auto per_user_s = [&](double x) { return user_s > 0.0 ? x / user_s : 0.0; };
        m.emplace_back("failures_per_user_s", per_user_s(static_cast<double>(tr.beam_failures.size())));
        m.emplace_back("switches_per_user_s", per_user_s(static_cast<double>(tr.beam_events.size())));
        m.emplace_back("emergency_entries", static_cast<double>(b.emergency_entries));
        m.emplace_back("bmm_lookahead_switches", static_cast<double>(b.lookahead_switch));
        m.emplace_back("bmm_emergency_switches", static_cast<double>(b.emergency_rsrp));
    }
    return out;
}

void write_run_outputs(const RunArtifacts& run, const ScenarioConfig& cfg, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw RunError("cannot create " + dir.string() + ": " + ec.message());
    const auto& tr = run.trace;

    write_file(dir / "attempts.csv", [&](std::ostream& os) { ransim::write_attempts_csv(os, tr); });
    write_file(dir / "handovers.csv", [&](std::ostream& os) { ransim::write_handovers_csv(os, tr); });
    write_file(dir / "beam_events.csv", [&](std::ostream& os) { ransim::write_beam_events_csv(os, tr); });
    write_file(dir / "beam_failures.csv", [&](std::ostream& os) { ransim::write_beam_failures_csv(os, tr); });
    write_file(dir / "prb_alloc.csv", [&](std::ostream& os) { ransim::write_prb_alloc_csv(os, tr); });
    if (cfg.record_serving) {
        write_file(dir / "serving.csv", [&](std::ostream& os) { ransim::write_serving_csv(os, tr); });
    }
    write_file(dir / "conflicts.csv", [&](std::ostream& os) {
        os << "time_s,entity,parameter,winner,losers,msg_ids\n";
        for (const auto& c : run.conflicts) {
            std::vector<std::string> ids;
            for (const auto id : c.msg_ids) ids.push_back(std::to_string(id));
            os << format_time(c.time) << ',' << csv_quote(c.target.entity) << ',' << c.target.parameter << ','
               << c.winner << ',' << join(c.losers, ';') << ',' << join(ids, ';') << '\n';
        }
    });
    write_file(dir / "control_log.csv", [&](std::ostream& os) {
        os << "time_s,msg_id,xapp_id,status,control,diagnostic\n";
        for (const auto& e : run.control_log) {
            os << format_time(e.time) << ',' << e.msg_id << ',' << e.xapp_id << ',' << ric::to_string(e.status) << ','
               << csv_quote(e.description) << ',' << csv_quote(e.diagnostic) << '\n';
        }
    });
    write_file(dir / "metrics.csv", [&](std::ostream& os) {
        os << "metric,value\n";
        for (const auto& [k, v] : run.metrics) os << k << ',' << format_double(v) << '\n';
    });
    if (run.association) {
        write_file(dir / "ts_association.csv",
                   [&](std::ostream& os) { xapp::write_ts_association_csv(os, *run.association); });
    }
    if (run.qra_shares) {
        write_file(dir / "qra_ue_shares.csv", [&](std::ostream& os) { xapp::write_qra_ue_share_csv(os, *run.qra_shares); });
    }
    if (run.ssd_windows) {
        write_file(dir / "ssd_windows.csv", [&](std::ostream& os) { xapp::write_ssd_windows_csv(os, *run.ssd_windows); });
        write_file(dir / "ssd_rejections.csv",
                   [&](std::ostream& os) { xapp::write_ssd_rejections_csv(os, *run.ssd_rejections); });
    }
    if (cfg.message_log) {
        write_file(dir / "messages.ndjson", [&](std::ostream& os) {
            for (const auto& line : run.message_log) os << line << '\n';
        });
    }
}

fs::path default_output_dir(const ScenarioConfig& cfg) {
    return cfg.output_dir.empty() ? fs::path("out") / cfg.name : fs::path(cfg.output_dir);
}

std::vector<fs::path> run_to_directory(const ScenarioConfig& cfg, const fs::path& dir) {
    std::vector<fs::path> written;
    std::string report;
    if (cfg.variants.empty()) {
        write_run_outputs(run_scenario(cfg), cfg, dir);
        written.push_back(dir);
        report = render_run_report(dir, cfg.name);
    } else {
        std::vector<std::string> names;
        for (const auto& v : cfg.variants) {
            const ScenarioConfig vc = variant_config(cfg, v);
            write_run_outputs(run_scenario(vc), vc, dir / v.name);
            written.push_back(dir / v.name);
            names.push_back(v.name);
        }
        report = render_variant_report(dir, cfg.name, names);
    }
    write_file(dir / "report.md", [&](std::ostream& os) { os << report; });
    return written;
}

// ---------------------------------------------------------------- sweeps

namespace {

const nlohmann::json* find_dotted(const nlohmann::json& doc, const std::string& key) {
    const nlohmann::json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (node->is_object()) {
            const auto it = node->find(part);
            if (it == node->end()) return nullptr;
            node = &*it;
        } else if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(part);
            } catch (const std::exception&) {
                return nullptr;
            }
            if (idx >= node->size()) return nullptr;
            node = &(*node)[idx];
        } else {
            return nullptr;
        }
        if (dot == std::string::npos) return node;
        start = dot + 1;
    }
}

std::string value_label(const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::string safe_dir_name(const std::string& s) {
    std::string out;
    for (const char ch : s) {
        out += (std::isalnum(static_cast<unsigned char>(ch)) != 0 || ch == '-' || ch == '_' || ch == '.') ? ch : '_';
    }
    return out;
}

}  // namespace

std::vector<SweepRow> sweep(const nlohmann::json& base_doc, const SweepOptions& options,
                            const std::optional<fs::path>& out_dir) {
    if (options.values.empty()) throw ScenarioError({"--values: at least one value required"});
    if (options.seeds < 1) throw ScenarioError({"--seeds: must be >= 1"});
    if (options.param == "seed" || options.param == "variants" || options.param.rfind("variants.", 0) == 0) {
        throw ScenarioError({"--param " + options.param + ": cannot be swept"});
    }
    if (const auto* existing = find_dotted(base_doc, options.param);
        existing != nullptr && (existing->is_object() || existing->is_array())) {
        throw ScenarioError({"--param " + options.param + ": not a scalar field"});
    }

    nlohmann::json doc = base_doc;
    doc.erase("variants");
    std::uint64_t base_seed = 1;
    if (const auto it = doc.find("seed"); it != doc.end() && it->is_number_unsigned()) {
        base_seed = it->get<std::uint64_t>();
    }

    std::vector<SweepRow> rows;
    for (const auto& value : options.values) {
        nlohmann::json vdoc = doc;
        set_dotted(vdoc, options.param, value);
        ScenarioConfig cfg = [&] {
            try {
                return parse_scenario(vdoc);
            } catch (const ScenarioError& e) {
                std::vector<std::string> diags;
                for (const auto& d : e.diagnostics()) diags.push_back("--param " + options.param + "=" + value_label(value) + ": " + d);
                throw ScenarioError(diags);
            }
        }();

        SweepRow row;
        row.value = value_label(value);
        std::vector<std::vector<double>> samples;
        for (int i = 0; i < options.seeds; ++i) {
            cfg.seed = base_seed + static_cast<std::uint64_t>(i);
            cfg.source["seed"] = cfg.seed;
            const RunArtifacts run = run_scenario(cfg);
            if (row.metric_names.empty()) {
                for (const auto& [k, _] : run.metrics) row.metric_names.push_back(k);
                samples.resize(row.metric_names.size());
            }
            for (std::size_t k = 0; k < row.metric_names.size(); ++k) {
                samples[k].push_back(run.metric(row.metric_names[k]).value_or(0.0));
            }
            if (options.keep_runs && out_dir) {
                write_run_outputs(run, cfg,
                                  *out_dir / "runs" / safe_dir_name(row.value) / ("seed-" + std::to_string(cfg.seed)));
            }
            ++row.runs;
        }
        for (const auto& s : samples) row.stats.push_back(xapp::mean_std(s));
        rows.push_back(std::move(row));
    }

    if (out_dir) {
        std::error_code ec;
        fs::create_directories(*out_dir, ec);
        if (ec) throw RunError("cannot create " + out_dir->string() + ": " + ec.message());
        write_file(*out_dir / "sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, options.param, rows); });
        const std::string title = base_doc.value("name", std::string("scenario")) + " sweep over " + options.param;
        const std::string report = render_sweep_report(*out_dir / "sweep.csv", title);
        write_file(*out_dir / "report.md", [&](std::ostream& os) { os << report; });
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::string& param, const std::vector<SweepRow>& rows) {
    std::vector<std::string> names;
    for (const auto& r : rows) {
        for (const auto& n : r.metric_names) {
            if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
        }
    }
    os << "param,value,runs";
    for (const auto& n : names) os << ',' << n << "_mean," << n << "_std";
    os << '\n';
    for (const auto& r : rows) {
        os << csv_quote(param) << ',' << csv_quote(r.value) << ',' << r.runs;
        for (const auto& n : names) {
            const auto it = std::find(r.metric_names.begin(), r.metric_names.end(), n);
            if (it == r.metric_names.end()) {
                os << ",,";
            } else {
                const auto& s = r.stats[static_cast<std::size_t>(it - r.metric_names.begin())];
                os << ',' << format_double(s.mean) << ',' << format_double(s.std);
            }
        }
        os << '\n';
    }
}

}  // namespace oran::scenario
