#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "oran/ransim/trace.hpp"
#include "oran/scenario/runner.hpp"

namespace oran::scenario {

namespace fs = std::filesystem;

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        any = true;
        if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            record.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(record));
            record.clear();
            any = false;
        } else {
            field += c;
        }
    }
    if (any || !field.empty() || !record.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    CsvTable t;
    if (records.empty()) return t;
    t.header = std::move(records.front());
    t.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
    return t;
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RunError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

namespace {

std::string md_row(const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const auto& c : cells) out += " " + c + " |";
    return out + "\n";
}

std::string md_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::string out = md_row(header);
    out += "|";
    for (std::size_t i = 0; i < header.size(); ++i) out += "---|";
    out += "\n";
    for (const auto& r : rows) out += md_row(r);
    return out;
}

std::string percent(double fraction) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << fraction * 100.0;
    return os.str();
}

/// Exact percentage of an "n/d" or "n" share when it is a terminating decimal.
std::string exact_percent(const std::string& rational, const std::string& fallback) {
    if (rational.empty()) return percent(std::stod(fallback));
    const auto slash = rational.find('/');
    const long long n = std::stoll(rational.substr(0, slash));
    const long long d = slash == std::string::npos ? 1 : std::stoll(rational.substr(slash + 1));
    return ransim::format_double(100.0 * static_cast<double>(n) / static_cast<double>(d));
}

std::string cell_or(const std::vector<std::string>& row, std::optional<std::size_t> col) {
    return col && *col < row.size() ? row[*col] : std::string();
}

std::optional<CsvTable> try_read(const fs::path& p) {
    if (!fs::exists(p)) return std::nullopt;
    return read_csv(p);
}

std::string metrics_section(const CsvTable& t) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : t.rows) rows.push_back({cell_or(r, t.column("metric")), cell_or(r, t.column("value"))});
    return md_table({"Metric", "Value"}, rows);
}

std::string association_section(const CsvTable& t) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : t.rows) {
        std::string cell = cell_or(r, t.column("cell_id"));
        rows.push_back({cell.empty() ? "(unserved)" : cell, cell_or(r, t.column("seconds_served")),
                        percent(std::stod(cell_or(r, t.column("fraction"))))});
    }
    return md_table({"Cell", "Seconds served", "Association [%]"}, rows);
}

struct UeShare {
    std::string five_qi;
    std::string percent;
};

/// Latest share per UE, in order of first appearance.
std::vector<std::pair<std::string, UeShare>> latest_shares(const CsvTable& t) {
    std::vector<std::pair<std::string, UeShare>> out;
    const auto ue_col = t.column("ue_id");
    const auto slice_col = t.column("slice_id");
    for (const auto& r : t.rows) {
        const std::string ue = cell_or(r, ue_col);
        const std::string slice = cell_or(r, slice_col);
        const auto qpos = slice.rfind("5qi");
        UeShare s{qpos == std::string::npos ? "" : slice.substr(qpos + 3),
                  exact_percent(cell_or(r, t.column("share_exact")), cell_or(r, t.column("share")))};
        const auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == ue; });
        if (it == out.end()) {
            out.emplace_back(ue, s);
        } else {
            it->second = s;
        }
    }
    return out;
}

std::string qra_section(const CsvTable& t) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [ue, s] : latest_shares(t)) rows.push_back({ue, s.five_qi, s.percent});
    return md_table({"UE", "5QI", "Bandwidth part [%]"}, rows);
}

std::string rejections_section(const CsvTable& t) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : t.rows) {
        rows.push_back({cell_or(r, t.column("ue_kind")), cell_or(r, t.column("attempts")),
                        cell_or(r, t.column("rejected")), percent(std::stod(cell_or(r, t.column("ratio"))))});
    }
    return md_table({"UE kind", "Attempts", "Rejected", "Rejected [%]"}, rows);
}

std::string storm_section(const CsvTable& t) {
    std::vector<std::vector<std::string>> rows;
    const auto flag = t.column("storm_flag");
    for (const auto& r : t.rows) {
        if (cell_or(r, flag) != "1") continue;
        rows.push_back({cell_or(r, t.column("window_start_s")), cell_or(r, t.column("cell_id")),
                        cell_or(r, t.column("count")), cell_or(r, t.column("z_count")),
                        cell_or(r, t.column("z_ta_peak")), cell_or(r, t.column("blacklisted_tas"))});
    }
    if (rows.empty()) return "No storm windows.\n";
    return md_table({"Window start [s]", "Cell", "Requests", "z count", "z TA peak", "Blacklisted TAs"}, rows);
}

std::string run_body(const fs::path& dir, const std::string& heading) {
    std::string out;
    if (auto t = try_read(dir / "ts_association.csv")) {
        out += "\n" + heading + " Cell association\n\n" + association_section(*t);
    }
    if (auto t = try_read(dir / "qra_ue_shares.csv")) {
        out += "\n" + heading + " Per-UE bandwidth part\n\n" + qra_section(*t);
    }
    if (auto t = try_read(dir / "ssd_rejections.csv")) {
        out += "\n" + heading + " Connection rejections\n\n" + rejections_section(*t);
    }
    if (auto t = try_read(dir / "ssd_windows.csv")) {
        out += "\n" + heading + " Storm windows\n\n" + storm_section(*t);
    }
    if (auto t = try_read(dir / "conflicts.csv"); t && !t->rows.empty()) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : t->rows) {
            rows.push_back({cell_or(r, t->column("time_s")), cell_or(r, t->column("entity")),
                            cell_or(r, t->column("parameter")), cell_or(r, t->column("winner")),
                            cell_or(r, t->column("losers"))});
        }
        out += "\n" + heading + " Control conflicts\n\n" + md_table({"Time [s]", "Entity", "Parameter", "Winner", "Losers"}, rows);
    }
    if (auto t = try_read(dir / "metrics.csv")) out += "\n" + heading + " Metrics\n\n" + metrics_section(*t);
    return out;
}

}  // namespace

std::string render_run_report(const fs::path& run_dir, const std::string& title) {
    return "# " + title + "\n" + run_body(run_dir, "##");
}

std::string render_variant_report(const fs::path& dir, const std::string& title,
                                  const std::vector<std::string>& variants) {
    std::string out = "# " + title + "\n";

    // POLICY@cell variants fold into one row per policy with a column pair per
    // enforced cell; a variant without '@' fills every column group.
    std::vector<std::string> cells;
    std::vector<std::string> policies;
    std::vector<std::string> targets;
    std::map<std::pair<std::string, std::string>, std::map<std::string, double>> fractions;
    bool all_ts = !variants.empty();
    for (const auto& v : variants) {
        const auto t = try_read(dir / v / "ts_association.csv");
        if (!t) {
            all_ts = false;
            break;
        }
        const auto at = v.find('@');
        const std::string policy = v.substr(0, at);
        const std::string target = at == std::string::npos ? "" : v.substr(at + 1);
        if (std::find(policies.begin(), policies.end(), policy) == policies.end()) policies.push_back(policy);
        if (!target.empty() && std::find(targets.begin(), targets.end(), target) == targets.end()) {
            targets.push_back(target);
        }
        for (const auto& r : t->rows) {
            const std::string cell = cell_or(r, t->column("cell_id"));
            if (cell.empty()) continue;
            if (std::find(cells.begin(), cells.end(), cell) == cells.end()) cells.push_back(cell);
            fractions[{policy, target}][cell] = std::stod(cell_or(r, t->column("fraction")));
        }
    }
    if (all_ts) {
        if (targets.empty()) targets.push_back("");
        std::vector<std::string> header{"Policy"};
        for (const auto& target : targets) {
            for (const auto& c : cells) header.push_back((target.empty() ? "" : "for " + target + ": ") + c + " [%]");
        }
        std::vector<std::vector<std::string>> rows;
        for (const auto& p : policies) {
            std::vector<std::string> row{p};
            for (const auto& target : targets) {
                auto it = fractions.find({p, target});
                if (it == fractions.end()) it = fractions.find({p, ""});
                for (const auto& c : cells) {
                    if (it == fractions.end()) {
                        row.emplace_back("");
                        continue;
                    }
                    const auto f = it->second.find(c);
                    row.push_back(percent(f == it->second.end() ? 0.0 : f->second));
                }
            }
            rows.push_back(std::move(row));
        }
        out += "\n## User association time part\n\n" + md_table(header, rows);
    }

    bool all_qra = !variants.empty();
    std::vector<std::pair<std::string, std::string>> ues;  // id, 5qi
    std::map<std::string, std::map<std::string, std::string>> shares;  // variant -> ue -> percent
    for (const auto& v : variants) {
        const auto t = try_read(dir / v / "qra_ue_shares.csv");
        if (!t) {
            all_qra = false;
            break;
        }
        for (const auto& [ue, s] : latest_shares(*t)) {
            if (std::find_if(ues.begin(), ues.end(), [&](const auto& u) { return u.first == ue; }) == ues.end()) {
                ues.emplace_back(ue, s.five_qi);
            }
            shares[v][ue] = s.percent;
        }
    }
    if (all_qra) {
        std::vector<std::string> header{"UE", "5QI"};
        for (const auto& v : variants) header.push_back(v + " [%]");
        std::vector<std::vector<std::string>> rows;
        for (const auto& [ue, qi] : ues) {
            std::vector<std::string> row{ue, qi};
            for (const auto& v : variants) {
                const auto it = shares[v].find(ue);
                row.push_back(it == shares[v].end() ? "" : it->second);
            }
            rows.push_back(std::move(row));
        }
        out += "\n## Bandwidth part per UE\n\n" + md_table(header, rows);
    }

    for (const auto& v : variants) out += "\n## Variant " + v + "\n" + run_body(dir / v, "###");
    return out;
}

std::string render_sweep_report(const fs::path& sweep_csv, const std::string& title) {
    const CsvTable t = read_csv(sweep_csv);
    std::vector<std::string> metrics;
    for (const auto& h : t.header) {
        const std::string suffix = "_mean";
        if (h.size() > suffix.size() && h.compare(h.size() - suffix.size(), suffix.size(), suffix) == 0) {
            metrics.push_back(h.substr(0, h.size() - suffix.size()));
        }
    }
    const std::string param = t.rows.empty() ? std::string("value") : cell_or(t.rows.front(), t.column("param"));
    std::vector<std::string> header{param, "Runs"};
    for (const auto& m : metrics) header.push_back(m + " (mean ± std)");
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : t.rows) {
        std::vector<std::string> row{cell_or(r, t.column("value")), cell_or(r, t.column("runs"))};
        for (const auto& m : metrics) {
            row.push_back(cell_or(r, t.column(m + "_mean")) + " ± " + cell_or(r, t.column(m + "_std")));
        }
        rows.push_back(std::move(row));
    }
    return "# " + title + "\n\n" + md_table(header, rows);
}

}  // namespace oran::scenario
