#include "oran/xapp/qra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "oran/ransim/trace.hpp"

namespace oran::xapp {

std::string slice_id(const std::string& cell_id, int five_qi) { return cell_id + "/5qi" + std::to_string(five_qi); }

Expected<std::map<std::string, Rational>, std::string> allocate(const std::vector<SliceView>& slices,
                                                               const policy::AllocationSchema& schema) {
    if (slices.empty()) return std::string("no slices to allocate");
    std::vector<std::int64_t> weights;
    weights.reserve(slices.size());
    switch (schema.kind) {
        case policy::AllocationSchema::Kind::Equal:
            weights.assign(slices.size(), 1);
            break;
        case policy::AllocationSchema::Kind::PreferX: {
            const bool present = std::any_of(slices.begin(), slices.end(),
                                             [&](const SliceView& s) { return s.five_qi == schema.preferred_five_qi; });
            if (!present) {
                return "PREFER_" + std::to_string(schema.preferred_five_qi) + ": no slice carries that 5QI";
            }
            for (const auto& s : slices) weights.push_back(s.five_qi == schema.preferred_five_qi ? kPreferWeight : 1);
            break;
        }
        case policy::AllocationSchema::Kind::Reserve:
            for (const auto& s : slices) {
                if (s.five_qi < 1) return "RESERVE needs 5QI >= 1, slice " + s.slice_id;
                weights.push_back(kPreferWeight * s.five_qi);
            }
            break;
    }
    const std::int64_t total = std::accumulate(weights.begin(), weights.end(), std::int64_t{0});
    std::map<std::string, Rational> out;
    for (std::size_t i = 0; i < slices.size(); ++i) out.emplace(slices[i].slice_id, Rational(weights[i], total));
    return out;
}

Rational per_ue_share(const Rational& slice_share, std::int64_t ue_count) {
    if (ue_count < 1) throw std::invalid_argument("slice has no UEs");
    return slice_share / Rational(ue_count);
}

SlaAdjustment sla_adjust(const std::map<std::string, double>& shares,
                         const std::map<std::string, policy::SlaTargetBody>& sla_by_slice, double capacity_bps,
                         const std::map<std::string, std::int64_t>& ue_counts,
                         const std::map<std::string, double>& demand_bps) {
    SlaAdjustment out;
    out.shares = shares;
    if (shares.empty() || !(capacity_bps > 0.0)) return out;

    std::map<std::string, double> lo;
    std::map<std::string, double> hi;
    for (const auto& [slice, _] : shares) {
        double floor = 0.0;
        double cap = 1.0;
        if (const auto it = sla_by_slice.find(slice); it != sla_by_slice.end()) {
            const auto& sla = it->second;
            if (sla.max_throughput_bps) cap = std::min(cap, *sla.max_throughput_bps / capacity_bps);
            if (sla.max_ue_throughput_bps) {
                const auto n = ue_counts.find(slice);
                if (n != ue_counts.end()) {
                    cap = std::min(cap, *sla.max_ue_throughput_bps * static_cast<double>(n->second) / capacity_bps);
                }
            }
            if (sla.guaranteed_throughput_bps) {
                double want = *sla.guaranteed_throughput_bps;
                if (const auto d = demand_bps.find(slice); d != demand_bps.end()) want = std::min(want, d->second);
                floor = want / capacity_bps;
            }
        }
        floor = std::min(floor, cap);
        lo[slice] = floor;
        hi[slice] = cap;
    }

    const bool within = std::all_of(shares.begin(), shares.end(), [&](const auto& kv) {
        return kv.second >= lo[kv.first] && kv.second <= hi[kv.first];
    });
    if (within) return out;

    double lo_sum = 0.0;
    double hi_sum = 0.0;
    for (const auto& [slice, _] : shares) {
        lo_sum += lo[slice];
        hi_sum += hi[slice];
    }
    if (lo_sum > 1.0) {
        out.feasible = false;
        for (const auto& [slice, _] : shares) out.shares[slice] = lo[slice] / lo_sum;
        return out;
    }
    if (hi_sum <= 1.0) {
        for (const auto& [slice, _] : shares) out.shares[slice] = hi[slice];
        out.idle_share = 1.0 - hi_sum;
        return out;
    }

    const auto filled = [&](double lambda) {
        double sum = 0.0;
        for (const auto& [slice, base] : shares) sum += std::clamp(lambda * base, lo[slice], hi[slice]);
        return sum;
    };
    double a = 0.0;
    double b = 1.0;
    for (int i = 0; i < 1000 && filled(b) < 1.0; ++i) b *= 2.0;
    for (int i = 0; i < 200 && b - a > 0.0; ++i) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        (filled(mid) < 1.0 ? a : b) = mid;
    }
    double sum = 0.0;
    double free_sum = 0.0;
    for (const auto& [slice, base] : shares) {
        const double v = std::clamp(b * base, lo[slice], hi[slice]);
        out.shares[slice] = v;
        sum += v;
        if (v > lo[slice] && v < hi[slice]) free_sum += v;
    }
    // Hand the rounding residue to the unclamped slices.
    if (free_sum > 0.0) {
        const double scale = 1.0 + (1.0 - sum) / free_sum;
        for (auto& [slice, v] : out.shares) {
            if (v > lo[slice] && v < hi[slice]) v *= scale;
        }
    }
    return out;
}

ResourceAllocationXApp::ResourceAllocationXApp(QraParams params, std::string id)
    : id_(std::move(id)), params_(params) {}

void ResourceAllocationXApp::start(ric::Ric& ric) {
    auto sub = ric.subscribe(id_, {{}, ric::ReportKind::SliceLoad, params_.period_s});
    if (!sub) throw std::runtime_error("qra subscription failed: " + sub.error());
}

void ResourceAllocationXApp::on_a1_policy(const policy::A1Policy& p, ric::Ric& /*ric*/) {
    slas_.insert_or_assign(p.scope, std::get<policy::SlaTargetBody>(p.body));
    // Force a fresh split at the next report.
    last_split_.clear();
}

policy::AllocationSchema ResourceAllocationXApp::schema_for(const std::string& cell_id) const {
    const auto it = slas_.find(policy::Scope{policy::Scope::Kind::Cell, cell_id});
    if (it != slas_.end() && it->second.allocation_schema) return *it->second.allocation_schema;
    return params_.default_schema;
}

void ResourceAllocationXApp::on_report(const ric::RicMessage& msg, ric::Ric& ric) {
    const auto* load = std::get_if<ric::SliceLoadReport>(&std::get<ric::ReportPayload>(msg.payload));
    if (load == nullptr || load->ues_by_five_qi.empty()) return;

    std::vector<SliceView> slices;
    std::map<std::string, std::vector<std::string>> members;
    std::map<std::string, std::int64_t> counts;
    for (const auto& [qi, ues] : load->ues_by_five_qi) {
        slices.push_back({slice_id(load->cell_id, qi), qi, ues});
        members[slices.back().slice_id] = ues;
        counts[slices.back().slice_id] = static_cast<std::int64_t>(ues.size());
    }

    auto schema = schema_for(load->cell_id);
    auto exact = allocate(slices, schema);
    if (!exact) exact = allocate(slices, policy::AllocationSchema{});  // PREFER_X without X falls back to EQUAL

    std::map<std::string, double> shares;
    for (const auto& [slice, r] : exact.value()) shares[slice] = r.to_double();

    std::map<std::string, policy::SlaTargetBody> sla_by_slice;
    const auto cell_sla = slas_.find(policy::Scope{policy::Scope::Kind::Cell, load->cell_id});
    for (const auto& s : slices) {
        if (const auto it = slas_.find(policy::Scope{policy::Scope::Kind::Slice, s.slice_id}); it != slas_.end()) {
            sla_by_slice[s.slice_id] = it->second;
        } else if (cell_sla != slas_.end()) {
            sla_by_slice[s.slice_id] = cell_sla->second;
        }
    }
    const double capacity = static_cast<double>(load->prb_count) * load->per_prb_rate_bps;
    const SlaAdjustment adjusted = sla_adjust(shares, sla_by_slice, capacity, counts);
    all_feasible_ = all_feasible_ && adjusted.feasible;
    const bool exact_holds = adjusted.shares == shares;

    auto& last = last_split_[load->cell_id];
    auto& last_members = last_members_[load->cell_id];
    if (last == adjusted.shares && last_members == members) return;
    last = adjusted.shares;
    last_members = members;

    ric.submit_control(id_, ric::PrbSplitControl{load->cell_id, adjusted.shares});
    for (const auto& s : slices) {
        const auto n = static_cast<std::int64_t>(s.ue_ids.size());
        for (const auto& ue : s.ue_ids) {
            UeShareRecord rec;
            rec.time = msg.time;
            rec.cell_id = load->cell_id;
            rec.slice_id = s.slice_id;
            rec.ue_id = ue;
            if (exact_holds) rec.exact = per_ue_share(exact.value().at(s.slice_id), n);
            rec.share = adjusted.shares.at(s.slice_id) / static_cast<double>(n);
            ue_shares_.push_back(std::move(rec));
        }
    }
}

void write_qra_ue_share_csv(std::ostream& os, const std::vector<UeShareRecord>& rows) {
    os << "time_s,cell_id,slice_id,ue_id,share,share_exact\n";
    for (const auto& r : rows) {
        os << ransim::format_time(r.time) << ',' << r.cell_id << ',' << r.slice_id << ',' << r.ue_id << ','
           << ransim::format_double(r.share) << ',' << (r.exact ? r.exact->to_string() : "") << '\n';
    }
}

}  // namespace oran::xapp
