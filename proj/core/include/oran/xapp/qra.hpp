#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oran/expected.hpp"
#include "oran/policy/a1_policy.hpp"
#include "oran/ric/ric.hpp"
#include "oran/ric/xapp.hpp"
#include "oran/xapp/rational.hpp"

namespace oran::xapp {

/// UEs of one cell sharing a 5QI.
struct SliceView {
    std::string slice_id;
    int five_qi = 1;
    std::vector<std::string> ue_ids;
};

/// "<cell>/5qi<n>"
std::string slice_id(const std::string& cell_id, int five_qi);

inline constexpr std::int64_t kPreferWeight = 5;

/// Slice shares under one allocation schema; they sum to exactly 1.
/// EQUAL gives 1/S, PREFER_X weighs the X slice 5:1 against the rest,
/// RESERVE weighs each slice by its 5QI. Fails when PREFER_X names a 5QI
/// that no slice carries, or when `slices` is empty.
Expected<std::map<std::string, Rational>, std::string> allocate(const std::vector<SliceView>& slices,
                                                               const policy::AllocationSchema& schema);

/// Equal split of a slice share among its UEs. Throws for count < 1.
Rational per_ue_share(const Rational& slice_share, std::int64_t ue_count);

struct SlaAdjustment {
    std::map<std::string, double> shares;
    /// False when the guarantees could not all be met and were scaled down.
    bool feasible = true;
    /// Capacity left unassigned because every slice hit its cap.
    double idle_share = 0.0;
};

/// Applies per-slice SLA limits under the linear model
/// throughput = share * capacity_bps. Caps come from max_throughput_bps and
/// max_ue_throughput_bps * UE count; floors from guaranteed_throughput_bps,
/// limited by the slice's demand estimate when one is given. The result is
/// clamp(lambda * share, floor, cap) with lambda chosen so shares sum to 1.
SlaAdjustment sla_adjust(const std::map<std::string, double>& shares,
                         const std::map<std::string, policy::SlaTargetBody>& sla_by_slice, double capacity_bps,
                         const std::map<std::string, std::int64_t>& ue_counts = {},
                         const std::map<std::string, double>& demand_bps = {});

struct QraParams {
    double period_s = 1.0;
    policy::AllocationSchema default_schema{};
};

struct UeShareRecord {
    SimTime time = 0;
    std::string cell_id;
    std::string slice_id;
    std::string ue_id;
    /// Absent once SLA limits have moved the split off the exact schema.
    std::optional<Rational> exact;
    double share = 0.0;
};

class ResourceAllocationXApp final : public ric::XApp {
public:
    explicit ResourceAllocationXApp(QraParams params, std::string id = "qra");

    const std::string& id() const override { return id_; }
    void start(ric::Ric& ric) override;
    void on_report(const ric::RicMessage& msg, ric::Ric& ric) override;
    bool accepts(policy::PolicyType type) const override { return type == policy::PolicyType::SlaTarget; }
    void on_a1_policy(const policy::A1Policy& p, ric::Ric& ric) override;

    /// Per-UE shares, one row per UE whenever its cell's split changes.
    const std::vector<UeShareRecord>& ue_shares() const { return ue_shares_; }
    bool all_feasible() const { return all_feasible_; }

private:
    policy::AllocationSchema schema_for(const std::string& cell_id) const;

    std::string id_;
    QraParams params_;
    std::map<policy::Scope, policy::SlaTargetBody> slas_;
    std::map<std::string, std::map<std::string, double>> last_split_;
    std::map<std::string, std::map<std::string, std::vector<std::string>>> last_members_;
    std::vector<UeShareRecord> ue_shares_;
    bool all_feasible_ = true;
};

void write_qra_ue_share_csv(std::ostream& os, const std::vector<UeShareRecord>& rows);

}  // namespace oran::xapp
