#pragma once

#include <string>

#include "oran/policy/a1_policy.hpp"
#include "oran/ric/message.hpp"
#include "oran/sim_time.hpp"

namespace oran::ric {

class Ric;

/// An application hosted by the RIC. All callbacks run synchronously inside
/// the simulation tick; an xApp owns only its own state.
class XApp {
public:
    virtual ~XApp() = default;

    virtual const std::string& id() const = 0;

    /// Called once before the first event; subscribe here.
    virtual void start(Ric& /*ric*/) {}
    virtual void on_report(const RicMessage& /*msg*/, Ric& /*ric*/) {}
    virtual bool accepts(policy::PolicyType /*type*/) const { return false; }
    virtual void on_a1_policy(const policy::A1Policy& /*p*/, Ric& /*ric*/) {}
    virtual void on_enrichment(const RicMessage& /*msg*/, Ric& /*ric*/) {}
    /// Called after every event at time t has been processed; controls
    /// submitted here are arbitrated and applied before the next tick.
    virtual void on_tick_end(SimTime /*t*/, Ric& /*ric*/) {}
};

}  // namespace oran::ric
