#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "faircurtail/network.hpp"

namespace faircurtail {

// One PV installation requested by a scenario file, in per-unit.
struct PvSpec {
    int bus = 0;  // bus number as in the case file
    double s_rated = 0.0;
    double p_capacity = 0.0;
    double xi = 0.33;
};

struct Scenario {
    std::vector<PvSpec> pv;
    double load_scale = 1.0;
};

// Returns a copy of `net` with every load scaled by `load_scale` and the
// requested plants attached.  Scaling composes multiplicatively:
// applying a then b equals applying a*b once.
Network apply_scenario(const Network& net, const std::vector<PvSpec>& pv_spec,
                       double load_scale);

// Scenario overlay file: optional `load_scale` scalar plus [[pv]] entries
// carrying bus, s_rated_kva, p_capacity_kw and optional xi.  Power values
// are converted to p.u. on base_mva.
Scenario parse_scenario(std::string_view text, double base_mva);
Scenario load_scenario(const std::string& path, double base_mva);

}  // namespace faircurtail
