#pragma once

#include <string>
#include <vector>

#include "faircurtail/simulation.hpp"

namespace faircurtail {

struct SweepRow {
    std::string variant;
    double w = 0.0;
    int day = 0;  // horizon the metrics are taken at (final day)
    double curtail_pct = 0.0;
    double jfi = 1.0;
    double gini = 0.0;
    bool ok = false;
    std::string error;
};

// One full simulation per (variant, weight); failed runs are recorded in
// their row and the sweep continues.  Rows are ordered by variant then
// ascending weight; runs are independent and execute in parallel when
// more than one hardware thread is available.
std::vector<SweepRow> pareto_sweep(const Network& net, const RunConfig& base,
                                   const Profiles& profiles,
                                   const std::vector<double>& weights,
                                   const std::vector<std::string>& variants = {
                                       "F0P0", "F0P1", "F1P0", "F1P1"});

}  // namespace faircurtail
