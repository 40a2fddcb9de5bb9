#include "faircurtail/pv_device.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "faircurtail/errors.hpp"

namespace faircurtail {

CapabilityCuts capability_cuts(double s_rated, int k_segments) {
    if (s_rated <= 0.0) throw ValidationError("s_rated must be positive");
    if (k_segments < 2) throw ValidationError("k_segments must be at least 2");
    CapabilityCuts cuts;
    cuts.s_rated = s_rated;
    cuts.segments.reserve(k_segments);
    const double span = std::numbers::pi / 2.0;
    for (int k = 1; k <= k_segments; ++k) {
        // tangency angle centered in the k-th arc slice
        const double phi = (k - 0.5) * span / k_segments;
        const double m = std::cos(phi) / std::sin(phi);
        const double n = s_rated / std::sin(phi);
        cuts.segments.emplace_back(m, n);
    }
    return cuts;
}

QBounds feasible_q_bounds(double p, double xi, const CapabilityCuts& cuts) {
    QBounds b;
    double hi = xi * p;
    for (const auto& [m, n] : cuts.segments) hi = std::min(hi, n - m * p);
    b.hi = hi;
    b.lo = -hi;
    b.empty = hi < 0.0;
    return b;
}

PvSetpoint realize_setpoint(const PvSetpoint& sp, double mpp_actual, double xi,
                            const CapabilityCuts& cuts) {
    PvSetpoint out;
    out.p = std::max(0.0, std::min(sp.p, mpp_actual));
    // Largest active power with a non-empty reactive interval.
    double p_cap = out.p;
    for (const auto& [m, n] : cuts.segments)
        if (m > 0.0) p_cap = std::min(p_cap, n / m);
    out.p = std::min(out.p, p_cap);
    const QBounds qb = feasible_q_bounds(out.p, xi, cuts);
    out.q = std::clamp(sp.q, qb.lo, qb.hi);
    return out;
}

}  // namespace faircurtail
