#pragma once

#include <utility>
#include <vector>

namespace faircurtail {

// Outer (circumscribed) piecewise-linear approximation of the apparent-
// power circle p^2 + q^2 <= S^2 on the p >= 0 half.  Each segment bounds
// the upper arc via m_k*p + q <= n_k; the mirrored cut m_k*p - q <= n_k
// bounds the lower arc.  Every point inside the circle satisfies all cuts.
struct CapabilityCuts {
    std::vector<std::pair<double, double>> segments;  // (m_k, n_k)
    double s_rated = 0.0;
};

struct PvSetpoint {
    double p = 0.0;  // active power, p.u. (>= 0)
    double q = 0.0;  // reactive power, p.u.
};

// Tangent cuts at k_segments equally spaced angles across the quadrant
// arc (tangency at (k - 1/2) * 90deg / K), so the polygon circumscribes
// the circle with radial over-approximation at most
// s_rated * (1/cos(pi/(4K)) - 1).  Throws ValidationError if k_segments < 2
// or s_rated <= 0.
CapabilityCuts capability_cuts(double s_rated, int k_segments);

struct QBounds {
    double lo = 0.0;
    double hi = 0.0;
    bool empty = false;  // p exceeds the linearized capability
};

// Reactive-power interval at active power p under the symmetric
// power-factor cone -xi*p <= q <= xi*p intersected with the cuts:
// hi = min(xi*p, min_k(n_k - m_k*p)), lo = -hi.
QBounds feasible_q_bounds(double p, double xi, const CapabilityCuts& cuts);

// Clamps an optimizer setpoint against actual conditions: active power
// capped by the actual MPP (and by the linearized capability), reactive
// power clamped into the feasible interval at the realized active power.
PvSetpoint realize_setpoint(const PvSetpoint& sp, double mpp_actual, double xi,
                            const CapabilityCuts& cuts);

}  // namespace faircurtail
