#pragma once

#include <Eigen/Dense>
#include <vector>

#include "faircurtail/network.hpp"

namespace faircurtail {

// Net complex injections per bus (generation minus demand), p.u.
// Entries at the slack bus are ignored by the solver and overwritten
// with the realized slack injection in the solution.
struct InjectionVector {
    Eigen::VectorXd p;
    Eigen::VectorXd q;
};

// Injections implied by the network's loads alone (all negative or zero).
InjectionVector base_injections(const Network& net);

struct PfSolution {
    Eigen::VectorXcd v;       // complex bus voltages
    Eigen::VectorXd v_mag;    // |v|
    Eigen::VectorXd theta;    // arg(v), radians
    InjectionVector injections;  // realized injections including slack
    int iterations = 0;
    double max_mismatch = 0.0;
};

struct PfOptions {
    double v0 = 1.0;     // slack magnitude and flat-start guess
    double tol = 1e-8;   // infinity-norm of the power mismatch, p.u.
    int max_iter = 50;
};

// Newton-Raphson in polar form over the PQ buses, flat start.
// Throws ConvergenceError (carrying the residual) if the mismatch fails
// to reach tol within max_iter iterations.
PfSolution solve_pf(const Network& net, const InjectionVector& inj,
                    const PfOptions& opts = {});

// Load-flow Jacobian [dP/dtheta dP/dV; dQ/dtheta dQ/dV] restricted to the
// buses listed in `pq`, in that order; shared with the sensitivity module.
Eigen::MatrixXd assemble_jacobian(const Eigen::MatrixXcd& ybus,
                                  const Eigen::VectorXcd& v,
                                  const std::vector<int>& pq);

struct VoltageViolation {
    int bus = 0;
    double magnitude = 0.0;
    double excess = 0.0;  // positive above v_max, negative below v_min
};

std::vector<VoltageViolation> check_voltage_limits(const PfSolution& sol,
                                                   double v_min, double v_max);

}  // namespace faircurtail
