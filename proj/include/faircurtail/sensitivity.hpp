#pragma once

#include <Eigen/Dense>

#include "faircurtail/network.hpp"
#include "faircurtail/power_flow.hpp"

namespace faircurtail {

// First-order voltage-magnitude response around an operating point:
// |v| ~ v_base + kp * (p - p_base) + kq * (q - q_base).
// kp(i,k) = d|v_i|/dp_k and kq(i,k) = d|v_i|/dq_k; the slack row and
// column are identically zero (its magnitude is fixed).
struct SensitivityMatrices {
    Eigen::MatrixXd kp;
    Eigen::MatrixXd kq;
    Eigen::VectorXd v_base;
    Eigen::VectorXd p_base;
    Eigen::VectorXd q_base;
};

// Extracts the magnitude rows of the inverse load-flow Jacobian at the
// given converged operating point.
SensitivityMatrices voltage_sensitivities(const Network& net, const PfSolution& base);

// Linearized magnitude prediction for a full injection vector.
Eigen::VectorXd predict_voltages(const SensitivityMatrices& sens,
                                 const Eigen::VectorXd& p, const Eigen::VectorXd& q);

}  // namespace faircurtail
