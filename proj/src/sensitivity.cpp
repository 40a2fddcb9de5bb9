#include "faircurtail/sensitivity.hpp"

#include "faircurtail/errors.hpp"

namespace faircurtail {

SensitivityMatrices voltage_sensitivities(const Network& net, const PfSolution& base) {
    const int n = net.size();
    if (base.v.size() != n) throw ValidationError("operating point does not match network");

    std::vector<int> pq;
    pq.reserve(n - 1);
    for (int i = 0; i < n; ++i)
        if (i != net.slack_bus) pq.push_back(i);
    const int m = static_cast<int>(pq.size());

    const Eigen::MatrixXcd ybus = build_ybus(net);
    const Eigen::MatrixXd jac = assemble_jacobian(ybus, base.v, pq);
    const Eigen::MatrixXd jinv = jac.partialPivLu().solve(
        Eigen::MatrixXd::Identity(2 * m, 2 * m));
    if (!jinv.allFinite())
        throw ConvergenceError("load-flow Jacobian is singular at the operating point", 0.0);

    SensitivityMatrices sens;
    sens.kp = Eigen::MatrixXd::Zero(n, n);
    sens.kq = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            sens.kp(pq[a], pq[b]) = jinv(m + a, b);
            sens.kq(pq[a], pq[b]) = jinv(m + a, m + b);
        }
    sens.v_base = base.v_mag;
    sens.p_base = base.injections.p;
    sens.q_base = base.injections.q;
    return sens;
}

Eigen::VectorXd predict_voltages(const SensitivityMatrices& sens,
                                 const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    return sens.v_base + sens.kp * (p - sens.p_base) + sens.kq * (q - sens.q_base);
}

}  // namespace faircurtail
