#include "faircurtail/power_flow.hpp"

#include <cmath>

#include "faircurtail/errors.hpp"

namespace faircurtail {

InjectionVector base_injections(const Network& net) {
    InjectionVector inj;
    inj.p = Eigen::VectorXd::Zero(net.size());
    inj.q = Eigen::VectorXd::Zero(net.size());
    for (const LoadPoint& l : net.loads) {
        inj.p(l.bus) -= l.p_nom;
        inj.q(l.bus) -= l.q_nom;
    }
    return inj;
}

Eigen::MatrixXd assemble_jacobian(const Eigen::MatrixXcd& ybus,
                                  const Eigen::VectorXcd& v,
                                  const std::vector<int>& pq) {
    const int m = static_cast<int>(pq.size());
    const Eigen::VectorXd vm = v.cwiseAbs();
    const Eigen::VectorXd va = v.unaryExpr([](std::complex<double> z) { return std::arg(z); });
    // Injected powers at the current point.
    const Eigen::VectorXcd s = v.cwiseProduct((ybus * v).conjugate());

    Eigen::MatrixXd jac(2 * m, 2 * m);
    for (int a = 0; a < m; ++a) {
        const int i = pq[a];
        const double pi = s(i).real(), qi = s(i).imag();
        for (int b = 0; b < m; ++b) {
            const int k = pq[b];
            const double g = ybus(i, k).real(), bsus = ybus(i, k).imag();
            if (i == k) {
                jac(a, b) = -qi - bsus * vm(i) * vm(i);                 // dP/dtheta
                jac(a, m + b) = pi / vm(i) + g * vm(i);                 // dP/dV
                jac(m + a, b) = pi - g * vm(i) * vm(i);                 // dQ/dtheta
                jac(m + a, m + b) = qi / vm(i) - bsus * vm(i);          // dQ/dV
            } else {
                const double th = va(i) - va(k);
                const double c = std::cos(th), sn = std::sin(th);
                jac(a, b) = vm(i) * vm(k) * (g * sn - bsus * c);
                jac(a, m + b) = vm(i) * (g * c + bsus * sn);
                jac(m + a, b) = -vm(i) * vm(k) * (g * c + bsus * sn);
                jac(m + a, m + b) = vm(i) * (g * sn - bsus * c);
            }
        }
    }
    return jac;
}

PfSolution solve_pf(const Network& net, const InjectionVector& inj,
                    const PfOptions& opts) {
    const int n = net.size();
    if (inj.p.size() != n || inj.q.size() != n)
        throw ValidationError("injection vector size does not match network");

    const Eigen::MatrixXcd ybus = build_ybus(net);
    std::vector<int> pq;
    pq.reserve(n - 1);
    for (int i = 0; i < n; ++i)
        if (i != net.slack_bus) pq.push_back(i);
    const int m = static_cast<int>(pq.size());

    Eigen::VectorXd vm = Eigen::VectorXd::Constant(n, opts.v0);
    Eigen::VectorXd va = Eigen::VectorXd::Zero(n);

    auto make_v = [&]() {
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i) v(i) = std::polar(vm(i), va(i));
        return v;
    };

    PfSolution sol;
    double mismatch = 0.0;
    for (int iter = 0; iter <= opts.max_iter; ++iter) {
        const Eigen::VectorXcd v = make_v();
        const Eigen::VectorXcd s = v.cwiseProduct((ybus * v).conjugate());
        Eigen::VectorXd rhs(2 * m);
        for (int a = 0; a < m; ++a) {
            rhs(a) = inj.p(pq[a]) - s(pq[a]).real();
            rhs(m + a) = inj.q(pq[a]) - s(pq[a]).imag();
        }
        mismatch = m > 0 ? rhs.cwiseAbs().maxCoeff() : 0.0;
        if (mismatch < opts.tol) {
            sol.v = v;
            sol.v_mag = vm;
            sol.theta = va;
            sol.injections.p = s.real();
            sol.injections.q = s.imag();
            sol.iterations = iter;
            sol.max_mismatch = mismatch;
            return sol;
        }
        if (iter == opts.max_iter) break;

        const Eigen::MatrixXd jac = assemble_jacobian(ybus, v, pq);
        const Eigen::VectorXd dx = jac.partialPivLu().solve(rhs);
        if (!dx.allFinite())
            throw ConvergenceError("power flow Jacobian solve produced non-finite step",
                                   mismatch);
        for (int a = 0; a < m; ++a) {
            va(pq[a]) += dx(a);
            vm(pq[a]) += dx(m + a);
        }
    }
    throw ConvergenceError("power flow did not converge within " +
                               std::to_string(opts.max_iter) + " iterations",
                           mismatch);
}

std::vector<VoltageViolation> check_voltage_limits(const PfSolution& sol,
                                                   double v_min, double v_max) {
    std::vector<VoltageViolation> out;
    for (int i = 0; i < sol.v_mag.size(); ++i) {
        const double v = sol.v_mag(i);
        if (v > v_max)
            out.push_back({i, v, v - v_max});
        else if (v < v_min)
            out.push_back({i, v, v - v_min});
    }
    return out;
}

}  // namespace faircurtail
