#include <sgsn/stationarity.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgsn {

double vdo(const DualProblem &P, crvec z, double tau) {
    if (!(tau > 0))
        throw std::invalid_argument("vdo: tau must be positive");
    const DualState s = eval_state(P, z);
    const double theta = std::sqrt(2 * tau * P.mu());
    double sq = 0;
    for (Index i = 0; i < z.size(); ++i) {
        const double w = z(i) - tau * s.grad_h(i);
        double gap;
        if (w > theta)
            gap = z(i) - w;
        else if (w == theta)
            gap = std::min(std::abs(z(i)), std::abs(z(i) - w));
        else
            gap = z(i);
        sq += gap * gap;
    }
    return std::sqrt(sq) / tau;
}

double vpo(const DualProblem &P, crvec x, crvec z, double xi, double lambda) {
    if (!(xi > 0) || !(lambda > 0))
        throw std::invalid_argument("vpo: xi and lambda must be positive");
    const Vector neg_At_z = -apply_adjoint(P.A(), z);
    const double grad_part = P.model().primal_subdiff_dist(x, neg_At_z);

    Vector u = apply(P.A(), x) + P.b();
    const double thr = std::sqrt(2 * xi * lambda);
    double sq = 0;
    for (Index i = 0; i < u.size(); ++i) {
        const double w = u(i) + xi * z(i);
        double gap;
        if (w <= 0 || w > thr)
            gap = u(i) - w;
        else if (w == thr)
            gap = std::min(std::abs(u(i)), std::abs(u(i) - w));
        else
            gap = u(i);
        sq += gap * gap;
    }
    return std::max(grad_part, std::sqrt(sq) / xi);
}

PrimalPoint recover_primal(const DualProblem &P, crvec z) {
    PrimalPoint pt;
    pt.x = P.model().fstar_grad(-apply_adjoint(P.A(), z));
    pt.u = apply(P.A(), pt.x) + P.b();
    return pt;
}

double PrimalKktResiduals::max() const noexcept {
    return std::max({grad_part, indicator_part, linear_part});
}

PrimalKktCheck check_primal_kkt(const DualProblem &P, crvec x, crvec u, crvec z, double tol) {
    PrimalKktCheck out;
    auto &r = out.residuals;
    r.grad_part = P.model().primal_subdiff_dist(x, -apply_adjoint(P.A(), z));
    double viol = 0;
    for (Index i = 0; i < z.size(); ++i) {
        viol = std::max(viol, -z(i));
        if (std::abs(u(i)) > tol)
            viol = std::max(viol, std::abs(z(i)));
    }
    r.indicator_part = viol;
    r.linear_part = (apply(P.A(), x) + P.b() - u).norm();
    out.ok = r.max() <= tol;
    return out;
}

double dual_kkt_residual(const DualProblem &P, crvec z) {
    const DualState s = eval_state(P, z);
    double r = 0;
    for (Index i = 0; i < z.size(); ++i) {
        r = std::max(r, -z(i));
        if (z(i) > 0)
            r = std::max(r, std::abs(s.grad_h(i)));
    }
    return r;
}

double vpo_xi_bound(crvec u, crvec z, double lambda) {
    double bound = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < z.size(); ++i) {
        if (z(i) > 0)
            bound = std::min(bound, 2 * lambda / (z(i) * z(i)));
        else if (u(i) > 0)
            bound = std::min(bound, u(i) * u(i) / (2 * lambda));
    }
    return bound;
}

OptimalityReport optimality_report(const DualProblem &P, crvec z, double tau, double xi,
                                   double lambda, double tol) {
    OptimalityReport rep;
    rep.tau_used = tau;
    rep.xi_used = xi;
    rep.vdo = vdo(P, z, tau);
    const PrimalPoint pt = recover_primal(P, z);
    rep.vpo = vpo(P, pt.x, z, xi, lambda);
    rep.primal_kkt_residuals = check_primal_kkt(P, pt.x, pt.u, z, tol).residuals;
    rep.is_p_stationary = rep.vdo <= tol;
    return rep;
}

} // namespace sgsn
