#include <sgsn/prox.hpp>

#include <cmath>
#include <stdexcept>

namespace sgsn {

ProxParams::ProxParams(double tau, double mu)
    : tau_(tau), mu_(mu), threshold_(std::sqrt(2 * tau * mu)) {
    if (!(tau > 0) || !(mu > 0))
        throw std::invalid_argument("ProxParams: tau and mu must be positive");
}

ProxResult prox_g(crvec u, const ProxParams &p) {
    const double theta = p.threshold();
    ProxResult res;
    res.z = Vector::Zero(u.size());
    std::vector<Index> ties;
    for (Index i = 0; i < u.size(); ++i) {
        if (u(i) > theta)
            res.z(i) = u(i);
        else if (u(i) == theta)
            ties.push_back(i);
    }
    res.ties = IndexSet(std::move(ties));
    return res;
}

Vector prox_indicator(crvec w, double xi, double lambda) {
    if (!(xi > 0) || !(lambda > 0))
        throw std::invalid_argument("prox_indicator: xi and lambda must be positive");
    const double thr = std::sqrt(2 * xi * lambda);
    Vector out(w.size());
    for (Index i = 0; i < w.size(); ++i)
        out(i) = (w(i) <= 0 || w(i) > thr) ? w(i) : 0.0;
    return out;
}

bool in_subdiff_g(crvec z, crvec v) {
    for (Index i = 0; i < z.size(); ++i) {
        if (z(i) < 0)
            return false;
        if (z(i) > 0 && v(i) != 0)
            return false;
    }
    return true;
}

bool in_subdiff_indicator(crvec u, crvec v) {
    for (Index i = 0; i < u.size(); ++i) {
        if (u(i) == 0) {
            if (v(i) < 0)
                return false;
        } else if (v(i) != 0) {
            return false;
        }
    }
    return true;
}

TauBounds tau_bounds(crvec z, crvec u, double mu) {
    if (!(mu > 0))
        throw std::invalid_argument("tau_bounds: mu must be positive");
    TauBounds b;
    for (Index i = 0; i < z.size(); ++i)
        if (z(i) > 0)
            b.tau1 = std::min(b.tau1, z(i) * z(i) / (2 * mu));
    for (Index i = 0; i < u.size(); ++i)
        if (u(i) > 0)
            b.tau2 = std::min(b.tau2, 2 * mu / (u(i) * u(i)));
    return b;
}

bool omega_membership(crvec u, crvec z, const ProxParams &p) {
    const double z_floor = std::sqrt(2 * p.mu() * p.tau());
    const double u_ceil = std::sqrt(2 * p.mu() / p.tau());
    for (Index i = 0; i < u.size(); ++i) {
        const bool omega1 = u(i) == 0 && z(i) >= z_floor;
        const bool omega2 = u(i) <= u_ceil && z(i) == 0;
        if (!omega1 && !omega2)
            return false;
    }
    return true;
}

bool in_prox_g(crvec z, crvec w, const ProxParams &p) {
    const double theta = p.threshold();
    for (Index i = 0; i < w.size(); ++i) {
        if (w(i) > theta) {
            if (z(i) != w(i))
                return false;
        } else if (w(i) == theta) {
            if (z(i) != 0 && z(i) != w(i))
                return false;
        } else if (z(i) != 0) {
            return false;
        }
    }
    return true;
}

} // namespace sgsn
