#pragma once

#include <sgsn/dual_problem.hpp>

namespace sgsn {

/// Violation of dual optimality,
///
///   VDO = dist(z, Prox_{τg}(z − τ∇h(z))) / τ,
///
/// with the proximal set taken in full: at a tie coordinate the nearer of
/// {0, w_i} is used.
double vdo(const DualProblem &P, crvec z, double tau);

/// Violation of primal optimality,
///
///   VPO = max{ dist(−Aᵀz, ∂f(x)), dist(Ax + b, Prox_{ξ𝓘}(Ax + b + ξz)) / ξ },
///
/// where 𝓘 carries weight λ. The first term reduces to ‖∇f(x) + Aᵀz‖ for
/// smooth f.
double vpo(const DualProblem &P, crvec x, crvec z, double xi, double lambda = 1.0);

struct PrimalPoint {
    Vector x; ///< ∇f*(−Aᵀz)
    Vector u; ///< Ax + b
};

PrimalPoint recover_primal(const DualProblem &P, crvec z);

struct PrimalKktResiduals {
    double grad_part = 0;      ///< dist(−Aᵀz, ∂f(x))
    double indicator_part = 0; ///< violation of z ∈ ∂𝓘(u)
    double linear_part = 0;    ///< ‖Ax + b − u‖

    double max() const noexcept;
};

struct PrimalKktCheck {
    bool ok = false;
    PrimalKktResiduals residuals;
};

/// Checks ∂f(x) + Aᵀz ∋ 0, z ∈ ∂𝓘(u), Ax + b = u. In the middle condition a
/// coordinate counts as u_i ≠ 0 only when |u_i| > tol; the violation is
/// max(‖z on {u ≠ 0}‖∞, max(0, −min z)).
PrimalKktCheck check_primal_kkt(const DualProblem &P, crvec x, crvec u, crvec z, double tol);

/// Residual of 0 ∈ ∇h(z) + ∂g(z): max(max(0, −min z), max_{z_i > 0} |∇_i h(z)|).
double dual_kkt_residual(const DualProblem &P, crvec z);

/// Largest ξ-range endpoint for which a primal KKT point (x, u, z) is a fixed
/// point of the indicator prox: min{u_i²/(2λ) : z_i = 0, u_i > 0} and
/// min{2λ/z_i² : z_i > 0}. +∞ when both sets are empty.
double vpo_xi_bound(crvec u, crvec z, double lambda = 1.0);

struct OptimalityReport {
    double vdo = 0;
    double vpo = 0;
    PrimalKktResiduals primal_kkt_residuals;
    double tau_used = 0;
    double xi_used = 0;
    bool is_p_stationary = false;
};

/// VDO at τ, VPO at ξ, and the primal KKT residuals of the recovered point.
/// P-stationarity is declared when VDO ≤ tol.
OptimalityReport optimality_report(const DualProblem &P, crvec z, double tau, double xi,
                                   double lambda = 1.0, double tol = 1e-6);

} // namespace sgsn
