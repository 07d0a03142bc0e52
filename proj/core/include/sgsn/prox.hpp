#pragma once

#include <sgsn/linops.hpp>

#include <limits>

// Proximal and subdifferential kernels for the dual regularizer
//
//   g(z) = μ‖z‖₀ + δ₊(z)
//
// and for the scaled 0/1 loss ξ𝓘(u) = ξλ Σ 1_{(0,∞)}(u_i).

namespace sgsn {

class ProxParams {
  public:
    /// Throws std::invalid_argument unless tau > 0 and mu > 0.
    ProxParams(double tau, double mu);

    double tau() const noexcept { return tau_; }
    double mu() const noexcept { return mu_; }
    /// √(2τμ)
    double threshold() const noexcept { return threshold_; }

  private:
    double tau_, mu_, threshold_;
};

struct ProxResult {
    /// Canonical element of Prox_{τg}(u): ties resolve to 0.
    Vector z;
    /// Coordinates where u_i equals the threshold exactly, i.e. where the
    /// proximal set is {0, u_i}.
    IndexSet ties;
};

ProxResult prox_g(crvec u, const ProxParams &p);

/// Canonical element of Prox_{ξ𝓘}(w) with 𝓘 weighted by λ. Ties at
/// w_i = √(2ξλ) resolve to 0.
Vector prox_indicator(crvec w, double xi, double lambda);

/// v ∈ ∂g(z) (μ drops out): z ≥ 0 and v_i = 0 wherever z_i > 0.
bool in_subdiff_g(crvec z, crvec v);

/// v ∈ ∂𝓘(u): v_i ≥ 0 where u_i = 0 and v_i = 0 where u_i ≠ 0.
bool in_subdiff_indicator(crvec u, crvec v);

struct TauBounds {
    double tau1 = std::numeric_limits<double>::infinity();
    double tau2 = std::numeric_limits<double>::infinity();

    double min() const noexcept { return tau1 < tau2 ? tau1 : tau2; }
};

/// τ₁(z) = min{z_i²/(2μ) : z_i > 0}, τ₂(u) = min{2μ/u_i² : u_i > 0}; +∞ when
/// the respective set is empty.
TauBounds tau_bounds(crvec z, crvec u, double mu);

/// (u_i, z_i) ∈ Ω₁ ∪ Ω₂ for every i, where
/// Ω₁ = {0} × [√(2μτ), ∞) and Ω₂ = (−∞, √(2μ/τ)] × {0}.
bool omega_membership(crvec u, crvec z, const ProxParams &p);

/// Set-valued test z ∈ Prox_{τg}(w), honouring both branches at ties.
bool in_prox_g(crvec z, crvec w, const ProxParams &p);

} // namespace sgsn
