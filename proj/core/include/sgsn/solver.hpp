#pragma once

#include <sgsn/dual_problem.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sgsn {

/// Geometric backtracking for the proximal step: τ_k = base^j for the
/// smallest j ≥ 0 with F(z^k) − F(v^k) ≥ descent_coef · ‖v^k − z^k‖².
struct AdaptiveTau {
    double base = 0.1;
    double descent_coef = 1e-4;
    int max_power = 16;
};

struct SgsnConfig {
    /// Fixed proximal step, required to lie in (0, 1/ℓ_h). Ignored when
    /// adaptive_tau is set.
    double tau = 0;
    double gamma = 0.1;
    double c1 = 1e-4;
    double c2 = 1e8;
    int max_iter = 1000;
    /// Stop once VDO_k / VDO_1 ≤ vdo_rel_tol (0 disables).
    double vdo_rel_tol = 1e-3;
    /// Stop once |VDO_k − VDO_{k−1}| < vdo_change_tol (0 disables).
    double vdo_change_tol = 1e-3;
    /// Stop once VDO_k ≤ vdo_abs_tol. The default only fires on exact zeros.
    double vdo_abs_tol = 0;
    std::optional<AdaptiveTau> adaptive_tau;
    /// Disables step 2 of the method; the iteration reduces to proximal
    /// gradient on the dual.
    bool newton = true;
    double cg_tol = 1e-8;
    /// Negative selects 2|T| + 20.
    int cg_max_iter = -1;
    std::uint64_t rng_seed = 0;

    /// Throws std::invalid_argument on non-positive constants or, for a fixed
    /// step, τ ∉ (0, 1/ℓ_h).
    void validate(const DualProblem &P) const;
};

enum class StepKind { newton_accepted, gradient_fallback, converged };
enum class SolveStatus { converged, max_iter, stagnated };

std::string_view to_string(StepKind kind) noexcept;
std::string_view to_string(SolveStatus status) noexcept;

/// One row of the convergence trace. For step rows, F and vdo describe the
/// iterate produced by the step; support, alpha and cg_iters describe the
/// step itself. A run that stops on its stopping rule appends one
/// `converged` row describing the final iterate.
struct IterationRecord {
    int k = 0;
    double F = 0;
    double vdo = 0;
    Index support = 0; ///< |T_k|
    StepKind step = StepKind::gradient_fallback;
    double alpha = 0;
    int cg_iters = 0;
    std::int64_t wall_ns = 0;

    double tau = 0;            ///< proximal step used
    double F_start = 0;        ///< F(z^k)
    double F_gradient = 0;     ///< F(v^k)
    double prox_step_sq = 0;   ///< ‖v^k − z^k‖²
    bool tau_fallback = false; ///< adaptive τ exhausted its backtracking
};

/// Full view of an iteration for observers that check invariants.
struct IterationView {
    const IterationRecord &record;
    const Vector &z;      ///< z^k
    const Vector &v;      ///< v^k
    const IndexSet &T;    ///< T_k
    const Vector *trial;  ///< Newton trial point, null when not formed
    const Vector &z_next; ///< z^{k+1}
};

using IterationObserver = std::function<void(const IterationView &)>;

struct SolveResult {
    Vector z_star;
    Vector x_star; ///< ∇f*(−Aᵀz*)
    Vector u_star; ///< −∇h(z*) = A x* + b
    double F_star = 0;
    double vdo_final = 0;
    double tau_final = 0;
    int iterations = 0;
    std::vector<IterationRecord> trace;
    SolveStatus status = SolveStatus::max_iter;
    std::vector<std::string> warnings;
};

/// Raised when F becomes non-finite; carries the iteration at which it
/// happened.
class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string &what, int iteration)
        : std::runtime_error(what), iteration_(iteration) {}
    int iteration() const noexcept { return iteration_; }

  private:
    int iteration_;
};

struct SubspaceStep {
    IndexSet T; ///< {i : [z − τ∇h(z)]_i > √(2τμ)}
    Vector v;   ///< z − τ∇h(z) on T, zero elsewhere
};

/// Proximal-gradient step and working subspace. Coordinates exactly at the
/// threshold are left out of T.
SubspaceStep identify_subspace(const DualProblem &P, const DualState &s, double tau);

struct NewtonDirection {
    Vector dT;
    double gamma_k = 0;
    int cg_iters = 0;
    bool cg_converged = true;
    /// ∇_T h(v) = 0: dT is zero and v is a KKT point.
    bool subspace_stationary = false;
};

/// Solves (H_T + γ_k I) d_T = −∇_T h(v) with γ_k = γ‖∇_T h(v)‖ by CG.
NewtonDirection newton_direction(const DualProblem &P, const DualState &v_state,
                                 const IndexSet &T, const SgsnConfig &cfg);

/// min{1, min{−v_i/d_i : d_i < 0}}
double step_length(crvec vT, crvec dT);

/// Conditions C1 and C2:
///   F(v) − F(z̃) ≥ c₁‖z̃ − v‖²   and   ‖∇_T h(z̃)‖ ≤ c₂‖z̃ − v‖.
bool accept_newton(const DualProblem &P, const DualState &v_state, const DualState &trial_state,
                   const IndexSet &T, const SgsnConfig &cfg);

struct TauChoice {
    double tau = 0;
    int power = 0;
    bool fell_back = false;
    SubspaceStep step;
    DualState v_state;
};

/// Backtracks τ = base^j until the proximal point descends sufficiently;
/// falls back to τ = 1/(2ℓ_h) when max_power is exhausted.
TauChoice adapt_tau(const DualProblem &P, const DualState &s, const SgsnConfig &cfg);

/// Runs the subspace gradient semismooth Newton method from z0 (zero when
/// omitted). A z0 with negative entries is projected onto the orthant and a
/// warning is recorded.
SolveResult solve(const DualProblem &P, const SgsnConfig &cfg,
                  std::optional<Vector> z0 = std::nullopt,
                  const IterationObserver &observer = {});

} // namespace sgsn
