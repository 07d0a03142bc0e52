#pragma once

#include <sgsn/conjugate.hpp>
#include <sgsn/linops.hpp>

#include <memory>
#include <optional>

namespace sgsn {

/// The sparse dual of min_x f(x) + 𝓘(Ax + b):
///
///   min_z F(z) = h(z) + g(z),   h(z) = f*(−Aᵀz) − ⟨z, b⟩,   g(z) = μ‖z‖₀ + δ₊(z).
///
/// ∇h is ℓ_h-Lipschitz with ℓ_h = ‖A‖²_F / σ_f unless a tighter value is
/// supplied by the caller.
class DualProblem {
  public:
    /// Throws std::invalid_argument on dimension mismatch, mu <= 0, or a
    /// non-positive ℓ_h.
    DualProblem(std::shared_ptr<const LinearMap> A, Vector b,
                std::shared_ptr<const ConjugateModel> model, double mu,
                std::optional<double> ell_h = std::nullopt);

    const LinearMap &A() const noexcept { return *A_; }
    const Vector &b() const noexcept { return b_; }
    const ConjugateModel &model() const noexcept { return *model_; }
    double mu() const noexcept { return mu_; }
    double ell_h() const noexcept { return ell_h_; }
    Index m() const noexcept { return A_->rows(); }
    Index n() const noexcept { return A_->cols(); }

    std::shared_ptr<const LinearMap> shared_A() const noexcept { return A_; }
    std::shared_ptr<const ConjugateModel> shared_model() const noexcept { return model_; }

    /// Same data with a different sparsity weight.
    DualProblem with_mu(double mu) const;

  private:
    std::shared_ptr<const LinearMap> A_;
    Vector b_;
    std::shared_ptr<const ConjugateModel> model_;
    double mu_;
    double ell_h_;
};

/// Everything the solver needs at one dual point, computed together.
struct DualState {
    Vector z;
    Vector neg_At_z; ///< −Aᵀz
    Vector x;        ///< ∇f*(−Aᵀz)
    Vector grad_h;   ///< −(Ax + b)
    double h_val = 0;
    double g_val = 0;
    Index support = 0; ///< ‖z‖₀
    bool feasible = true;

    /// F(z), +∞ off the nonnegative orthant.
    double F() const noexcept;
};

/// Evaluates all cached quantities at z. A z with a negative entry yields a
/// state flagged infeasible (F = +∞) whose other fields are still filled in.
DualState eval_state(const DualProblem &P, Vector z);

double F_value(const DualProblem &P, const DualState &s);

/// The generalized Hessian restricted to T plus a ridge,
///
///   d ↦ A_{T:} Q A_{T:}ᵀ d + γ d,   Q ∈ ∂²f*(−Aᵀz),
///
/// applied matrix-free. Q is selected once at construction.
class SubspaceHessian {
  public:
    SubspaceHessian(const DualProblem &P, const DualState &s, IndexSet T, double gamma);

    Index size() const noexcept { return T_.size(); }
    const IndexSet &subspace() const noexcept { return T_; }
    void apply(crvec dT, rvec out) const;
    Vector operator()(crvec dT) const;

  private:
    const DualProblem *P_;
    IndexSet T_;
    DiagonalMap Q_;
    double gamma_;
    mutable Vector work_;
};

Vector subspace_hessian_apply(const DualProblem &P, const DualState &s, const IndexSet &T,
                              double gamma, crvec dT);

} // namespace sgsn
