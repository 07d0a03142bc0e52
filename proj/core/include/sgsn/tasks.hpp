#pragma once

#include <sgsn/dual_problem.hpp>
#include <sgsn/solver.hpp>

#include <optional>
#include <vector>

namespace sgsn {

/// Pairwise-difference operator for AUC maximization. Row (i, j), stored at
/// index i·q₋ + j, is x⁻_j − x⁺_i, so that
///
///   A = (e_{q₊} ⊗ I_{q₋}) X⁻ − (I_{q₊} ⊗ e_{q₋}) X⁺.
///
/// Products cost O((q₊ + q₋) n + q₊q₋); A is never formed.
class AucOperator final : public LinearMap {
  public:
    AucOperator(Matrix Xplus, Matrix Xminus);

    Index rows() const noexcept override { return qp_ * qm_; }
    Index cols() const noexcept override { return Xplus_.cols(); }
    void forward(crvec x, rvec y) const override;
    void adjoint(crvec z, rvec y) const override;
    void forward_restricted(const IndexSet &T, crvec x, rvec yT) const override;
    void adjoint_restricted(const IndexSet &T, crvec zT, rvec y) const override;
    double row_norm_sq(Index row) const override;
    /// q₊‖X⁻‖² + q₋‖X⁺‖² − 2⟨e_{q₋}ᵀX⁻, e_{q₊}ᵀX⁺⟩
    double frobenius_norm_sq() const override;

    Index num_positive() const noexcept { return qp_; }
    Index num_negative() const noexcept { return qm_; }
    const Matrix &Xplus() const noexcept { return Xplus_; }
    const Matrix &Xminus() const noexcept { return Xminus_; }

  private:
    Matrix Xplus_, Xminus_;
    Index qp_, qm_;
};

/// Block-diagonal operator for multi-label classification with ℓ labels.
/// Block k is −(y^{(k)} e_dᵀ) ⊙ C; rows are ordered label-major (k·q + i)
/// and columns likewise (k·d + j).
class MlcOperator final : public LinearMap {
  public:
    MlcOperator(Matrix C, Matrix Y);

    Index rows() const noexcept override { return C_.rows() * Y_.cols(); }
    Index cols() const noexcept override { return C_.cols() * Y_.cols(); }
    void forward(crvec x, rvec y) const override;
    void adjoint(crvec z, rvec y) const override;
    void forward_restricted(const IndexSet &T, crvec x, rvec yT) const override;
    void adjoint_restricted(const IndexSet &T, crvec zT, rvec y) const override;
    double row_norm_sq(Index row) const override;
    double frobenius_norm_sq() const override;

    const Matrix &C() const noexcept { return C_; }
    const Matrix &Y() const noexcept { return Y_; }

  private:
    Matrix C_, Y_;
    Matrix Ct_; // Cᵀ, so that sample rows are contiguous
};

/// Optional replacements for a task's default solver parameters.
struct TaskOverrides {
    std::optional<double> mu, tau, gamma, c1, c2;
    std::optional<int> max_iter;
    /// MLC only: use a fixed τ instead of backtracking.
    bool fixed_tau = false;
};

struct TaskProblem {
    DualProblem problem;
    SgsnConfig config;
};

/// Dual of the AUC model with f = ½‖·‖² and b = e. Defaults:
/// τ = 1/(2ℓ_h), μ = τ/4, γ = 0.1, c₁ = 1/(3ℓ_h), c₂ = 3ℓ_h.
/// Throws std::invalid_argument on empty classes, mismatched columns or
/// ℓ_h ≤ 0.
TaskProblem build_auc_problem(const Matrix &Xplus, const Matrix &Xminus,
                              const TaskOverrides &overrides = {});

/// Fraction of positive/negative pairs with ⟨x⁺_i, x⟩ > ⟨x⁻_j, x⟩. Ties count
/// as misranked.
double auc_metric(const Matrix &Xplus, const Matrix &Xminus, crvec x);

/// Dual of the elastic-net Hamming-loss model with b = e. Defaults: μ = 1e-5,
/// γ = 1e-2, c₁ = 1e-4, c₂ = 1e8, adaptive τ. Throws std::invalid_argument
/// when the last column of C is not all ones or Y has entries outside {−1, 1}.
TaskProblem build_mlc_problem(const Matrix &C, const Matrix &Y, double lambda1,
                              const TaskOverrides &overrides = {});

/// Binary-relevance linear classifier; weights hold ℓ blocks of length d.
class LinearClassifier {
  public:
    LinearClassifier(Vector weights, Index num_features);

    Index num_features() const noexcept { return d_; }
    Index num_labels() const noexcept { return weights_.size() / d_; }
    const Vector &weights() const noexcept { return weights_; }
    Eigen::Map<const Matrix> weight_matrix() const noexcept {
        return {weights_.data(), d_, num_labels()};
    }

  private:
    Vector weights_;
    Index d_;
};

/// sgn(cᵀx_k) per label, with sgn(0) = −1.
std::vector<int> predict(const LinearClassifier &clf, crvec c);

/// Fraction of (sample, label) pairs with −y·cᵀx_k > 0.
double hamming_loss(const Matrix &C, const Matrix &Y, const LinearClassifier &clf);

/// Fraction of (sample, label) pairs where predict() disagrees with Y, so a
/// zero score counts as a −1 prediction.
double prediction_hamming_loss(const Matrix &C, const Matrix &Y, const LinearClassifier &clf);

/// Number of nonzero entries.
Index count_nonzeros(crvec x);

} // namespace sgsn
