#pragma once

#include <sgsn/linops.hpp>

namespace sgsn {

/// A σ_f-strongly convex function f together with its conjugate f*, which is
/// then (1/σ_f)-smooth. The generalized Jacobian of ∇f* is diagonal for every
/// shipped model.
class ConjugateModel {
  public:
    virtual ~ConjugateModel() = default;

    [[nodiscard]] virtual double sigma_f() const noexcept = 0;

    [[nodiscard]] virtual double f_value(crvec x) const = 0;
    [[nodiscard]] virtual double fstar_value(crvec v) const = 0;
    [[nodiscard]] virtual Vector fstar_grad(crvec v) const = 0;
    /// A selected element of ∂²f*(v). Entries lie in [0, 1/σ_f].
    [[nodiscard]] virtual DiagonalMap fstar_jacobian_diag(crvec v) const = 0;
    /// dist(s, ∂f(x))
    [[nodiscard]] virtual double primal_subdiff_dist(crvec x, crvec s) const = 0;
};

/// f(x) = ½‖x‖², which is its own conjugate.
class SquaredL2Model final : public ConjugateModel {
  public:
    double sigma_f() const noexcept override { return 1.0; }
    double f_value(crvec x) const override { return 0.5 * x.squaredNorm(); }
    double fstar_value(crvec v) const override { return 0.5 * v.squaredNorm(); }
    Vector fstar_grad(crvec v) const override { return v; }
    DiagonalMap fstar_jacobian_diag(crvec v) const override { return {Vector::Ones(v.size())}; }
    double primal_subdiff_dist(crvec x, crvec s) const override { return (s - x).norm(); }
};

/// Elastic net f(x) = ½‖x‖² + λ₁‖x‖₁. The conjugate is separable,
/// f*(v) = Σ φ(v_i) with φ(t) = ½ max(|t| − λ₁, 0)², so ∇f* is the soft
/// threshold at λ₁ and its Jacobian is 1 outside the dead zone, 0 inside.
/// At |v_i| = λ₁ the Jacobian selector picks 0.
class ElasticNetModel final : public ConjugateModel {
  public:
    /// Throws std::invalid_argument unless lambda1 > 0.
    explicit ElasticNetModel(double lambda1);

    double lambda1() const noexcept { return lambda1_; }

    double sigma_f() const noexcept override { return 1.0; }
    double f_value(crvec x) const override;
    double fstar_value(crvec v) const override;
    Vector fstar_grad(crvec v) const override;
    DiagonalMap fstar_jacobian_diag(crvec v) const override;
    double primal_subdiff_dist(crvec x, crvec s) const override;

  private:
    double lambda1_;
};

} // namespace sgsn
