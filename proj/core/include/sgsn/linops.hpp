#pragma once

#include <Eigen/Core>

#include <functional>
#include <span>
#include <vector>

namespace sgsn {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using crvec = Eigen::Ref<const Vector>;
using rvec = Eigen::Ref<Vector>;

/// Sorted, duplicate-free set of row indices in [0, m).
class IndexSet {
  public:
    IndexSet() = default;

    /// Takes ownership of `indices`; throws std::invalid_argument unless they
    /// are strictly increasing and nonnegative.
    explicit IndexSet(std::vector<Index> indices);

    static IndexSet all(Index m);

    /// Indices of the entries of `mask` that are true.
    static IndexSet from_mask(std::span<const bool> mask);

    [[nodiscard]] Index size() const noexcept { return static_cast<Index>(indices_.size()); }
    [[nodiscard]] bool empty() const noexcept { return indices_.empty(); }
    [[nodiscard]] Index operator[](Index k) const { return indices_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] bool contains(Index i) const noexcept;
    [[nodiscard]] std::span<const Index> indices() const noexcept { return indices_; }
    [[nodiscard]] auto begin() const noexcept { return indices_.begin(); }
    [[nodiscard]] auto end() const noexcept { return indices_.end(); }

    /// Throws std::out_of_range if the largest index is not below `m`.
    void check_bound(Index m) const;

    bool operator==(const IndexSet &) const = default;

  private:
    std::vector<Index> indices_;
};

/// x_T
Vector gather(crvec x, const IndexSet &T);
/// Vector of length m equal to xT on T and zero elsewhere.
Vector scatter(crvec xT, const IndexSet &T, Index m);

/// Matrix-free m×n operator. Implementations provide the full products and a
/// closed form for the Frobenius norm; the row-restricted products default to
/// gather/scatter around the full products and are overridden where the
/// structure allows something cheaper.
class LinearMap {
  public:
    virtual ~LinearMap() = default;

    [[nodiscard]] virtual Index rows() const noexcept = 0;
    [[nodiscard]] virtual Index cols() const noexcept = 0;

    /// y = A x. `y` is pre-sized to rows().
    virtual void forward(crvec x, rvec y) const = 0;
    /// y = Aᵀ z. `y` is pre-sized to cols().
    virtual void adjoint(crvec z, rvec y) const = 0;
    /// yT = (A x)_T. `yT` is pre-sized to |T|.
    virtual void forward_restricted(const IndexSet &T, crvec x, rvec yT) const;
    /// y = A_{T:}ᵀ zT. `y` is pre-sized to cols().
    virtual void adjoint_restricted(const IndexSet &T, crvec zT, rvec y) const;

    [[nodiscard]] virtual double row_norm_sq(Index i) const = 0;
    [[nodiscard]] virtual double frobenius_norm_sq() const = 0;
};

// Checked, allocating wrappers around the virtual interface.
Vector apply(const LinearMap &A, crvec x);
Vector apply_adjoint(const LinearMap &A, crvec z);
Vector apply_restricted(const LinearMap &A, const IndexSet &T, crvec x);
Vector apply_adjoint_restricted(const LinearMap &A, const IndexSet &T, crvec zT);
double frobenius_norm_sq(const LinearMap &A);

/// Explicit dense matrix.
class DenseMap final : public LinearMap {
  public:
    explicit DenseMap(Matrix A) : A_(std::move(A)) {}

    Index rows() const noexcept override { return A_.rows(); }
    Index cols() const noexcept override { return A_.cols(); }
    void forward(crvec x, rvec y) const override;
    void adjoint(crvec z, rvec y) const override;
    void forward_restricted(const IndexSet &T, crvec x, rvec yT) const override;
    void adjoint_restricted(const IndexSet &T, crvec zT, rvec y) const override;
    double row_norm_sq(Index i) const override;
    double frobenius_norm_sq() const override;

    const Matrix &matrix() const noexcept { return A_; }

  private:
    Matrix A_;
};

class IdentityMap final : public LinearMap {
  public:
    explicit IdentityMap(Index n) : n_(n) {}

    Index rows() const noexcept override { return n_; }
    Index cols() const noexcept override { return n_; }
    void forward(crvec x, rvec y) const override { y = x; }
    void adjoint(crvec z, rvec y) const override { y = z; }
    double row_norm_sq(Index) const override { return 1.0; }
    double frobenius_norm_sq() const override { return static_cast<double>(n_); }

  private:
    Index n_;
};

class ZeroMap final : public LinearMap {
  public:
    ZeroMap(Index m, Index n) : m_(m), n_(n) {}

    Index rows() const noexcept override { return m_; }
    Index cols() const noexcept override { return n_; }
    void forward(crvec, rvec y) const override { y.setZero(); }
    void adjoint(crvec, rvec y) const override { y.setZero(); }
    double row_norm_sq(Index) const override { return 0.0; }
    double frobenius_norm_sq() const override { return 0.0; }

  private:
    Index m_, n_;
};

/// Diagonal n×n operator, used for elements of the generalized Jacobian of ∇f*.
struct DiagonalMap {
    Vector diag;

    [[nodiscard]] Index size() const noexcept { return diag.size(); }
    [[nodiscard]] Vector apply(crvec x) const { return diag.cwiseProduct(x); }
};

/// Dense materialization, for tests and small instances only.
Matrix materialize(const LinearMap &A);

using SymmetricOperator = std::function<void(crvec, rvec)>;

struct CgResult {
    Vector solution;
    double residual_norm = 0;
    int iterations = 0;
    /// False when max_iter was hit before reaching the tolerance; `solution`
    /// is then the iterate with the smallest residual seen.
    bool converged = false;
};

inline int default_cg_max_iter(Index system_size) { return static_cast<int>(2 * system_size + 20); }

/// Conjugate gradient for an SPD operator. Stops once
/// ‖op(d) − rhs‖ ≤ tol · max(1, ‖rhs‖). Throws std::runtime_error on
/// non-finite arithmetic.
CgResult cg_solve(const SymmetricOperator &op, crvec rhs, double tol = 1e-8, int max_iter = -1);

} // namespace sgsn
