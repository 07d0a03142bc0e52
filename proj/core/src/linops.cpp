#include <sgsn/linops.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sgsn {

IndexSet::IndexSet(std::vector<Index> indices) : indices_(std::move(indices)) {
    for (std::size_t k = 0; k < indices_.size(); ++k) {
        if (indices_[k] < 0)
            throw std::invalid_argument("IndexSet: negative index");
        if (k > 0 && indices_[k] <= indices_[k - 1])
            throw std::invalid_argument("IndexSet: indices must be strictly increasing");
    }
}

IndexSet IndexSet::all(Index m) {
    std::vector<Index> idx(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i)
        idx[static_cast<std::size_t>(i)] = i;
    IndexSet T;
    T.indices_ = std::move(idx);
    return T;
}

IndexSet IndexSet::from_mask(std::span<const bool> mask) {
    IndexSet T;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i])
            T.indices_.push_back(static_cast<Index>(i));
    return T;
}

bool IndexSet::contains(Index i) const noexcept {
    auto it = std::lower_bound(indices_.begin(), indices_.end(), i);
    return it != indices_.end() && *it == i;
}

void IndexSet::check_bound(Index m) const {
    if (!indices_.empty() && indices_.back() >= m)
        throw std::out_of_range("IndexSet: index " + std::to_string(indices_.back()) +
                                " out of range for " + std::to_string(m) + " rows");
}

Vector gather(crvec x, const IndexSet &T) {
    Vector xT(T.size());
    for (Index k = 0; k < T.size(); ++k)
        xT(k) = x(T[k]);
    return xT;
}

Vector scatter(crvec xT, const IndexSet &T, Index m) {
    Vector x = Vector::Zero(m);
    for (Index k = 0; k < T.size(); ++k)
        x(T[k]) = xT(k);
    return x;
}

void LinearMap::forward_restricted(const IndexSet &T, crvec x, rvec yT) const {
    Vector y(rows());
    forward(x, y);
    for (Index k = 0; k < T.size(); ++k)
        yT(k) = y(T[k]);
}

void LinearMap::adjoint_restricted(const IndexSet &T, crvec zT, rvec y) const {
    adjoint(scatter(zT, T, rows()), y);
}

namespace {
void check_size(Index got, Index want, const char *what) {
    if (got != want)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (got " +
                                    std::to_string(got) + ", expected " +
                                    std::to_string(want) + ")");
}
} // namespace

Vector apply(const LinearMap &A, crvec x) {
    check_size(x.size(), A.cols(), "apply");
    Vector y(A.rows());
    A.forward(x, y);
    return y;
}

Vector apply_adjoint(const LinearMap &A, crvec z) {
    check_size(z.size(), A.rows(), "apply_adjoint");
    Vector y(A.cols());
    A.adjoint(z, y);
    return y;
}

Vector apply_restricted(const LinearMap &A, const IndexSet &T, crvec x) {
    check_size(x.size(), A.cols(), "apply_restricted");
    T.check_bound(A.rows());
    Vector yT(T.size());
    A.forward_restricted(T, x, yT);
    return yT;
}

Vector apply_adjoint_restricted(const LinearMap &A, const IndexSet &T, crvec zT) {
    check_size(zT.size(), T.size(), "apply_adjoint_restricted");
    T.check_bound(A.rows());
    Vector y(A.cols());
    if (T.empty())
        y.setZero();
    else
        A.adjoint_restricted(T, zT, y);
    return y;
}

double frobenius_norm_sq(const LinearMap &A) { return A.frobenius_norm_sq(); }

void DenseMap::forward(crvec x, rvec y) const { y.noalias() = A_ * x; }

void DenseMap::adjoint(crvec z, rvec y) const { y.noalias() = A_.transpose() * z; }

void DenseMap::forward_restricted(const IndexSet &T, crvec x, rvec yT) const {
    for (Index k = 0; k < T.size(); ++k)
        yT(k) = A_.row(T[k]).dot(x);
}

void DenseMap::adjoint_restricted(const IndexSet &T, crvec zT, rvec y) const {
    y.setZero();
    for (Index k = 0; k < T.size(); ++k)
        y += zT(k) * A_.row(T[k]).transpose();
}

double DenseMap::row_norm_sq(Index i) const { return A_.row(i).squaredNorm(); }

double DenseMap::frobenius_norm_sq() const { return A_.squaredNorm(); }

Matrix materialize(const LinearMap &A) {
    Matrix M(A.rows(), A.cols());
    Vector e = Vector::Zero(A.cols());
    Vector col(A.rows());
    for (Index j = 0; j < A.cols(); ++j) {
        e(j) = 1;
        A.forward(e, col);
        M.col(j) = col;
        e(j) = 0;
    }
    return M;
}

CgResult cg_solve(const SymmetricOperator &op, crvec rhs, double tol, int max_iter) {
    if (!(tol > 0))
        throw std::invalid_argument("cg_solve: tol must be positive");
    if (!rhs.allFinite())
        throw std::runtime_error("cg_solve: non-finite right-hand side");
    const Index n = rhs.size();
    if (max_iter < 0)
        max_iter = default_cg_max_iter(n);

    CgResult res;
    res.solution = Vector::Zero(n);
    const double target = tol * std::max(1.0, rhs.norm());

    Vector r = rhs, p = rhs, Ap(n);
    double rr = r.squaredNorm();
    Vector best = res.solution;
    double best_rr = rr;
    Vector &x = res.solution;

    int it = 0;
    while (std::sqrt(rr) > target && it < max_iter) {
        op(p, Ap);
        const double pAp = p.dot(Ap);
        if (!std::isfinite(pAp))
            throw std::runtime_error("cg_solve: non-finite value in operator product");
        if (pAp <= 0)
            break; // lost positive definiteness numerically; keep best iterate
        const double alpha = rr / pAp;
        x += alpha * p;
        r -= alpha * Ap;
        const double rr_new = r.squaredNorm();
        if (!std::isfinite(rr_new))
            throw std::runtime_error("cg_solve: non-finite residual");
        ++it;
        if (rr_new < best_rr) {
            best_rr = rr_new;
            best = x;
        }
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }

    res.iterations = it;
    res.solution = std::move(best);
    // true residual of the returned iterate
    op(res.solution, Ap);
    res.residual_norm = (Ap - rhs).norm();
    res.converged = std::sqrt(best_rr) <= target;
    return res;
}

} // namespace sgsn
