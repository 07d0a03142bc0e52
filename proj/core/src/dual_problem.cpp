#include <sgsn/dual_problem.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgsn {

DualProblem::DualProblem(std::shared_ptr<const LinearMap> A, Vector b,
                         std::shared_ptr<const ConjugateModel> model, double mu,
                         std::optional<double> ell_h)
    : A_(std::move(A)), b_(std::move(b)), model_(std::move(model)), mu_(mu) {
    if (!A_ || !model_)
        throw std::invalid_argument("DualProblem: operator and model are required");
    if (b_.size() != A_->rows())
        throw std::invalid_argument("DualProblem: b must have one entry per row of A");
    if (!(mu_ > 0))
        throw std::invalid_argument("DualProblem: mu must be positive");
    ell_h_ = ell_h ? *ell_h : A_->frobenius_norm_sq() / model_->sigma_f();
    if (!(ell_h_ > 0) || !std::isfinite(ell_h_))
        throw std::invalid_argument("DualProblem: Lipschitz constant of grad h must be positive");
}

DualProblem DualProblem::with_mu(double mu) const {
    return DualProblem(A_, b_, model_, mu, ell_h_);
}

double DualState::F() const noexcept {
    return feasible ? h_val + g_val : std::numeric_limits<double>::infinity();
}

DualState eval_state(const DualProblem &P, Vector z) {
    if (z.size() != P.m())
        throw std::invalid_argument("eval_state: z has the wrong dimension");
    DualState s;
    s.z = std::move(z);
    s.neg_At_z.resize(P.n());
    P.A().adjoint(s.z, s.neg_At_z);
    s.neg_At_z = -s.neg_At_z;
    s.x = P.model().fstar_grad(s.neg_At_z);
    s.grad_h.resize(P.m());
    P.A().forward(s.x, s.grad_h);
    s.grad_h += P.b();
    s.grad_h = -s.grad_h;
    s.h_val = P.model().fstar_value(s.neg_At_z) - s.z.dot(P.b());
    Index nnz = 0;
    for (Index i = 0; i < s.z.size(); ++i) {
        if (s.z(i) < 0)
            s.feasible = false;
        if (s.z(i) != 0)
            ++nnz;
    }
    s.support = nnz;
    s.g_val = P.mu() * static_cast<double>(nnz);
    return s;
}

double F_value(const DualProblem &, const DualState &s) { return s.F(); }

SubspaceHessian::SubspaceHessian(const DualProblem &P, const DualState &s, IndexSet T,
                                 double gamma)
    : P_(&P), T_(std::move(T)), Q_(P.model().fstar_jacobian_diag(s.neg_At_z)), gamma_(gamma),
      work_(P.n()) {
    if (gamma < 0)
        throw std::invalid_argument("SubspaceHessian: gamma must be nonnegative");
    T_.check_bound(P.m());
}

void SubspaceHessian::apply(crvec dT, rvec out) const {
    if (T_.empty())
        return;
    P_->A().adjoint_restricted(T_, dT, work_);
    work_.array() *= Q_.diag.array();
    P_->A().forward_restricted(T_, work_, out);
    out += gamma_ * dT;
}

Vector SubspaceHessian::operator()(crvec dT) const {
    Vector out(T_.size());
    apply(dT, out);
    return out;
}

Vector subspace_hessian_apply(const DualProblem &P, const DualState &s, const IndexSet &T,
                              double gamma, crvec dT) {
    if (dT.size() != T.size())
        throw std::invalid_argument("subspace_hessian_apply: dT must have |T| entries");
    return SubspaceHessian(P, s, T, gamma)(dT);
}

} // namespace sgsn
