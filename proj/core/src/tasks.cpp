#include <sgsn/tasks.hpp>

#include <algorithm>
#include <memory>
#include <stdexcept>

namespace sgsn {

namespace {
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
} // namespace

AucOperator::AucOperator(Matrix Xplus, Matrix Xminus)
    : Xplus_(std::move(Xplus)), Xminus_(std::move(Xminus)), qp_(Xplus_.rows()),
      qm_(Xminus_.rows()) {
    if (qp_ == 0 || qm_ == 0)
        throw std::invalid_argument("AucOperator: both classes must be nonempty");
    if (Xplus_.cols() != Xminus_.cols())
        throw std::invalid_argument("AucOperator: sample matrices differ in column count");
}

void AucOperator::forward(crvec x, rvec y) const {
    const Vector sp = Xplus_ * x, sm = Xminus_ * x;
    for (Index i = 0; i < qp_; ++i)
        y.segment(i * qm_, qm_) = sm.array() - sp(i);
}

void AucOperator::adjoint(crvec z, rvec y) const {
    Eigen::Map<const RowMajorMatrix> Z(z.data(), qp_, qm_);
    const Vector col_sums = Z.colwise().sum().transpose(); // over positives, per negative
    const Vector row_sums = Z.rowwise().sum();             // over negatives, per positive
    y.noalias() = Xminus_.transpose() * col_sums;
    y.noalias() -= Xplus_.transpose() * row_sums;
}

void AucOperator::forward_restricted(const IndexSet &T, crvec x, rvec yT) const {
    const Vector sp = Xplus_ * x, sm = Xminus_ * x;
    for (Index k = 0; k < T.size(); ++k) {
        const Index t = T[k];
        yT(k) = sm(t % qm_) - sp(t / qm_);
    }
}

void AucOperator::adjoint_restricted(const IndexSet &T, crvec zT, rvec y) const {
    Vector col_sums = Vector::Zero(qm_), row_sums = Vector::Zero(qp_);
    for (Index k = 0; k < T.size(); ++k) {
        const Index t = T[k];
        col_sums(t % qm_) += zT(k);
        row_sums(t / qm_) += zT(k);
    }
    y.noalias() = Xminus_.transpose() * col_sums;
    y.noalias() -= Xplus_.transpose() * row_sums;
}

double AucOperator::row_norm_sq(Index row) const {
    return (Xminus_.row(row % qm_) - Xplus_.row(row / qm_)).squaredNorm();
}

double AucOperator::frobenius_norm_sq() const {
    const Vector sum_minus = Xminus_.colwise().sum().transpose();
    const Vector sum_plus = Xplus_.colwise().sum().transpose();
    return static_cast<double>(qp_) * Xminus_.squaredNorm() +
           static_cast<double>(qm_) * Xplus_.squaredNorm() - 2 * sum_minus.dot(sum_plus);
}

MlcOperator::MlcOperator(Matrix C, Matrix Y)
    : C_(std::move(C)), Y_(std::move(Y)), Ct_(C_.transpose()) {
    if (C_.rows() != Y_.rows())
        throw std::invalid_argument("MlcOperator: C and Y must have the same number of rows");
}

void MlcOperator::forward(crvec x, rvec y) const {
    const Index q = C_.rows(), d = C_.cols(), l = Y_.cols();
    Eigen::Map<const Matrix> X(x.data(), d, l);
    Eigen::Map<Matrix> out(y.data(), q, l);
    out.noalias() = C_ * X;
    out.array() *= -Y_.array();
}

void MlcOperator::adjoint(crvec z, rvec y) const {
    const Index q = C_.rows(), d = C_.cols(), l = Y_.cols();
    Eigen::Map<const Matrix> Z(z.data(), q, l);
    Eigen::Map<Matrix> out(y.data(), d, l);
    const Matrix W = -(Y_.array() * Z.array()).matrix();
    out.noalias() = C_.transpose() * W;
}

void MlcOperator::forward_restricted(const IndexSet &T, crvec x, rvec yT) const {
    const Index q = C_.rows(), d = C_.cols();
    for (Index k = 0; k < T.size(); ++k) {
        const Index t = T[k], label = t / q, i = t % q;
        yT(k) = -Y_(i, label) * Ct_.col(i).dot(x.segment(label * d, d));
    }
}

void MlcOperator::adjoint_restricted(const IndexSet &T, crvec zT, rvec y) const {
    const Index q = C_.rows(), d = C_.cols();
    y.setZero();
    for (Index k = 0; k < T.size(); ++k) {
        const Index t = T[k], label = t / q, i = t % q;
        y.segment(label * d, d) -= (Y_(i, label) * zT(k)) * Ct_.col(i);
    }
}

double MlcOperator::row_norm_sq(Index row) const {
    return C_.row(row % C_.rows()).squaredNorm();
}

double MlcOperator::frobenius_norm_sq() const {
    return static_cast<double>(Y_.cols()) * C_.squaredNorm();
}

TaskProblem build_auc_problem(const Matrix &Xplus, const Matrix &Xminus,
                              const TaskOverrides &overrides) {
    auto A = std::make_shared<AucOperator>(Xplus, Xminus);
    const double ell_h = A->frobenius_norm_sq();
    if (!(ell_h > 0))
        throw std::invalid_argument("build_auc_problem: degenerate data, ell_h = ||A||^2 <= 0");
    const double tau = overrides.tau.value_or(0.5 / ell_h);
    // With μ ≥ τ/2 the start z = 0 is already P-stationary (∇h(0) = −e and
    // τ ≤ √(2τμ)), so the default keeps the threshold below τ.
    const double mu = overrides.mu.value_or(0.25 * tau);
    DualProblem P(A, Vector::Ones(A->rows()), std::make_shared<SquaredL2Model>(), mu, ell_h);

    SgsnConfig cfg;
    cfg.tau = tau;
    cfg.gamma = overrides.gamma.value_or(0.1);
    cfg.c1 = overrides.c1.value_or(1.0 / (3 * ell_h));
    cfg.c2 = overrides.c2.value_or(3 * ell_h);
    if (overrides.max_iter)
        cfg.max_iter = *overrides.max_iter;
    return {std::move(P), cfg};
}

double auc_metric(const Matrix &Xplus, const Matrix &Xminus, crvec x) {
    if (Xplus.cols() != x.size() || Xminus.cols() != x.size())
        throw std::invalid_argument("auc_metric: dimension mismatch");
    if (Xplus.rows() == 0 || Xminus.rows() == 0)
        throw std::invalid_argument("auc_metric: both classes must be nonempty");
    const Vector sp = Xplus * x;
    Vector sm = Xminus * x;
    std::sort(sm.begin(), sm.end());
    double correct = 0;
    for (Index i = 0; i < sp.size(); ++i)
        correct += static_cast<double>(std::lower_bound(sm.begin(), sm.end(), sp(i)) - sm.begin());
    return correct / (static_cast<double>(sp.size()) * static_cast<double>(sm.size()));
}

TaskProblem build_mlc_problem(const Matrix &C, const Matrix &Y, double lambda1,
                              const TaskOverrides &overrides) {
    if (C.rows() == 0 || C.cols() == 0 || Y.cols() == 0)
        throw std::invalid_argument("build_mlc_problem: empty data");
    if (C.rows() != Y.rows())
        throw std::invalid_argument("build_mlc_problem: C and Y must have the same number of rows");
    if ((C.col(C.cols() - 1).array() != 1.0).any())
        throw std::invalid_argument("build_mlc_problem: last column of C must be all ones");
    if ((Y.array().abs() != 1.0).any())
        throw std::invalid_argument("build_mlc_problem: labels must be -1 or +1");

    auto A = std::make_shared<MlcOperator>(C, Y);
    const double mu = overrides.mu.value_or(1e-5);
    DualProblem P(A, Vector::Ones(A->rows()), std::make_shared<ElasticNetModel>(lambda1), mu);

    SgsnConfig cfg;
    cfg.gamma = overrides.gamma.value_or(1e-2);
    cfg.c1 = overrides.c1.value_or(1e-4);
    cfg.c2 = overrides.c2.value_or(1e8);
    if (overrides.fixed_tau || overrides.tau) {
        cfg.tau = overrides.tau.value_or(0.5 / P.ell_h());
    } else {
        cfg.tau = 0.5 / P.ell_h();
        cfg.adaptive_tau = AdaptiveTau{};
    }
    if (overrides.max_iter)
        cfg.max_iter = *overrides.max_iter;
    return {std::move(P), cfg};
}

LinearClassifier::LinearClassifier(Vector weights, Index num_features)
    : weights_(std::move(weights)), d_(num_features) {
    if (d_ <= 0 || weights_.size() % d_ != 0)
        throw std::invalid_argument("LinearClassifier: weight length must be a multiple of d");
}

std::vector<int> predict(const LinearClassifier &clf, crvec c) {
    if (c.size() != clf.num_features())
        throw std::invalid_argument("predict: feature vector has the wrong length");
    const Vector scores = clf.weight_matrix().transpose() * c;
    std::vector<int> labels(static_cast<std::size_t>(scores.size()));
    for (Index k = 0; k < scores.size(); ++k)
        labels[static_cast<std::size_t>(k)] = scores(k) > 0 ? 1 : -1;
    return labels;
}

double hamming_loss(const Matrix &C, const Matrix &Y, const LinearClassifier &clf) {
    if (C.cols() != clf.num_features() || Y.cols() != clf.num_labels() || C.rows() != Y.rows())
        throw std::invalid_argument("hamming_loss: dimension mismatch");
    const Matrix scores = C * clf.weight_matrix();
    const Index wrong = ((-Y.array() * scores.array()) > 0).count();
    return static_cast<double>(wrong) / static_cast<double>(Y.size());
}

double prediction_hamming_loss(const Matrix &C, const Matrix &Y, const LinearClassifier &clf) {
    if (C.cols() != clf.num_features() || Y.cols() != clf.num_labels() || C.rows() != Y.rows())
        throw std::invalid_argument("prediction_hamming_loss: dimension mismatch");
    const Matrix scores = C * clf.weight_matrix();
    const Index wrong = ((scores.array() > 0) != (Y.array() > 0)).count();
    return static_cast<double>(wrong) / static_cast<double>(Y.size());
}

Index count_nonzeros(crvec x) { return (x.array() != 0).count(); }

} // namespace sgsn
