#include <sgsn/conjugate.hpp>

#include <cmath>
#include <stdexcept>

namespace sgsn {

ElasticNetModel::ElasticNetModel(double lambda1) : lambda1_(lambda1) {
    if (!(lambda1 > 0))
        throw std::invalid_argument("ElasticNetModel: lambda1 must be positive");
}

double ElasticNetModel::f_value(crvec x) const {
    return 0.5 * x.squaredNorm() + lambda1_ * x.lpNorm<1>();
}

double ElasticNetModel::fstar_value(crvec v) const {
    double sum = 0;
    for (Index i = 0; i < v.size(); ++i) {
        const double excess = std::abs(v(i)) - lambda1_;
        if (excess > 0)
            sum += 0.5 * excess * excess;
    }
    return sum;
}

Vector ElasticNetModel::fstar_grad(crvec v) const {
    Vector g(v.size());
    for (Index i = 0; i < v.size(); ++i) {
        if (v(i) > lambda1_)
            g(i) = v(i) - lambda1_;
        else if (v(i) < -lambda1_)
            g(i) = v(i) + lambda1_;
        else
            g(i) = 0;
    }
    return g;
}

DiagonalMap ElasticNetModel::fstar_jacobian_diag(crvec v) const {
    Vector d(v.size());
    for (Index i = 0; i < v.size(); ++i)
        d(i) = std::abs(v(i)) > lambda1_ ? 1.0 : 0.0;
    return {std::move(d)};
}

double ElasticNetModel::primal_subdiff_dist(crvec x, crvec s) const {
    // ∂f(x)_i = x_i + λ₁ sign(x_i), or the interval x_i + λ₁[−1, 1] at x_i = 0
    double sq = 0;
    for (Index i = 0; i < x.size(); ++i) {
        double gap;
        if (x(i) > 0)
            gap = s(i) - (x(i) + lambda1_);
        else if (x(i) < 0)
            gap = s(i) - (x(i) - lambda1_);
        else
            gap = std::max(std::abs(s(i)) - lambda1_, 0.0);
        sq += gap * gap;
    }
    return std::sqrt(sq);
}

} // namespace sgsn
