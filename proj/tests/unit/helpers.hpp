#pragma once

#include <sgsn/sgsn.hpp>

#include <algorithm>
#include <cmath>
#include <memory>

namespace sgsn::test {

inline Matrix random_matrix(Rng &rng, Index rows, Index cols) {
    Matrix M(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            M(i, j) = rng.normal();
    return M;
}

inline Vector random_vector(Rng &rng, Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = rng.normal();
    return v;
}

inline Vector random_nonneg(Rng &rng, Index n, double zero_prob = 0.3) {
    Vector v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = rng.uniform() < zero_prob ? 0.0 : rng.uniform(0.01, 2.0);
    return v;
}

inline IndexSet random_subset(Rng &rng, Index m, double keep = 0.5) {
    std::vector<Index> idx;
    for (Index i = 0; i < m; ++i)
        if (rng.uniform() < keep)
            idx.push_back(i);
    return IndexSet(std::move(idx));
}

inline Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs)
        v(i++) = x;
    return v;
}

inline DualProblem dense_problem(Matrix A, Vector b, std::shared_ptr<const ConjugateModel> model,
                                 double mu) {
    return DualProblem(std::make_shared<DenseMap>(std::move(A)), std::move(b), std::move(model),
                       mu);
}

} // namespace sgsn::test

namespace sgsn::test {

/// min over z ≥ 0 of ½(z − u)² + τμ·1(z ≠ 0), from the two candidates
/// {0, max(0, u)} and a grid on [0, max(0, u) + 1].
inline double prox_coordinate_oracle(double u, double tau, double mu) {
    const auto obj = [&](double z) { return 0.5 * (z - u) * (z - u) + (z != 0 ? tau * mu : 0.0); };
    double best = std::min(obj(0.0), obj(std::max(0.0, u)));
    const double hi = std::max(0.0, u) + 1.0;
    const int steps = 200;
    for (int s = 1; s <= steps; ++s)
        best = std::min(best, obj(hi * s / steps));
    return best;
}

/// Random (z, u) pair with entries drawn from the regimes that matter for
/// the prox identities: exact zeros, values near the thresholds, and generic values.
struct ZUPair {
    Vector z, u;
};

inline ZUPair random_zu(Rng &rng, Index m, double tau, double mu) {
    ZUPair p{Vector::Zero(m), Vector::Zero(m)};
    const double zt = std::sqrt(2 * mu * tau), ut = std::sqrt(2 * mu / tau);
    for (Index i = 0; i < m; ++i) {
        switch (rng.below(6)) {
        case 0: // Ω₁-like
            p.z(i) = zt * rng.uniform(0.5, 3.0);
            break;
        case 1: // Ω₂-like
            p.u(i) = ut * rng.uniform(-2.0, 1.5);
            break;
        case 2: // both nonzero
            p.z(i) = rng.uniform(0.1, 2.0);
            p.u(i) = rng.normal();
            break;
        case 3: // negative z
            p.z(i) = -rng.uniform(0.1, 1.0);
            p.u(i) = rng.uniform() < 0.5 ? 0.0 : rng.normal();
            break;
        case 4: // z = 0, u = 0
            break;
        default:
            p.u(i) = rng.normal();
            break;
        }
    }
    return p;
}

} // namespace sgsn::test
