#include "helpers.hpp"

#include <doctest.h>

using namespace sgsn;
using namespace sgsn::test;

namespace {

std::shared_ptr<const ConjugateModel> l2() { return std::make_shared<SquaredL2Model>(); }

DualProblem scalar_problem(double b, double mu) {
    return dense_problem(Matrix::Identity(1, 1), vec({b}), l2(), mu);
}

} // namespace

TEST_CASE("vdo examples") {
    SUBCASE("minimizer of the 1-D instance") {
        CHECK(vdo(scalar_problem(1, 1e-4), vec({1}), 0.5) == 0.0);
    }
    SUBCASE("origin with a large penalty") {
        // ∇h(0) = −b; τb = 0.25 < θ = √(2·0.5·0.25) = 0.5
        CHECK(vdo(scalar_problem(0.5, 0.25), vec({0}), 0.5) == 0.0);
    }
    SUBCASE("origin below the threshold") {
        // τb = 0.5 > θ = 0.1, so the prox moves to 0.5 and VDO = 0.5/τ
        CHECK(vdo(scalar_problem(1, 0.01), vec({0}), 0.5) == doctest::Approx(1.0));
    }
    SUBCASE("tie uses the nearer candidate") {
        // z − τ∇h(z) = 0.5 = θ at z = 0: the set is {0, 0.5} and z = 0 is in it.
        CHECK(vdo(scalar_problem(2, 0.5), vec({0}), 0.25) == 0.0);
    }
}

TEST_CASE("recover_primal and vpo examples") {
    const auto P = scalar_problem(1, 1e-4);
    const auto pp = recover_primal(P, vec({1}));
    CHECK(pp.x == vec({-1}));
    CHECK(pp.u == vec({0}));
    CHECK(vpo(P, pp.x, vec({1}), 0.5) == 0.0);
    // x = 0 leaves ‖∇f(0) + Aᵀz‖ = 1
    CHECK(vpo(P, vec({0}), vec({1}), 0.5) >= 1.0);
}

TEST_CASE("check_primal_kkt examples") {
    const auto P = scalar_problem(1, 1e-4);
    SUBCASE("optimal triple") {
        const auto c = check_primal_kkt(P, vec({-1}), vec({0}), vec({1}), 1e-12);
        CHECK(c.ok);
        CHECK(c.residuals.max() == 0.0);
    }
    SUBCASE("multiplier on a nonzero slack") {
        const auto c = check_primal_kkt(P, vec({-1}), vec({0.5}), vec({1}), 1e-12);
        CHECK_FALSE(c.ok);
        CHECK(c.residuals.indicator_part == doctest::Approx(1.0));
        CHECK(c.residuals.linear_part == doctest::Approx(0.5));
    }
    SUBCASE("negative multiplier") {
        const auto c = check_primal_kkt(P, vec({1}), vec({2}), vec({-1}), 1e-12);
        CHECK_FALSE(c.ok);
        CHECK(c.residuals.indicator_part >= 1.0);
    }
}

TEST_CASE("dual_kkt_residual and vpo_xi_bound examples") {
    const auto P = scalar_problem(1, 1e-4);
    CHECK(dual_kkt_residual(P, vec({1})) == 0.0);
    CHECK(dual_kkt_residual(P, vec({2})) == doctest::Approx(1.0));
    CHECK(dual_kkt_residual(P, vec({-1})) >= 1.0);
    CHECK(std::isinf(vpo_xi_bound(vec({0}), vec({0}))));
    CHECK(vpo_xi_bound(vec({0, 2}), vec({1, 0})) == doctest::Approx(2.0));
    CHECK(vpo_xi_bound(vec({0, 1}), vec({4, 0})) == doctest::Approx(0.125));
}

TEST_CASE("P-stationarity implies the dual KKT conditions") {
    // At a point with VDO = 0, ∇_i h = 0 on the support and the support is
    // nonnegative.
    Rng rng(51);
    for (int inst = 0; inst < 10; ++inst) {
        const Matrix A = random_matrix(rng, 12, 4);
        const auto P = dense_problem(A, Vector::Ones(12), l2(), 0.01);
        SgsnConfig cfg;
        cfg.tau = 0.5 / P.ell_h();
        cfg.vdo_rel_tol = 0;
        cfg.vdo_change_tol = 0;
        cfg.max_iter = 5000;
        const auto r = solve(P, cfg);
        REQUIRE(r.status == SolveStatus::converged);
        REQUIRE(r.vdo_final == 0.0);
        CHECK(dual_kkt_residual(P, r.z_star) <= 1e-8);
        // Primal-dual transfer: the recovered triple is a primal KKT point and
        // VPO vanishes for ξ inside the admissible range.
        const auto pp = recover_primal(P, r.z_star);
        CHECK(check_primal_kkt(P, pp.x, pp.u, r.z_star, 1e-8).ok);
        const double xi = std::min(1.0, 0.5 * vpo_xi_bound(pp.u, r.z_star));
        CHECK(vpo(P, pp.x, r.z_star, xi) <= 1e-6);
    }
}

TEST_CASE("two-dimensional instance: grid global minimizer is P-stationary") {
    Matrix A(2, 2);
    A << 1, 0.5, 0.2, 1;
    const auto P = dense_problem(A, vec({1, 0.6}), l2(), 0.05);
    const double tau = 0.5 / P.ell_h();
    Vector best = Vector::Zero(2);
    double best_F = F_value(P, eval_state(P, best));
    const double h = 0.005;
    for (int i = 0; i <= 600; ++i)
        for (int j = 0; j <= 600; ++j) {
            const Vector z = vec({i * h, j * h});
            const double F = F_value(P, eval_state(P, z));
            if (F < best_F) {
                best_F = F;
                best = z;
            }
        }
    SgsnConfig cfg;
    cfg.tau = tau;
    cfg.vdo_rel_tol = 0;
    cfg.vdo_change_tol = 0;
    const auto r = solve(P, cfg);
    CHECK(r.F_star <= best_F + 1e-6);
    CHECK(vdo(P, r.z_star, tau) == 0.0);
}
