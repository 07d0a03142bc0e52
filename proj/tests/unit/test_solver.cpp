#include "helpers.hpp"

#include <doctest.h>

#include <Eigen/Dense>

using namespace sgsn;
using namespace sgsn::test;

namespace {

std::shared_ptr<const ConjugateModel> l2() { return std::make_shared<SquaredL2Model>(); }

DualProblem scalar_problem(double a, double b, double mu) {
    Matrix A(1, 1);
    A << a;
    return dense_problem(A, vec({b}), l2(), mu);
}

SgsnConfig fixed_tau(double tau) {
    SgsnConfig cfg;
    cfg.tau = tau;
    return cfg;
}

} // namespace

TEST_CASE("identify_subspace examples") {
    // A = I on ℝ², τ = 0.25, μ = 0.5: θ = 0.5 and z − τ∇h(0) = τb.
    SUBCASE("strict threshold") {
        const auto P = dense_problem(Matrix::Identity(2, 2), vec({4, 1}), l2(), 0.5);
        const auto st = identify_subspace(P, eval_state(P, Vector::Zero(2)), 0.25);
        CHECK(st.T == IndexSet({0}));
        CHECK(st.v == vec({1, 0}));
    }
    SUBCASE("zero gradient at the origin") {
        const DualProblem P(std::make_shared<IdentityMap>(2), Vector::Zero(2), l2(), 0.5);
        const auto st = identify_subspace(P, eval_state(P, Vector::Zero(2)), 0.25);
        CHECK(st.T.empty());
        CHECK(st.v == Vector::Zero(2));
    }
    SUBCASE("tie is excluded") {
        const auto P = dense_problem(Matrix::Identity(1, 1), vec({2}), l2(), 0.5);
        const auto st = identify_subspace(P, eval_state(P, Vector::Zero(1)), 0.25);
        CHECK(st.T.empty());
        CHECK(st.v == vec({0}));
    }
}

TEST_CASE("newton_direction examples") {
    SUBCASE("identity Hessian") {
        // ∇h(v) = v − b = (−1.5, 0) at v = (1, 1).
        const auto P = dense_problem(Matrix::Identity(2, 2), vec({2.5, 1}), l2(), 0.1);
        const auto s = eval_state(P, vec({1, 1}));
        SgsnConfig cfg = fixed_tau(0.1);
        cfg.gamma = 1.0 / 3.0;
        const auto nd = newton_direction(P, s, IndexSet::all(2), cfg);
        CHECK(nd.gamma_k == doctest::Approx(0.5));
        CHECK((nd.dT - vec({1, 0})).norm() < 1e-12);
    }
    SUBCASE("stationary on the subspace") {
        const auto P = dense_problem(Matrix::Identity(2, 2), vec({1, 1}), l2(), 0.1);
        const auto nd = newton_direction(P, eval_state(P, vec({1, 1})), IndexSet::all(2),
                                         fixed_tau(0.1));
        CHECK(nd.subspace_stationary);
        CHECK(nd.dT == Vector::Zero(2));
    }
    SUBCASE("dense direct solve") {
        Rng rng(41);
        for (int trial = 0; trial < 20; ++trial) {
            const Matrix A = random_matrix(rng, 9, 4);
            const auto P = dense_problem(A, random_vector(rng, 9), l2(), 0.1);
            const auto s = eval_state(P, random_nonneg(rng, 9));
            const IndexSet T = random_subset(rng, 9, 0.7);
            if (T.empty())
                continue;
            SgsnConfig cfg = fixed_tau(0.5 / P.ell_h());
            const auto nd = newton_direction(P, s, T, cfg);
            Matrix AT(T.size(), 4);
            for (Index k = 0; k < T.size(); ++k)
                AT.row(k) = A.row(T[k]);
            const Matrix H =
                AT * AT.transpose() + nd.gamma_k * Matrix::Identity(T.size(), T.size());
            const Vector ref = H.ldlt().solve(-gather(s.grad_h, T));
            CHECK((nd.dT - ref).norm() <= 1e-8 * (1 + ref.norm()));
        }
    }
}

TEST_CASE("step_length examples") {
    CHECK(step_length(vec({1, 1}), vec({1, 2})) == 1.0);
    CHECK(step_length(vec({1, 1}), vec({-2, 1})) == 0.5);
    CHECK(step_length(vec({4}), vec({-1})) == 1.0);
}

TEST_CASE("accept_newton examples") {
    const auto P = dense_problem(Matrix::Identity(2, 2), vec({2, 3}), l2(), 0.1);
    const IndexSet T = IndexSet::all(2);
    const SgsnConfig cfg = fixed_tau(0.1);
    const auto v = eval_state(P, vec({1, 1}));

    SUBCASE("zero direction") {
        CHECK_FALSE(accept_newton(P, v, v, T, cfg));
        const auto vs = eval_state(P, vec({2, 3}));
        CHECK(accept_newton(P, vs, vs, T, cfg));
    }
    SUBCASE("exact minimizer on T") {
        CHECK(accept_newton(P, v, eval_state(P, vec({2, 3})), T, cfg));
    }
    SUBCASE("objective increase") {
        CHECK_FALSE(accept_newton(P, v, eval_state(P, vec({0.5, 0.2})), T, cfg));
    }
}

TEST_CASE("adapt_tau examples") {
    SgsnConfig cfg;
    cfg.adaptive_tau = AdaptiveTau{};
    SUBCASE("τ = 1 descends") {
        const auto P = scalar_problem(0.5, 1, 1e-3);
        const auto c = adapt_tau(P, eval_state(P, Vector::Zero(1)), cfg);
        CHECK(c.power == 0);
        CHECK(c.tau == 1.0);
        CHECK_FALSE(c.fell_back);
    }
    SUBCASE("τ = 1 ascends, τ = 0.1 descends") {
        const auto P = scalar_problem(std::sqrt(10.0), 1, 1e-3);
        const auto c = adapt_tau(P, eval_state(P, Vector::Zero(1)), cfg);
        CHECK(c.power == 1);
        CHECK(c.tau == doctest::Approx(0.1));
    }
    SUBCASE("P-stationary point") {
        const auto P = scalar_problem(1, 1, 1e-3);
        const auto c = adapt_tau(P, eval_state(P, vec({1})), cfg);
        CHECK(c.power == 0);
        CHECK(c.step.v == vec({1}));
    }
}

TEST_CASE("SgsnConfig validation quotes the bound") {
    const auto P = scalar_problem(1, 1, 0.01);
    CHECK_NOTHROW(fixed_tau(0.5).validate(P));
    try {
        fixed_tau(1.0).validate(P);
        FAIL("expected rejection");
    } catch (const std::invalid_argument &e) {
        CHECK(std::string(e.what()).find("1/ell_h") != std::string::npos);
    }
    SgsnConfig bad = fixed_tau(0.5);
    bad.gamma = 0;
    CHECK_THROWS_AS(bad.validate(P), std::invalid_argument);
}

TEST_CASE("solve: one-dimensional instance") {
    const auto P = scalar_problem(1, 1, 1e-4);
    SgsnConfig cfg = fixed_tau(0.5);
    cfg.vdo_rel_tol = 0;
    cfg.vdo_change_tol = 0;
    cfg.vdo_abs_tol = 1e-12;
    for (bool newton : {true, false}) {
        const auto r = newton ? solve(P, cfg) : solve_pg(P, cfg);
        CHECK(r.status == SolveStatus::converged);
        CHECK(r.z_star(0) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r.x_star(0) == doctest::Approx(-1.0).epsilon(1e-9));
        CHECK(std::abs(r.u_star(0)) < 1e-9);
        CHECK(r.vdo_final <= 1e-12);
        // grid oracle for F(z) = ½z² − z + μ‖z‖₀ over z ≥ 0
        double best = 0;
        for (int k = 0; k <= 30000; ++k) {
            const double z = k * 1e-4;
            best = std::min(best, 0.5 * z * z - z + (z != 0 ? 1e-4 : 0.0));
        }
        CHECK(r.F_star <= best + 1e-9);
    }
}

TEST_CASE("solve: a P-stationary start is returned unchanged") {
    const auto P = scalar_problem(1, 1, 1e-4);
    const auto r = solve(P, fixed_tau(0.5), vec({1}));
    CHECK(r.status == SolveStatus::converged);
    CHECK(r.iterations <= 1);
    CHECK(r.z_star == vec({1}));
    CHECK(vdo(P, r.z_star, 0.5) == 0.0);
}

TEST_CASE("solve: trace bookkeeping") {
    const auto P = scalar_problem(1, 1, 1e-4);
    SUBCASE("max_iter 0") {
        SgsnConfig cfg = fixed_tau(0.5);
        cfg.max_iter = 0;
        const auto r = solve(P, cfg);
        CHECK(r.status == SolveStatus::max_iter);
        CHECK(r.trace.empty());
        CHECK(r.iterations == 0);
    }
    SUBCASE("negative start is projected") {
        const auto r = solve(P, fixed_tau(0.5), vec({-3}));
        CHECK_FALSE(r.warnings.empty());
        CHECK((r.z_star.array() >= 0).all());
    }
    SUBCASE("last trace vdo equals vdo_final") {
        Rng rng(4);
        const auto Q = dense_problem(random_matrix(rng, 12, 4), Vector::Ones(12), l2(), 0.01);
        const auto r = solve(Q, fixed_tau(0.5 / Q.ell_h()));
        REQUIRE_FALSE(r.trace.empty());
        CHECK(r.trace.back().vdo == r.vdo_final);
        for (std::size_t k = 1; k < r.trace.size(); ++k)
            CHECK(r.trace[k].F <= r.trace[k - 1].F);
    }
}

TEST_CASE("solve: descent, feasibility and support containment") {
    Rng rng(43);
    for (int inst = 0; inst < 12; ++inst) {
        const bool elastic = inst % 2 == 1;
        const Index m = 5 + static_cast<Index>(rng.below(20)), n = 2 + static_cast<Index>(rng.below(10));
        std::shared_ptr<const ConjugateModel> model =
            elastic ? std::shared_ptr<const ConjugateModel>(std::make_shared<ElasticNetModel>(0.2))
                    : l2();
        const auto P = dense_problem(random_matrix(rng, m, n), Vector::Ones(m), model, 0.01);
        const double tau = 0.5 / P.ell_h();
        const double eta0 = 1 / (2 * tau) - P.ell_h() / 2;
        int violations = 0;
        const auto observer = [&](const IterationView &it) {
            const auto &rec = it.record;
            violations += rec.F_start - rec.F_gradient < eta0 * rec.prox_step_sq - 1e-12;
            violations += eval_state(P, it.z_next).F() > rec.F_gradient + 1e-12;
            violations += (it.v.array() < 0).any() + (it.z_next.array() < 0).any();
            if (it.trial) {
                violations += (it.trial->array() < 0).any();
                for (Index i = 0; i < m; ++i)
                    violations += (*it.trial)(i) != 0 && !it.T.contains(i);
            }
        };
        solve(P, fixed_tau(tau), std::nullopt, observer);
        CHECK(violations == 0);
    }
}

TEST_CASE("solve: fixed-point termination passes the P-stationarity check") {
    Rng rng(44);
    const auto P = dense_problem(random_matrix(rng, 15, 3), Vector::Ones(15), l2(), 0.01);
    SgsnConfig cfg = fixed_tau(0.5 / P.ell_h());
    cfg.vdo_rel_tol = 0;
    cfg.vdo_change_tol = 0;
    cfg.max_iter = 5000;
    const auto r = solve(P, cfg);
    REQUIRE(r.status == SolveStatus::converged);
    const auto rep = optimality_report(P, r.z_star, cfg.tau, cfg.tau);
    CHECK(rep.is_p_stationary);
    CHECK(check_primal_kkt(P, r.x_star, r.u_star, r.z_star, 1e-6).ok);
}

TEST_CASE("solve: seeded two-class Gaussian AUC instance") {
    const auto ds = gen_example1(200, 20, 0.2, 0, 7);
    auto tp = build_auc_problem(ds.positives(), ds.negatives());
    tp.config.vdo_rel_tol = 0;
    tp.config.vdo_change_tol = 0;
    tp.config.vdo_abs_tol = 1e-4;
    const auto r = solve(tp.problem, tp.config);
    CHECK(r.status == SolveStatus::converged);
    CHECK(r.vdo_final <= 1e-4);
    CHECK(r.F_star < 0.0); // F(z0) = F(0) = 0
    CHECK(auc_metric(ds.positives(), ds.negatives(), r.x_star) == 1.0);
}

TEST_CASE("AUC with μ = τ: the origin is already stationary") {
    const auto ds = gen_example1(40, 5, 0.5, 0, 3);
    auto tp = build_auc_problem(ds.positives(), ds.negatives());
    const auto P = tp.problem.with_mu(tp.config.tau);
    const auto r = solve(P, tp.config);
    CHECK(r.z_star == Vector::Zero(P.m()));
    CHECK(r.iterations == 0);
    CHECK(r.status == SolveStatus::converged);
}

TEST_CASE("solve_pg: sufficient descent on every iteration") {
    Rng rng(45);
    const auto P = dense_problem(random_matrix(rng, 20, 5), Vector::Ones(20), l2(), 0.01);
    const double tau = 0.5 / P.ell_h(), eta0 = 1 / (2 * tau) - P.ell_h() / 2;
    SgsnConfig cfg = fixed_tau(tau);
    cfg.max_iter = 300;
    bool ok = true;
    solve_pg(P, cfg, std::nullopt, [&](const IterationView &it) {
        ok = ok && it.record.F_start - it.record.F_gradient >= eta0 * it.record.prox_step_sq - 1e-12;
        ok = ok && it.z_next == it.v && it.trial == nullptr;
    });
    CHECK(ok);
}
