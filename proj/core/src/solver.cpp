#include <sgsn/solver.hpp>
#include <sgsn/baseline.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace sgsn {

std::string_view to_string(StepKind kind) noexcept {
    switch (kind) {
    case StepKind::newton_accepted: return "newton";
    case StepKind::gradient_fallback: return "gradient";
    case StepKind::converged: return "converged";
    }
    return "unknown";
}

std::string_view to_string(SolveStatus status) noexcept {
    switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::stagnated: return "stagnated";
    }
    return "unknown";
}

void SgsnConfig::validate(const DualProblem &P) const {
    if (!(gamma > 0) || !(c1 > 0) || !(c2 > 0))
        throw std::invalid_argument("SgsnConfig: gamma, c1 and c2 must be positive");
    if (max_iter < 0)
        throw std::invalid_argument("SgsnConfig: max_iter must be nonnegative");
    if (!(cg_tol > 0))
        throw std::invalid_argument("SgsnConfig: cg_tol must be positive");
    if (adaptive_tau) {
        const auto &a = *adaptive_tau;
        if (!(a.base > 0 && a.base < 1) || !(a.descent_coef > 0) || a.max_power < 0)
            throw std::invalid_argument("SgsnConfig: invalid adaptive tau parameters");
        return;
    }
    const double bound = 1.0 / P.ell_h();
    if (!(tau > 0) || !(tau < bound)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "SgsnConfig: tau = " << tau << " must lie in (0, 1/ell_h) = (0, " << bound << ")";
        throw std::invalid_argument(msg.str());
    }
}

SubspaceStep identify_subspace(const DualProblem &P, const DualState &s, double tau) {
    const double theta = std::sqrt(2 * tau * P.mu());
    SubspaceStep step;
    step.v = Vector::Zero(P.m());
    std::vector<Index> T;
    for (Index i = 0; i < P.m(); ++i) {
        const double w = s.z(i) - tau * s.grad_h(i);
        if (w > theta) {
            T.push_back(i);
            step.v(i) = w;
        }
    }
    step.T = IndexSet(std::move(T));
    return step;
}

NewtonDirection newton_direction(const DualProblem &P, const DualState &v_state,
                                 const IndexSet &T, const SgsnConfig &cfg) {
    NewtonDirection nd;
    const Vector gT = gather(v_state.grad_h, T);
    const double gnorm = gT.norm();
    nd.gamma_k = cfg.gamma * gnorm;
    if (gnorm == 0) {
        nd.dT = Vector::Zero(T.size());
        nd.subspace_stationary = true;
        return nd;
    }
    const SubspaceHessian H(P, v_state, T, nd.gamma_k);
    const int max_iter = cfg.cg_max_iter < 0 ? default_cg_max_iter(T.size()) : cfg.cg_max_iter;
    CgResult cg = cg_solve([&H](crvec d, rvec out) { H.apply(d, out); }, -gT, cfg.cg_tol, max_iter);
    nd.dT = std::move(cg.solution);
    nd.cg_iters = cg.iterations;
    nd.cg_converged = cg.converged;
    return nd;
}

double step_length(crvec vT, crvec dT) {
    double beta = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < dT.size(); ++i)
        if (dT(i) < 0)
            beta = std::min(beta, -vT(i) / dT(i));
    return std::min(1.0, beta);
}

bool accept_newton(const DualProblem &, const DualState &v_state, const DualState &trial_state,
                   const IndexSet &T, const SgsnConfig &cfg) {
    if (!trial_state.feasible)
        return false;
    const double dist_sq = (trial_state.z - v_state.z).squaredNorm();
    const bool c1 = v_state.F() - trial_state.F() >= cfg.c1 * dist_sq;
    const bool c2 = gather(trial_state.grad_h, T).norm() <= cfg.c2 * std::sqrt(dist_sq);
    return c1 && c2;
}

TauChoice adapt_tau(const DualProblem &P, const DualState &s, const SgsnConfig &cfg) {
    const AdaptiveTau a = cfg.adaptive_tau.value_or(AdaptiveTau{});
    const double Fz = s.F();
    double tau = 1.0;
    for (int j = 0; j <= a.max_power; ++j, tau *= a.base) {
        SubspaceStep step = identify_subspace(P, s, tau);
        DualState vs = eval_state(P, step.v);
        const double desc = Fz - vs.F();
        if (desc >= a.descent_coef * (step.v - s.z).squaredNorm())
            return {tau, j, false, std::move(step), std::move(vs)};
    }
    const double fallback = 0.5 / P.ell_h();
    SubspaceStep step = identify_subspace(P, s, fallback);
    DualState vs = eval_state(P, step.v);
    return {fallback, a.max_power + 1, true, std::move(step), std::move(vs)};
}

namespace {

using Clock = std::chrono::steady_clock;

void check_finite(const DualState &s, int k) {
    if (!std::isfinite(s.F()))
        throw SolverError("sgsn: non-finite objective at iteration " + std::to_string(k), k);
}

} // namespace

SolveResult solve(const DualProblem &P, const SgsnConfig &cfg, std::optional<Vector> z0,
                  const IterationObserver &observer) {
    cfg.validate(P);
    SolveResult res;

    Vector start = z0 ? std::move(*z0) : Vector::Zero(P.m());
    if (start.size() != P.m())
        throw std::invalid_argument("solve: z0 has the wrong dimension");
    if ((start.array() < 0).any()) {
        start = start.cwiseMax(0.0);
        res.warnings.emplace_back("z0 had negative entries; projected onto the nonnegative orthant");
    }

    DualState z_state = eval_state(P, std::move(start));
    check_finite(z_state, 0);

    std::vector<double> vdos;
    std::optional<IterationRecord> pending;
    int steps = 0;
    double vdo = 0, tau = cfg.tau;

    while (true) {
        const auto t0 = Clock::now();
        TauChoice choice;
        if (cfg.adaptive_tau) {
            choice = adapt_tau(P, z_state, cfg);
        } else {
            choice.tau = cfg.tau;
            choice.step = identify_subspace(P, z_state, cfg.tau);
            choice.v_state = eval_state(P, choice.step.v);
        }
        tau = choice.tau;
        check_finite(choice.v_state, steps);
        const double prox_sq = (choice.step.v - z_state.z).squaredNorm();
        vdo = std::sqrt(prox_sq) / tau;
        vdos.push_back(vdo);

        if (pending) {
            pending->F = z_state.F();
            pending->vdo = vdo;
            res.trace.push_back(*pending);
            pending.reset();
        }

        // stopping rule
        bool stop = false;
        SolveStatus why = SolveStatus::converged;
        if (choice.step.v == z_state.z || vdo <= cfg.vdo_abs_tol) {
            stop = true;
        } else if (vdos.size() >= 2) {
            const bool rel = cfg.vdo_rel_tol > 0 && vdo / vdos.front() <= cfg.vdo_rel_tol;
            const bool change =
                cfg.vdo_change_tol > 0 && std::abs(vdo - vdos[vdos.size() - 2]) < cfg.vdo_change_tol;
            if (rel) {
                stop = true;
            } else if (change) {
                stop = true;
                why = SolveStatus::stagnated;
            }
        }
        if (stop) {
            IterationRecord rec;
            rec.k = steps;
            rec.F = z_state.F();
            rec.vdo = vdo;
            rec.support = choice.step.T.size();
            rec.step = StepKind::converged;
            rec.tau = tau;
            rec.F_start = rec.F;
            rec.F_gradient = choice.v_state.F();
            rec.prox_step_sq = prox_sq;
            rec.wall_ns =
                std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
            res.trace.push_back(rec);
            res.status = why;
            break;
        }
        if (steps >= cfg.max_iter) {
            res.status = SolveStatus::max_iter;
            break;
        }

        IterationRecord rec;
        rec.k = steps + 1;
        rec.support = choice.step.T.size();
        rec.tau = tau;
        rec.F_start = z_state.F();
        rec.F_gradient = choice.v_state.F();
        rec.prox_step_sq = prox_sq;
        rec.tau_fallback = choice.fell_back;

        const IndexSet &T = choice.step.T;
        std::optional<DualState> trial;
        DualState next;
        if (cfg.newton && !T.empty()) {
            const NewtonDirection nd = newton_direction(P, choice.v_state, T, cfg);
            rec.cg_iters = nd.cg_iters;
            const Vector vT = gather(choice.step.v, T);
            const double alpha = nd.subspace_stationary ? 1.0 : step_length(vT, nd.dT);
            Vector trialT = vT + alpha * nd.dT;
            // the blocking coordinate lands on zero exactly; rounding may not
            for (Index i = 0; i < T.size(); ++i) {
                if (nd.dT(i) < 0 && -vT(i) / nd.dT(i) == alpha)
                    trialT(i) = 0;
                trialT(i) = std::max(trialT(i), 0.0);
            }
            trial = eval_state(P, scatter(trialT, T, P.m()));
            if (accept_newton(P, choice.v_state, *trial, T, cfg)) {
                rec.step = StepKind::newton_accepted;
                rec.alpha = alpha;
                next = *trial;
            } else {
                rec.step = StepKind::gradient_fallback;
                rec.alpha = alpha;
                next = choice.v_state;
            }
        } else {
            rec.step = StepKind::gradient_fallback;
            next = choice.v_state;
        }
        check_finite(next, steps + 1);
        rec.wall_ns =
            std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();

        if (observer) {
            IterationRecord view_rec = rec;
            view_rec.F = next.F();
            observer(IterationView{view_rec, z_state.z, choice.step.v, T,
                                   trial ? &trial->z : nullptr, next.z});
        }

        ++steps;
        pending = rec;
        z_state = std::move(next);
    }

    res.iterations = steps;
    res.z_star = z_state.z;
    res.x_star = z_state.x;
    res.u_star = -z_state.grad_h;
    res.F_star = z_state.F();
    res.vdo_final = vdo;
    res.tau_final = tau;
    return res;
}

BaselineResult solve_pg(const DualProblem &P, SgsnConfig cfg, std::optional<Vector> z0,
                        const IterationObserver &observer) {
    cfg.newton = false;
    return solve(P, cfg, std::move(z0), observer);
}

} // namespace sgsn
