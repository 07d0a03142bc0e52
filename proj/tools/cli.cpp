#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

namespace sgsn::cli {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

/// Errors caused by the command line or its inputs (exit code 2).
class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Matrix append_ones(const Matrix &X) {
    Matrix out(X.rows(), X.cols() + 1);
    out << X, Vector::Ones(X.rows());
    return out;
}

/// Scaler fit on `fit_on`, applied to `target`; MLC keeps the intercept.
Matrix scaled(const Matrix &fit_on, const Matrix &target, Task task) {
    if (task == Task::auc)
        return FeatureScaler::fit(fit_on).apply(target);
    const Index d = fit_on.cols();
    if (d < 2)
        return target;
    Matrix out = target;
    out.leftCols(d - 1) =
        FeatureScaler::fit(fit_on.leftCols(d - 1)).apply(target.leftCols(d - 1));
    return out;
}

Dataset load_dataset(Task task, const std::string &path, Index min_labels, bool add_bias) {
    LibsvmOptions opts;
    if (task == Task::mlc) {
        opts.format = LabelFormat::multilabel;
        opts.min_labels = min_labels;
    }
    if (!std::filesystem::is_regular_file(path))
        throw UsageError(path + ": no such file");
    Dataset ds;
    try {
        ds = load_libsvm(path, opts);
    } catch (const ParseError &e) {
        throw UsageError(path + ": " + e.what());
    }
    if (ds.num_samples() == 0)
        throw UsageError(path + ": no samples");
    if (add_bias)
        ds.features = append_ones(ds.features);
    return ds;
}

SolveResult run_solver(const TaskProblem &tp, SolverKind kind) {
    return kind == SolverKind::pg ? solve_pg(tp.problem, tp.config) : solve(tp.problem, tp.config);
}

TaskProblem build_problem(Task task, const Dataset &train, double lambda1,
                          const TaskOverrides &ov) {
    if (task == Task::auc) {
        const Matrix Xp = train.positives(), Xm = train.negatives();
        if (Xp.rows() == 0 || Xm.rows() == 0)
            throw UsageError("AUC training data needs both positive and negative samples");
        return build_auc_problem(Xp, Xm, ov);
    }
    return build_mlc_problem(train.features, train.labels, lambda1, ov);
}

double auc_or_nan(const Dataset &ds, const Vector &x) {
    const Matrix Xp = ds.positives(), Xm = ds.negatives();
    if (Xp.rows() == 0 || Xm.rows() == 0)
        return std::numeric_limits<double>::quiet_NaN();
    return auc_metric(Xp, Xm, x);
}

bool converged(SolveStatus s) { return s != SolveStatus::max_iter; }

// ---------------------------------------------------------------- gen

struct GenArgs {
    std::string task, out;
    Index q = 0, n = 0, d = 0, l = 0;
    double p = 0, r = 0;
    std::uint64_t seed = 0;
};

int cmd_gen(const GenArgs &a, const CLI::App &app, std::ostream &out) {
    const auto given = [&](const char *name) { return app.get_option(name)->count() > 0; };
    json side;
    Dataset ds;
    if (a.task == "auc") {
        if (given("--d") || given("--l"))
            throw UsageError("--d and --l apply to --task mlc only");
        if (!given("--n") || !given("--p"))
            throw UsageError("--task auc requires --n and --p");
        ds = gen_example1(a.q, a.n, a.p, a.r, a.seed);
        side = {{"task", "auc"}, {"generator", "example1"}, {"q", a.q}, {"n", a.n},
                {"p", a.p},      {"r", a.r},                {"seed", a.seed},
                {"positives", ds.positives().rows()},
                {"format", "binary"}};
    } else {
        if (given("--n") || given("--p") || given("--r"))
            throw UsageError("--n, --p and --r apply to --task auc only");
        if (!given("--d") || !given("--l"))
            throw UsageError("--task mlc requires --d and --l");
        ds = gen_example3(a.q, a.d, a.l, a.seed);
        side = {{"task", "mlc"}, {"generator", "example3"}, {"q", a.q},     {"d", a.d},
                {"l", a.l},      {"seed", a.seed},          {"bias_column", true},
                {"format", "multilabel"}};
    }
    save_libsvm(a.out, ds);
    std::ofstream sidecar(a.out + ".json");
    if (!sidecar)
        throw std::runtime_error("cannot write " + a.out + ".json");
    sidecar << side.dump(2) << '\n';
    out << "wrote " << ds.num_samples() << " samples to " << a.out << '\n';
    return exit_ok;
}

// ---------------------------------------------------------------- solve

struct CommonArgs {
    std::string task = "auc", data;
    Index labels = 0;
    bool add_bias = false, scale = false;
    std::optional<double> mu, tau, gamma, c1, c2;
    double lambda1 = 1.0;
    std::optional<int> max_iter;
    std::uint64_t seed = 0;
    std::string solver = "sgsn";
    std::string stop;
    double vdo_tol = 1e-4;
    bool reproducible = false;

    Task task_kind() const { return task == "mlc" ? Task::mlc : Task::auc; }
    SolverKind solver_kind() const { return solver == "pg" ? SolverKind::pg : SolverKind::sgsn; }
    StopRule stop_rule(StopRule fallback) const {
        if (stop.empty())
            return fallback;
        return stop == "vdo" ? StopRule::vdo : StopRule::relative;
    }
    TaskOverrides overrides() const {
        TaskOverrides ov;
        ov.mu = mu;
        ov.tau = tau;
        ov.gamma = gamma;
        ov.c1 = c1;
        ov.c2 = c2;
        ov.max_iter = max_iter;
        return ov;
    }
};

void add_common(CLI::App &cmd, CommonArgs &a) {
    cmd.add_option("--task", a.task, "auc or mlc")
        ->check(CLI::IsMember({"auc", "mlc"}))
        ->capture_default_str();
    cmd.add_option("--data", a.data, "LIBSVM input file")->required();
    cmd.add_option("--labels", a.labels, "mlc: minimum number of labels");
    cmd.add_flag("--add-bias", a.add_bias, "mlc: append an all-ones feature column");
    cmd.add_flag("--scale", a.scale, "scale features to [-1, 1]");
    cmd.add_option("--mu", a.mu, "dual sparsity weight");
    cmd.add_option("--tau", a.tau, "fixed proximal step (mlc: disables backtracking)");
    cmd.add_option("--gamma", a.gamma, "Newton regularization scale");
    cmd.add_option("--c1", a.c1, "Newton acceptance constant (descent)");
    cmd.add_option("--c2", a.c2, "Newton acceptance constant (gradient)");
    cmd.add_option("--lambda1", a.lambda1, "mlc: l1 weight")->capture_default_str();
    cmd.add_option("--max-iter", a.max_iter, "iteration cap (default 1000)");
    cmd.add_option("--seed", a.seed, "random seed")->capture_default_str();
    cmd.add_option("--solver", a.solver, "sgsn or pg")
        ->check(CLI::IsMember({"sgsn", "pg"}))
        ->capture_default_str();
    cmd.add_option("--stop", a.stop, "stopping rule: relative (VDO ratio or change) or vdo")
        ->check(CLI::IsMember({"relative", "vdo"}));
    cmd.add_option("--vdo-tol", a.vdo_tol, "VDO threshold for --stop vdo")->capture_default_str();
    cmd.add_flag("--reproducible", a.reproducible, "write zero timings");
}

struct SolveArgs : CommonArgs {
    std::string trace, summary;
};

json config_json(const TaskProblem &tp, const CommonArgs &a, StopRule stop) {
    const SgsnConfig &c = tp.config;
    json cfg;
    cfg["mu"] = tp.problem.mu();
    if (c.adaptive_tau)
        cfg["tau"] = "adaptive";
    else
        cfg["tau"] = c.tau;
    cfg["gamma"] = c.gamma;
    cfg["c1"] = c.c1;
    cfg["c2"] = c.c2;
    cfg["ell_h"] = tp.problem.ell_h();
    if (a.task_kind() == Task::mlc)
        cfg["lambda1"] = a.lambda1;
    cfg["max_iter"] = c.max_iter;
    cfg["stop"] = stop == StopRule::vdo ? "vdo" : "relative";
    if (stop == StopRule::vdo)
        cfg["vdo_tol"] = a.vdo_tol;
    cfg["seed"] = a.seed;
    return cfg;
}

int cmd_solve(const SolveArgs &a, std::ostream &out, std::ostream &err) {
    const Task task = a.task_kind();
    Dataset ds = load_dataset(task, a.data, a.labels, a.add_bias);
    if (a.scale)
        ds.features = scaled(ds.features, ds.features, task);

    TaskProblem tp = build_problem(task, ds, a.lambda1, a.overrides());
    const StopRule stop = a.stop_rule(StopRule::vdo);
    apply_stop_rule(tp.config, stop, a.vdo_tol);
    tp.config.rng_seed = a.seed;
    tp.config.validate(tp.problem);

    const auto start = Clock::now();
    const SolveResult r = run_solver(tp, a.solver_kind());
    const double elapsed = a.reproducible ? 0.0 : seconds_since(start);

    if (!a.trace.empty()) {
        std::ofstream f(a.trace, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write " + a.trace);
        write_trace_csv(f, r.trace, a.reproducible);
    }

    json s;
    s["task"] = task == Task::auc ? "auc" : "mlc";
    s["dataset"] = a.data;
    s["solver"] = a.solver;
    s["config"] = config_json(tp, a, stop);
    s["status"] = std::string(to_string(r.status));
    s["iterations"] = r.iterations;
    s["F_star"] = r.F_star;
    s["vdo_final"] = r.vdo_final;
    s["nne"] = count_nonzeros(r.x_star);
    if (task == Task::auc) {
        s["metric_name"] = "auc";
        s["metric"] = auc_metric(ds.positives(), ds.negatives(), r.x_star);
    } else {
        const LinearClassifier clf(r.x_star, ds.num_features());
        s["metric_name"] = "hamming_loss";
        s["metric"] = hamming_loss(ds.features, ds.labels, clf);
        s["prediction_hamming_loss"] = prediction_hamming_loss(ds.features, ds.labels, clf);
    }
    s["time_s"] = elapsed;
    s["warnings"] = r.warnings;

    if (!a.summary.empty()) {
        std::ofstream f(a.summary, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write " + a.summary);
        f << s.dump(2) << '\n';
    }
    for (const auto &w : r.warnings)
        err << "warning: " << w << '\n';
    out << to_string(r.status) << ": " << r.iterations << " iterations, F = "
        << format_double(r.F_star) << ", vdo = " << format_double(r.vdo_final) << '\n';
    return r.status == SolveStatus::max_iter ? exit_max_iter : exit_ok;
}

// ---------------------------------------------------------------- bench

struct BenchArgs : CommonArgs {
    int folds = 5;
    std::optional<double> holdout;
    bool sweep = false, unstratified = false;
    int jobs = 1;
    std::string out;
};

int cmd_bench(const BenchArgs &a, std::ostream &out, std::ostream &err) {
    const Task task = a.task_kind();
    const Dataset ds = load_dataset(task, a.data, a.labels, a.add_bias);
    if (a.sweep && task != Task::mlc)
        throw UsageError("--sweep-lambda1 applies to --task mlc only");

    BenchOptions opts;
    opts.task = task;
    opts.split = a.holdout ? SplitSpec::holdout(*a.holdout, a.seed, !a.unstratified)
                           : SplitSpec::kfold(a.folds, a.seed, !a.unstratified);
    opts.sweep_lambda1 = a.sweep;
    opts.lambda1 = a.lambda1;
    opts.overrides = a.overrides();
    opts.stop = a.stop_rule(StopRule::relative);
    opts.vdo_tol = a.vdo_tol;
    opts.solver = a.solver_kind();
    opts.jobs = a.jobs;
    opts.scale = a.scale;
    opts.zero_times = a.reproducible;

    const BenchResult res = run_bench(ds, opts);
    for (const auto &w : res.warnings)
        err << "warning: " << w << '\n';
    if (a.out.empty()) {
        write_bench_csv(out, res.rows);
    } else {
        std::ofstream f(a.out, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write " + a.out);
        write_bench_csv(f, res.rows);
    }
    return exit_ok;
}

} // namespace

void apply_stop_rule(SgsnConfig &cfg, StopRule rule, double vdo_tol) {
    if (rule == StopRule::relative) {
        cfg.vdo_rel_tol = 1e-3;
        cfg.vdo_change_tol = 1e-3;
        cfg.vdo_abs_tol = 0;
    } else {
        cfg.vdo_rel_tol = 0;
        cfg.vdo_change_tol = 0;
        cfg.vdo_abs_tol = vdo_tol;
    }
}

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

void write_trace_csv(std::ostream &out, const std::vector<IterationRecord> &trace,
                     bool zero_wall_time) {
    out << trace_header << '\n';
    for (const auto &r : trace) {
        out << r.k << ',' << format_double(r.F) << ',' << format_double(r.vdo) << ','
            << r.support << ',' << to_string(r.step) << ',' << format_double(r.alpha) << ','
            << r.cg_iters << ',' << (zero_wall_time ? 0 : r.wall_ns) << '\n';
    }
}

std::vector<double> lambda1_grid() {
    std::vector<double> grid;
    for (int e = -6; e <= 6; ++e)
        grid.push_back(std::ldexp(1.0, e));
    return grid;
}

BenchResult run_bench(const Dataset &ds, const BenchOptions &opts) {
    BenchResult res;
    const auto folds = make_folds(ds, opts.split, &res.warnings);
    std::vector<double> lambdas{opts.lambda1};
    if (opts.task == Task::auc)
        lambdas = {std::numeric_limits<double>::quiet_NaN()};
    else if (opts.sweep_lambda1)
        lambdas = lambda1_grid();

    const std::size_t nf = folds.size(), total = lambdas.size() * nf;
    res.runs.resize(total);
    std::vector<std::exception_ptr> errors(total);
    std::vector<std::vector<std::string>> run_warnings(total);

    const auto work = [&](std::size_t item) {
        const double lambda1 = lambdas[item / nf];
        const int fold = static_cast<int>(item % nf);
        Dataset train = ds.subset(folds[fold].train), test = ds.subset(folds[fold].test);
        if (opts.scale) {
            test.features = scaled(train.features, test.features, opts.task);
            train.features = scaled(train.features, train.features, opts.task);
        }
        TaskProblem tp = build_problem(opts.task, train, lambda1, opts.overrides);
        apply_stop_rule(tp.config, opts.stop, opts.vdo_tol);
        tp.config.rng_seed = opts.split.seed;
        tp.config.validate(tp.problem);

        const auto start = Clock::now();
        SolveResult r = run_solver(tp, opts.solver);
        RunRecord rec;
        rec.time_s = opts.zero_times ? 0.0 : seconds_since(start);
        rec.lambda1 = lambda1;
        rec.fold = fold;
        rec.nne = count_nonzeros(r.x_star);
        rec.iterations = r.iterations;
        rec.status = r.status;
        if (opts.task == Task::auc) {
            rec.metric = auc_or_nan(test, r.x_star);
            rec.train_metric = auc_or_nan(train, r.x_star);
            if (std::isnan(rec.metric))
                run_warnings[item].push_back("fold " + std::to_string(fold) +
                                             ": test split lacks a class, AUC undefined");
        } else {
            const LinearClassifier clf(r.x_star, train.num_features());
            rec.metric = prediction_hamming_loss(test.features, test.labels, clf);
            rec.train_metric = prediction_hamming_loss(train.features, train.labels, clf);
            rec.hl_strict = hamming_loss(test.features, test.labels, clf);
        }
        for (const auto &w : r.warnings)
            run_warnings[item].push_back("fold " + std::to_string(fold) + ": " + w);
        if (opts.keep_traces)
            rec.trace = std::move(r.trace);
        res.runs[item] = std::move(rec);
    };

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t item; (item = next.fetch_add(1)) < total;) {
            try {
                work(item);
            } catch (...) {
                errors[item] = std::current_exception();
            }
        }
    };
    const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(total)));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
    }
    for (const auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    for (const auto &ws : run_warnings)
        res.warnings.insert(res.warnings.end(), ws.begin(), ws.end());

    const auto aggregate = [&](std::size_t li, const char *kind) {
        BenchRow row;
        row.kind = kind;
        row.lambda1 = lambdas[li];
        int ok = 0;
        for (std::size_t f = 0; f < nf; ++f) {
            const RunRecord &r = res.runs[li * nf + f];
            row.metric += r.metric;
            row.train_metric += r.train_metric;
            row.nne += static_cast<double>(r.nne);
            row.iterations += r.iterations;
            row.time_s += r.time_s;
            ok += converged(r.status) ? 1 : 0;
        }
        const double k = static_cast<double>(nf);
        row.metric /= k;
        row.train_metric /= k;
        row.nne /= k;
        row.iterations /= k;
        row.time_s /= k;
        row.status = std::to_string(ok) + "/" + std::to_string(nf) + " converged";
        return row;
    };

    if (lambdas.size() == 1) {
        for (const RunRecord &r : res.runs) {
            BenchRow row;
            row.kind = "fold";
            row.lambda1 = r.lambda1;
            row.fold = r.fold;
            row.metric = r.metric;
            row.train_metric = r.train_metric;
            row.nne = static_cast<double>(r.nne);
            row.iterations = r.iterations;
            row.time_s = r.time_s;
            row.status = std::string(to_string(r.status));
            res.rows.push_back(row);
        }
        res.rows.push_back(aggregate(0, "mean"));
    } else {
        std::size_t best = 0;
        for (std::size_t li = 0; li < lambdas.size(); ++li) {
            res.rows.push_back(aggregate(li, "candidate"));
            const BenchRow &c = res.rows.back(), &b = res.rows[best];
            if (c.train_metric < b.train_metric ||
                (c.train_metric == b.train_metric && c.nne < b.nne))
                best = li;
        }
        BenchRow sel = res.rows[best];
        sel.kind = "selected";
        res.rows.push_back(sel);
    }
    return res;
}

void write_bench_csv(std::ostream &out, const std::vector<BenchRow> &rows) {
    out << bench_header << '\n';
    for (const auto &r : rows) {
        out << r.kind << ',' << (std::isnan(r.lambda1) ? std::string() : format_double(r.lambda1))
            << ','
            << (r.fold >= 0 ? std::to_string(r.fold) : std::string()) << ','
            << format_double(r.metric) << ',' << format_double(r.train_metric) << ','
            << format_double(r.nne) << ',' << format_double(r.iterations) << ','
            << format_double(r.time_s) << ',' << r.status << '\n';
    }
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Sparse dual solver for 0/1-loss models"};
    app.require_subcommand(1);

    GenArgs gen;
    auto *g = app.add_subcommand("gen", "generate a simulated dataset");
    g->add_option("--task", gen.task, "auc (two Gaussian classes) or mlc (linear multi-label)")
        ->required()
        ->check(CLI::IsMember({"auc", "mlc"}));
    g->add_option("--q", gen.q, "number of samples")->required()->check(CLI::PositiveNumber);
    g->add_option("--n", gen.n, "auc: number of features")->check(CLI::PositiveNumber);
    g->add_option("--d", gen.d, "mlc: number of features, including the bias")
        ->check(CLI::PositiveNumber);
    g->add_option("--l", gen.l, "mlc: number of labels")->check(CLI::PositiveNumber);
    g->add_option("--p", gen.p, "auc: positive fraction");
    g->add_option("--r", gen.r, "auc: label flip rate");
    g->add_option("--seed", gen.seed, "random seed");
    g->add_option("--out", gen.out, "output LIBSVM file")->required();

    SolveArgs sa;
    auto *s = app.add_subcommand("solve", "solve one problem and write trace/summary");
    add_common(*s, sa);
    s->add_option("--trace", sa.trace, "trace CSV path");
    s->add_option("--summary", sa.summary, "summary JSON path");

    BenchArgs ba;
    auto *b = app.add_subcommand("bench", "cross-validated evaluation");
    add_common(*b, ba);
    b->add_option("--folds", ba.folds, "number of folds")->capture_default_str();
    b->add_option("--holdout", ba.holdout, "single split with this train fraction");
    b->add_flag("--sweep-lambda1", ba.sweep, "mlc: sweep lambda1 over 2^-6 .. 2^6");
    b->add_flag("--unstratified", ba.unstratified, "plain random folds");
    b->add_option("--jobs", ba.jobs, "parallel solves")->capture_default_str();
    b->add_option("--out", ba.out, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (g->parsed())
            return cmd_gen(gen, *g, out);
        if (s->parsed())
            return cmd_solve(sa, out, err);
        return cmd_bench(ba, out, err);
    } catch (const UsageError &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception &e) {
        err << "internal error: " << e.what() << '\n';
        return exit_internal;
    }
}

} // namespace sgsn::cli
