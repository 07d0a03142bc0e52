#pragma once

#include <sgsn/sgsn.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace sgsn::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_usage = 2,
    exit_max_iter = 3,
};

/// Entry point shared by the executable and the integration tests.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

enum class Task { auc, mlc };
enum class StopRule {
    /// VDO_k / VDO_1 ≤ 1e-3 or |VDO_k − VDO_{k−1}| < 1e-3.
    relative,
    /// VDO_k ≤ vdo_tol.
    vdo,
};
enum class SolverKind { sgsn, pg };

void apply_stop_rule(SgsnConfig &cfg, StopRule rule, double vdo_tol);

/// 17 significant digits with '.' as the decimal point, whatever the locale.
std::string format_double(double x);

inline constexpr const char *trace_header = "k,F,vdo,support,step,alpha,cg_iters,wall_ns";

void write_trace_csv(std::ostream &out, const std::vector<IterationRecord> &trace,
                     bool zero_wall_time = false);

/// λ₁ ∈ {2⁻⁶, …, 2⁶}.
std::vector<double> lambda1_grid();

struct BenchOptions {
    Task task = Task::auc;
    SplitSpec split = SplitSpec::kfold(5, 0);
    bool sweep_lambda1 = false;
    double lambda1 = 1.0;
    TaskOverrides overrides;
    StopRule stop = StopRule::relative;
    double vdo_tol = 1e-4;
    SolverKind solver = SolverKind::sgsn;
    int jobs = 1;
    /// Fit the [−1, 1] scaler on each training split and apply it to the
    /// matching test split. For MLC the trailing intercept column is left
    /// alone.
    bool scale = false;
    bool keep_traces = false;
    /// Report all times as 0 so that output is byte-stable.
    bool zero_times = false;
};

struct RunRecord {
    double lambda1 = 0;
    int fold = 0;
    double metric = 0;       ///< test AUC, or test prediction Hamming loss
    double train_metric = 0; ///< same metric on the training split
    double hl_strict = 0;    ///< MLC only: test loss with the strict indicator
    Index nne = 0;
    int iterations = 0;
    double time_s = 0;
    SolveStatus status = SolveStatus::max_iter;
    std::vector<IterationRecord> trace;
};

/// kind is "fold", "mean", "candidate" (per-λ₁ fold mean) or "selected".
struct BenchRow {
    std::string kind;
    double lambda1 = 0;
    int fold = -1; ///< −1 on aggregate rows
    double metric = 0;
    double train_metric = 0;
    double nne = 0;
    double iterations = 0;
    double time_s = 0;
    std::string status;
};

struct BenchResult {
    std::vector<RunRecord> runs; ///< ordered by (λ₁, fold)
    std::vector<BenchRow> rows;
    std::vector<std::string> warnings;
};

/// Cross-validated training and evaluation. For MLC with a λ₁ sweep the
/// rows are one candidate per λ₁ plus the candidate with the lowest mean
/// training loss (ties: fewer nonzeros, then smaller λ₁).
BenchResult run_bench(const Dataset &ds, const BenchOptions &opts);

inline constexpr const char *bench_header =
    "kind,lambda1,fold,metric,train_metric,nne,iterations,time_s,status";

void write_bench_csv(std::ostream &out, const std::vector<BenchRow> &rows);

} // namespace sgsn::cli
