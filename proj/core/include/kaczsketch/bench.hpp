#pragma once

#include "kaczsketch/dense.hpp"
#include "kaczsketch/solver.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kaczsketch {

struct Problem {
    DenseMatrix A;
    RealVector xstar;
    RealVector b;  // A * xstar, consistent by construction
};

/// Standard-normal A (row-major fill) and xstar from the seeded stream,
/// b = A * xstar. Requires m > n >= 1.
Problem generate_problem(std::size_t m, std::size_t n, std::uint64_t seed);

/// The benchmark grid: for every d multiplier and method, `trials`
/// independent problems (or one shared problem with fixedProblem) are solved
/// with paired seeds: methods at the same (d, trial) see the same problem;
/// their sketch/sampling randomness derives from a per-method split.
struct ExperimentSpec {
    std::size_t m = 0;
    std::size_t n = 0;
    std::vector<std::size_t> dMultipliers;  // d = multiplier * n
    std::vector<std::string> methods;       // tags from known_method_tags()
    std::size_t trials = 50;
    std::uint64_t baseSeed = 1;
    double tolerance = 1e-6;
    std::size_t maxIters = 100000;
    std::size_t traceStride = 1;  // 0 disables traces
    std::size_t workers = 0;      // 0 = hardware concurrency, 1 = serial
    bool fixedProblem = false;    // reuse one problem across trials in a cell
};

void validate_spec(const ExperimentSpec& spec);

struct TrialResult {
    std::string method;
    std::size_t m = 0, n = 0, d = 0, tau = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;  // the per-(method, d, trial) seed
    std::size_t iterations = 0;
    double wallSeconds = 0.0;
    double finalRes = 0.0;
    SolveStatus status = SolveStatus::MaxIters;
    std::vector<TracePoint> trace;
    std::string note;  // unexported diagnostic, empty on clean runs
};

/// Canonical method tags. `cs-mwrk` is the count-sketch baseline: the plain
/// row-selection method run on a count-sketched system under its own seed
/// stream, kept as a separate column for the speedup ratios.
const std::vector<std::string>& known_method_tags();

/// tau = d / 50, rounded to nearest and floored at 1.
std::size_t tau_rule(std::size_t d);

/// Builds the SolverConfig for a method tag at sketch size d. For the
/// block-averaging methods tau follows tau_rule(d) whether or not the method
/// sketches. Unknown tags throw.
SolverConfig make_method_config(const std::string& tag, std::size_t d,
                                std::uint64_t methodSeed, double tolerance,
                                std::size_t maxIters, std::size_t traceStride);

/// True for tags that consume a sketch (d is their iterated row count).
bool method_tag_sketches(const std::string& tag);

using ProgressFn = std::function<void(const TrialResult&)>;

/// Executes the grid. Trials within a (d, trial) pair share the problem
/// instance; execution may be parallel but iterate sequences depend only on
/// seeds. Individual trial failures are recorded, never fatal. Results come
/// back ordered by (d, method, trial).
std::vector<TrialResult> run_grid(const ExperimentSpec& spec,
                                  const ProgressFn& progress = nullptr);

struct CellStats {
    std::string method;
    std::size_t d = 0;
    std::size_t tau = 0;
    std::size_t trials = 0;
    std::size_t converged = 0;
    double meanIt = 0.0;   // over converged trials only
    double meanCpu = 0.0;  // over converged trials only
    bool available = false;
};

struct SpeedupRow {
    std::size_t d = 0;
    // cs-mwrk/rs-mwrk-q, cs-mwrk/rs-mwrk-g, rabk-c/ls-rabk-q-c, rabk-a/ls-rabk-q-a
    std::optional<double> speedup1, speedup2, speedup3, speedup4;
};

struct AggregateStats {
    std::vector<CellStats> cells;
    std::vector<SpeedupRow> speedups;
};

AggregateStats aggregate(const std::vector<TrialResult>& results);

std::string stats_json(const AggregateStats& stats);

/// results CSV: method,m,n,d,tau,trial,seed,iters,wall_seconds,final_res,status
void export_results_csv(const std::vector<TrialResult>& results,
                        const std::string& path);
std::vector<TrialResult> load_results_csv(const std::string& path);

void export_stats_json(const AggregateStats& stats, const std::string& path);

/// One file per (method, d): trace_<method>_d<d>.csv with header
/// iteration,median_log10_res,median_wall_seconds; medians taken across the
/// trials that recorded that iteration.
void export_traces_csv(const std::vector<TrialResult>& results,
                       const std::string& outDir);

/// Rows of a single exported trace file, for downstream consumers.
struct TraceRow {
    std::size_t iteration;
    double medianLog10Res;
    double medianWallSeconds;
};

std::vector<TraceRow> median_trace(const std::vector<TrialResult>& results,
                                   const std::string& method, std::size_t d);

}  // namespace kaczsketch
