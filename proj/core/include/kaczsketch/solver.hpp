#pragma once

#include "kaczsketch/dense.hpp"
#include "kaczsketch/sketch.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kaczsketch {

enum class Method {
    Mwrk,           // maximal weighted residual row selection, deterministic
    RsMwrk,         // same iteration on a sketched system
    RabkConst,      // averaged block projections, constant stepsize
    RabkAdaptive,   // averaged block projections, adaptive stepsize
    LsRabkConst,    // block averaging on a row-sampled system, constant stepsize
    LsRabkAdaptive  // block averaging on a row-sampled system, adaptive stepsize
};

const char* to_string(Method m);

enum class StepsizeKind { Constant, Adaptive };

/// Inputs for the closed-form constant stepsize
/// (2 - eta) * omega_min / (omega_max^2 * lambda_max_block).
struct AlphaContext {
    double omegaMin = 0.0;
    double omegaMax = 0.0;
    double lambdaMaxBlock = 0.0;
};

struct StepsizePolicy {
    StepsizeKind kind = StepsizeKind::Constant;
    double eta = 0.05;                        // in (0, 1]; 0.05 gives 1.95*L_k
    std::optional<double> constantValue;      // overrides the formula when set
    std::optional<AlphaContext> context;      // enables the formula route
};

/// Benchmark default: the literal constant 1.95.
StepsizePolicy constant_stepsize(double value = 1.95);
StepsizePolicy adaptive_stepsize(double eta = 0.05);

/// Resolves the constant stepsize: the explicit value when present, else the
/// closed form from the context. Throws when neither is available.
double constant_alpha(const StepsizePolicy& policy);

enum class BlockSampleMode {
    Fresh,      // tau distinct indices drawn uniformly without replacement each step
    Partition   // rows shuffled once into tau-sized cells; one cell drawn per step
};

struct BlockSampler {
    std::size_t tau = 1;
    BlockSampleMode mode = BlockSampleMode::Fresh;
    std::uint64_t seed = 0;
};

enum class WeightKind { Uniform };

struct WeightScheme {
    WeightKind kind = WeightKind::Uniform;
};

enum class ResKind {
    TrueError,  // ||x_k - xstar||^2 / ||xstar||^2, requires xstar
    Residual    // ||b - A x_k||^2 / ||b||^2 against the original system
};

struct StoppingRule {
    double resTolerance = 1e-6;
    std::size_t maxIters = 100000;
    ResKind resKind = ResKind::TrueError;
};

struct SolverConfig {
    Method method = Method::Mwrk;
    SketchType sketchType = SketchType::RowSample;  // used when sketched() is true
    std::size_t d = 0;                              // sketch rows; required when sketched
    StepsizePolicy stepsize = constant_stepsize();
    BlockSampler block;
    WeightScheme weights;
    StoppingRule stop;
    std::uint64_t seed = 0;
    std::size_t traceStride = 1;      // 0 disables the per-iteration trace
    bool recordSelectedRows = false;
    std::optional<RealVector> x0;     // defaults to the zero vector

    bool sketched() const {
        return method == Method::RsMwrk || method == Method::LsRabkConst ||
               method == Method::LsRabkAdaptive;
    }
    bool blockMethod() const {
        return method == Method::RabkConst || method == Method::RabkAdaptive ||
               method == Method::LsRabkConst || method == Method::LsRabkAdaptive;
    }
    bool adaptive() const {
        return method == Method::RabkAdaptive || method == Method::LsRabkAdaptive;
    }
};

/// Throws std::invalid_argument on any method/sketch incompatibility or
/// malformed parameter. Notably the block-averaging methods pair only with
/// the row sampler; the count sketch is rejected for them.
void validate_config(const SolverConfig& cfg, std::size_t rows, std::size_t cols);

enum class SolveStatus { Converged, MaxIters, SketchInsufficient, Diverged };

const char* to_string(SolveStatus s);

struct TracePoint {
    std::size_t iteration;
    double res;
    double seconds;  // elapsed since solve() entry, sketch build included
};

struct RunTrace {
    std::size_t iterations = 0;
    double wallSeconds = 0.0;
    double sketchSeconds = 0.0;  // portion spent building/applying the sketch
    double finalRes = 0.0;
    SolveStatus status = SolveStatus::MaxIters;
    std::size_t traceStride = 1;
    std::vector<TracePoint> resHistory;
    RealVector finalX;
    std::size_t adaptiveFallbacks = 0;  // degenerate-denominator events in L_k
    std::optional<std::vector<std::size_t>> selectedRows;
};

// ---- Row-action kernels (shared by the methods and unit-testable alone) ----

/// Index maximizing residual^2 / rowNormSq over rows with positive norm;
/// zero-norm rows are skipped. Ties break to the lowest index. Throws when
/// every row has zero norm.
std::size_t mwrk_select_row(const RealVector& residualVec, const RowNormCache& norms);

/// Orthogonal projection of x onto the hyperplane of row i: returns
/// x + (b_i - A_i x) / ||A_i||^2 * A_i^T. Throws on a zero-norm row.
RealVector kaczmarz_update(const DenseMatrix& A, const RealVector& b,
                           const RealVector& x, std::size_t i,
                           const RowNormCache& norms);

/// Averaged projection direction
///   g = sum_{i in J} w_i * (A_i x - b_i) / ||A_i||^2 * A_i^T
/// (applied as x - alpha * g). weights must align with J and sum to 1.
RealVector rabk_direction(const DenseMatrix& A, const RealVector& b,
                          const RealVector& x, const std::vector<std::size_t>& J,
                          const std::vector<double>& weights,
                          const RowNormCache& norms);

struct AdaptiveStep {
    double value = 0.0;
    bool usedFallback = false;  // direction cancelled to zero despite nonzero residuals
};

/// The adaptive stepsize ratio L_k: with wbar_i = w_i / ||A_i||^2,
///   sum wbar_i r_i^2 / || sum wbar_i r_i A_i^T ||^2   when some r_i != 0,
///   1 / lambda_max(A_J^T diag(wbar) A_J)              otherwise.
AdaptiveStep adaptive_Lk(const DenseMatrix& A, const RealVector& b,
                         const RealVector& x, const std::vector<std::size_t>& J,
                         const std::vector<double>& weights,
                         const RowNormCache& norms);

/// Runs the configured method. Sketched methods build the sketch, form
/// (Atil, btil) once, and iterate exclusively on the reduced system; wall
/// time covers the sketch phase. RES is always measured against the original
/// system's xstar (or its residual).
RunTrace solve(const DenseMatrix& A, const RealVector& b, const SolverConfig& cfg,
               const RealVector* xstar = nullptr);

/// The seeded row partition used by BlockSampleMode::Partition and by the
/// exact block-spectrum scan: `rows` shuffled, then cut into tau-sized cells
/// (last cell keeps the remainder).
std::vector<std::vector<std::size_t>> make_partition(
    const std::vector<std::size_t>& rows, std::size_t tau, std::uint64_t seed);

}  // namespace kaczsketch
