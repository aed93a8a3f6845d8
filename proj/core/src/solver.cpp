#include "kaczsketch/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace kaczsketch {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr double kDivergenceRes = 1e12;
constexpr std::size_t kStallCheckStride = 256;

}  // namespace

const char* to_string(Method m) {
    switch (m) {
        case Method::Mwrk: return "mwrk";
        case Method::RsMwrk: return "rs-mwrk";
        case Method::RabkConst: return "rabk-c";
        case Method::RabkAdaptive: return "rabk-a";
        case Method::LsRabkConst: return "ls-rabk-c";
        case Method::LsRabkAdaptive: return "ls-rabk-a";
    }
    return "unknown";
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIters: return "maxIters";
        case SolveStatus::SketchInsufficient: return "sketch-insufficient";
        case SolveStatus::Diverged: return "diverged";
    }
    return "unknown";
}

StepsizePolicy constant_stepsize(double value) {
    StepsizePolicy p;
    p.kind = StepsizeKind::Constant;
    p.constantValue = value;
    return p;
}

StepsizePolicy adaptive_stepsize(double eta) {
    StepsizePolicy p;
    p.kind = StepsizeKind::Adaptive;
    p.eta = eta;
    return p;
}

double constant_alpha(const StepsizePolicy& policy) {
    if (policy.constantValue) {
        if (*policy.constantValue <= 0.0) {
            throw std::invalid_argument("constant_alpha: stepsize must be positive");
        }
        return *policy.constantValue;
    }
    if (!policy.context) {
        throw std::invalid_argument(
            "constant_alpha: neither an explicit value nor a context was supplied");
    }
    const AlphaContext& c = *policy.context;
    if (c.omegaMin <= 0.0 || c.omegaMax < c.omegaMin || c.lambdaMaxBlock <= 0.0) {
        throw std::invalid_argument("constant_alpha: malformed context");
    }
    if (policy.eta <= 0.0 || policy.eta > 1.0) {
        throw std::invalid_argument("constant_alpha: eta must lie in (0, 1]");
    }
    return (2.0 - policy.eta) * c.omegaMin / (c.omegaMax * c.omegaMax * c.lambdaMaxBlock);
}

void validate_config(const SolverConfig& cfg, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("solve: empty system");
    }
    if (cfg.stop.resTolerance <= 0.0) {
        throw std::invalid_argument("solve: resTolerance must be positive");
    }
    if (cfg.stop.maxIters == 0) {
        throw std::invalid_argument("solve: maxIters must be >= 1");
    }
    if (cfg.sketched()) {
        if (cfg.d < 1 || cfg.d >= rows) {
            throw std::invalid_argument("solve: sketched methods require 1 <= d < m");
        }
        if ((cfg.method == Method::LsRabkConst || cfg.method == Method::LsRabkAdaptive) &&
            cfg.sketchType != SketchType::RowSample) {
            throw std::invalid_argument(
                "solve: block averaging pairs only with the row sampler");
        }
    }
    if (cfg.blockMethod()) {
        if (cfg.block.tau < 1) {
            throw std::invalid_argument("solve: block size tau must be >= 1");
        }
        const std::size_t iterRows = cfg.sketched() ? cfg.d : rows;
        if (cfg.block.tau > iterRows) {
            throw std::invalid_argument("solve: tau exceeds the sampled row count");
        }
        if (cfg.adaptive()) {
            if (cfg.stepsize.eta <= 0.0 || cfg.stepsize.eta > 1.0) {
                throw std::invalid_argument("solve: eta must lie in (0, 1]");
            }
        } else if (cfg.stepsize.constantValue && *cfg.stepsize.constantValue <= 0.0) {
            throw std::invalid_argument("solve: constant stepsize must be positive");
        }
    }
    if (cfg.x0 && cfg.x0->size() != cols) {
        throw std::invalid_argument("solve: x0 length does not match cols");
    }
}

std::size_t mwrk_select_row(const RealVector& residualVec, const RowNormCache& norms) {
    if (residualVec.size() != norms.size()) {
        throw std::invalid_argument("mwrk_select_row: dimension mismatch");
    }
    std::size_t best = residualVec.size();
    double bestVal = -1.0;
    for (std::size_t i = 0; i < residualVec.size(); ++i) {
        if (norms[i] <= 0.0) continue;
        const double v = residualVec[i] * residualVec[i] / norms[i];
        if (v > bestVal) {
            bestVal = v;
            best = i;
        }
    }
    if (best == residualVec.size()) {
        throw std::invalid_argument("mwrk_select_row: every row has zero norm");
    }
    return best;
}

RealVector kaczmarz_update(const DenseMatrix& A, const RealVector& b,
                           const RealVector& x, std::size_t i,
                           const RowNormCache& norms) {
    if (i >= A.rows() || norms.size() != A.rows()) {
        throw std::invalid_argument("kaczmarz_update: bad row index or cache");
    }
    if (norms[i] <= 0.0) {
        throw std::invalid_argument("kaczmarz_update: zero-norm row");
    }
    auto row = A.row(i);
    const double beta = (b[i] - dot(row, x)) / norms[i];
    RealVector next(x);
    for (std::size_t j = 0; j < next.size(); ++j) next[j] += beta * row[j];
    return next;
}

RealVector rabk_direction(const DenseMatrix& A, const RealVector& b,
                          const RealVector& x, const std::vector<std::size_t>& J,
                          const std::vector<double>& weights,
                          const RowNormCache& norms) {
    if (J.empty()) {
        throw std::invalid_argument("rabk_direction: empty block");
    }
    if (weights.size() != J.size()) {
        throw std::invalid_argument("rabk_direction: weights do not align with block");
    }
    RealVector g(A.cols(), 0.0);
    for (std::size_t t = 0; t < J.size(); ++t) {
        const std::size_t i = J[t];
        if (norms[i] <= 0.0) {
            throw std::invalid_argument("rabk_direction: zero-norm row in block");
        }
        auto row = A.row(i);
        const double r = dot(row, x) - b[i];
        const double c = weights[t] * r / norms[i];
        for (std::size_t j = 0; j < g.size(); ++j) g[j] += c * row[j];
    }
    return g;
}

namespace {

/// lambda_max(A_J^T diag(wbar) A_J) via the |J|-by-|J| Gram side
/// W^{1/2} A_J A_J^T W^{1/2}, which shares the nonzero spectrum.
double block_lambda_max(const DenseMatrix& A, const std::vector<std::size_t>& J,
                        const std::vector<double>& wbar) {
    const std::size_t t = J.size();
    Eigen::MatrixXd B(t, t);
    for (std::size_t a = 0; a < t; ++a) {
        for (std::size_t c = a; c < t; ++c) {
            const double v =
                std::sqrt(wbar[a] * wbar[c]) * dot(A.row(J[a]), A.row(J[c]));
            B(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = v;
            B(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(a)) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

}  // namespace

AdaptiveStep adaptive_Lk(const DenseMatrix& A, const RealVector& b,
                         const RealVector& x, const std::vector<std::size_t>& J,
                         const std::vector<double>& weights,
                         const RowNormCache& norms) {
    if (J.empty()) {
        throw std::invalid_argument("adaptive_Lk: empty block");
    }
    if (weights.size() != J.size()) {
        throw std::invalid_argument("adaptive_Lk: weights do not align with block");
    }
    RealVector g(A.cols(), 0.0);
    std::vector<double> wbar(J.size());
    double numerator = 0.0;
    bool anyNonzero = false;
    for (std::size_t t = 0; t < J.size(); ++t) {
        const std::size_t i = J[t];
        if (norms[i] <= 0.0) {
            throw std::invalid_argument("adaptive_Lk: zero-norm row in block");
        }
        auto row = A.row(i);
        const double r = dot(row, x) - b[i];
        wbar[t] = weights[t] / norms[i];
        numerator += wbar[t] * r * r;
        if (r != 0.0) anyNonzero = true;
        const double c = wbar[t] * r;
        for (std::size_t j = 0; j < g.size(); ++j) g[j] += c * row[j];
    }
    AdaptiveStep out;
    if (anyNonzero) {
        const double denom = norm_sq(g);
        if (denom > 0.0) {
            out.value = numerator / denom;
            return out;
        }
        out.usedFallback = true;  // exact cancellation; fall through
    }
    out.value = 1.0 / block_lambda_max(A, J, wbar);
    return out;
}

std::vector<std::vector<std::size_t>> make_partition(
    const std::vector<std::size_t>& rows, std::size_t tau, std::uint64_t seed) {
    if (rows.empty() || tau < 1 || tau > rows.size()) {
        throw std::invalid_argument("make_partition: need 1 <= tau <= rows");
    }
    std::vector<std::size_t> shuffled(rows);
    RandomStream rs(mix_seed(seed, hash_tag("block-partition")));
    for (std::size_t i = shuffled.size(); i > 1; --i) {
        const std::size_t j = rs.uniform_below(i);
        std::swap(shuffled[i - 1], shuffled[j]);
    }
    const std::size_t cells = shuffled.size() / tau;  // >= 1
    std::vector<std::vector<std::size_t>> out(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        const std::size_t begin = c * tau;
        const std::size_t end = (c + 1 == cells) ? shuffled.size() : begin + tau;
        out[c].assign(shuffled.begin() + begin, shuffled.begin() + end);
    }
    return out;
}

namespace {

struct ResMeter {
    const DenseMatrix& A;
    const RealVector& b;
    const RealVector* xstar;
    ResKind kind;
    double denom = 0.0;

    ResMeter(const DenseMatrix& a, const RealVector& rhs, const RealVector* xs,
             ResKind k)
        : A(a), b(rhs), xstar(xs), kind(k) {
        if (kind == ResKind::TrueError) {
            if (!xstar) {
                throw std::invalid_argument("solve: true-error RES requires xstar");
            }
            denom = norm_sq(std::span<const double>(*xstar));
            if (denom <= 0.0) {
                throw std::invalid_argument("solve: xstar must be nonzero for RES");
            }
        } else {
            denom = norm_sq(std::span<const double>(b));
            if (denom <= 0.0) {
                throw std::invalid_argument("solve: b must be nonzero for residual RES");
            }
        }
    }

    double operator()(const RealVector& x) const {
        if (kind == ResKind::TrueError) {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double diff = x[i] - (*xstar)[i];
                s += diff * diff;
            }
            return s / denom;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < A.rows(); ++i) {
            const double r = b[i] - dot(A.row(i), x);
            s += r * r;
        }
        return s / denom;
    }
};

class TraceRecorder {
public:
    TraceRecorder(RunTrace& trace, std::size_t stride, Clock::time_point t0)
        : trace_(trace), stride_(stride), t0_(t0) {
        trace_.traceStride = stride == 0 ? 1 : stride;
    }

    void record(std::size_t iteration, double res, bool force = false) {
        if (stride_ == 0) return;
        if (!force && iteration % stride_ != 0) return;
        if (!trace_.resHistory.empty() &&
            trace_.resHistory.back().iteration == iteration) {
            return;
        }
        trace_.resHistory.push_back({iteration, res, seconds_since(t0_)});
    }

private:
    RunTrace& trace_;
    std::size_t stride_;
    Clock::time_point t0_;
};

bool sketched_system_exhausted(const DenseMatrix& M, const RealVector& rhs,
                               const RealVector& x) {
    double maxAbs = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < M.rows(); ++i) {
        maxAbs = std::max(maxAbs, std::abs(rhs[i] - dot(M.row(i), x)));
        scale = std::max(scale, std::abs(rhs[i]));
    }
    return maxAbs <= 1e-12 * (1.0 + scale);
}

}  // namespace

RunTrace solve(const DenseMatrix& A, const RealVector& b, const SolverConfig& cfg,
               const RealVector* xstar) {
    validate_config(cfg, A.rows(), A.cols());
    if (b.size() != A.rows()) {
        throw std::invalid_argument("solve: rhs length does not match rows");
    }
    ensure_finite(b, "solve rhs");
    if (xstar) {
        if (xstar->size() != A.cols()) {
            throw std::invalid_argument("solve: xstar length does not match cols");
        }
        ensure_finite(*xstar, "solve xstar");
    }

    const auto t0 = Clock::now();
    RunTrace trace;

    // Sketch phase; timed as part of the run.
    std::optional<SketchedSystem> sk;
    if (cfg.sketched()) {
        const std::uint64_t sketchSeed = mix_seed(cfg.seed, hash_tag("sketch"));
        if (cfg.sketchType == SketchType::CountSketch) {
            sk = apply_count_sketch(build_count_sketch(A.rows(), cfg.d, sketchSeed), A, b);
        } else {
            sk = apply_row_sample(build_row_sample(A.rows(), cfg.d, sketchSeed), A, b);
        }
    }
    const DenseMatrix& M = sk ? sk->Atil : A;
    const RealVector& rhs = sk ? sk->btil : b;
    trace.sketchSeconds = seconds_since(t0);

    const RowNormCache norms = row_norms_squared(M);
    std::vector<std::size_t> active;
    active.reserve(M.rows());
    for (std::size_t i = 0; i < M.rows(); ++i) {
        if (norms[i] > 0.0) active.push_back(i);
    }
    if (active.empty()) {
        throw std::invalid_argument("solve: iterated matrix has no nonzero row");
    }
    if (cfg.blockMethod() && cfg.block.tau > active.size()) {
        throw std::invalid_argument("solve: tau exceeds the number of nonzero rows");
    }

    RealVector x = cfg.x0 ? *cfg.x0 : RealVector(A.cols(), 0.0);
    if (cfg.x0) ensure_finite(x, "solve x0");

    const ResMeter res(A, b, xstar, cfg.stop.resKind);
    TraceRecorder recorder(trace, cfg.traceStride, t0);
    if (cfg.recordSelectedRows) trace.selectedRows.emplace();

    double cur = res(x);
    recorder.record(0, cur, /*force=*/true);
    const double tol = cfg.stop.resTolerance;

    if (cur < tol) {
        trace.iterations = 0;
        trace.finalRes = cur;
        trace.finalX = std::move(x);
        trace.status = SolveStatus::Converged;
        trace.wallSeconds = seconds_since(t0);
        return trace;
    }

    SolveStatus status = SolveStatus::MaxIters;

    if (cfg.method == Method::Mwrk || cfg.method == Method::RsMwrk) {
        RealVector r(M.rows());
        const double stallEps = 1e-14;
        for (std::size_t k = 1; k <= cfg.stop.maxIters; ++k) {
            std::size_t best = M.rows();
            double bestVal = -1.0;
            for (std::size_t i = 0; i < M.rows(); ++i) {
                r[i] = rhs[i] - dot(M.row(i), x);
                if (norms[i] <= 0.0) continue;
                const double v = r[i] * r[i] / norms[i];
                if (v > bestVal) {
                    bestVal = v;
                    best = i;
                }
            }
            // bestVal is the squared step length of the pending projection.
            if (sk && std::sqrt(bestVal) <=
                          stallEps * (1.0 + std::sqrt(norm_sq(std::span<const double>(x))))) {
                status = SolveStatus::SketchInsufficient;
                break;
            }
            auto row = M.row(best);
            const double beta = r[best] / norms[best];
            for (std::size_t j = 0; j < x.size(); ++j) x[j] += beta * row[j];
            trace.iterations = k;
            if (trace.selectedRows) trace.selectedRows->push_back(best);

            cur = res(x);
            recorder.record(k, cur);
            if (cur < tol) {
                status = SolveStatus::Converged;
                break;
            }
            if (cur > kDivergenceRes) {
                status = SolveStatus::Diverged;
                break;
            }
        }
    } else {
        // Averaged block projections.
        RandomStream sampler(mix_seed(cfg.block.seed, hash_tag("block-draw")));
        std::vector<std::size_t> pool(active);
        std::vector<std::vector<std::size_t>> cells;
        if (cfg.block.mode == BlockSampleMode::Partition) {
            cells = make_partition(active, cfg.block.tau, cfg.block.seed);
        }
        const double etaFactor = 2.0 - cfg.stepsize.eta;
        double alphaConst = 0.0;
        if (!cfg.adaptive()) {
            alphaConst = constant_alpha(cfg.stepsize);
        }

        std::vector<std::size_t> J;
        std::vector<double> weights;
        std::vector<double> wbar;
        RealVector g(A.cols());

        for (std::size_t k = 1; k <= cfg.stop.maxIters; ++k) {
            if (cfg.block.mode == BlockSampleMode::Partition) {
                J = cells[sampler.uniform_below(cells.size())];
            } else {
                const std::size_t tau = cfg.block.tau;
                for (std::size_t t = 0; t < tau; ++t) {
                    const std::size_t j =
                        t + sampler.uniform_below(pool.size() - t);
                    std::swap(pool[t], pool[j]);
                }
                J.assign(pool.begin(), pool.begin() + static_cast<long>(tau));
            }
            const std::size_t tau = J.size();
            weights.assign(tau, 1.0 / static_cast<double>(tau));

            std::fill(g.begin(), g.end(), 0.0);
            wbar.resize(tau);
            double numerator = 0.0;
            bool anyNonzero = false;
            for (std::size_t t = 0; t < tau; ++t) {
                const std::size_t i = J[t];
                auto row = M.row(i);
                const double ri = dot(row, x) - rhs[i];
                wbar[t] = weights[t] / norms[i];
                numerator += wbar[t] * ri * ri;
                if (ri != 0.0) anyNonzero = true;
                const double c = wbar[t] * ri;
                for (std::size_t j = 0; j < g.size(); ++j) g[j] += c * row[j];
            }

            double alpha = alphaConst;
            if (cfg.adaptive()) {
                double lk;
                if (anyNonzero) {
                    const double denom = norm_sq(std::span<const double>(g));
                    if (denom > 0.0) {
                        lk = numerator / denom;
                    } else {
                        ++trace.adaptiveFallbacks;
                        lk = 1.0 / block_lambda_max(M, J, wbar);
                    }
                } else {
                    lk = 1.0 / block_lambda_max(M, J, wbar);
                }
                alpha = etaFactor * lk;
            }

            for (std::size_t j = 0; j < x.size(); ++j) x[j] -= alpha * g[j];
            trace.iterations = k;

            cur = res(x);
            recorder.record(k, cur);
            if (cur < tol) {
                status = SolveStatus::Converged;
                break;
            }
            if (cur > kDivergenceRes) {
                status = SolveStatus::Diverged;
                break;
            }
            if (sk && k % kStallCheckStride == 0 &&
                sketched_system_exhausted(M, rhs, x)) {
                status = SolveStatus::SketchInsufficient;
                break;
            }
        }
    }

    if (status == SolveStatus::MaxIters && cur < tol) {
        status = SolveStatus::Converged;  // met tolerance on the last permitted step
    }
    trace.finalRes = cur;
    recorder.record(trace.iterations, cur, /*force=*/true);
    trace.finalX = std::move(x);
    trace.status = status;
    trace.wallSeconds = seconds_since(t0);
    return trace;
}

}  // namespace kaczsketch
