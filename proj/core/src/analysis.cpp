#include "kaczsketch/analysis.hpp"

#include "kaczsketch/rng.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kaczsketch {

namespace {

using RowMajorMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajorMat> as_eigen(const DenseMatrix& A) {
    return {A.entries().data(), static_cast<Eigen::Index>(A.rows()),
            static_cast<Eigen::Index>(A.cols())};
}

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    }
}

double attenuation(double epsilon) {
    const double a = (1.0 - epsilon) / (1.0 + epsilon);
    return a * a;
}

double block_lambda_max_weighted(const DenseMatrix& A,
                                 const std::vector<std::size_t>& J,
                                 const RowNormCache& norms) {
    const std::size_t t = J.size();
    Eigen::MatrixXd B(t, t);
    for (std::size_t a = 0; a < t; ++a) {
        for (std::size_t c = a; c < t; ++c) {
            const double v = dot(A.row(J[a]), A.row(J[c])) /
                             std::sqrt(norms[J[a]] * norms[J[c]]);
            B(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = v;
            B(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(a)) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

void add_flag(BoundReport& r, const std::string& flag) {
    r.hypothesesOk = false;
    r.flags.push_back(flag);
}

void check_factor(BoundReport& r, double factor, const char* name) {
    if (!(factor >= 0.0 && factor < 1.0)) {
        add_flag(r, std::string(name) + " outside [0, 1)");
    }
}

}  // namespace

SpectralSummary spectral_summary(const DenseMatrix& A, BlockSampleMode blockMode,
                                 std::size_t tau, std::uint64_t samplerSeed,
                                 std::size_t mcDraws) {
    SpectralSummary s;
    s.rows = A.rows();
    s.cols = A.cols();
    s.frobSq = frobenius_norm_sq(A);
    if (s.frobSq <= 0.0) {
        throw std::invalid_argument("spectral_summary: zero matrix");
    }
    s.sigmaR = smallest_nonzero_singular_value(A);
    s.lambdaMinNz = s.sigmaR * s.sigmaR;

    const RowNormCache norms = row_norms_squared(A);
    double minRow = norms[0];
    for (std::size_t i = 1; i < norms.size(); ++i) minRow = std::min(minRow, norms[i]);
    s.maxRowSumSq = s.frobSq - minRow;

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < A.rows(); ++i) {
        if (norms[i] > 0.0) active.push_back(i);
    }
    if (tau < 1 || tau > active.size()) {
        throw std::invalid_argument("spectral_summary: need 1 <= tau <= nonzero rows");
    }

    if (blockMode == BlockSampleMode::Partition) {
        const auto cells = make_partition(active, tau, samplerSeed);
        double best = 0.0;
        for (const auto& J : cells) {
            best = std::max(best, block_lambda_max_weighted(A, J, norms));
        }
        s.lambdaMaxBlock = best;
        s.lambdaMaxBlockExact = true;
        s.blockDraws = cells.size();
    } else {
        if (mcDraws == 0) {
            throw std::invalid_argument("spectral_summary: mcDraws must be >= 1");
        }
        RandomStream rs(mix_seed(samplerSeed, hash_tag("lambda-max-mc")));
        std::vector<std::size_t> pool(active);
        double best = 0.0;
        std::vector<std::size_t> J(tau);
        for (std::size_t drawIdx = 0; drawIdx < mcDraws; ++drawIdx) {
            for (std::size_t t = 0; t < tau; ++t) {
                const std::size_t j = t + rs.uniform_below(pool.size() - t);
                std::swap(pool[t], pool[j]);
            }
            J.assign(pool.begin(), pool.begin() + static_cast<long>(tau));
            best = std::max(best, block_lambda_max_weighted(A, J, norms));
        }
        s.lambdaMaxBlock = best;
        s.lambdaMaxBlockExact = false;
        s.blockDraws = mcDraws;
    }
    return s;
}

double BoundReport::envelope_at(std::size_t k, double initialErrSq) const {
    if (k == 0) return initialErrSq;
    return initialErrSq * firstStepFactor *
           std::pow(perStepFactor, static_cast<double>(k - 1));
}

std::string BoundReport::to_json() const {
    nlohmann::json j;
    j["method"] = method;
    j["first_step_factor"] = firstStepFactor;
    j["per_step_factor"] = perStepFactor;
    j["epsilon"] = epsilon;
    j["hypotheses_ok"] = hypothesesOk;
    j["flags"] = flags;
    return j.dump();
}

BoundReport mwrk_bound(const SpectralSummary& s) {
    BoundReport r;
    r.method = "mwrk";
    r.firstStepFactor = 1.0 - s.lambdaMinNz / s.frobSq;
    r.perStepFactor = 1.0 - s.lambdaMinNz / s.maxRowSumSq;
    check_factor(r, r.firstStepFactor, "first-step factor");
    check_factor(r, r.perStepFactor, "per-step factor");
    return r;
}

BoundReport rs_mwrk_bound(const SpectralSummary& original,
                          const SpectralSummary& sketched, double epsilon) {
    require_epsilon(epsilon);
    BoundReport r;
    r.method = "rs-mwrk";
    r.epsilon = epsilon;
    const double att = attenuation(epsilon);
    r.firstStepFactor = 1.0 - att * original.lambdaMinNz / original.frobSq;
    const double shrink = (1.0 - epsilon) * (1.0 - epsilon);
    r.perStepFactor = 1.0 - shrink * original.lambdaMinNz / sketched.maxRowSumSq;
    check_factor(r, r.firstStepFactor, "first-step factor");
    check_factor(r, r.perStepFactor, "per-step factor");
    return r;
}

BoundReport rabk_bound(const SpectralSummary& s, std::size_t tau,
                       std::size_t rowsCount) {
    if (tau < 1) {
        throw std::invalid_argument("rabk_bound: tau must be >= 1");
    }
    BoundReport r;
    r.method = "rabk";
    const double rate = (static_cast<double>(tau) / s.lambdaMaxBlock) *
                        (s.lambdaMinNz / static_cast<double>(rowsCount));
    r.firstStepFactor = 1.0 - rate;
    r.perStepFactor = r.firstStepFactor;
    check_factor(r, r.perStepFactor, "expected contraction factor");
    return r;
}

BoundReport ls_rabk_bound(const SpectralSummary& original, std::size_t tau,
                          std::size_t d, double epsilon) {
    if (tau < 1) {
        throw std::invalid_argument("ls_rabk_bound: tau must be >= 1");
    }
    require_epsilon(epsilon);
    BoundReport r;
    r.method = "ls-rabk";
    r.epsilon = epsilon;
    const double rate = attenuation(epsilon) *
                        (static_cast<double>(tau) / original.lambdaMaxBlock) *
                        (original.lambdaMinNz / static_cast<double>(d));
    r.firstStepFactor = 1.0 - rate;
    r.perStepFactor = r.firstStepFactor;
    check_factor(r, r.perStepFactor, "expected contraction factor");
    return r;
}

double mwrk_deviation_bound(const SpectralSummary& original,
                            const SpectralSummary& sketched, double epsilon,
                            double pPrev) {
    require_epsilon(epsilon);
    if (pPrev < 0.0) {
        throw std::invalid_argument("mwrk_deviation_bound: pPrev must be >= 0");
    }
    const double t = std::max(original.maxRowSumSq, sketched.maxRowSumSq);
    const double poly = 4.0 - 6.0 * epsilon + 3.0 * epsilon * epsilon;
    return (4.0 - poly * original.lambdaMinNz / t) * pPrev;
}

double rabk_deviation_bound(const SpectralSummary& original, std::size_t tau,
                            std::size_t m, double epsilon, double initialErrSq,
                            std::size_t k) {
    require_epsilon(epsilon);
    if (tau < 1 || m < 1) {
        throw std::invalid_argument("rabk_deviation_bound: bad tau or m");
    }
    const double base = (static_cast<double>(tau) / original.lambdaMaxBlock) *
                        (original.lambdaMinNz / static_cast<double>(m));
    const double plain = 1.0 - base;
    const double attenuated = 1.0 - attenuation(epsilon) * base;
    const double kk = static_cast<double>(k);
    return (std::pow(plain, kk) + 3.0 * std::pow(attenuated, kk)) * initialErrSq;
}

RangeCheck range_preservation_check(const DenseMatrix& A, const DenseMatrix& Atil) {
    if (A.cols() != Atil.cols()) {
        throw std::invalid_argument("range_preservation_check: column counts differ");
    }
    auto rowSpaceBasis = [](const DenseMatrix& M) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(as_eigen(M), Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double tol = static_cast<double>(std::max(M.rows(), M.cols())) *
                           (sv.size() > 0 ? sv(0) : 0.0) * 1e-12;
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) > tol) ++rank;
        }
        return Eigen::MatrixXd(svd.matrixV().leftCols(rank));
    };

    const Eigen::MatrixXd Va = rowSpaceBasis(A);
    const Eigen::MatrixXd Vs = rowSpaceBasis(Atil);

    RangeCheck out;
    out.rankA = static_cast<std::size_t>(Va.cols());
    out.rankSketch = static_cast<std::size_t>(Vs.cols());

    if (out.rankSketch == 0) {
        out.sinContainment = 0.0;
    } else {
        // Component of the sketched basis outside R(A^T).
        const Eigen::MatrixXd C = Vs - Va * (Va.transpose() * Vs);
        Eigen::BDCSVD<Eigen::MatrixXd> svd(C);
        out.sinContainment = svd.singularValues().size() > 0
                                 ? svd.singularValues()(0)
                                 : 0.0;
    }

    if (out.rankA == out.rankSketch) {
        out.sinLargestAngle = out.sinContainment;
        out.rangesEqual = out.sinContainment <= 1e-8;
    } else {
        out.sinLargestAngle = 1.0;
        out.rangesEqual = false;
    }
    return out;
}

double theoretical_sketch_rows(std::size_t n, double epsilon, double delta,
                               double constant) {
    require_epsilon(epsilon);
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("theoretical_sketch_rows: delta must lie in (0, 1)");
    }
    if (constant <= 0.0) {
        throw std::invalid_argument("theoretical_sketch_rows: constant must be > 0");
    }
    const double nn = static_cast<double>(n);
    return constant * nn * nn / (delta * epsilon * epsilon);
}

}  // namespace kaczsketch
