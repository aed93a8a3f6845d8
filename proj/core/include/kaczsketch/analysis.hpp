#pragma once

#include "kaczsketch/dense.hpp"
#include "kaczsketch/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kaczsketch {

/// Spectral quantities feeding the convergence-rate calculators. Desk-scale
/// only: a full SVD and per-block eigen solves are performed.
struct SpectralSummary {
    double sigmaR = 0.0;          // smallest nonzero singular value
    double frobSq = 0.0;          // squared Frobenius norm
    double maxRowSumSq = 0.0;     // max over j of sum_{i != j} ||row_i||^2
    double lambdaMinNz = 0.0;     // sigmaR^2
    double lambdaMaxBlock = 0.0;  // max over blocks of lambda_max(A_J^T D A_J)
    bool lambdaMaxBlockExact = false;  // exact in partition mode, else MC lower estimate
    std::size_t blockDraws = 0;        // blocks scanned (partition cells or MC draws)
    std::size_t rows = 0;
    std::size_t cols = 0;
};

/// blockMode Partition: lambdaMaxBlock is the exact max over the seeded
/// partition's cells (the same partition make_partition yields for the
/// solver). Fresh mode: a Monte-Carlo max over mcDraws tau-subsets, flagged
/// as an estimate.
SpectralSummary spectral_summary(const DenseMatrix& A, BlockSampleMode blockMode,
                                 std::size_t tau, std::uint64_t samplerSeed,
                                 std::size_t mcDraws = 1000);

/// A contraction-factor report. Factors are per squared-error step (or per
/// expected step); `envelope_at` folds them into the k-step error envelope.
struct BoundReport {
    std::string method;
    double firstStepFactor = 1.0;  // used for k = 1 when it differs
    double perStepFactor = 1.0;    // used for every subsequent step
    double epsilon = 0.0;          // 0 when the bound does not involve a sketch
    bool hypothesesOk = true;
    std::vector<std::string> flags;

    double envelope_at(std::size_t k, double initialErrSq) const;
    std::string to_json() const;
};

/// Factors 1 - sigmaR^2/frobSq (first step) and 1 - sigmaR^2/maxRowSumSq
/// (subsequent steps) for the deterministic row-selection method.
BoundReport mwrk_bound(const SpectralSummary& s);

/// Sketched variant: the first-step factor attenuates by (1-eps)^2/(1+eps)^2
/// against the ORIGINAL Frobenius norm; subsequent steps use (1-eps)^2 with
/// the SKETCHED row sums. The asymmetry is intentional.
BoundReport rs_mwrk_bound(const SpectralSummary& original,
                          const SpectralSummary& sketched, double epsilon);

/// Expected contraction 1 - (tau/lambdaMaxBlock) * (lambdaMinNz/rowsCount)
/// per step for averaged block projections.
BoundReport rabk_bound(const SpectralSummary& s, std::size_t tau,
                       std::size_t rowsCount);

/// Row-sampled variant with the (1-eps)^2/(1+eps)^2 attenuation and the
/// sketched row count d in the denominator; spectral quantities come from
/// the original matrix.
BoundReport ls_rabk_bound(const SpectralSummary& original, std::size_t tau,
                          std::size_t d, double epsilon);

/// Pointwise deviation bound between the plain and sketched row-selection
/// iterates: (4 - (4 - 6 eps + 3 eps^2) * sigmaR^2 / t) * pPrev with
/// t = max(maxRowSumSq(A), maxRowSumSq(Atil)).
double mwrk_deviation_bound(const SpectralSummary& original,
                            const SpectralSummary& sketched, double epsilon,
                            double pPrev);

/// k-step deviation envelope between plain and row-sampled block averaging:
/// ((1 - rate)^k + 3 (1 - attenuated rate)^k) * initialErrSq, both rates
/// with denominator m.
double rabk_deviation_bound(const SpectralSummary& original, std::size_t tau,
                            std::size_t m, double epsilon, double initialErrSq,
                            std::size_t k);

/// Subspace comparison between the row spaces of A and Atil.
struct RangeCheck {
    double sinLargestAngle = 0.0;  // 1.0 when the ranks differ
    double sinContainment = 0.0;   // distance of R(Atil^T) from R(A^T); ~0 always
    std::size_t rankA = 0;
    std::size_t rankSketch = 0;
    bool rangesEqual = false;
};

RangeCheck range_preservation_check(const DenseMatrix& A, const DenseMatrix& Atil);

/// The asymptotic sketch-size expression n^2 / (delta * eps^2), scaled by a
/// caller-supplied constant (no constant is canonical).
double theoretical_sketch_rows(std::size_t n, double epsilon, double delta,
                               double constant = 1.0);

}  // namespace kaczsketch
