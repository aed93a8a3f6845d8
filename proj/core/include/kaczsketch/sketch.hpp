#pragma once

#include "kaczsketch/dense.hpp"
#include "kaczsketch/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kaczsketch {

/// Count-sketch map G = C*Phi: every source row i in [m] is hashed to one
/// bucket h(i) in [d], and each OUTPUT row j carries a single random sign
/// (the diagonal of the d-by-d matrix C). Note the sign lives on the bucket,
/// not on the source row; the classic per-source-row variant is intentionally
/// not provided.
struct CountSketchG {
    std::size_t m = 0;
    std::size_t d = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> bucketOf;  // size m, values in [0, d)
    std::vector<double> signOf;           // size d, values in {+1, -1}
};

/// Row sampler Q: d distinct row indices drawn uniformly without replacement
/// from [0, m), order recorded. Applying Q copies the selected rows.
struct RowSampleQ {
    std::size_t m = 0;
    std::size_t d = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> selected;  // size d, distinct, in [0, m)
};

enum class SketchType { CountSketch, RowSample };

const char* to_string(SketchType t);
SketchType sketch_type_from_string(const std::string& s);

/// The reduced system (Atil, btil) = (S*A, S*b) plus provenance. Output rows
/// of a count sketch whose bucket received no source row are all zero; they
/// are flagged here and skipped by the solvers.
struct SketchedSystem {
    DenseMatrix Atil;
    RealVector btil;
    SketchType type;
    std::uint64_t seed = 0;
    std::vector<std::uint8_t> zeroRow;  // size d, 1 = row of Atil is all zero
    std::size_t zeroRowCount = 0;
};

/// Draws h(i) uniformly from [d] for each source row and one sign per bucket.
/// Fully determined by (m, d, seed). Requires 1 <= d < m.
CountSketchG build_count_sketch(std::size_t m, std::size_t d, std::uint64_t seed);

/// randperm-style draw of d distinct uniform indices. Requires 1 <= d < m.
RowSampleQ build_row_sample(std::size_t m, std::size_t d, std::uint64_t seed);

/// Forms (G*A, G*b) in a single pass over the rows of A; never materializes
/// G densely. Cost O(m*n), i.e. O(nnz(A)) for dense storage.
SketchedSystem apply_count_sketch(const CountSketchG& G, const DenseMatrix& A,
                                  const RealVector& b);

/// Copies the d selected rows of (A, b); touches only those rows.
SketchedSystem apply_row_sample(const RowSampleQ& Q, const DenseMatrix& A,
                                const RealVector& b);

/// Empirical embedding-distortion probe: min and max of ||Atil*x|| / ||A*x||
/// over random unit vectors x with ||A*x|| > 0. A necessary-condition check,
/// not a certificate.
struct DistortionRange {
    double lo = 0.0;
    double hi = 0.0;
};

DistortionRange embedding_distortion(const DenseMatrix& Atil, const DenseMatrix& A,
                                     std::size_t probes, std::uint64_t seed);

/// max(1 - lo, hi - 1, 0): the epsilon implied by an observed distortion
/// range, labeled "empirical" wherever it feeds a bound.
double empirical_epsilon(const DistortionRange& r);

/// Replay records: (type, m, d, seed) only; maps are regenerated from the
/// seed on load.
std::string sketch_record_json(SketchType type, std::size_t m, std::size_t d,
                               std::uint64_t seed);

struct SketchRecord {
    SketchType type;
    std::size_t m = 0;
    std::size_t d = 0;
    std::uint64_t seed = 0;
};

SketchRecord parse_sketch_record(const std::string& json);

}  // namespace kaczsketch
