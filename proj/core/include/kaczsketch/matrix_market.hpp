#pragma once

#include "kaczsketch/dense.hpp"

#include <string>

namespace kaczsketch {

/// Loads a MatrixMarket file as a dense matrix. Supports `array real` and
/// `coordinate real` (general and symmetric) headers; coordinate entries are
/// densified. Integer fields are read as reals. Throws on pattern/complex
/// files or malformed input.
DenseMatrix load_matrix_market(const std::string& path);

/// Loads an m-by-1 (or 1-by-m) MatrixMarket file as a vector.
RealVector load_matrix_market_vector(const std::string& path);

/// Writes a dense matrix in `array real general` format with full precision.
void save_matrix_market(const DenseMatrix& A, const std::string& path);
void save_matrix_market(const RealVector& v, const std::string& path);

}  // namespace kaczsketch
