#include "kaczsketch/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kaczsketch {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

struct MmHeader {
    bool coordinate = false;
    bool symmetric = false;
    bool skewSymmetric = false;
};

MmHeader parse_banner(const std::string& line, const std::string& path) {
    std::istringstream iss(line);
    std::string banner, object, format, field, symmetry;
    iss >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix") {
        throw std::runtime_error("not a MatrixMarket matrix file: " + path);
    }
    MmHeader h;
    const std::string fmt = lower(format);
    if (fmt == "coordinate") {
        h.coordinate = true;
    } else if (fmt != "array") {
        throw std::runtime_error("unsupported MatrixMarket format in " + path);
    }
    const std::string fld = lower(field);
    if (fld != "real" && fld != "integer" && fld != "double") {
        throw std::runtime_error("unsupported MatrixMarket field '" + field + "' in " + path);
    }
    const std::string sym = lower(symmetry);
    if (sym == "symmetric") {
        h.symmetric = true;
    } else if (sym == "skew-symmetric") {
        h.skewSymmetric = true;
    } else if (sym != "general") {
        throw std::runtime_error("unsupported MatrixMarket symmetry '" + symmetry + "' in " + path);
    }
    return h;
}

}  // namespace

DenseMatrix load_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
    const MmHeader h = parse_banner(line, path);

    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream sizes(line);
    std::size_t rows = 0, cols = 0, nnz = 0;
    if (h.coordinate) {
        if (!(sizes >> rows >> cols >> nnz)) {
            throw std::runtime_error("bad coordinate size line in " + path);
        }
    } else {
        if (!(sizes >> rows >> cols)) {
            throw std::runtime_error("bad array size line in " + path);
        }
    }
    if (rows == 0 || cols == 0) throw std::runtime_error("degenerate dimensions in " + path);

    DenseMatrix A(rows, cols);
    if (h.coordinate) {
        for (std::size_t k = 0; k < nnz; ++k) {
            std::size_t i, j;
            double v;
            if (!(in >> i >> j >> v)) {
                throw std::runtime_error("truncated coordinate data in " + path);
            }
            if (i < 1 || i > rows || j < 1 || j > cols) {
                throw std::runtime_error("coordinate index out of range in " + path);
            }
            A(i - 1, j - 1) = v;
            if ((h.symmetric || h.skewSymmetric) && i != j) {
                A(j - 1, i - 1) = h.skewSymmetric ? -v : v;
            }
        }
    } else {
        // Array format is column-major.
        for (std::size_t j = 0; j < cols; ++j) {
            for (std::size_t i = 0; i < rows; ++i) {
                double v;
                if (!(in >> v)) throw std::runtime_error("truncated array data in " + path);
                A(i, j) = v;
            }
        }
    }
    A.validate();
    return A;
}

RealVector load_matrix_market_vector(const std::string& path) {
    DenseMatrix A = load_matrix_market(path);
    if (A.cols() != 1 && A.rows() != 1) {
        throw std::runtime_error("expected a vector-shaped matrix in " + path);
    }
    return A.entries();
}

void save_matrix_market(const DenseMatrix& A, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "%%MatrixMarket matrix array real general\n";
    out << A.rows() << " " << A.cols() << "\n";
    out.precision(17);
    for (std::size_t j = 0; j < A.cols(); ++j) {
        for (std::size_t i = 0; i < A.rows(); ++i) {
            out << A(i, j) << "\n";
        }
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

void save_matrix_market(const RealVector& v, const std::string& path) {
    if (v.empty()) throw std::invalid_argument("save_matrix_market: empty vector");
    DenseMatrix A(v.size(), 1, std::vector<double>(v));
    save_matrix_market(A, path);
}

}  // namespace kaczsketch
