#include "kaczsketch/sketch.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kaczsketch {

const char* to_string(SketchType t) {
    switch (t) {
        case SketchType::CountSketch: return "count-sketch";
        case SketchType::RowSample: return "row-sample";
    }
    return "unknown";
}

SketchType sketch_type_from_string(const std::string& s) {
    if (s == "count-sketch") return SketchType::CountSketch;
    if (s == "row-sample") return SketchType::RowSample;
    throw std::invalid_argument("unknown sketch type: " + s);
}

namespace {

void check_reduction(std::size_t m, std::size_t d) {
    if (d < 1 || d >= m) {
        throw std::invalid_argument("sketch requires 1 <= d < m");
    }
}

}  // namespace

CountSketchG build_count_sketch(std::size_t m, std::size_t d, std::uint64_t seed) {
    check_reduction(m, d);
    CountSketchG G;
    G.m = m;
    G.d = d;
    G.seed = seed;
    G.bucketOf.resize(m);
    G.signOf.resize(d);
    // Two independent sub-streams so the hash map and the bucket signs do not
    // interleave; the object is a pure function of (m, d, seed).
    RandomStream hashStream(mix_seed(seed, hash_tag("count-sketch-hash")));
    for (std::size_t i = 0; i < m; ++i) {
        G.bucketOf[i] = static_cast<std::uint32_t>(hashStream.uniform_below(d));
    }
    RandomStream signStream(mix_seed(seed, hash_tag("count-sketch-sign")));
    for (std::size_t j = 0; j < d; ++j) {
        G.signOf[j] = signStream.sign();
    }
    return G;
}

RowSampleQ build_row_sample(std::size_t m, std::size_t d, std::uint64_t seed) {
    check_reduction(m, d);
    RowSampleQ Q;
    Q.m = m;
    Q.d = d;
    Q.seed = seed;
    RandomStream rs(mix_seed(seed, hash_tag("row-sample")));
    Q.selected = sample_without_replacement(m, d, rs);
    return Q;
}

SketchedSystem apply_count_sketch(const CountSketchG& G, const DenseMatrix& A,
                                  const RealVector& b) {
    if (A.rows() != G.m || b.size() != G.m) {
        throw std::invalid_argument("apply_count_sketch: dimension mismatch");
    }
    const std::size_t n = A.cols();
    SketchedSystem out{DenseMatrix(G.d, n), RealVector(G.d, 0.0),
                       SketchType::CountSketch, G.seed,
                       std::vector<std::uint8_t>(G.d, 1), 0};
    std::vector<std::uint8_t> touched(G.d, 0);
    for (std::size_t i = 0; i < G.m; ++i) {
        const std::size_t j = G.bucketOf[i];
        const double s = G.signOf[j];
        auto src = A.row(i);
        auto dst = out.Atil.row(j);
        for (std::size_t c = 0; c < n; ++c) dst[c] += s * src[c];
        out.btil[j] += s * b[i];
        touched[j] = 1;
    }
    for (std::size_t j = 0; j < G.d; ++j) {
        out.zeroRow[j] = touched[j] ? 0 : 1;
        if (out.zeroRow[j]) ++out.zeroRowCount;
    }
    out.Atil.validate();
    ensure_finite(out.btil, "sketched rhs");
    return out;
}

SketchedSystem apply_row_sample(const RowSampleQ& Q, const DenseMatrix& A,
                                const RealVector& b) {
    if (A.rows() != Q.m || b.size() != Q.m) {
        throw std::invalid_argument("apply_row_sample: dimension mismatch");
    }
    const std::size_t n = A.cols();
    SketchedSystem out{DenseMatrix(Q.d, n), RealVector(Q.d, 0.0),
                       SketchType::RowSample, Q.seed,
                       std::vector<std::uint8_t>(Q.d, 0), 0};
    for (std::size_t i = 0; i < Q.d; ++i) {
        const std::size_t src = Q.selected[i];
        auto from = A.row(src);
        auto to = out.Atil.row(i);
        std::copy(from.begin(), from.end(), to.begin());
        out.btil[i] = b[src];
        bool allZero = true;
        for (double v : to) {
            if (v != 0.0) {
                allZero = false;
                break;
            }
        }
        if (allZero) {
            out.zeroRow[i] = 1;
            ++out.zeroRowCount;
        }
    }
    return out;
}

DistortionRange embedding_distortion(const DenseMatrix& Atil, const DenseMatrix& A,
                                     std::size_t probes, std::uint64_t seed) {
    if (Atil.cols() != A.cols()) {
        throw std::invalid_argument("embedding_distortion: column counts differ");
    }
    if (probes == 0) {
        throw std::invalid_argument("embedding_distortion: probes must be >= 1");
    }
    RandomStream rs(mix_seed(seed, hash_tag("distortion-probe")));
    const std::size_t n = A.cols();
    RealVector x(n), Ax, Atx;
    DistortionRange range{0.0, 0.0};
    bool any = false;
    for (std::size_t p = 0; p < probes; ++p) {
        double nsq = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            x[j] = rs.gaussian();
            nsq += x[j] * x[j];
        }
        if (nsq == 0.0) continue;
        const double inv = 1.0 / std::sqrt(nsq);
        for (double& v : x) v *= inv;
        matvec(A, x, Ax);
        const double denom = std::sqrt(norm_sq(Ax));
        if (denom == 0.0) continue;
        matvec(Atil, x, Atx);
        const double ratio = std::sqrt(norm_sq(Atx)) / denom;
        if (!any) {
            range.lo = range.hi = ratio;
            any = true;
        } else {
            range.lo = std::min(range.lo, ratio);
            range.hi = std::max(range.hi, ratio);
        }
    }
    if (!any) {
        throw std::runtime_error("embedding_distortion: every probe had ||Ax|| = 0");
    }
    return range;
}

double empirical_epsilon(const DistortionRange& r) {
    return std::max({1.0 - r.lo, r.hi - 1.0, 0.0});
}

std::string sketch_record_json(SketchType type, std::size_t m, std::size_t d,
                               std::uint64_t seed) {
    nlohmann::json j;
    j["type"] = to_string(type);
    j["m"] = m;
    j["d"] = d;
    j["seed"] = seed;
    return j.dump();
}

SketchRecord parse_sketch_record(const std::string& json) {
    const auto j = nlohmann::json::parse(json);
    SketchRecord rec;
    rec.type = sketch_type_from_string(j.at("type").get<std::string>());
    rec.m = j.at("m").get<std::size_t>();
    rec.d = j.at("d").get<std::size_t>();
    rec.seed = j.at("seed").get<std::uint64_t>();
    return rec;
}

}  // namespace kaczsketch
