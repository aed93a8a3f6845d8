#include "kaczsketch/rng.hpp"

#include <stdexcept>
#include <unordered_map>

namespace kaczsketch {

std::vector<std::size_t> sample_without_replacement(std::size_t m, std::size_t d,
                                                    RandomStream& rs) {
    if (d > m) {
        throw std::invalid_argument("sample_without_replacement: d exceeds m");
    }
    // Virtual Fisher-Yates over [0, m); only touched slots are materialized.
    std::unordered_map<std::size_t, std::size_t> moved;
    moved.reserve(2 * d);
    std::vector<std::size_t> out(d);
    for (std::size_t i = 0; i < d; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rs.uniform_below(m - i));
        auto it = moved.find(j);
        const std::size_t vj = (it == moved.end()) ? j : it->second;
        auto ii = moved.find(i);
        const std::size_t vi = (ii == moved.end()) ? i : ii->second;
        out[i] = vj;
        moved[j] = vi;
    }
    return out;
}

}  // namespace kaczsketch
