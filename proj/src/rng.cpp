#include "ideabench/rng.hpp"

#include <numeric>
#include <stdexcept>

namespace ideabench {

std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k) {
    if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::vector<std::size_t> out;
    out.reserve(k);
    // Partial Fisher-Yates over an explicit pool.
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}

std::vector<std::size_t> sample_with_replacement(Rng& rng, std::size_t n, std::size_t k) {
    if (n == 0) throw std::invalid_argument("sample_with_replacement: empty population");
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(static_cast<std::size_t>(rng.below(n)));
    return out;
}

}  // namespace ideabench
