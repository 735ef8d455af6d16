#include "frc/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace frc {

std::vector<std::uint32_t> sample_without_replacement(std::mt19937_64& rng, std::uint32_t n,
                                                      std::uint32_t k) {
    if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
    std::vector<std::uint32_t> pool(n);
    for (std::uint32_t i = 0; i < n; ++i) pool[i] = i;
    for (std::uint32_t i = 0; i < k; ++i) {
        std::uint32_t j = i + static_cast<std::uint32_t>(uniform01(rng) * static_cast<double>(n - i));
        if (j >= n) j = n - 1;
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace frc
