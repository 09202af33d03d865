#pragma once

#include <cstdint>
#include <algorithm>
#include <initializer_list>
#include <limits>
#include <random>
#include <vector>

namespace gaitreid::gbdt {

/// Independent generator for one purpose (bagging, GOSS, column draw, ...) at one
/// (iteration, class) position. Streams never depend on how work is scheduled.
inline std::mt19937_64 derived_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::vector<std::uint32_t> words;
    words.push_back(static_cast<std::uint32_t>(seed));
    words.push_back(static_cast<std::uint32_t>(seed >> 32));
    for (auto p : path) {
        words.push_back(static_cast<std::uint32_t>(p));
        words.push_back(static_cast<std::uint32_t>(p >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

/// Unbiased integer in [0, bound) by rejection; portable unlike std::uniform_int_distribution.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % bound;
}

/// `count` distinct values from [0, n), sorted ascending (partial Fisher-Yates).
inline std::vector<std::uint32_t> sample_without_replacement(std::mt19937_64& rng, std::uint32_t n,
                                                             std::uint32_t count) {
    std::vector<std::uint32_t> pool(n);
    for (std::uint32_t i = 0; i < n; ++i) pool[i] = i;
    if (count > n) count = n;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::uint32_t>(uniform_below(rng, n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

// Stream tags.
inline constexpr std::uint64_t kStreamBagging = 1;
inline constexpr std::uint64_t kStreamGoss = 2;
inline constexpr std::uint64_t kStreamColumns = 3;

}  // namespace gaitreid::gbdt
