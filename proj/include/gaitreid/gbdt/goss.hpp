#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace gaitreid::gbdt {

struct GossSample {
    std::vector<std::uint32_t> rows;  // ascending row ids
    std::vector<double> weights;      // aligned with rows
    std::size_t top_count = 0;        // |A|
    std::size_t other_count = 0;      // |B|
};

/// Gradient-based one-side sampling.
///
/// A = the ceil(top_rate * n) rows of largest magnitude (ties to the lower row id), weight 1.
/// B = ceil(other_rate * n) rows drawn uniformly without replacement from the rest, each
/// weighted (1 - top_rate) / other_rate so the small-gradient sums stay unbiased.
GossSample goss_sample(std::span<const double> magnitudes, double top_rate, double other_rate,
                       std::mt19937_64& rng);

}  // namespace gaitreid::gbdt
