#include "gaitreid/gbdt/goss.hpp"

#include "gaitreid/error.hpp"
#include "gaitreid/gbdt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gaitreid::gbdt {

namespace {

std::size_t ceil_count(double rate, std::size_t n) {
    // Guard against products like 0.2 * 10 landing a hair above an integer.
    const double x = rate * static_cast<double>(n);
    return std::min(n, static_cast<std::size_t>(std::ceil(x - 1e-9 * std::max(1.0, x))));
}

}  // namespace

GossSample goss_sample(std::span<const double> magnitudes, double top_rate, double other_rate,
                       std::mt19937_64& rng) {
    const std::size_t n = magnitudes.size();
    if (n == 0) throw EmptyInputError("GOSS needs at least one row");
    if (!(top_rate > 0.0 && top_rate <= 1.0) || other_rate < 0.0 || top_rate + other_rate > 1.0 + 1e-12)
        throw ContractViolation("GOSS rates out of range");

    GossSample s;
    const std::size_t top = ceil_count(top_rate, n);
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                          const double ma = std::abs(magnitudes[a]);
                          const double mb = std::abs(magnitudes[b]);
                          return ma != mb ? ma > mb : a < b;
                      });
    s.top_count = top;

    std::vector<std::uint32_t> rest(order.begin() + static_cast<std::ptrdiff_t>(top), order.end());
    std::sort(rest.begin(), rest.end());
    const std::size_t other = std::min(rest.size(), ceil_count(other_rate, n));
    s.other_count = other;

    std::vector<std::pair<std::uint32_t, double>> picked;
    picked.reserve(top + other);
    for (std::size_t i = 0; i < top; ++i) picked.emplace_back(order[i], 1.0);
    if (other > 0) {
        const double w = (1.0 - top_rate) / other_rate;
        for (auto k : sample_without_replacement(rng, static_cast<std::uint32_t>(rest.size()),
                                                 static_cast<std::uint32_t>(other)))
            picked.emplace_back(rest[k], w);
    }
    std::sort(picked.begin(), picked.end());
    for (const auto& [r, w] : picked) {
        s.rows.push_back(r);
        s.weights.push_back(w);
    }
    return s;
}

}  // namespace gaitreid::gbdt
