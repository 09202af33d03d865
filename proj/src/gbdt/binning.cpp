#include "gaitreid/gbdt/binning.hpp"

#include "gaitreid/error.hpp"

#include <algorithm>
#include <cmath>

namespace gaitreid::gbdt {

int BinMapper::bin(double value) const {
    return static_cast<int>(std::lower_bound(upper_bounds.begin(), upper_bounds.end(), value) - upper_bounds.begin());
}

BinMapper build_bin_mapper(std::span<const double> values, int max_bins) {
    if (values.empty()) throw ContractViolation("cannot bin an empty column");
    if (max_bins < 2) throw ContractViolation("max_bins must be >= 2");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct = sorted;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    BinMapper m;
    if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
        m.upper_bounds.assign(distinct.begin(), distinct.end() - 1);
    } else {
        const std::size_t n = sorted.size();
        const auto bins = static_cast<std::size_t>(max_bins);
        for (std::size_t k = 1; k < bins; ++k) {
            const std::size_t idx = (k * n + bins - 1) / bins - 1;  // ceil(k n / B) - 1
            const double b = sorted[idx];
            if (b == distinct.back()) break;
            if (m.upper_bounds.empty() || b > m.upper_bounds.back()) m.upper_bounds.push_back(b);
        }
    }

    m.thresholds.reserve(m.upper_bounds.size());
    for (double b : m.upper_bounds) {
        const double next = *std::upper_bound(distinct.begin(), distinct.end(), b);
        double mid = b + (next - b) / 2.0;
        if (!(mid >= b && mid < next)) mid = b;  // adjacent doubles
        m.thresholds.push_back(mid);
    }
    return m;
}

std::vector<BinMapper> build_bins(const FeatureMatrix& features, int max_bins) {
    if (features.rows() == 0) throw ContractViolation("cannot bin a matrix with no rows");
    std::vector<BinMapper> out;
    out.reserve(features.cols());
    for (std::size_t c = 0; c < features.cols(); ++c) out.push_back(build_bin_mapper(features.column(c), max_bins));
    return out;
}

}  // namespace gaitreid::gbdt
