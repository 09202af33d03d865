#pragma once

#include "gaitreid/gbdt/matrix.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gaitreid::gbdt {

/// Quantile bins of one feature. Bin k holds values in (upper_bounds[k-1], upper_bounds[k]];
/// the last bin holds everything above the final bound.
struct BinMapper {
    /// Distinct training values acting as inclusive bin upper bounds.
    std::vector<double> upper_bounds;
    /// Real split value between bin k and k+1: midpoint of upper_bounds[k] and the next larger
    /// training value. Same training partition as the bin boundary.
    std::vector<double> thresholds;

    int num_bins() const { return static_cast<int>(upper_bounds.size()) + 1; }
    int bin(double value) const;
    /// Bin that 0.0 falls in; "non-zero" rows for bundling are those outside it.
    int default_bin() const { return bin(0.0); }

    friend bool operator==(const BinMapper&, const BinMapper&) = default;
};

BinMapper build_bin_mapper(std::span<const double> values, int max_bins);
std::vector<BinMapper> build_bins(const FeatureMatrix& features, int max_bins);

}  // namespace gaitreid::gbdt
