#pragma once

#include "gaitreid/gbdt/binning.hpp"
#include "gaitreid/gbdt/bundling.hpp"
#include "gaitreid/gbdt/matrix.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gaitreid::gbdt {

/// Aggregates of the rows falling into one bin (or one node).
/// `grad`/`hess` are sampling-weighted sums, `weight` the sum of sampling weights.
struct BinStats {
    double grad = 0.0;
    double hess = 0.0;
    double weight = 0.0;
    std::uint32_t count = 0;

    BinStats& operator+=(const BinStats& o) {
        grad += o.grad;
        hess += o.hess;
        weight += o.weight;
        count += o.count;
        return *this;
    }
    BinStats& operator-=(const BinStats& o) {
        grad -= o.grad;
        hess -= o.hess;
        weight -= o.weight;
        count -= o.count;
        return *this;
    }
    friend BinStats operator-(BinStats a, const BinStats& b) { return a -= b; }
    friend bool operator==(const BinStats&, const BinStats&) = default;
};

struct FeatureHistogram {
    std::vector<BinStats> bins;

    BinStats total() const;
};

/// Training matrix discretized once: per-feature bins for routing and bundled columns for
/// histogram construction.
struct BinnedDataset {
    std::size_t num_rows = 0;
    std::vector<BinMapper> mappers;
    std::vector<std::vector<std::uint8_t>> feature_bins;  // [feature][row]
    BundlePlan plan;
    std::vector<std::vector<std::uint16_t>> bundle_bins;  // [bundle][row]

    std::size_t num_features() const { return mappers.size(); }

    static BinnedDataset build(const FeatureMatrix& features, int max_bins, bool efb, double max_conflict);
    /// Reuses existing bin boundaries (e.g. from a model).
    static BinnedDataset build(const FeatureMatrix& features, std::vector<BinMapper> mappers, bool efb,
                               double max_conflict);
};

/// Per-row gradient statistics already multiplied by the sampling weight, indexed by row id.
struct RowStats {
    std::span<const double> grad;
    std::span<const double> hess;
    std::span<const double> weight;
};

/// Node totals summed in ascending row order.
BinStats node_totals(std::span<const std::uint32_t> rows, const RowStats& stats);

/// Histogram of one bundle column over `rows`, accumulated in the order given.
std::vector<BinStats> build_bundle_histogram(std::span<const std::uint32_t> rows,
                                             std::span<const std::uint16_t> bundle_column, int num_bins,
                                             const RowStats& stats);

/// Histograms of `features` (one per entry, same order) for the node holding `rows`.
///
/// Each feature's default bin is reconstructed as node total minus its other bins, so a
/// feature's histogram is bit-identical whether or not it shares a bundle.
std::vector<FeatureHistogram> build_histograms(const BinnedDataset& data, std::span<const std::uint32_t> rows,
                                               const RowStats& stats, std::span<const int> features,
                                               const BinStats& totals);

/// Sibling histogram by subtraction: parent - child, bin-wise.
FeatureHistogram subtract(const FeatureHistogram& parent, const FeatureHistogram& child);

}  // namespace gaitreid::gbdt
