#include "gaitreid/gbdt/histogram.hpp"

#include "gaitreid/error.hpp"

#include <map>

namespace gaitreid::gbdt {

BinStats FeatureHistogram::total() const {
    BinStats t;
    for (const auto& b : bins) t += b;
    return t;
}

BinnedDataset BinnedDataset::build(const FeatureMatrix& features, int max_bins, bool efb, double max_conflict) {
    return build(features, build_bins(features, max_bins), efb, max_conflict);
}

BinnedDataset BinnedDataset::build(const FeatureMatrix& features, std::vector<BinMapper> mappers, bool efb,
                                   double max_conflict) {
    if (mappers.size() != features.cols()) throw ContractViolation("bin mapper count differs from column count");
    BinnedDataset d;
    d.num_rows = features.rows();
    d.mappers = std::move(mappers);
    d.feature_bins.assign(features.cols(), std::vector<std::uint8_t>(features.rows()));
    for (std::size_t f = 0; f < features.cols(); ++f)
        for (std::size_t r = 0; r < features.rows(); ++r)
            d.feature_bins[f][r] = static_cast<std::uint8_t>(d.mappers[f].bin(features(r, f)));
    d.plan = efb ? efb_bundle(d.feature_bins, d.mappers, max_conflict) : singleton_plan(d.mappers);
    d.bundle_bins = encode_bundles(d.plan, d.feature_bins);
    return d;
}

BinStats node_totals(std::span<const std::uint32_t> rows, const RowStats& stats) {
    BinStats t;
    for (auto r : rows) {
        t.grad += stats.grad[r];
        t.hess += stats.hess[r];
        t.weight += stats.weight[r];
        ++t.count;
    }
    return t;
}

std::vector<BinStats> build_bundle_histogram(std::span<const std::uint32_t> rows,
                                             std::span<const std::uint16_t> bundle_column, int num_bins,
                                             const RowStats& stats) {
    std::vector<BinStats> bins(static_cast<std::size_t>(num_bins));
    for (auto r : rows) {
        auto& b = bins[bundle_column[r]];
        b.grad += stats.grad[r];
        b.hess += stats.hess[r];
        b.weight += stats.weight[r];
        ++b.count;
    }
    return bins;
}

std::vector<FeatureHistogram> build_histograms(const BinnedDataset& data, std::span<const std::uint32_t> rows,
                                               const RowStats& stats, std::span<const int> features,
                                               const BinStats& totals) {
    const auto& plan = data.plan;
    std::map<int, std::vector<BinStats>> bundle_hist;
    for (int f : features) {
        const int g = plan.bundle_of[static_cast<std::size_t>(f)];
        if (!bundle_hist.count(g))
            bundle_hist.emplace(g, build_bundle_histogram(rows, data.bundle_bins[static_cast<std::size_t>(g)],
                                                          plan.bundles[static_cast<std::size_t>(g)].num_bins, stats));
    }

    std::vector<FeatureHistogram> out;
    out.reserve(features.size());
    for (int f : features) {
        const auto fu = static_cast<std::size_t>(f);
        const int g = plan.bundle_of[fu];
        const auto& src = bundle_hist.at(g);
        const int nb = plan.feature_bins[fu];
        const int def = plan.default_bin[fu];
        FeatureHistogram h;
        h.bins.resize(static_cast<std::size_t>(nb));
        for (int b = 0; b < nb; ++b)
            if (b != def) h.bins[static_cast<std::size_t>(b)] = src[static_cast<std::size_t>(plan.bundle_bin(f, b))];
        BinStats rest = totals;
        for (int b = 0; b < nb; ++b)
            if (b != def) rest -= h.bins[static_cast<std::size_t>(b)];
        if (rest.count == 0) rest = BinStats{};
        h.bins[static_cast<std::size_t>(def)] = rest;
        out.push_back(std::move(h));
    }
    return out;
}

FeatureHistogram subtract(const FeatureHistogram& parent, const FeatureHistogram& child) {
    if (parent.bins.size() != child.bins.size()) throw ContractViolation("histogram shapes differ");
    FeatureHistogram out = parent;
    for (std::size_t b = 0; b < out.bins.size(); ++b) out.bins[b] -= child.bins[b];
    return out;
}

}  // namespace gaitreid::gbdt
