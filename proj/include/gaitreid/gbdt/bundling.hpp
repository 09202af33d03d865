#pragma once

#include "gaitreid/gbdt/binning.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gaitreid::gbdt {

/// Assignment of features to exclusive bundles.
///
/// A singleton bundle stores its feature's bins unchanged. In a multi-feature bundle, bundle
/// bin 0 means "every member at its default bin" and member m owns the range
/// [offset_m, offset_m + num_bins_m - 1) for its non-default bins, in bin order.
struct BundlePlan {
    struct Bundle {
        std::vector<int> features;
        std::vector<int> offsets;
        int num_bins = 0;
    };

    /// Original (feature, bin) behind a bundle bin. feature = -1 marks the shared all-default bin.
    struct Origin {
        int feature = -1;
        int bin = -1;
        friend bool operator==(const Origin&, const Origin&) = default;
    };

    std::vector<Bundle> bundles;
    std::vector<int> bundle_of;  // feature -> bundle
    std::vector<int> slot_of;    // feature -> member position in its bundle
    std::vector<int> default_bin;
    std::vector<int> feature_bins;  // bins per feature

    std::size_t num_features() const { return bundle_of.size(); }
    bool singleton(int bundle) const { return bundles[static_cast<std::size_t>(bundle)].features.size() == 1; }

    int bundle_bin(int feature, int bin) const;
    Origin origin(int bundle, int bundle_bin) const;
};

/// Every feature in its own bundle; the no-op plan.
BundlePlan singleton_plan(const std::vector<BinMapper>& mappers);

/// Greedy graph colouring of the conflict graph. Two features conflict when both are off their
/// default bin in more than `max_conflict * rows` rows. Features are visited by descending
/// degree (ties by index) and join the lowest-numbered bundle holding none of their neighbours.
/// `feature_bins[f][row]` are the per-feature bins.
BundlePlan efb_bundle(const std::vector<std::vector<std::uint8_t>>& feature_bins,
                      const std::vector<BinMapper>& mappers, double max_conflict);

/// Bundle bin of every row. For rows where several members are non-default (possible only
/// with a positive conflict budget) the first member in bundle order wins.
std::vector<std::vector<std::uint16_t>> encode_bundles(const BundlePlan& plan,
                                                       const std::vector<std::vector<std::uint8_t>>& feature_bins);

}  // namespace gaitreid::gbdt
