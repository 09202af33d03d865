#pragma once

#include "gaitreid/gbdt/histogram.hpp"

#include <optional>
#include <span>
#include <vector>

namespace gaitreid::gbdt {

struct SplitCandidate {
    int feature = -1;
    int threshold_bin = -1;  // rows with bin <= threshold_bin go left
    double gain = 0.0;
    BinStats left;
    BinStats right;
};

struct SplitContext {
    /// Weighted row count of the whole working set; the 1/n factor of the variance gain.
    double total_weight = 1.0;
    int min_child_samples = 1;
    /// Gains closer than this count as equal; gains not above it count as zero.
    double tolerance = 0.0;
};

/// Variance gain of one partition:
/// [ G_l^2 / W_l + G_r^2 / W_r - G^2 / W ] / n, with G the weighted gradient sums and W the
/// weighted counts.
double variance_gain(const BinStats& left, const BinStats& right, const BinStats& parent, double total_weight);

/// Tolerance for one tree: a relative 1e-10 of sum(w g^2) / n over the working set. Every
/// split term is bounded by that sum (Cauchy-Schwarz), so the band sits far above rounding
/// noise and far below real gain differences.
double gain_tolerance(double weighted_square_sum, double total_weight);

/// Best split over every (feature, bin threshold) pair, scanning features in the given order
/// and thresholds ascending. A later candidate replaces the incumbent only when its gain is
/// larger by more than the tolerance, so ties go to the lower feature, then lower threshold.
/// `histograms[i]` belongs to `features[i]`.
std::optional<SplitCandidate> find_best_split(const std::vector<FeatureHistogram>& histograms,
                                              std::span<const int> features, const BinStats& node,
                                              const SplitContext& ctx);

}  // namespace gaitreid::gbdt
