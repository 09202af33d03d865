#pragma once

#include <cstdint>

namespace gaitreid::gbdt {

/// Newton leaf step denominator regularizer: leaf = -G / (H + kLeafLambda).
inline constexpr double kLeafLambda = 1e-3;

struct TrainParams {
    int num_leaves = 87;
    double learning_rate = 0.0883;
    double colsample_bytree = 0.8652;
    double subsample = 0.8389;
    int subsample_freq = 10;
    int min_child_samples = 18;
    int num_iterations = 100;
    int max_bins = 255;
    bool goss_enabled = false;
    double goss_top_rate = 0.2;    // p
    double goss_other_rate = 0.1;  // q
    bool efb_enabled = true;
    double efb_max_conflict = 0.0;
    std::uint64_t seed = 42;
    bool deterministic = true;
    /// Worker threads for per-class tree growth and batch prediction. Never changes results.
    int num_threads = 1;

    /// Throws ConfigError on out-of-range values.
    void validate() const;

    /// Same training behaviour with inactive knobs reset, so that equivalent settings
    /// (e.g. GOSS with p = 1 and sampling disabled) produce identical model files.
    TrainParams effective() const;

    bool bagging_active() const { return !goss_enabled && subsample < 1.0 && subsample_freq > 0; }

    /// No row or column sampling of any kind.
    static TrainParams without_sampling();

    friend bool operator==(const TrainParams&, const TrainParams&) = default;
};

}  // namespace gaitreid::gbdt
