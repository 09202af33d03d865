#pragma once

#include "gaitreid/calibration.hpp"
#include "gaitreid/features.hpp"
#include "gaitreid/gbdt/binning.hpp"
#include "gaitreid/gbdt/matrix.hpp"
#include "gaitreid/gbdt/params.hpp"
#include "gaitreid/gbdt/tree.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gaitreid::gbdt {

/// Multiclass softmax ensemble: one tree per class per iteration.
struct BoostedEnsemble {
    static constexpr int kFormatVersion = 1;

    int format_version = kFormatVersion;
    std::vector<int> class_labels;  // sorted; class index k predicts class_labels[k]
    std::vector<std::string> feature_names;
    TrainParams params;  // effective parameters used for training
    std::vector<BinMapper> bin_mappers;
    std::vector<std::vector<Tree>> trees;  // [iteration][class]

    // Preprocessing the model expects its inputs to have gone through.
    std::optional<NormalizationStats> normalization;
    std::optional<CorrectionTable> correction;
    std::string correction_ref;

    std::size_t num_classes() const { return class_labels.size(); }
    std::size_t num_features() const { return feature_names.size(); }
    std::size_t num_iterations() const { return trees.size(); }

    /// Per-class raw scores: sum over iterations of learning_rate * leaf value.
    std::vector<double> predict_raw(std::span<const double> row) const;
    std::vector<double> predict_proba(std::span<const double> row) const;
    /// Class label (not index) of the most probable class; ties to the lower index.
    int predict_label(std::span<const double> row) const;
    std::vector<std::vector<double>> predict_proba_batch(const FeatureMatrix& rows, int threads = 1) const;

    friend bool operator==(const BoostedEnsemble&, const BoostedEnsemble&) = default;
};

struct TrainingLog {
    std::vector<double> train_loss;  // mean log-loss after each iteration
    std::vector<double> valid_loss;  // empty without a validation set
};

struct TrainResult {
    BoostedEnsemble model;
    TrainingLog log;
};

/// Trains from zero logits. Labels are arbitrary integers; at least two distinct values needed.
TrainResult train(const LabeledData& data, const TrainParams& params, const LabeledData* validation = nullptr,
                  std::vector<std::string> feature_names = {});

std::size_t argmax(std::span<const double> values);

}  // namespace gaitreid::gbdt
