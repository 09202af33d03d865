#pragma once

#include "gaitreid/calibration.hpp"
#include "gaitreid/evaluation.hpp"
#include "gaitreid/features.hpp"
#include "gaitreid/gbdt/ensemble.hpp"
#include "gaitreid/gbdt/params.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gaitreid {

struct SplitSpec {
    // Fractions of all videos; a missing one is derived from the others. With none given the test
    // share is 0.15 and validation takes a quarter of the remaining videos.
    std::optional<double> train_fraction, validation_fraction, test_fraction;
    // Explicit lists win over fractions.
    std::optional<std::vector<int>> train_videos, validation_videos, test_videos;
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct SearchSpace {
    Range num_leaves{8, 128};
    Range learning_rate{0.01, 0.3};
    Range colsample_bytree{0.5, 1.0};
    Range subsample{0.5, 1.0};
    Range subsample_freq{1, 20};
    Range min_child_samples{5, 50};

    void validate() const;
    /// Every range collapsed onto the given parameters.
    static SearchSpace point(const gbdt::TrainParams& params);
};

struct PipelineConfig {
    std::vector<std::filesystem::path> inputs;
    int reference_camera = 1;
    SplitSpec split;
    gbdt::TrainParams params;
    bool calibrate = true;
    bool normalize = true;
    double smoothing_alpha = 0.0;
    bool dedupe_shr = false;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 42;
    SearchSpace search;
    int tune_trials = 20;

    /// Throws ConfigError on inconsistent settings.
    void validate() const;
};

/// Parses `key=value` text. Unknown keys are rejected so typos do not pass silently.
PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

struct DatasetSplit {
    std::vector<GaitFeatureRow> train, validation, test;
    std::vector<int> train_videos, validation_videos, test_videos;
};

DatasetSplit split_dataset(const FeatureDataset& dataset, const PipelineConfig& config);

/// Parse, validate, smooth and extract every configured input.
FeatureDataset load_features(const PipelineConfig& config, IngestionReport* ingestion = nullptr,
                             ExtractionReport* extraction = nullptr);

/// Applies the model's stored correction and normalization (never refits) and returns model inputs.
gbdt::FeatureMatrix prepare_inputs(const gbdt::BoostedEnsemble& model, const std::vector<GaitFeatureRow>& rows,
                                   bool dedupe_shr);

/// Training-split preprocessing: calibration and normalization are fitted on training rows only
/// and then applied to every partition.
struct PreparedData {
    DatasetSplit split;
    std::optional<CorrectionTable> correction;
    std::optional<NormalizationStats> normalization;
    gbdt::LabeledData train, validation;
    std::vector<std::string> feature_names;
};

PreparedData prepare_training(const PipelineConfig& config);

struct TrainArtifacts {
    std::filesystem::path model, correction, normalization, training_log, split;
    gbdt::TrainResult result;
    DatasetSplit data;  // train and validation rows preprocessed, test rows raw
};

/// Writes model.json, correction.txt, normalization.txt, training_log.csv and split.csv into the
/// output directory. Stage failures are rethrown as StageError.
TrainArtifacts run_train(const PipelineConfig& config);

struct TrackResult {
    int video_id = 0;
    int camera_id = 0;
    std::optional<int> true_label;
    int predicted = 0;
    std::size_t frames = 0;
};

/// Groups rows into tracks by (video_id, camera_id) and votes within each.
std::vector<TrackResult> vote_tracks(const std::vector<GaitFeatureRow>& rows,
                                     const std::vector<std::vector<double>>& probs, const std::vector<int>& labels);

struct EvaluationArtifacts {
    ConfusionMatrix confusion;
    EvaluationReport report;
    std::vector<TrackResult> tracks;
};

/// Scores the configured test split; writes report.csv, confusion.csv and tracks.csv.
EvaluationArtifacts run_evaluate(const PipelineConfig& config, const std::filesystem::path& model_path);

/// Scores arbitrary rows; labels must be present for the report.
EvaluationArtifacts evaluate_rows(const gbdt::BoostedEnsemble& model, const std::vector<GaitFeatureRow>& rows,
                                  bool dedupe_shr);

struct Trial {
    int index = 0;
    gbdt::TrainParams params;
    double validation_loss = 0.0;
};

struct TuneResult {
    gbdt::TrainParams best;
    double best_loss = 0.0;
    std::vector<Trial> trials;
};

/// Seeded random search; the objective is the final validation log-loss. Ties keep the earlier trial.
TuneResult tune_hyperparameters(const gbdt::LabeledData& train, const gbdt::LabeledData& validation,
                                const gbdt::TrainParams& base, const SearchSpace& space, int trials);
std::string to_trial_csv(const TuneResult& result);

/// Tunes on the configured split and writes tune_trials.csv and best_params.txt.
TuneResult run_tune(const PipelineConfig& config);

/// key=value text of the tunable parameters, readable by parse_config.
std::string to_params_text(const gbdt::TrainParams& params);

/// Feature rows of a 4-person, 4-camera synthetic walk set, truncated to `rows`. Used for benchmarks.
gbdt::LabeledData synthetic_benchmark_data(std::size_t rows, std::uint64_t seed);

/// Builds the classifier matrix of already corrected and normalized rows.
gbdt::LabeledData to_labeled(const std::vector<GaitFeatureRow>& rows, bool dedupe_shr);

}  // namespace gaitreid
