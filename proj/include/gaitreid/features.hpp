#pragma once

#include "gaitreid/landmarks.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gaitreid {

inline constexpr std::size_t kFeatureCount = 7;

enum class Feature : std::size_t { Height, Hand, Leg, StepLength, FootClearance, BodyWideness, Shr };

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "HEIGHT", "HAND", "LEG", "STEP_LENGTH", "FOOT_CLEARANCE", "BODY_WIDENESS", "SHR",
};

/// True for the five length features; false for the two width ratios.
constexpr bool is_length_feature(std::size_t f) { return f < 5; }

struct GaitFeatureRow {
    std::optional<int> person_id;
    int camera_id = 1;
    int video_id = 0;
    int frame_no = 0;
    std::array<double, kFeatureCount> values{};

    double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
    double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }

    friend bool operator==(const GaitFeatureRow&, const GaitFeatureRow&) = default;
};

using FeatureDataset = GaitDataset<GaitFeatureRow>;

/// Intermediate segment lengths, exposed for the correlation report and tests.
struct BodySegments {
    double height = 0, upper_hand = 0, lower_hand = 0, thigh = 0, lower_leg = 0;
    double hip_wideness = 0, shoulder_wideness = 0;
};

double euclidean_distance(Point2 a, Point2 b);

BodySegments measure_segments(const LandmarkFrame& frame);

/// Throws ContractViolation on an incomplete frame and DegenerateError when the hip width is 0.
GaitFeatureRow extract_features(const LandmarkFrame& frame);

struct ExtractionReport {
    std::size_t extracted = 0;
    std::size_t degenerate = 0;
};

/// Extracts every complete frame; degenerate frames are dropped and counted.
FeatureDataset extract_dataset(const LandmarkDataset& frames, ExtractionReport* report = nullptr);

struct NormalizationStats {
    std::array<double, kFeatureCount> min{};
    std::array<double, kFeatureCount> max{};

    bool degenerate(std::size_t f) const { return !(max[f] > min[f]); }
    friend bool operator==(const NormalizationStats&, const NormalizationStats&) = default;
};

NormalizationStats fit_normalization(const std::vector<GaitFeatureRow>& rows);

/// Min-max map into [0,1] with the fitted range; constant features map to 0. No clipping.
std::vector<GaitFeatureRow> normalize_features(std::vector<GaitFeatureRow> rows, const NormalizationStats& stats);

std::string to_text(const NormalizationStats& stats);
NormalizationStats normalization_from_text(const std::string& text);
void save_normalization(const std::filesystem::path& path, const NormalizationStats& stats);
NormalizationStats load_normalization(const std::filesystem::path& path);

/// Pearson correlation of the seven features; nullopt where either feature is constant.
using CorrelationMatrix = std::array<std::array<std::optional<double>, kFeatureCount>, kFeatureCount>;
CorrelationMatrix feature_correlation(const std::vector<GaitFeatureRow>& rows);

std::string to_feature_csv(const std::vector<GaitFeatureRow>& rows);
void write_feature_csv(const std::filesystem::path& path, const std::vector<GaitFeatureRow>& rows);
FeatureDataset parse_feature_csv(const std::filesystem::path& path);

/// Classifier input columns. `dedupe_shr` drops the SHR column, which duplicates BODY_WIDENESS.
std::vector<std::string> model_feature_names(bool dedupe_shr);
std::vector<double> model_inputs(const GaitFeatureRow& row, bool dedupe_shr);

}  // namespace gaitreid
