#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gaitreid {

/// Skeletal keypoints consumed by the gait formulas, in CSV column order.
enum class Landmark : std::size_t {
    LeftEar,
    LeftShoulder,
    LeftElbow,
    LeftWrist,
    LeftHip,
    LeftKnee,
    LeftAnkle,
    LeftHeel,
    RightShoulder,
    RightHip,
    RightHeel,
    RightFootIndex,
};

inline constexpr std::size_t kLandmarkCount = 12;
inline constexpr std::size_t kCoordinateCount = 2 * kLandmarkCount;

inline constexpr std::array<std::string_view, kLandmarkCount> kLandmarkNames = {
    "LEFT_EAR",       "LEFT_SHOULDER", "LEFT_ELBOW",     "LEFT_WRIST",
    "LEFT_HIP",       "LEFT_KNEE",     "LEFT_ANKLE",     "LEFT_HEEL",
    "RIGHT_SHOULDER", "RIGHT_HIP",     "RIGHT_HEEL",     "RIGHT_FOOT_INDEX",
};

/// Column name of coordinate slot `i` (`<LANDMARK>_X` for even i, `_Y` for odd).
std::string coordinate_column(std::size_t i);
std::vector<std::string> landmark_csv_header();

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

/// One frame of 2-D keypoints in normalized image coordinates.
struct LandmarkFrame {
    std::optional<int> person_id;
    int camera_id = 1;
    int video_id = 0;
    int frame_no = 0;
    /// x/y per landmark interleaved; nullopt marks an empty CSV cell.
    std::array<std::optional<double>, kCoordinateCount> coords{};

    std::optional<double> x(Landmark lm) const { return coords[2 * static_cast<std::size_t>(lm)]; }
    std::optional<double> y(Landmark lm) const { return coords[2 * static_cast<std::size_t>(lm) + 1]; }
    void set(Landmark lm, Point2 p) {
        coords[2 * static_cast<std::size_t>(lm)] = p.x;
        coords[2 * static_cast<std::size_t>(lm) + 1] = p.y;
    }
    /// Requires a complete frame.
    Point2 point(Landmark lm) const;

    friend bool operator==(const LandmarkFrame& a, const LandmarkFrame& b);
};

struct ManifestEntry {
    int video_id = 0;
    int camera_id = 0;
    std::optional<int> person_id;
    std::size_t frame_count = 0;
    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Manifest sorted by video id, one entry per video.
std::vector<ManifestEntry> build_manifest(const std::vector<LandmarkFrame>& rows);

template <typename Row>
struct GaitDataset {
    std::vector<Row> rows;
    std::vector<ManifestEntry> manifest;
    int schema_version = 1;

    friend bool operator==(const GaitDataset&, const GaitDataset&) = default;
};

using LandmarkDataset = GaitDataset<LandmarkFrame>;

/// Reads the landmark CSV. Columns are located by header name, so extra columns are ignored.
/// Empty coordinate cells are kept as missing and rejected later by validate_frame.
LandmarkDataset parse_landmark_csv(const std::filesystem::path& path);
LandmarkDataset parse_landmark_csv_text(const std::vector<std::string>& lines);

std::string to_landmark_csv(const std::vector<LandmarkFrame>& rows);
void write_landmark_csv(const std::filesystem::path& path, const std::vector<LandmarkFrame>& rows);

struct FrameVerdict {
    bool keep = true;
    std::string reason;  // empty when kept
};

FrameVerdict validate_frame(const LandmarkFrame& frame);

struct IngestionReport {
    std::size_t total = 0;
    std::size_t kept = 0;
    std::size_t dropped = 0;
    std::map<std::string, std::size_t> drop_reasons;

    void record(const FrameVerdict& verdict);
};

/// Keeps complete frames in file order and counts the rest.
LandmarkDataset filter_complete(const LandmarkDataset& dataset, IngestionReport& report);

/// Per-coordinate alpha*previous + (1-alpha)*current. Both frames must be complete and
/// come from the same video.
LandmarkFrame smooth_landmarks(const LandmarkFrame& current, const LandmarkFrame& previous, double alpha);

/// Applies smooth_landmarks along each video in frame order. alpha = 0 returns the input.
LandmarkDataset smooth_dataset(const LandmarkDataset& dataset, double alpha);

}  // namespace gaitreid
