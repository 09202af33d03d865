#pragma once

#include "gaitreid/features.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace gaitreid {

/// Per-camera scale factors relative to a reference camera.
struct CorrectionTable {
    int reference_camera = 1;
    std::map<int, double> factors;
    /// (person, camera) -> ratio of mean heights; provenance for the per-camera means.
    std::map<std::pair<int, int>, double> per_person_factors;
    std::string method = "mean_of_person_ratios";

    double factor(int camera) const;
    friend bool operator==(const CorrectionTable&, const CorrectionTable&) = default;
};

/// Factor of camera C = mean over persons P seen in C of (mean height of P in C) / (mean height of P
/// in the reference camera). Rows must carry raw, uncorrected heights and person ids.
CorrectionTable estimate_correction_factors(const std::vector<GaitFeatureRow>& calib_rows, int reference_camera);

/// Divides the five length features by the row's camera factor. Ratios are left untouched.
std::vector<GaitFeatureRow> apply_correction(std::vector<GaitFeatureRow> rows, const CorrectionTable& table);

std::string to_text(const CorrectionTable& table);
CorrectionTable correction_from_text(const std::string& text);
void save_correction(const std::filesystem::path& path, const CorrectionTable& table);
CorrectionTable load_correction(const std::filesystem::path& path);

}  // namespace gaitreid
