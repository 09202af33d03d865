#include "gaitreid/calibration.hpp"

#include "gaitreid/csv.hpp"
#include "gaitreid/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gaitreid {

namespace {

// Sum after sorting so the result does not depend on row order.
double order_free_mean(std::vector<double>& values) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace

double CorrectionTable::factor(int camera) const {
    const auto it = factors.find(camera);
    if (it == factors.end()) throw MissingFactorError(camera);
    return it->second;
}

CorrectionTable estimate_correction_factors(const std::vector<GaitFeatureRow>& calib_rows, int reference_camera) {
    if (calib_rows.empty()) throw EmptyInputError("no calibration rows");
    std::map<std::pair<int, int>, std::vector<double>> heights;  // (person, camera)
    for (const auto& r : calib_rows) {
        if (!r.person_id) throw DataError("calibration rows need person ids");
        heights[{*r.person_id, r.camera_id}].push_back(r[Feature::Height]);
    }

    std::map<std::pair<int, int>, double> mean_height;
    for (auto& [key, hs] : heights) mean_height[key] = order_free_mean(hs);

    CorrectionTable table;
    table.reference_camera = reference_camera;
    std::map<int, std::vector<double>> ratios_by_camera;
    for (const auto& [key, h] : mean_height) {
        const auto [person, camera] = key;
        const auto ref = mean_height.find({person, reference_camera});
        if (ref == mean_height.end())
            throw CoverageError("person " + std::to_string(person) + " has no frames in reference camera " +
                                std::to_string(reference_camera));
        if (!(ref->second > 0.0) || !(h > 0.0))
            throw DegenerateError("zero mean height for person " + std::to_string(person));
        const double ratio = camera == reference_camera ? 1.0 : h / ref->second;
        table.per_person_factors[key] = ratio;
        ratios_by_camera[camera].push_back(ratio);
    }
    for (auto& [camera, ratios] : ratios_by_camera) {
        // Persons are visited in id order, so the sum order is fixed.
        double sum = 0.0;
        for (double r : ratios) sum += r;
        table.factors[camera] = camera == reference_camera ? 1.0 : sum / static_cast<double>(ratios.size());
    }
    table.factors[reference_camera] = 1.0;
    return table;
}

std::vector<GaitFeatureRow> apply_correction(std::vector<GaitFeatureRow> rows, const CorrectionTable& table) {
    for (auto& r : rows) {
        const double k = table.factor(r.camera_id);
        for (std::size_t f = 0; f < kFeatureCount; ++f)
            if (is_length_feature(f)) r.values[f] /= k;
    }
    return rows;
}

std::string to_text(const CorrectionTable& table) {
    std::ostringstream out;
    out << "reference=" << table.reference_camera << '\n';
    for (const auto& [camera, f] : table.factors) out << "camera." << camera << '=' << csv::format_double(f) << '\n';
    out << "method=" << table.method << '\n';
    for (const auto& [key, f] : table.per_person_factors)
        out << "person." << key.first << ".camera." << key.second << '=' << csv::format_double(f) << '\n';
    return out.str();
}

CorrectionTable correction_from_text(const std::string& text) {
    const auto kv = csv::parse_key_values(text);
    CorrectionTable t;
    const auto ref = kv.find("reference");
    if (ref == kv.end()) throw CompatibilityError("correction table lacks reference=");
    const auto ref_id = csv::parse_int(ref->second);
    if (!ref_id) throw CompatibilityError("bad reference camera id");
    t.reference_camera = static_cast<int>(*ref_id);
    t.method.clear();
    for (const auto& [key, value] : kv) {
        if (key == "reference") continue;
        if (key == "method") {
            t.method = value;
            continue;
        }
        const auto v = csv::parse_double(value);
        if (!v || !std::isfinite(*v) || *v <= 0.0) throw CompatibilityError("bad correction factor for " + key);
        if (key.rfind("camera.", 0) == 0) {
            const auto cam = csv::parse_int(std::string_view(key).substr(7));
            if (!cam) throw CompatibilityError("bad key " + key);
            t.factors[static_cast<int>(*cam)] = *v;
        } else if (key.rfind("person.", 0) == 0) {
            const auto dot = key.find(".camera.");
            const auto p = dot == std::string::npos ? std::nullopt : csv::parse_int(key.substr(7, dot - 7));
            const auto c = dot == std::string::npos ? std::nullopt : csv::parse_int(key.substr(dot + 8));
            if (!p || !c) throw CompatibilityError("bad key " + key);
            t.per_person_factors[{static_cast<int>(*p), static_cast<int>(*c)}] = *v;
        }
    }
    const auto it = t.factors.find(t.reference_camera);
    if (it == t.factors.end() || it->second != 1.0)
        throw CompatibilityError("reference camera factor must be exactly 1");
    return t;
}

void save_correction(const std::filesystem::path& path, const CorrectionTable& table) {
    csv::write_text(path, to_text(table));
}

CorrectionTable load_correction(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CompatibilityError("cannot open correction table " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return correction_from_text(buf.str());
}

}  // namespace gaitreid
