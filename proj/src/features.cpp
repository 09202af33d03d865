#include "gaitreid/features.hpp"

#include "gaitreid/csv.hpp"
#include "gaitreid/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace gaitreid {

double euclidean_distance(Point2 a, Point2 b) {
    if (!std::isfinite(a.x) || !std::isfinite(a.y) || !std::isfinite(b.x) || !std::isfinite(b.y))
        throw ContractViolation("euclidean_distance needs finite points");
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    return std::sqrt(dx * dx + dy * dy);
}

BodySegments measure_segments(const LandmarkFrame& f) {
    using L = Landmark;
    BodySegments s;
    s.height = euclidean_distance(f.point(L::LeftEar), f.point(L::LeftHeel));
    s.upper_hand = euclidean_distance(f.point(L::LeftShoulder), f.point(L::LeftElbow));
    s.lower_hand = euclidean_distance(f.point(L::LeftElbow), f.point(L::LeftWrist));
    s.thigh = euclidean_distance(f.point(L::LeftHip), f.point(L::LeftKnee));
    s.lower_leg = euclidean_distance(f.point(L::LeftKnee), f.point(L::LeftAnkle));
    s.hip_wideness = euclidean_distance(f.point(L::LeftHip), f.point(L::RightHip));
    s.shoulder_wideness = euclidean_distance(f.point(L::LeftShoulder), f.point(L::RightShoulder));
    return s;
}

GaitFeatureRow extract_features(const LandmarkFrame& frame) {
    if (!validate_frame(frame).keep) throw ContractViolation("extract_features requires a complete frame");
    const auto seg = measure_segments(frame);
    if (seg.hip_wideness == 0.0)
        throw DegenerateError("zero hip width in video " + std::to_string(frame.video_id) + " frame " +
                              std::to_string(frame.frame_no));

    using L = Landmark;
    GaitFeatureRow row;
    row.person_id = frame.person_id;
    row.camera_id = frame.camera_id;
    row.video_id = frame.video_id;
    row.frame_no = frame.frame_no;
    row[Feature::Height] = seg.height;
    row[Feature::Hand] = seg.upper_hand + seg.lower_hand;
    row[Feature::Leg] = seg.thigh + seg.lower_leg;
    // Step length and foot clearance are horizontal offsets only.
    row[Feature::StepLength] = std::abs(frame.point(L::LeftHeel).x - frame.point(L::RightHeel).x);
    row[Feature::FootClearance] = std::abs(frame.point(L::LeftHeel).x - frame.point(L::RightFootIndex).x);
    const double ratio = seg.shoulder_wideness / seg.hip_wideness;
    row[Feature::BodyWideness] = ratio;
    row[Feature::Shr] = ratio;
    return row;
}

FeatureDataset extract_dataset(const LandmarkDataset& frames, ExtractionReport* report) {
    FeatureDataset out;
    out.schema_version = frames.schema_version;
    out.rows.reserve(frames.rows.size());
    ExtractionReport local;
    std::vector<LandmarkFrame> kept;
    for (const auto& f : frames.rows) {
        try {
            out.rows.push_back(extract_features(f));
            ++local.extracted;
            kept.push_back(f);
        } catch (const DegenerateError&) {
            ++local.degenerate;
        }
    }
    out.manifest = build_manifest(kept);
    if (report) *report = local;
    return out;
}

NormalizationStats fit_normalization(const std::vector<GaitFeatureRow>& rows) {
    if (rows.empty()) throw EmptyInputError("cannot fit normalization on zero rows");
    NormalizationStats s;
    s.min = rows.front().values;
    s.max = rows.front().values;
    for (const auto& r : rows)
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            s.min[f] = std::min(s.min[f], r.values[f]);
            s.max[f] = std::max(s.max[f], r.values[f]);
        }
    return s;
}

std::vector<GaitFeatureRow> normalize_features(std::vector<GaitFeatureRow> rows, const NormalizationStats& stats) {
    for (auto& r : rows)
        for (std::size_t f = 0; f < kFeatureCount; ++f)
            r.values[f] = stats.degenerate(f) ? 0.0 : (r.values[f] - stats.min[f]) / (stats.max[f] - stats.min[f]);
    return rows;
}

std::string to_text(const NormalizationStats& stats) {
    std::ostringstream out;
    out << "# min-max normalization fitted on the training split\n";
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        out << kFeatureNames[f] << ".min=" << csv::format_double(stats.min[f]) << '\n';
        out << kFeatureNames[f] << ".max=" << csv::format_double(stats.max[f]) << '\n';
    }
    return out.str();
}

NormalizationStats normalization_from_text(const std::string& text) {
    const auto kv = csv::parse_key_values(text);
    NormalizationStats s;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        for (const auto* suffix : {".min", ".max"}) {
            const auto key = std::string(kFeatureNames[f]) + suffix;
            const auto it = kv.find(key);
            if (it == kv.end()) throw CompatibilityError("normalization stats lack " + key);
            const auto v = csv::parse_double(it->second);
            if (!v) throw CompatibilityError("bad value for " + key);
            (suffix[2] == 'i' ? s.min : s.max)[f] = *v;
        }
        if (s.max[f] < s.min[f]) throw CompatibilityError("normalization max < min for " + std::string(kFeatureNames[f]));
    }
    return s;
}

void save_normalization(const std::filesystem::path& path, const NormalizationStats& stats) {
    csv::write_text(path, to_text(stats));
}

NormalizationStats load_normalization(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CompatibilityError("cannot open normalization stats " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return normalization_from_text(buf.str());
}

CorrelationMatrix feature_correlation(const std::vector<GaitFeatureRow>& rows) {
    if (rows.size() < 2) throw EmptyInputError("correlation needs at least two rows");
    const double n = static_cast<double>(rows.size());
    std::array<double, kFeatureCount> mean{};
    for (const auto& r : rows)
        for (std::size_t f = 0; f < kFeatureCount; ++f) mean[f] += r.values[f];
    for (auto& m : mean) m /= n;

    std::array<std::array<double, kFeatureCount>, kFeatureCount> cov{};
    for (const auto& r : rows)
        for (std::size_t a = 0; a < kFeatureCount; ++a)
            for (std::size_t b = a; b < kFeatureCount; ++b)
                cov[a][b] += (r.values[a] - mean[a]) * (r.values[b] - mean[b]);

    std::array<bool, kFeatureCount> constant{};
    for (std::size_t f = 0; f < kFeatureCount; ++f)
        constant[f] = std::all_of(rows.begin(), rows.end(),
                                  [&](const GaitFeatureRow& r) { return r.values[f] == rows.front().values[f]; });

    CorrelationMatrix out{};
    for (std::size_t a = 0; a < kFeatureCount; ++a) {
        for (std::size_t b = a; b < kFeatureCount; ++b) {
            if (constant[a] || constant[b]) continue;
            const double r = a == b ? 1.0 : std::clamp(cov[a][b] / std::sqrt(cov[a][a] * cov[b][b]), -1.0, 1.0);
            out[a][b] = r;
            out[b][a] = r;
        }
    }
    return out;
}

std::string to_feature_csv(const std::vector<GaitFeatureRow>& rows) {
    std::ostringstream out;
    out << "PERSON_ID,CAMERA_ID,VIDEO_ID,FRAME_NO";
    for (const auto& name : kFeatureNames) out << ',' << name;
    out << '\n';
    for (const auto& r : rows) {
        if (r.person_id) out << *r.person_id;
        out << ',' << r.camera_id << ',' << r.video_id << ',' << r.frame_no;
        for (double v : r.values) out << ',' << csv::format_double(v);
        out << '\n';
    }
    return out.str();
}

void write_feature_csv(const std::filesystem::path& path, const std::vector<GaitFeatureRow>& rows) {
    csv::write_text(path, to_feature_csv(rows));
}

FeatureDataset parse_feature_csv(const std::filesystem::path& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty() || lines.front().empty()) throw EmptyInputError("feature CSV is empty");
    const auto header = csv::split_line(lines.front());
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) index.emplace(header[i], i);
    std::vector<std::string> wanted = {"PERSON_ID", "CAMERA_ID", "VIDEO_ID", "FRAME_NO"};
    for (const auto& n : kFeatureNames) wanted.emplace_back(n);
    std::vector<std::size_t> col;
    for (const auto& w : wanted) {
        const auto it = index.find(w);
        if (it == index.end()) throw SchemaError(w);
        col.push_back(it->second);
    }

    FeatureDataset ds;
    std::vector<LandmarkFrame> ids;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto cells = csv::split_line(lines[li]);
        if (cells.size() < header.size()) throw ParseError(li + 1, header.back(), "row has too few cells");
        auto integer = [&](std::size_t k) {
            const auto v = csv::parse_int(cells[col[k]]);
            if (!v) throw ParseError(li + 1, wanted[k], "expected an integer");
            return static_cast<int>(*v);
        };
        GaitFeatureRow r;
        if (!cells[col[0]].empty()) r.person_id = integer(0);
        r.camera_id = integer(1);
        r.video_id = integer(2);
        r.frame_no = integer(3);
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            const auto v = csv::parse_double(cells[col[4 + f]]);
            if (!v || !std::isfinite(*v)) throw ParseError(li + 1, wanted[4 + f], "expected a finite number");
            r.values[f] = *v;
        }
        LandmarkFrame id;
        id.person_id = r.person_id;
        id.camera_id = r.camera_id;
        id.video_id = r.video_id;
        id.frame_no = r.frame_no;
        ids.push_back(id);
        ds.rows.push_back(r);
    }
    ds.manifest = build_manifest(ids);
    return ds;
}

std::vector<std::string> model_feature_names(bool dedupe_shr) {
    std::vector<std::string> names(kFeatureNames.begin(), kFeatureNames.end());
    if (dedupe_shr) names.pop_back();
    return names;
}

std::vector<double> model_inputs(const GaitFeatureRow& row, bool dedupe_shr) {
    std::vector<double> v(row.values.begin(), row.values.end());
    if (dedupe_shr) v.pop_back();
    return v;
}

}  // namespace gaitreid
