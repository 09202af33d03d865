#include "gaitreid/landmarks.hpp"

#include "gaitreid/csv.hpp"
#include "gaitreid/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

namespace gaitreid {

namespace {

constexpr std::array<std::string_view, 4> kIdColumns = {"PERSON_ID", "CAMERA_ID", "VIDEO_ID", "FRAME_NO"};

bool same_coord(const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    if (std::isnan(*a) && std::isnan(*b)) return true;
    return *a == *b;
}

int require_int(const std::string& cell, std::size_t row, std::string_view column, long long min_value) {
    const auto v = csv::parse_int(cell);
    if (!v) throw ParseError(row, std::string(column), "expected an integer, got '" + cell + "'");
    if (*v < min_value || *v > std::numeric_limits<int>::max())
        throw ParseError(row, std::string(column), "value " + cell + " out of range");
    return static_cast<int>(*v);
}

}  // namespace

std::string coordinate_column(std::size_t i) {
    return std::string(kLandmarkNames.at(i / 2)) + (i % 2 == 0 ? "_X" : "_Y");
}

std::vector<std::string> landmark_csv_header() {
    std::vector<std::string> header(kIdColumns.begin(), kIdColumns.end());
    for (std::size_t i = 0; i < kCoordinateCount; ++i) header.push_back(coordinate_column(i));
    return header;
}

Point2 LandmarkFrame::point(Landmark lm) const {
    const auto px = x(lm);
    const auto py = y(lm);
    if (!px || !py || !std::isfinite(*px) || !std::isfinite(*py))
        throw ContractViolation("landmark " + std::string(kLandmarkNames[static_cast<std::size_t>(lm)]) +
                                " is missing or non-finite");
    return {*px, *py};
}

bool operator==(const LandmarkFrame& a, const LandmarkFrame& b) {
    if (a.person_id != b.person_id || a.camera_id != b.camera_id || a.video_id != b.video_id ||
        a.frame_no != b.frame_no)
        return false;
    for (std::size_t i = 0; i < kCoordinateCount; ++i)
        if (!same_coord(a.coords[i], b.coords[i])) return false;
    return true;
}

std::vector<ManifestEntry> build_manifest(const std::vector<LandmarkFrame>& rows) {
    std::map<int, ManifestEntry> by_video;
    for (const auto& r : rows) {
        auto [it, inserted] = by_video.try_emplace(r.video_id, ManifestEntry{r.video_id, r.camera_id, r.person_id, 0});
        if (!inserted && (it->second.camera_id != r.camera_id || it->second.person_id != r.person_id))
            throw DataError("video " + std::to_string(r.video_id) + " mixes cameras or persons");
        ++it->second.frame_count;
    }
    std::vector<ManifestEntry> out;
    out.reserve(by_video.size());
    for (auto& [_, e] : by_video) out.push_back(e);
    return out;
}

LandmarkDataset parse_landmark_csv_text(const std::vector<std::string>& lines) {
    std::size_t first = 0;
    while (first < lines.size() && lines[first].find_first_not_of(" \t") == std::string::npos) ++first;
    if (first == lines.size()) throw EmptyInputError("landmark CSV is empty");

    const auto header = csv::split_line(lines[first]);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) index.emplace(header[i], i);
    std::vector<std::size_t> column_of;
    for (const auto& name : landmark_csv_header()) {
        const auto it = index.find(name);
        if (it == index.end()) throw SchemaError(name);
        column_of.push_back(it->second);
    }

    LandmarkDataset ds;
    std::set<std::pair<int, int>> seen;
    for (std::size_t li = first + 1; li < lines.size(); ++li) {
        const std::size_t row = li + 1;  // 1-based file line, header included
        if (lines[li].find_first_not_of(" \t") == std::string::npos) continue;
        const auto cells = csv::split_line(lines[li]);
        if (cells.size() < header.size())
            throw ParseError(row, header[std::min(cells.size(), header.size() - 1)], "row has too few cells");

        LandmarkFrame f;
        const auto& person = cells[column_of[0]];
        if (!person.empty()) f.person_id = require_int(person, row, kIdColumns[0], 0);
        f.camera_id = require_int(cells[column_of[1]], row, kIdColumns[1], 1);
        f.video_id = require_int(cells[column_of[2]], row, kIdColumns[2], 0);
        f.frame_no = require_int(cells[column_of[3]], row, kIdColumns[3], 0);
        for (std::size_t c = 0; c < kCoordinateCount; ++c) {
            const auto& cell = cells[column_of[4 + c]];
            if (cell.empty()) continue;
            const auto v = csv::parse_double(cell);
            if (!v) throw ParseError(row, coordinate_column(c), "not a number: '" + cell + "'");
            f.coords[c] = *v;
        }
        if (!seen.emplace(f.video_id, f.frame_no).second)
            throw ParseError(row, "FRAME_NO",
                             "duplicate frame " + std::to_string(f.frame_no) + " in video " + std::to_string(f.video_id));
        ds.rows.push_back(std::move(f));
    }
    ds.manifest = build_manifest(ds.rows);
    return ds;
}

LandmarkDataset parse_landmark_csv(const std::filesystem::path& path) {
    return parse_landmark_csv_text(csv::read_lines(path));
}

std::string to_landmark_csv(const std::vector<LandmarkFrame>& rows) {
    std::ostringstream out;
    const auto header = landmark_csv_header();
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& f : rows) {
        if (f.person_id) out << *f.person_id;
        out << ',' << f.camera_id << ',' << f.video_id << ',' << f.frame_no;
        for (const auto& c : f.coords) {
            out << ',';
            if (c) out << csv::format_double(*c);
        }
        out << '\n';
    }
    return out.str();
}

void write_landmark_csv(const std::filesystem::path& path, const std::vector<LandmarkFrame>& rows) {
    csv::write_text(path, to_landmark_csv(rows));
}

FrameVerdict validate_frame(const LandmarkFrame& frame) {
    for (std::size_t c = 0; c < kCoordinateCount; ++c) {
        if (!frame.coords[c]) return {false, "missing " + coordinate_column(c)};
        if (!std::isfinite(*frame.coords[c])) return {false, "non-finite " + coordinate_column(c)};
    }
    return {};
}

void IngestionReport::record(const FrameVerdict& verdict) {
    ++total;
    if (verdict.keep) {
        ++kept;
    } else {
        ++dropped;
        ++drop_reasons[verdict.reason];
    }
}

LandmarkDataset filter_complete(const LandmarkDataset& dataset, IngestionReport& report) {
    LandmarkDataset out;
    out.schema_version = dataset.schema_version;
    for (const auto& f : dataset.rows) {
        const auto verdict = validate_frame(f);
        report.record(verdict);
        if (verdict.keep) out.rows.push_back(f);
    }
    out.manifest = build_manifest(out.rows);
    return out;
}

LandmarkFrame smooth_landmarks(const LandmarkFrame& current, const LandmarkFrame& previous, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ContractViolation("smoothing alpha must lie in [0, 1]");
    if (current.video_id != previous.video_id)
        throw ContractViolation("cannot smooth frames from different videos");
    if (!validate_frame(current).keep || !validate_frame(previous).keep)
        throw ContractViolation("smoothing requires complete frames");
    LandmarkFrame out = current;
    for (std::size_t c = 0; c < kCoordinateCount; ++c) {
        const double cur = *current.coords[c];
        const double prev = *previous.coords[c];
        // Identical inputs must come back untouched; the blend can round otherwise.
        out.coords[c] = cur == prev ? cur : alpha * prev + (1.0 - alpha) * cur;
    }
    return out;
}

LandmarkDataset smooth_dataset(const LandmarkDataset& dataset, double alpha) {
    if (alpha == 0.0) return dataset;
    LandmarkDataset out = dataset;
    std::map<int, std::vector<std::size_t>> by_video;
    for (std::size_t i = 0; i < out.rows.size(); ++i) by_video[out.rows[i].video_id].push_back(i);
    for (auto& [_, idx] : by_video) {
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return out.rows[a].frame_no < out.rows[b].frame_no; });
        // Recursive filter: each frame blends with the already smoothed predecessor.
        for (std::size_t k = 1; k < idx.size(); ++k)
            out.rows[idx[k]] = smooth_landmarks(out.rows[idx[k]], out.rows[idx[k - 1]], alpha);
    }
    return out;
}

}  // namespace gaitreid
