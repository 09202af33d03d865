#include "gaitreid/synth.hpp"

#include "gaitreid/csv.hpp"
#include "gaitreid/error.hpp"
#include "gaitreid/gbdt/rng.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace gaitreid {

namespace {

constexpr std::uint64_t kStreamProfile = 6;
constexpr std::uint64_t kStreamWalk = 7;

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Triangle wave that keeps a growing proportion inside [0.05, 1.45].
double fold(double t) {
    constexpr double lo = 0.05, hi = 1.45, w = hi - lo;
    double u = std::fmod(t - lo, 2.0 * w);
    if (u < 0.0) u += 2.0 * w;
    return lo + (u <= w ? u : 2.0 * w - u);
}

Point2 along(Point2 from, double length, double angle) {
    return {from.x + length * std::sin(angle), from.y + length * std::cos(angle)};
}

}  // namespace

PersonProfile generate_person_profile(std::uint64_t seed, int id, double spread, double sigma) {
    if (!(spread > 0.0)) throw ConfigError("spread must be > 0");
    if (!(sigma >= 0.0)) throw ConfigError("sigma must be >= 0");
    auto rng = gbdt::derived_rng(seed, {kStreamProfile, static_cast<std::uint64_t>(id)});
    const double step = spread * (id - 1);
    PersonProfile p;
    p.id = id;
    p.height = 1.0 + step;
    p.hand_ratio = fold(0.40 + step);
    p.leg_ratio = fold(0.50 + step);
    p.shoulder_ratio = fold(0.25 + step);
    p.hip_ratio = fold(0.18 + step);
    p.cadence = 0.2 * (1.0 + 0.1 * (unit(rng) - 0.5));
    p.step_amplitude = 0.3 * (1.0 + 0.1 * (unit(rng) - 0.5));
    p.sigma = sigma;
    return p;
}

std::vector<LandmarkFrame> render_walk_sequence(const PersonProfile& profile, const SynthCameraSpec& camera,
                                                std::uint64_t seed, int video_id) {
    if (camera.frames < 1) throw ConfigError("frame count must be >= 1");
    if (!(camera.scale > 0.0)) throw ConfigError("camera scale must be > 0");
    if (!(camera.dropout >= 0.0 && camera.dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");

    auto rng = gbdt::derived_rng(seed, {kStreamWalk, static_cast<std::uint64_t>(profile.id),
                                        static_cast<std::uint64_t>(camera.id), static_cast<std::uint64_t>(video_id)});
    std::normal_distribution<double> noise(0.0, 1.0);
    const double phase = 2.0 * std::numbers::pi * unit(rng);
    const double x_start = 0.2 + 0.1 * unit(rng);

    const double H = profile.height;
    const double upper_arm = 0.55 * profile.hand_ratio * H, forearm = 0.45 * profile.hand_ratio * H;
    const double thigh = 0.5 * profile.leg_ratio * H, shin = 0.5 * profile.leg_ratio * H;
    const double shoulder_w = profile.shoulder_ratio * H, hip_w = profile.hip_ratio * H;
    const double foot = 0.15 * H;

    std::vector<LandmarkFrame> out;
    out.reserve(static_cast<std::size_t>(camera.frames));
    for (int t = 0; t < camera.frames; ++t) {
        const double theta = profile.cadence * t + phase;
        const double swing = profile.step_amplitude * std::sin(theta);
        const Point2 ear{x_start + 0.002 * t, 0.1};

        using L = Landmark;
        LandmarkFrame f;
        f.person_id = profile.id;
        f.camera_id = camera.id;
        f.video_id = video_id;
        f.frame_no = t;
        const Point2 ls{ear.x + shoulder_w / 2, ear.y + 0.12 * H};
        const Point2 lh{ear.x + hip_w / 2, ear.y + 0.45 * H};
        const Point2 elbow = along(ls, upper_arm, -swing);
        const Point2 knee = along(lh, thigh, swing);
        // Heels swing about the ear at fixed distance H, so the measured height is constant.
        const Point2 left_heel = along(ear, H, 0.5 * swing);
        const Point2 right_heel = along(ear, H, -0.5 * swing);
        f.set(L::LeftEar, ear);
        f.set(L::LeftShoulder, ls);
        f.set(L::LeftElbow, elbow);
        f.set(L::LeftWrist, along(elbow, forearm, -swing - 0.3));
        f.set(L::LeftHip, lh);
        f.set(L::LeftKnee, knee);
        f.set(L::LeftAnkle, along(knee, shin, swing - 0.2 * (1.0 + std::cos(theta))));
        f.set(L::LeftHeel, left_heel);
        f.set(L::RightShoulder, {ear.x - shoulder_w / 2, ls.y});
        f.set(L::RightHip, {ear.x - hip_w / 2, lh.y});
        f.set(L::RightHeel, right_heel);
        f.set(L::RightFootIndex, {right_heel.x + foot, right_heel.y});

        for (auto& c : f.coords) {
            *c *= camera.scale;
            if (profile.sigma > 0.0) *c += profile.sigma * noise(rng);
        }
        const bool dropped = camera.dropout > 0.0 && unit(rng) < camera.dropout;
        if (!dropped) out.push_back(std::move(f));
    }
    return out;
}

int synth_video_id(std::size_t person_index, std::size_t camera_index, std::size_t cameras, int walk,
                   int videos_per_pair) {
    return static_cast<int>((person_index * cameras + camera_index) * static_cast<std::size_t>(videos_per_pair)) +
           walk + 1;
}

SynthDataset generate_multicamera_dataset(const std::vector<PersonProfile>& persons,
                                          const std::vector<SynthCameraSpec>& cameras, std::uint64_t seed,
                                          int videos_per_pair) {
    if (persons.empty() || cameras.empty()) throw ConfigError("need at least one person and one camera");
    if (videos_per_pair < 1) throw ConfigError("videos per pair must be >= 1");
    SynthDataset ds;
    ds.persons = persons;
    ds.cameras = cameras;
    ds.videos_per_pair = videos_per_pair;
    for (std::size_t p = 0; p < persons.size(); ++p)
        for (std::size_t c = 0; c < cameras.size(); ++c)
            for (int v = 0; v < videos_per_pair; ++v) {
                auto walk = render_walk_sequence(persons[p], cameras[c], seed,
                                                 synth_video_id(p, c, cameras.size(), v, videos_per_pair));
                ds.data.rows.insert(ds.data.rows.end(), std::make_move_iterator(walk.begin()),
                                    std::make_move_iterator(walk.end()));
            }
    ds.data.manifest = build_manifest(ds.data.rows);
    return ds;
}

std::string to_truth_csv(const SynthDataset& ds) {
    using csv::format_double;
    std::ostringstream out;
    out << "KIND,ID,HEIGHT,HAND_RATIO,LEG_RATIO,SHOULDER_RATIO,HIP_RATIO,CADENCE,STEP_AMPLITUDE,SIGMA,SCALE,FRAMES,"
           "DROPOUT\n";
    for (const auto& p : ds.persons)
        out << "person," << p.id << ',' << format_double(p.height) << ',' << format_double(p.hand_ratio) << ','
            << format_double(p.leg_ratio) << ',' << format_double(p.shoulder_ratio) << ','
            << format_double(p.hip_ratio) << ',' << format_double(p.cadence) << ','
            << format_double(p.step_amplitude) << ',' << format_double(p.sigma) << ",,,\n";
    for (const auto& c : ds.cameras)
        out << "camera," << c.id << ",,,,,,,,," << format_double(c.scale) << ',' << c.frames << ','
            << format_double(c.dropout) << '\n';
    return out.str();
}

}  // namespace gaitreid
