#pragma once

#include "gaitreid/landmarks.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gaitreid {

/// Body and walking style of one synthetic subject. Lengths are in scale-1 image units.
struct PersonProfile {
    int id = 1;
    double height = 1.0;
    double hand_ratio = 0.4;      // upper + lower arm, relative to height
    double leg_ratio = 0.5;       // thigh + lower leg
    double shoulder_ratio = 0.25; // shoulder width
    double hip_ratio = 0.18;      // hip width
    double cadence = 0.2;         // radians per frame
    double step_amplitude = 0.3;  // peak hip swing, radians
    double sigma = 0.0;           // Gaussian noise per coordinate, applied after scaling

    friend bool operator==(const PersonProfile&, const PersonProfile&) = default;
};

struct SynthCameraSpec {
    int id = 1;
    double scale = 1.0;
    int frames = 100;
    double dropout = 0.0;

    friend bool operator==(const SynthCameraSpec&, const SynthCameraSpec&) = default;
};

/// Height and every proportion grow by `spread` per id step, so consecutive ids differ by at
/// least `spread`. Cadence and amplitude get a small seeded jitter.
PersonProfile generate_person_profile(std::uint64_t seed, int id, double spread, double sigma = 0.0);

/// One walk of `camera.frames` frames. Dropped frames keep the gaps in frame_no.
std::vector<LandmarkFrame> render_walk_sequence(const PersonProfile& profile, const SynthCameraSpec& camera,
                                                std::uint64_t seed, int video_id = 1);

struct SynthDataset {
    LandmarkDataset data;
    std::vector<PersonProfile> persons;
    std::vector<SynthCameraSpec> cameras;
    int videos_per_pair = 1;
};

/// Renders `videos_per_pair` walks for every (person, camera) pair. Video ids are assigned in
/// (person, camera, walk) order starting at 1.
SynthDataset generate_multicamera_dataset(const std::vector<PersonProfile>& persons,
                                          const std::vector<SynthCameraSpec>& cameras, std::uint64_t seed,
                                          int videos_per_pair = 1);

int synth_video_id(std::size_t person_index, std::size_t camera_index, std::size_t cameras, int walk,
                   int videos_per_pair);

/// Ground-truth sidecar: one row per person profile, then one per camera.
std::string to_truth_csv(const SynthDataset& dataset);

}  // namespace gaitreid
