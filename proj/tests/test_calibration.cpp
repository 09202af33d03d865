#include <doctest.h>

#include "gaitreid/calibration.hpp"
#include "gaitreid/error.hpp"
#include "gaitreid/synth.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace gaitreid;

namespace {

GaitFeatureRow row(int person, int camera, double height) {
    GaitFeatureRow r;
    r.person_id = person;
    r.camera_id = camera;
    r.values = {height, 0.4, 0.5, 0.1, 0.05, 1.3, 1.3};
    return r;
}

std::vector<GaitFeatureRow> two_camera_rows(double scale, double sigma, int frames = 200) {
    std::vector<PersonProfile> persons;
    for (int p = 1; p <= 3; ++p) persons.push_back(generate_person_profile(21, p, 0.1, sigma));
    const auto ds = generate_multicamera_dataset(persons, {{1, 1.0, frames, 0.0}, {2, scale, frames, 0.0}}, 21);
    return extract_dataset(ds.data).rows;
}

double mean_height(const std::vector<GaitFeatureRow>& rows, int camera) {
    double s = 0;
    int n = 0;
    for (const auto& r : rows)
        if (r.camera_id == camera) {
            s += r[Feature::Height];
            ++n;
        }
    return s / n;
}

}  // namespace

TEST_CASE("hand-computed factors") {
    // Person 1: cam1 mean 1.0, cam2 mean 1.2; person 2: cam1 mean 2.0, cam2 mean 2.8.
    const std::vector<GaitFeatureRow> rows = {row(1, 1, 0.9), row(1, 1, 1.1), row(1, 2, 1.2),
                                              row(2, 1, 2.0), row(2, 2, 2.8)};
    const auto t = estimate_correction_factors(rows, 1);
    CHECK(t.factors.at(1) == 1.0);
    CHECK(std::abs(t.factors.at(2) - (1.2 + 1.4) / 2) <= 1e-12);
    CHECK(std::abs(t.per_person_factors.at({2, 2}) - 1.4) <= 1e-12);
    CHECK(t.method == "mean_of_person_ratios");
}

TEST_CASE("reference-only data gives the identity table") {
    const auto t = estimate_correction_factors({row(1, 1, 1.0), row(1, 1, 1.2)}, 1);
    CHECK(t.factors.size() == 1);
    CHECK(t.factors.at(1) == 1.0);
}

TEST_CASE("coverage and degenerate errors") {
    try {
        estimate_correction_factors({row(1, 1, 1.0), row(2, 2, 1.0)}, 1);
        FAIL("expected CoverageError");
    } catch (const CoverageError& e) {
        CHECK(std::string(e.what()).find("person 2") != std::string::npos);
    }
    CHECK_THROWS_AS(estimate_correction_factors({row(1, 1, 0.0), row(1, 2, 1.0)}, 1), DegenerateError);
    CHECK_THROWS_AS(estimate_correction_factors({}, 1), EmptyInputError);
}

TEST_CASE("noiseless scaled camera is recovered to machine precision") {
    for (double s : {1.5, 0.7, 1.78}) {
        const auto rows = two_camera_rows(s, 0.0);
        const auto t = estimate_correction_factors(rows, 1);
        CHECK(std::abs(t.factors.at(2) - s) <= 1e-12 * s);
        const auto corrected = apply_correction(rows, t);
        CHECK(std::abs(mean_height(corrected, 2) / mean_height(corrected, 1) - 1.0) <= 1e-9);
        const auto again = estimate_correction_factors(corrected, 1);
        for (const auto& [cam, f] : again.factors) CHECK(std::abs(f - 1.0) <= 1e-9);
    }
}

TEST_CASE("apply_correction divides length features only") {
    CorrectionTable t;
    t.factors = {{1, 1.0}, {2, 2.0}};
    auto r1 = row(1, 1, 0.8), r2 = row(1, 2, 0.8);
    const auto out = apply_correction({r1, r2}, t);
    CHECK(out[0] == r1);
    CHECK(out[1][Feature::Height] == 0.4);
    CHECK(out[1][Feature::Hand] == 0.2);
    CHECK(out[1][Feature::BodyWideness] == r2[Feature::BodyWideness]);
    CHECK(out[1][Feature::Shr] == r2[Feature::Shr]);
    CHECK_THROWS_AS(apply_correction({row(1, 3, 1.0)}, t), MissingFactorError);
}

TEST_CASE("factors do not depend on row order") {
    auto rows = two_camera_rows(1.3, 0.01, 60);
    const auto t = estimate_correction_factors(rows, 1);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 5; ++i) {
        std::shuffle(rows.begin(), rows.end(), rng);
        CHECK(estimate_correction_factors(rows, 1) == t);
    }
}

TEST_CASE("table text persistence") {
    const auto t = estimate_correction_factors(two_camera_rows(1.234, 0.01, 30), 1);
    CHECK(correction_from_text(to_text(t)) == t);
    testing::TempDir dir("corr");
    save_correction(dir / "c.txt", t);
    CHECK(load_correction(dir / "c.txt") == t);
    CHECK_THROWS_AS(correction_from_text("reference=1\ncamera.1=1.5\n"), CompatibilityError);
    CHECK_THROWS_AS(correction_from_text("camera.1=1\n"), CompatibilityError);
    CHECK_THROWS_AS(correction_from_text("reference=1\ncamera.1=1\ncamera.2=-3\n"), CompatibilityError);
}
