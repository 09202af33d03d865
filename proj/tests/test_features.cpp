#include <doctest.h>

#include "gaitreid/error.hpp"
#include "gaitreid/features.hpp"
#include "gaitreid/synth.hpp"
#include "test_support.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace gaitreid;
using testing::make_frame;

TEST_CASE("euclidean distance examples") {
    CHECK(euclidean_distance({0, 0}, {0, 0}) == 0.0);
    CHECK(euclidean_distance({0, 0}, {3, 4}) == 5.0);
    CHECK(std::abs(euclidean_distance({0.1, 0.2}, {0.4, 0.6}) - 0.5) <= 1e-12);
    CHECK_THROWS_AS(euclidean_distance({0, std::numeric_limits<double>::infinity()}, {0, 0}), ContractViolation);
}

TEST_CASE("euclidean distance properties on random triples") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 500; ++i) {
        const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
        CHECK(euclidean_distance(a, b) == euclidean_distance(b, a));
        CHECK(euclidean_distance(a, a) == 0.0);
        CHECK(euclidean_distance(a, c) <= euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-12);
    }
}

TEST_CASE("extract_features follows the formulas") {
    const auto f = make_frame();
    const auto r = extract_features(f);
    const double dx_h = 0.30 - 0.50, dy_h = 0.90 - 0.10;
    CHECK(r[Feature::Height] == doctest::Approx(std::sqrt(dx_h * dx_h + dy_h * dy_h)).epsilon(1e-14));
    CHECK(r[Feature::Hand] == euclidean_distance({0.55, 0.20}, {0.58, 0.35}) + euclidean_distance({0.58, 0.35}, {0.60, 0.45}));
    CHECK(r[Feature::Leg] == euclidean_distance({0.54, 0.50}, {0.56, 0.70}) + euclidean_distance({0.56, 0.70}, {0.55, 0.88}));
    CHECK(std::abs(r[Feature::StepLength] - 0.32) <= 1e-12);
    CHECK(std::abs(r[Feature::FootClearance] - 0.12) <= 1e-12);
    CHECK(r[Feature::BodyWideness] == r[Feature::Shr]);
    CHECK(r.person_id == 1);
    CHECK(r.video_id == 1);
}

TEST_CASE("coincident ear and heel give zero height; equal widths give ratio 1") {
    auto f = make_frame();
    f.set(Landmark::LeftHeel, {0.50, 0.10});
    CHECK(extract_features(f)[Feature::Height] == 0.0);

    f = make_frame();
    f.set(Landmark::LeftShoulder, {0.6, 0.2});
    f.set(Landmark::RightShoulder, {0.4, 0.2});
    f.set(Landmark::LeftHip, {0.6, 0.5});
    f.set(Landmark::RightHip, {0.4, 0.5});
    const auto r = extract_features(f);
    CHECK(r[Feature::BodyWideness] == 1.0);
    CHECK(r[Feature::Shr] == 1.0);
}

TEST_CASE("degenerate and incomplete frames") {
    auto f = make_frame();
    f.set(Landmark::RightHip, f.point(Landmark::LeftHip));
    CHECK_THROWS_AS(extract_features(f), DegenerateError);

    LandmarkDataset ds;
    ds.rows = {make_frame(1, 0), f, make_frame(1, 2)};
    ds.rows[1].frame_no = 1;
    ExtractionReport rep;
    const auto out = extract_dataset(ds, &rep);
    CHECK(rep.extracted == 2);
    CHECK(rep.degenerate == 1);
    CHECK(out.rows.size() == 2);

    auto g = make_frame();
    g.coords[0] = std::nullopt;
    CHECK_THROWS_AS(extract_features(g), ContractViolation);
}

TEST_CASE("translation invariance and scale equivariance") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1, 1), s(0.2, 3.0);
    const auto base = make_frame();
    const auto r0 = extract_features(base);
    for (int i = 0; i < 50; ++i) {
        const double ox = u(rng), oy = u(rng), k = s(rng);
        auto t = base, sc = base;
        for (std::size_t c = 0; c < kCoordinateCount; ++c) {
            t.coords[c] = *base.coords[c] + (c % 2 ? oy : ox);
            sc.coords[c] = *base.coords[c] * k;
        }
        const auto rt = extract_features(t), rs = extract_features(sc);
        for (std::size_t f = 0; f < 5; ++f) {
            CHECK(std::abs(rt.values[f] - r0.values[f]) <= 1e-12);
            CHECK(std::abs(rs.values[f] - k * r0.values[f]) <= 1e-12 * k);
        }
        CHECK(std::abs(rs[Feature::BodyWideness] - r0[Feature::BodyWideness]) <= 1e-12);
        CHECK(rs[Feature::Shr] == rs[Feature::BodyWideness]);
    }
}

TEST_CASE("normalization fit and apply") {
    GaitFeatureRow a, b;
    a.values = {0.2, 1, 1, 1, 1, 1, 1};
    b.values = {0.6, 1, 1, 2, 2, 2, 2};
    const auto single = fit_normalization({a});
    CHECK(single.min == a.values);
    CHECK(single.max == a.values);

    const auto st = fit_normalization({a, b});
    CHECK(st.min[0] == 0.2);
    CHECK(st.max[0] == 0.6);
    CHECK(st.degenerate(1));
    CHECK_FALSE(st.degenerate(0));

    GaitFeatureRow mid;
    mid.values = {0.4, 1, 1, 1.5, 1, 2, 3};
    const auto out = normalize_features({a, b, mid}, st);
    CHECK(out[0].values[0] == 0.0);
    CHECK(out[1].values[0] == 1.0);
    CHECK(std::abs(out[2].values[0] - 0.5) <= 1e-12);
    CHECK(out[2].values[3] == 0.5);
    CHECK(out[0].values[1] == 0.0);  // constant feature
    CHECK(out[2].values[6] == 2.0);  // no clipping
    CHECK_THROWS_AS(fit_normalization({}), EmptyInputError);
}

TEST_CASE("fitted rows normalize into the unit interval and stats persist exactly") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-5, 5);
    std::vector<GaitFeatureRow> rows(40);
    for (auto& r : rows)
        for (auto& v : r.values) v = u(rng);
    const auto st = fit_normalization(rows);
    for (const auto& r : normalize_features(rows, st))
        for (double v : r.values) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    CHECK(normalization_from_text(to_text(st)) == st);
    testing::TempDir dir("norm");
    save_normalization(dir / "n.txt", st);
    CHECK(load_normalization(dir / "n.txt") == st);
    CHECK_THROWS_AS(normalization_from_text("HEIGHT.min=1\n"), CompatibilityError);
}

TEST_CASE("correlation") {
    std::vector<GaitFeatureRow> rows(30);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 1);
    for (auto& r : rows) {
        r.values[0] = u(rng);
        r.values[1] = -r.values[0];
        r.values[2] = u(rng);
        r.values[3] = 0.7;  // constant
    }
    const auto m = feature_correlation(rows);
    CHECK(*m[0][0] == 1.0);
    CHECK(std::abs(*m[0][1] + 1.0) <= 1e-12);
    CHECK(*m[0][2] == *m[2][0]);
    CHECK_FALSE(m[3][3].has_value());
    CHECK_FALSE(m[0][3].has_value());
    CHECK_THROWS_AS(feature_correlation({rows[0]}), EmptyInputError);
}

TEST_CASE("height and leg correlate on synthetic proportional bodies") {
    std::vector<PersonProfile> persons;
    for (int p = 1; p <= 6; ++p) persons.push_back(generate_person_profile(1, p, 0.1, 0.002));
    const auto ds = generate_multicamera_dataset(persons, {{1, 1.0, 100, 0.0}}, 1);
    const auto rows = extract_dataset(ds.data).rows;
    const auto m = feature_correlation(rows);

    // Direct Pearson as an independent check.
    double mh = 0, ml = 0;
    for (const auto& r : rows) {
        mh += r[Feature::Height];
        ml += r[Feature::Leg];
    }
    mh /= static_cast<double>(rows.size());
    ml /= static_cast<double>(rows.size());
    double sxy = 0, sxx = 0, syy = 0;
    for (const auto& r : rows) {
        sxy += (r[Feature::Height] - mh) * (r[Feature::Leg] - ml);
        sxx += (r[Feature::Height] - mh) * (r[Feature::Height] - mh);
        syy += (r[Feature::Leg] - ml) * (r[Feature::Leg] - ml);
    }
    const double direct = sxy / std::sqrt(sxx * syy);
    CHECK(direct >= 0.9);
    CHECK(std::abs(*m[0][2] - direct) <= 1e-9);
}

TEST_CASE("feature CSV round-trip and model inputs") {
    testing::TempDir dir("feat");
    std::vector<GaitFeatureRow> rows = {extract_features(make_frame(1, 0)), extract_features(make_frame(2, 1))};
    rows[1].person_id = std::nullopt;
    write_feature_csv(dir / "f.csv", rows);
    const auto ds = parse_feature_csv(dir / "f.csv");
    CHECK(ds.rows == rows);
    CHECK(model_feature_names(false).size() == 7);
    CHECK(model_feature_names(true).size() == 6);
    CHECK(model_feature_names(true).back() == "BODY_WIDENESS");
    CHECK(model_inputs(rows[0], true).size() == 6);
}
