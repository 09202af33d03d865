// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "gaitreid/calibration.hpp"
#include "gaitreid/evaluation.hpp"
#include "gaitreid/features.hpp"
#include "gaitreid/gbdt/ensemble.hpp"
#include "gaitreid/gbdt/model_io.hpp"
#include "gaitreid/gbdt/objective.hpp"
#include "gaitreid/pipeline.hpp"
#include "gaitreid/synth.hpp"
#include "oracle_tree.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace gaitreid;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string fmt(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

gbdt::TrainParams no_sampling(int iterations) {
    auto p = gbdt::TrainParams::without_sampling();
    p.num_iterations = iterations;
    return p;
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(101);
    int trees = 0;
    for (int d = 0; d < 50; ++d) {
        const auto ds = testing::random_dataset(rng, 200, 5, 2, 4);
        auto p = no_sampling(1);
        p.num_leaves = 2 + static_cast<int>(rng() % 30);
        p.min_child_samples = 1 + static_cast<int>(rng() % 10);
        const auto r = gbdt::train(ds.data, p);
        const auto n = ds.data.features.rows();
        const auto K = r.model.num_classes();
        const double pk = 1.0 / static_cast<double>(K);
        for (std::size_t k = 0; k < K; ++k) {
            std::vector<double> g(n), h(n, pk * (1.0 - pk));
            for (std::size_t i = 0; i < n; ++i) g[i] = pk - (ds.data.labels[i] == r.model.class_labels[k] ? 1.0 : 0.0);
            const auto o = testing::oracle_tree(ds.data.features, g, h, {p.num_leaves, p.min_child_samples, gbdt::kLeafLambda});
            const auto why = testing::compare_trees(r.model.trees[0][k], o, 1e-9);
            if (!why.empty()) return {false, "dataset " + std::to_string(d) + " class " + std::to_string(k) + ": " + why};
            ++trees;
        }
    }
    return {true, std::to_string(trees) + " trees on 50 datasets match"};
}

Outcome gradient_check() {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(-4, 4);
    double worst = 0.0;
    for (int draw = 0; draw < 1000; ++draw) {
        const std::size_t K = 4 + rng() % 5;
        std::vector<double> z(K);
        for (auto& v : z) v = u(rng);
        const int label = static_cast<int>(rng() % K);
        const auto gh = gbdt::softmax_gradients(z, label);
        const double h = 1e-5;
        for (std::size_t k = 0; k < K; ++k) {
            auto zp = z, zm = z;
            zp[k] += h;
            zm[k] -= h;
            const double fd_g = (gbdt::log_loss(zp, label) - gbdt::log_loss(zm, label)) / (2 * h);
            const double fd_h = (gbdt::softmax_gradients(zp, label)[k].grad - gbdt::softmax_gradients(zm, label)[k].grad) / (2 * h);
            worst = std::max(worst, std::abs(fd_g - gh[k].grad) / std::max(std::abs(fd_g), 1e-3));
            worst = std::max(worst, std::abs(fd_h - gh[k].hess) / std::max(std::abs(fd_h), 1e-3));
        }
    }
    return {worst <= 1e-5, "worst relative error " + fmt(worst)};
}

Outcome loss_monotone() {
    double worst_step = -1e300;
    for (int d = 0; d < 3; ++d) {
        const auto data = testing::blobs(300 + static_cast<std::uint64_t>(d), 300 + 100 * static_cast<std::size_t>(d),
                                         3 + static_cast<std::size_t>(d), 3 + d, 0.5 + 0.2 * d);
        const auto r = gbdt::train(data, no_sampling(100));
        if (r.log.train_loss.size() != 100) return {false, "log has the wrong length"};
        for (std::size_t i = 1; i < 100; ++i)
            worst_step = std::max(worst_step, r.log.train_loss[i] - r.log.train_loss[i - 1]);
    }
    return {worst_step <= 1e-12, "largest per-step change " + fmt(worst_step)};
}

Outcome goss_degeneration() {
    const auto data = testing::blobs(404, 500, 5, 4, 0.6);
    auto goss = no_sampling(30);
    goss.goss_enabled = true;
    goss.goss_top_rate = 1.0;
    goss.goss_other_rate = 0.0;
    const auto a = gbdt::to_json_text(gbdt::train(data, goss).model);
    const auto b = gbdt::to_json_text(gbdt::train(data, no_sampling(30)).model);
    return {a == b, a == b ? "model files identical (" + std::to_string(a.size()) + " bytes)" : "model files differ"};
}

Outcome efb_lossless() {
    std::mt19937_64 rng(505);
    gbdt::LabeledData data;
    data.features = gbdt::FeatureMatrix(600, 5);
    for (std::size_t r = 0; r < 600; ++r) {
        const auto k = rng() % 6;  // 5 means all indicators off
        if (k < 5) data.features(r, k) = 1.0;
        data.labels.push_back(static_cast<int>(k % 3));
    }
    auto on = no_sampling(30), off = no_sampling(30);
    on.efb_enabled = true;
    on.efb_max_conflict = 0.0;
    off.efb_enabled = false;
    const auto a = gbdt::train(data, on).model, b = gbdt::train(data, off).model;
    const auto binned = gbdt::BinnedDataset::build(data.features, 255, true, 0.0);
    const auto bundles = binned.plan.bundles.size();
    std::size_t mismatches = 0;
    for (std::size_t r = 0; r < 600; ++r) mismatches += a.predict_proba(data.features.row(r)) != b.predict_proba(data.features.row(r));
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (int probe = 0; probe < 1000; ++probe) {
        std::vector<double> x(5);
        for (auto& v : x) v = rng() % 2 ? u(rng) : 0.0;
        mismatches += a.predict_proba(x) != b.predict_proba(x);
    }
    return {mismatches == 0 && bundles < 5,
            std::to_string(bundles) + " bundle(s) for 5 features, " + std::to_string(mismatches) + " differing predictions"};
}

Outcome correction_recovery() {
    const double scales[4] = {1.0, 1.02, 1.78, 1.56};
    std::vector<PersonProfile> persons;
    for (int id = 1; id <= 4; ++id) persons.push_back(generate_person_profile(606, id, 0.1, 0.005));
    std::vector<SynthCameraSpec> cams;
    for (int c = 0; c < 4; ++c) cams.push_back({c + 1, scales[c], 500, 0.0});
    const auto rows = extract_dataset(generate_multicamera_dataset(persons, cams, 606).data).rows;
    const auto table = estimate_correction_factors(rows, 1);
    double worst_factor = 0.0;
    for (int c = 0; c < 4; ++c) worst_factor = std::max(worst_factor, std::abs(table.factor(c + 1) / scales[c] - 1.0));

    // Per-camera mean corrected height over all persons, against the reference camera.
    const auto corrected = apply_correction(rows, table);
    std::map<int, std::pair<double, std::size_t>> sums;
    for (const auto& r : corrected) {
        sums[r.camera_id].first += r[Feature::Height];
        ++sums[r.camera_id].second;
    }
    const double ref = sums[1].first / static_cast<double>(sums[1].second);
    double worst_mean = 0.0;
    for (const auto& [cam, s] : sums)
        worst_mean = std::max(worst_mean, std::abs(s.first / static_cast<double>(s.second) / ref - 1.0));
    return {worst_factor <= 0.01 && worst_mean <= 1e-3,
            "worst factor error " + fmt(worst_factor) + ", worst corrected-mean gap " + fmt(worst_mean)};
}

// 4 persons x 4 cameras x 3 walks; the last walk of every pair is the test set.
PipelineConfig end_to_end_config(const fs::path& dir) {
    const double scales[4] = {1.0, 1.02, 1.78, 1.56};
    std::vector<PersonProfile> persons;
    for (int id = 1; id <= 4; ++id) persons.push_back(generate_person_profile(707, id, 0.1, 0.005));
    std::vector<SynthCameraSpec> cams;
    for (int c = 0; c < 4; ++c) cams.push_back({c + 1, scales[c], 200, 0.0});
    const auto ds = generate_multicamera_dataset(persons, cams, 707, 3);
    write_landmark_csv(dir / "walks.csv", ds.data.rows);
    PipelineConfig c;
    c.inputs = {dir / "walks.csv"};
    c.output_dir = dir / "out";
    c.seed = c.params.seed = 707;
    std::vector<int> test;
    for (std::size_t p = 0; p < 4; ++p)
        for (std::size_t cam = 0; cam < 4; ++cam) test.push_back(synth_video_id(p, cam, 4, 2, 3));
    c.split.test_videos = test;
    return c;
}

Outcome end_to_end() {
    testing::TempDir dir("acceptance_e2e");
    const auto c = end_to_end_config(dir.path());
    const auto art = run_train(c);
    const auto ev = run_evaluate(c, art.model);
    const double track = ev.report.track_accuracy.value_or(0.0);
    return {ev.report.accuracy >= 0.9 && track == 1.0,
            "frame accuracy " + fmt(ev.report.accuracy) + ", track accuracy " + fmt(track) + " over " +
                std::to_string(ev.tracks.size()) + " tracks"};
}

Outcome formula_suite() {
    doctest::Context ctx;
    ctx.setOption("source-file", "*test_features.cpp,*test_calibration.cpp");
    ctx.setOption("minimal", true);
    ctx.setOption("no-version", true);
    const int rc = ctx.run();
    return {rc == 0, rc == 0 ? "feature and calibration examples pass" : "see doctest output above"};
}

Outcome metric_identities() {
    std::mt19937_64 rng(909);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 2 + static_cast<int>(rng() % 7);
        const std::size_t n = 1 + rng() % 300;
        std::vector<int> labels, a(n), p(n);
        for (int i = 1; i <= k; ++i) labels.push_back(i);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = labels[rng() % labels.size()];
            p[i] = rng() % 2 ? a[i] : labels[rng() % labels.size()];
        }
        const auto m = confusion_matrix(p, a, labels);
        const auto r = classification_report(m);
        const double acc = static_cast<double>(m.trace()) / static_cast<double>(m.total);
        if (std::abs(r.accuracy - acc) > 1e-15 || std::abs(r.micro_precision - acc) > 1e-12 ||
            std::abs(r.micro_recall - acc) > 1e-12)
            return {false, "identity broken on matrix " + std::to_string(trial)};
    }
    const auto m = confusion_matrix(std::vector<int>{1, 1, 2, 2}, std::vector<int>{1, 1, 1, 2}, {1, 2});
    const auto r = classification_report(m);
    const bool grid = m.counts == std::vector<std::vector<std::uint64_t>>{{2, 1}, {0, 1}};
    const bool hand = r.classes[0].precision == 1.0 && r.classes[0].recall == 2.0 / 3.0 &&
                      std::abs(r.classes[0].f1 - 0.8) <= 1e-15 && r.classes[1].precision == 0.5 &&
                      r.classes[1].recall == 1.0 && r.accuracy == 0.75;
    return {grid && hand, grid && hand ? "100 matrices ok; worked example exact" : "worked example differs"};
}

Outcome engineering_budget() {
    const auto data = synthetic_benchmark_data(9974, 42);
    const auto report = benchmark_training(data, gbdt::TrainParams{}, 1);
    const bool ok = report.rows == 9974 && report.features == 7 && report.median_seconds < 30.0 &&
                    report.median_peak_mb < 600.0;
    return {ok, std::to_string(report.rows) + "x" + std::to_string(report.features) + " rows, " +
                    fmt(report.median_seconds) + " s, peak +" + fmt(report.median_peak_mb) + " MB"};
}

Outcome determinism() {
    testing::TempDir dir("acceptance_det");
    auto c = end_to_end_config(dir.path());
    c.params.num_iterations = 30;
    std::vector<std::string> files;
    for (int threads : {1, 1, 4, 4}) {
        c.params.num_threads = threads;
        c.output_dir = dir / ("out" + std::to_string(files.size()));
        files.push_back(slurp(run_train(c).model));
    }
    const bool same = std::all_of(files.begin(), files.end(), [&](const std::string& f) { return f == files[0]; });
    return {same, same ? "4 runs (1,1,4,4 threads) byte-identical" : "model files differ"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"oracle tree equivalence", oracle_equivalence},
        {"softmax gradient check", gradient_check},
        {"loss monotonicity", loss_monotone},
        {"GOSS degeneration at p = 1", goss_degeneration},
        {"EFB losslessness", efb_lossless},
        {"correction-factor recovery", correction_recovery},
        {"end-to-end synthetic re-identification", end_to_end},
        {"feature and calibration formulas", formula_suite},
        {"metric identities", metric_identities},
        {"engineering budget", engineering_budget},
        {"determinism across thread counts", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !o.pass;
        std::cout << "criterion " << (i + 1) << ": " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first
                  << " - " << o.detail << " [" << std::fixed << std::setprecision(2) << secs << " s]\n"
                  << std::defaultfloat;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
