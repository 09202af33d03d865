// gaitreid command-line front end.

#include "gaitreid/calibration.hpp"
#include "gaitreid/csv.hpp"
#include "gaitreid/error.hpp"
#include "gaitreid/evaluation.hpp"
#include "gaitreid/features.hpp"
#include "gaitreid/gbdt/model_io.hpp"
#include "gaitreid/landmarks.hpp"
#include "gaitreid/pipeline.hpp"
#include "gaitreid/synth.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace gaitreid;

namespace {

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    bool deterministic = false;
    std::string out;
    std::optional<int> threads;
    std::vector<std::string> inputs;
};

PipelineConfig resolve(const Globals& g) {
    PipelineConfig c = g.config.empty() ? PipelineConfig{} : load_config(g.config);
    if (g.seed) c.seed = c.params.seed = *g.seed;
    if (g.deterministic) c.params.deterministic = true;
    if (!g.out.empty()) c.output_dir = g.out;
    if (g.threads) c.params.num_threads = *g.threads;
    if (!g.inputs.empty()) c.inputs.assign(g.inputs.begin(), g.inputs.end());
    return c;
}

void print_split(const DatasetSplit& s) {
    std::cout << "split: train " << s.train.size() << " rows / " << s.train_videos.size() << " videos, validation "
              << s.validation.size() << " rows / " << s.validation_videos.size() << " videos, test " << s.test.size()
              << " rows / " << s.test_videos.size() << " videos\n";
}

std::string predictions_csv(const gbdt::BoostedEnsemble& model, const std::vector<GaitFeatureRow>& rows,
                            const std::vector<std::vector<double>>& probs) {
    std::ostringstream out;
    out << "VIDEO_ID,CAMERA_ID,FRAME_NO,PREDICTED";
    for (int l : model.class_labels) out << ",P_" << l;
    out << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << rows[i].video_id << ',' << rows[i].camera_id << ',' << rows[i].frame_no << ','
            << model.class_labels[gbdt::argmax(probs[i])];
        for (double p : probs[i]) out << ',' << csv::format_double(p);
        out << '\n';
    }
    return out.str();
}

int run(int argc, char** argv) {
    CLI::App app{"Gait-based person re-identification toolkit"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "key=value configuration file");
    app.add_option("--seed", g.seed, "random seed (overrides the config)");
    app.add_flag("--deterministic", g.deterministic, "deterministic training (always on; recorded in the model)");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);

    std::function<int()> action;
    auto add = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--input", g.inputs, "landmark CSV files (override the config)");
        return sub;
    };

    auto* ingest = add("ingest", "parse and validate landmark CSVs");
    ingest->callback([&] {
        action = [&] {
            auto c = resolve(g);
            IngestionReport ing;
            ExtractionReport ext;
            const auto ds = load_features(c, &ing, &ext);
            std::cout << "frames: " << ing.total << " kept: " << ing.kept << " dropped: " << ing.dropped
                      << " degenerate: " << ext.degenerate << " videos: " << ds.manifest.size() << '\n';
            for (const auto& [reason, n] : ing.drop_reasons) std::cout << "  " << reason << ": " << n << '\n';
            return 0;
        };
    });

    auto* features = add("features", "extract gait features");
    bool correlation = false;
    features->add_flag("--correlation", correlation, "also write the feature correlation matrix");
    features->callback([&] {
        action = [&] {
            auto c = resolve(g);
            const auto ds = load_features(c);
            write_feature_csv(c.output_dir / "features.csv", ds.rows);
            std::cout << "wrote " << ds.rows.size() << " rows to " << (c.output_dir / "features.csv").string() << '\n';
            if (correlation) {
                const auto m = feature_correlation(ds.rows);
                std::ostringstream out;
                out << "FEATURE";
                for (auto n : kFeatureNames) out << ',' << n;
                out << '\n';
                for (std::size_t a = 0; a < kFeatureCount; ++a) {
                    out << kFeatureNames[a];
                    for (std::size_t b = 0; b < kFeatureCount; ++b) {
                        out << ',';
                        if (m[a][b]) out << csv::format_double(*m[a][b]);
                    }
                    out << '\n';
                }
                csv::write_text(c.output_dir / "correlation.csv", out.str());
            }
            return 0;
        };
    });

    auto* calibrate = add("calibrate", "estimate per-camera correction factors from the training split");
    calibrate->callback([&] {
        action = [&] {
            auto c = resolve(g);
            c.normalize = false;
            c.calibrate = true;
            const auto prepared = prepare_training(c);
            save_correction(c.output_dir / "correction.txt", *prepared.correction);
            for (const auto& [cam, f] : prepared.correction->factors)
                std::cout << "camera " << cam << ": " << csv::format_double(f) << '\n';
            return 0;
        };
    });

    auto* train = add("train", "train a model and write it with its sidecar files");
    train->callback([&] {
        action = [&] {
            const auto art = run_train(resolve(g));
            print_split(art.data);
            const auto& log = art.result.log;
            if (!log.train_loss.empty()) std::cout << "final train loss: " << log.train_loss.back() << '\n';
            if (!log.valid_loss.empty()) std::cout << "final validation loss: " << log.valid_loss.back() << '\n';
            std::cout << "model: " << art.model.string() << '\n';
            return 0;
        };
    });

    auto* tune = add("tune", "random hyperparameter search on validation log-loss");
    std::optional<int> trials;
    tune->add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
    tune->callback([&] {
        action = [&] {
            auto c = resolve(g);
            if (trials) c.tune_trials = *trials;
            const auto r = run_tune(c);
            std::cout << "best validation loss " << r.best_loss << " with:\n" << to_params_text(r.best);
            return 0;
        };
    });

    std::string model_path;
    auto* predict = add("predict", "per-frame predictions");
    predict->add_option("--model", model_path, "model file")->required();
    predict->callback([&] {
        action = [&] {
            auto c = resolve(g);
            const auto model = gbdt::load_model(model_path);
            const auto rows = load_features(c).rows;
            const auto probs = model.predict_proba_batch(prepare_inputs(model, rows, c.dedupe_shr), c.params.num_threads);
            csv::write_text(c.output_dir / "predictions.csv", predictions_csv(model, rows, probs));
            std::cout << "wrote " << rows.size() << " predictions\n";
            return 0;
        };
    });

    auto* evaluate = add("evaluate", "score the test split and write report.csv and confusion.csv");
    evaluate->add_option("--model", model_path, "model file")->required();
    evaluate->callback([&] {
        action = [&] {
            const auto r = run_evaluate(resolve(g), model_path);
            std::cout << render_table(r.report);
            return 0;
        };
    });

    auto* reid = add("reid", "max-vote identity per track (video, camera)");
    reid->add_option("--model", model_path, "model file")->required();
    reid->callback([&] {
        action = [&] {
            auto c = resolve(g);
            const auto model = gbdt::load_model(model_path);
            const auto rows = load_features(c).rows;
            const auto probs = model.predict_proba_batch(prepare_inputs(model, rows, c.dedupe_shr), c.params.num_threads);
            const auto tracks = vote_tracks(rows, probs, model.class_labels);
            std::ostringstream out;
            out << "VIDEO_ID,CAMERA_ID,FRAMES,PREDICTED\n";
            for (const auto& t : tracks) {
                out << t.video_id << ',' << t.camera_id << ',' << t.frames << ',' << t.predicted << '\n';
                std::cout << "video " << t.video_id << " camera " << t.camera_id << " -> person " << t.predicted << '\n';
            }
            csv::write_text(c.output_dir / "reid.csv", out.str());
            return 0;
        };
    });

    auto* bench = add("bench", "time and memory of training");
    int repetitions = 3;
    std::size_t bench_rows = 9974;
    bench->add_option("--repetitions", repetitions, "training runs")->check(CLI::PositiveNumber);
    bench->add_option("--rows", bench_rows, "rows of synthetic data when no input is given");
    bench->callback([&] {
        action = [&] {
            auto c = resolve(g);
            gbdt::LabeledData data;
            if (c.inputs.empty()) {
                data = synthetic_benchmark_data(bench_rows, c.seed);
            } else {
                auto prepared = prepare_training(c);
                data = std::move(prepared.train);
            }
            const auto report = benchmark_training(data, c.params, repetitions);
            csv::write_text(c.output_dir / "bench.csv", to_bench_csv(report));
            csv::write_text(c.output_dir / "bench.json", to_bench_json(report));
            std::cout << report.rows << " rows x " << report.features << " features: median " << report.median_seconds
                      << " s, peak +" << report.median_peak_mb << " MB\n";
            return 0;
        };
    });

    auto* synth = app.add_subcommand("synth", "generate a synthetic multi-camera landmark dataset");
    int persons = 4, cams = 4, frames = 200, videos = 1;
    double spread = 0.1, sigma = 0.005, dropout = 0.0;
    std::vector<double> scales;
    synth->add_option("--persons", persons)->check(CLI::PositiveNumber);
    synth->add_option("--cameras", cams)->check(CLI::PositiveNumber);
    synth->add_option("--frames", frames, "frames per walk")->check(CLI::PositiveNumber);
    synth->add_option("--videos", videos, "walks per (person, camera) pair")->check(CLI::PositiveNumber);
    synth->add_option("--spread", spread, "inter-person separation");
    synth->add_option("--sigma", sigma, "coordinate noise");
    synth->add_option("--dropout", dropout, "per-frame drop probability");
    synth->add_option("--scales", scales, "camera scales, camera 1 first")->delimiter(',');
    synth->callback([&] {
        action = [&] {
            const std::uint64_t seed = g.seed.value_or(42);
            const fs::path out = g.out.empty() ? fs::path("synth") : fs::path(g.out);
            std::vector<PersonProfile> profiles;
            for (int p = 1; p <= persons; ++p) profiles.push_back(generate_person_profile(seed, p, spread, sigma));
            std::vector<SynthCameraSpec> specs;
            for (int c = 1; c <= cams; ++c) {
                const double scale = c <= static_cast<int>(scales.size()) ? scales[c - 1] : 1.0 + 0.25 * (c - 1);
                specs.push_back({c, scale, frames, dropout});
            }
            const auto ds = generate_multicamera_dataset(profiles, specs, seed, videos);
            write_landmark_csv(out / "landmarks.csv", ds.data.rows);
            csv::write_text(out / "truth.csv", to_truth_csv(ds));
            std::cout << "wrote " << ds.data.rows.size() << " frames in " << ds.data.manifest.size() << " videos to "
                      << (out / "landmarks.csv").string() << '\n';
            return 0;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return action ? action() : 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const StageError& e) {
        std::cerr << "error in stage " << e.what() << '\n';
        return e.exit_code();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const CompatibilityError& e) {
        std::cerr << "model error: " << e.what() << '\n';
        return 4;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const ContractViolation& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
