#include "gaitreid/pipeline.hpp"

#include "gaitreid/csv.hpp"
#include "gaitreid/error.hpp"
#include "gaitreid/gbdt/model_io.hpp"
#include "gaitreid/gbdt/rng.hpp"
#include "gaitreid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace gaitreid {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kStreamSplit = 8;
constexpr std::uint64_t kStreamValidation = 9;
constexpr std::uint64_t kStreamTune = 10;

// Runs one stage and tags any failure with the stage name and CLI exit code.
template <typename F>
auto stage(const std::string& name, F&& f, const std::string& context = {}) -> decltype(f()) {
    const std::string prefix = context.empty() ? "" : context + ": ";
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const ConfigError& e) {
        throw StageError(name, prefix + e.what(), 2);
    } catch (const CompatibilityError& e) {
        throw StageError(name, prefix + e.what(), 4);
    } catch (const DataError& e) {
        throw StageError(name, prefix + e.what(), 3);
    } catch (const ContractViolation& e) {
        throw StageError(name, prefix + e.what(), 3);
    }
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : value + ",") {
        if (c == ',' || c == ';') {
            cur = trim(cur);
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

long long to_int(const std::string& key, const std::string& value) {
    const auto v = csv::parse_int(trim(value));
    if (!v) throw ConfigError(key + ": expected an integer, got '" + value + "'");
    return *v;
}

double to_double(const std::string& key, const std::string& value) {
    const auto v = csv::parse_double(trim(value));
    if (!v || !std::isfinite(*v)) throw ConfigError(key + ": expected a number, got '" + value + "'");
    return *v;
}

bool to_bool(const std::string& key, const std::string& value) {
    const auto v = trim(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

Range to_range(const std::string& key, const std::string& value) {
    const auto parts = split_list(value);
    if (parts.size() == 1) {
        const double v = to_double(key, parts[0]);
        return {v, v};
    }
    if (parts.size() != 2) throw ConfigError(key + ": expected 'lo,hi'");
    return {to_double(key, parts[0]), to_double(key, parts[1])};
}

std::vector<int> to_videos(const std::string& key, const std::string& value) {
    std::vector<int> out;
    for (const auto& p : split_list(value)) out.push_back(static_cast<int>(to_int(key, p)));
    return out;
}

void shuffle(std::vector<int>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[gbdt::uniform_below(rng, i)]);
}

std::size_t round_count(double x) { return static_cast<std::size_t>(std::llround(x)); }

std::string training_log_csv(const gbdt::TrainingLog& log) {
    std::ostringstream out;
    out << "iteration,train_loss,valid_loss\n";
    for (std::size_t i = 0; i < log.train_loss.size(); ++i) {
        out << i + 1 << ',' << csv::format_double(log.train_loss[i]) << ',';
        if (i < log.valid_loss.size()) out << csv::format_double(log.valid_loss[i]);
        out << '\n';
    }
    return out.str();
}

std::string split_csv(const DatasetSplit& s) {
    std::map<int, std::pair<std::string, std::size_t>> videos;
    for (int v : s.train_videos) videos[v].first = "train";
    for (int v : s.validation_videos) videos[v].first = "validation";
    for (int v : s.test_videos) videos[v].first = "test";
    for (const auto* rows : {&s.train, &s.validation, &s.test})
        for (const auto& r : *rows) ++videos[r.video_id].second;
    std::ostringstream out;
    out << "VIDEO_ID,PARTITION,ROWS\n";
    for (const auto& [v, info] : videos) out << v << ',' << info.first << ',' << info.second << '\n';
    return out.str();
}

std::string tracks_csv(const std::vector<TrackResult>& tracks) {
    std::ostringstream out;
    out << "VIDEO_ID,CAMERA_ID,FRAMES,PREDICTED,TRUE\n";
    for (const auto& t : tracks) {
        out << t.video_id << ',' << t.camera_id << ',' << t.frames << ',' << t.predicted << ',';
        if (t.true_label) out << *t.true_label;
        out << '\n';
    }
    return out.str();
}

// Moves n videos from train to validation in seeded shuffle order. Videos whose (person, camera)
// pair would lose its last training video are taken only when nothing else is left, so
// calibration keeps seeing every pair the training split had.
void carve_validation(DatasetSplit& out, std::size_t n, const std::vector<ManifestEntry>& manifest,
                      std::uint64_t seed) {
    std::map<int, std::pair<std::optional<int>, int>> pair_of;
    for (const auto& m : manifest) pair_of[m.video_id] = {m.person_id, m.camera_id};
    std::vector<int> order = out.train_videos;
    std::sort(order.begin(), order.end());
    auto rng = gbdt::derived_rng(seed, {kStreamValidation});
    shuffle(order, rng);

    std::map<std::pair<std::optional<int>, int>, std::size_t> remaining;
    for (int v : order) ++remaining[pair_of[v]];
    std::set<int> chosen;
    for (int v : order) {
        if (chosen.size() == n) break;
        auto& left = remaining[pair_of[v]];
        if (left > 1) {
            --left;
            chosen.insert(v);
        }
    }
    for (int v : order) {
        if (chosen.size() == n) break;
        chosen.insert(v);
    }
    out.validation_videos.assign(chosen.begin(), chosen.end());
    std::vector<int> train;
    for (int v : out.train_videos)
        if (!chosen.count(v)) train.push_back(v);
    out.train_videos = std::move(train);
}

}  // namespace

void SearchSpace::validate() const {
    const std::pair<const char*, Range> ranges[] = {
        {"num_leaves", num_leaves},   {"learning_rate", learning_rate},         {"colsample_bytree", colsample_bytree},
        {"subsample", subsample},     {"subsample_freq", subsample_freq},       {"min_child_samples", min_child_samples},
    };
    for (const auto& [name, r] : ranges)
        if (!(r.lo <= r.hi)) throw ConfigError(std::string("empty search range for ") + name);
    if (num_leaves.lo < 2) throw ConfigError("num_leaves range must start at >= 2");
    if (!(learning_rate.lo > 0.0) || learning_rate.hi > 1.0) throw ConfigError("learning_rate range must lie in (0, 1]");
    if (!(colsample_bytree.lo > 0.0) || colsample_bytree.hi > 1.0)
        throw ConfigError("colsample_bytree range must lie in (0, 1]");
    if (!(subsample.lo > 0.0) || subsample.hi > 1.0) throw ConfigError("subsample range must lie in (0, 1]");
    if (subsample_freq.lo < 0) throw ConfigError("subsample_freq range must start at >= 0");
    if (min_child_samples.lo < 1) throw ConfigError("min_child_samples range must start at >= 1");
}

SearchSpace SearchSpace::point(const gbdt::TrainParams& p) {
    SearchSpace s;
    s.num_leaves = {double(p.num_leaves), double(p.num_leaves)};
    s.learning_rate = {p.learning_rate, p.learning_rate};
    s.colsample_bytree = {p.colsample_bytree, p.colsample_bytree};
    s.subsample = {p.subsample, p.subsample};
    s.subsample_freq = {double(p.subsample_freq), double(p.subsample_freq)};
    s.min_child_samples = {double(p.min_child_samples), double(p.min_child_samples)};
    return s;
}

void PipelineConfig::validate() const {
    if (inputs.empty()) throw ConfigError("no input files configured");
    if (!(smoothing_alpha >= 0.0 && smoothing_alpha <= 1.0)) throw ConfigError("smoothing_alpha must lie in [0, 1]");
    if (tune_trials < 1) throw ConfigError("tune.trials must be >= 1");
    params.validate();
    search.validate();

    const auto& s = split;
    for (const auto* f : {&s.train_fraction, &s.validation_fraction, &s.test_fraction})
        if (*f && !(**f >= 0.0 && **f <= 1.0)) throw ConfigError("split fractions must lie in [0, 1]");
    if (s.train_fraction && s.validation_fraction && s.test_fraction &&
        std::abs(*s.train_fraction + *s.validation_fraction + *s.test_fraction - 1.0) > 1e-9)
        throw ConfigError("split fractions must sum to 1");

    std::set<int> seen;
    for (const auto* list : {&s.train_videos, &s.validation_videos, &s.test_videos}) {
        if (!*list) continue;
        for (int v : **list)
            if (!seen.insert(v).second) throw ConfigError("video " + std::to_string(v) + " is listed in two partitions");
    }
}

PipelineConfig parse_config(const std::string& text, const fs::path& base_dir) {
    PipelineConfig c;
    auto& p = c.params;
    const std::map<std::string, std::function<void(const std::string&, const std::string&)>> handlers = {
        {"input",
         [&](auto&, auto& v) {
             for (const auto& path : split_list(v)) {
                 fs::path f = path;
                 c.inputs.push_back(f.is_relative() && !base_dir.empty() ? base_dir / f : f);
             }
         }},
        {"reference_camera", [&](auto& k, auto& v) { c.reference_camera = int(to_int(k, v)); }},
        {"calibrate", [&](auto& k, auto& v) { c.calibrate = to_bool(k, v); }},
        {"normalize", [&](auto& k, auto& v) { c.normalize = to_bool(k, v); }},
        {"smoothing_alpha", [&](auto& k, auto& v) { c.smoothing_alpha = to_double(k, v); }},
        {"dedupe_shr", [&](auto& k, auto& v) { c.dedupe_shr = to_bool(k, v); }},
        {"output_dir",
         [&](auto&, auto& v) {
             fs::path f = trim(v);
             c.output_dir = f.is_relative() && !base_dir.empty() ? base_dir / f : f;
         }},
        {"seed",
         [&](auto& k, auto& v) {
             const auto s = to_int(k, v);
             if (s < 0) throw ConfigError("seed must be >= 0");
             c.seed = p.seed = static_cast<std::uint64_t>(s);
         }},
        {"deterministic", [&](auto& k, auto& v) { p.deterministic = to_bool(k, v); }},
        {"threads", [&](auto& k, auto& v) { p.num_threads = int(to_int(k, v)); }},
        {"train_fraction", [&](auto& k, auto& v) { c.split.train_fraction = to_double(k, v); }},
        {"validation_fraction", [&](auto& k, auto& v) { c.split.validation_fraction = to_double(k, v); }},
        {"test_fraction", [&](auto& k, auto& v) { c.split.test_fraction = to_double(k, v); }},
        {"train_videos", [&](auto& k, auto& v) { c.split.train_videos = to_videos(k, v); }},
        {"validation_videos", [&](auto& k, auto& v) { c.split.validation_videos = to_videos(k, v); }},
        {"test_videos", [&](auto& k, auto& v) { c.split.test_videos = to_videos(k, v); }},
        {"num_leaves", [&](auto& k, auto& v) { p.num_leaves = int(to_int(k, v)); }},
        {"learning_rate", [&](auto& k, auto& v) { p.learning_rate = to_double(k, v); }},
        {"colsample_bytree", [&](auto& k, auto& v) { p.colsample_bytree = to_double(k, v); }},
        {"subsample", [&](auto& k, auto& v) { p.subsample = to_double(k, v); }},
        {"subsample_freq", [&](auto& k, auto& v) { p.subsample_freq = int(to_int(k, v)); }},
        {"min_child_samples", [&](auto& k, auto& v) { p.min_child_samples = int(to_int(k, v)); }},
        {"num_iterations", [&](auto& k, auto& v) { p.num_iterations = int(to_int(k, v)); }},
        {"max_bins", [&](auto& k, auto& v) { p.max_bins = int(to_int(k, v)); }},
        {"goss", [&](auto& k, auto& v) { p.goss_enabled = to_bool(k, v); }},
        {"goss_top_rate", [&](auto& k, auto& v) { p.goss_top_rate = to_double(k, v); }},
        {"goss_other_rate", [&](auto& k, auto& v) { p.goss_other_rate = to_double(k, v); }},
        {"efb", [&](auto& k, auto& v) { p.efb_enabled = to_bool(k, v); }},
        {"efb_max_conflict", [&](auto& k, auto& v) { p.efb_max_conflict = to_double(k, v); }},
        {"tune.trials", [&](auto& k, auto& v) { c.tune_trials = int(to_int(k, v)); }},
        {"tune.num_leaves", [&](auto& k, auto& v) { c.search.num_leaves = to_range(k, v); }},
        {"tune.learning_rate", [&](auto& k, auto& v) { c.search.learning_rate = to_range(k, v); }},
        {"tune.colsample_bytree", [&](auto& k, auto& v) { c.search.colsample_bytree = to_range(k, v); }},
        {"tune.subsample", [&](auto& k, auto& v) { c.search.subsample = to_range(k, v); }},
        {"tune.subsample_freq", [&](auto& k, auto& v) { c.search.subsample_freq = to_range(k, v); }},
        {"tune.min_child_samples", [&](auto& k, auto& v) { c.search.min_child_samples = to_range(k, v); }},
    };
    for (const auto& [key, value] : csv::parse_key_values(text)) {
        const auto it = handlers.find(key);
        if (it == handlers.end()) throw ConfigError("unknown config key '" + key + "'");
        it->second(key, value);
    }
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

DatasetSplit split_dataset(const FeatureDataset& dataset, const PipelineConfig& config) {
    const auto& spec = config.split;
    std::vector<int> videos;
    for (const auto& m : dataset.manifest) videos.push_back(m.video_id);
    const std::set<int> known(videos.begin(), videos.end());

    std::set<int> listed;
    for (const auto* list : {&spec.train_videos, &spec.validation_videos, &spec.test_videos}) {
        if (!*list) continue;
        for (int v : **list) {
            if (!known.count(v)) throw ConfigError("split lists unknown video " + std::to_string(v));
            if (!listed.insert(v).second) throw ConfigError("video " + std::to_string(v) + " is listed in two partitions");
        }
    }

    DatasetSplit out;
    bool validation_may_be_empty = false;
    const bool any_list = spec.train_videos || spec.validation_videos || spec.test_videos;
    if (any_list) {
        std::vector<int> unlisted;
        for (int v : videos)
            if (!listed.count(v)) unlisted.push_back(v);
        out.train_videos = spec.train_videos.value_or(std::vector<int>{});
        out.validation_videos = spec.validation_videos.value_or(std::vector<int>{});
        out.test_videos = spec.test_videos.value_or(std::vector<int>{});
        if (!spec.train_videos)
            out.train_videos.insert(out.train_videos.end(), unlisted.begin(), unlisted.end());
        else if (!spec.test_videos)
            out.test_videos.insert(out.test_videos.end(), unlisted.begin(), unlisted.end());
        if (!spec.validation_videos && !spec.train_videos) {
            // Carve validation from the training videos; here validation_fraction is a share of them.
            const double share = spec.validation_fraction.value_or(0.25);
            const auto n_valid = round_count(share * static_cast<double>(out.train_videos.size()));
            carve_validation(out, n_valid, dataset.manifest, config.seed);
            validation_may_be_empty = share == 0.0;
        } else {
            validation_may_be_empty = true;
        }
    } else {
        auto tr = spec.train_fraction, va = spec.validation_fraction, te = spec.test_fraction;
        const int missing = !tr + !va + !te;
        if (missing == 3) {
            te = 0.15;
            va = 0.25 * (1.0 - *te);
        } else if (missing == 2) {
            if (te) va = 0.25 * (1.0 - *te);
            else if (va) te = 0.15;
            else throw ConfigError("train_fraction alone is ambiguous; also give validation_fraction or test_fraction");
        }
        if (!tr) tr = 1.0 - *va - *te;
        if (!va) va = 1.0 - *tr - *te;
        if (!te) te = 1.0 - *tr - *va;
        if (*tr < -1e-12 || *va < -1e-12 || *te < -1e-12 || std::abs(*tr + *va + *te - 1.0) > 1e-9)
            throw ConfigError("split fractions must be non-negative and sum to 1");
        std::vector<int> order = videos;
        auto rng = gbdt::derived_rng(config.seed, {kStreamSplit});
        shuffle(order, rng);
        const std::size_t n = order.size();
        const std::size_t n_test = std::min(n, round_count(*te * static_cast<double>(n)));
        const double share = *tr + *va > 0.0 ? *va / (*tr + *va) : 0.0;
        const std::size_t n_valid = std::min(n - n_test, round_count(share * static_cast<double>(n - n_test)));
        out.test_videos.assign(order.begin(), order.begin() + long(n_test));
        out.train_videos.assign(order.begin() + long(n_test), order.end());
        carve_validation(out, n_valid, dataset.manifest, config.seed);
        validation_may_be_empty = *va == 0.0;
    }

    for (auto* list : {&out.train_videos, &out.validation_videos, &out.test_videos}) std::sort(list->begin(), list->end());
    if (out.train_videos.empty()) throw ConfigError("training partition is empty");
    if (out.test_videos.empty()) throw ConfigError("test partition is empty");
    if (out.validation_videos.empty() && !validation_may_be_empty) throw ConfigError("validation partition is empty");

    std::map<int, int> partition;
    for (int v : out.train_videos) partition[v] = 0;
    for (int v : out.validation_videos) partition[v] = 1;
    for (int v : out.test_videos) partition[v] = 2;
    for (const auto& r : dataset.rows) {
        const auto it = partition.find(r.video_id);
        if (it == partition.end()) continue;
        (it->second == 0 ? out.train : it->second == 1 ? out.validation : out.test).push_back(r);
    }
    return out;
}

FeatureDataset load_features(const PipelineConfig& config, IngestionReport* ingestion, ExtractionReport* extraction) {
    if (config.inputs.empty()) throw ConfigError("no input files configured");
    LandmarkDataset all;
    for (const auto& path : config.inputs) {
        auto part = stage("landmark_io", [&] { return parse_landmark_csv(path); }, path.string());
        all.rows.insert(all.rows.end(), std::make_move_iterator(part.rows.begin()),
                        std::make_move_iterator(part.rows.end()));
    }
    IngestionReport ing;
    auto clean = stage("landmark_io", [&] {
        std::set<std::pair<int, int>> seen;
        for (const auto& r : all.rows)
            if (!seen.emplace(r.video_id, r.frame_no).second)
                throw DataError("frame " + std::to_string(r.frame_no) + " of video " + std::to_string(r.video_id) +
                                " appears in more than one input");
        all.manifest = build_manifest(all.rows);
        auto kept = filter_complete(all, ing);
        if (kept.rows.empty()) throw EmptyInputError("no complete frames in the input");
        return smooth_dataset(kept, config.smoothing_alpha);
    });
    if (ingestion) *ingestion = ing;
    return stage("gait_features", [&] {
        auto ds = extract_dataset(clean, extraction);
        if (ds.rows.empty()) throw EmptyInputError("every frame was degenerate");
        return ds;
    });
}

gbdt::LabeledData to_labeled(const std::vector<GaitFeatureRow>& rows, bool dedupe_shr) {
    gbdt::LabeledData d;
    d.features = gbdt::FeatureMatrix(0, model_feature_names(dedupe_shr).size());
    for (const auto& r : rows) {
        if (!r.person_id) throw DataError("row of video " + std::to_string(r.video_id) + " has no person id");
        d.features.append_row(model_inputs(r, dedupe_shr));
        d.labels.push_back(*r.person_id);
    }
    return d;
}

gbdt::FeatureMatrix prepare_inputs(const gbdt::BoostedEnsemble& model, const std::vector<GaitFeatureRow>& rows,
                                   bool dedupe_shr) {
    if (model.feature_names != model_feature_names(dedupe_shr))
        throw CompatibilityError("model features do not match the data columns");
    auto prepared = rows;
    if (model.correction) prepared = apply_correction(std::move(prepared), *model.correction);
    if (model.normalization) prepared = normalize_features(std::move(prepared), *model.normalization);
    gbdt::FeatureMatrix m(0, model.num_features());
    for (const auto& r : prepared) m.append_row(model_inputs(r, dedupe_shr));
    return m;
}

PreparedData prepare_training(const PipelineConfig& config) {
    stage("config", [&] { config.validate(); });
    const auto features = load_features(config);
    PreparedData out;
    out.split = stage("split", [&] { return split_dataset(features, config); });
    auto& s = out.split;
    if (config.calibrate) {
        out.correction = stage("camera_calibration",
                               [&] { return estimate_correction_factors(s.train, config.reference_camera); });
        stage("camera_calibration", [&] {
            s.train = apply_correction(std::move(s.train), *out.correction);
            s.validation = apply_correction(std::move(s.validation), *out.correction);
        });
    }
    if (config.normalize) {
        out.normalization = stage("gait_features", [&] { return fit_normalization(s.train); });
        s.train = normalize_features(std::move(s.train), *out.normalization);
        s.validation = normalize_features(std::move(s.validation), *out.normalization);
    }
    stage("boost_core", [&] {
        out.train = to_labeled(s.train, config.dedupe_shr);
        out.validation = to_labeled(s.validation, config.dedupe_shr);
    });
    out.feature_names = model_feature_names(config.dedupe_shr);
    return out;
}

TrainArtifacts run_train(const PipelineConfig& config) {
    auto prepared = prepare_training(config);
    TrainArtifacts art;
    art.result = stage("boost_core", [&] {
        const auto* valid = prepared.validation.labels.empty() ? nullptr : &prepared.validation;
        return gbdt::train(prepared.train, config.params, valid, prepared.feature_names);
    });
    auto& model = art.result.model;
    model.correction = prepared.correction;
    model.normalization = prepared.normalization;
    if (prepared.correction) model.correction_ref = "correction.txt";

    const auto& dir = config.output_dir;
    art.model = dir / "model.json";
    art.training_log = dir / "training_log.csv";
    art.split = dir / "split.csv";
    stage("output", [&] {
        gbdt::save_model(art.model, model);
        if (prepared.correction) {
            art.correction = dir / "correction.txt";
            save_correction(art.correction, *prepared.correction);
        }
        if (prepared.normalization) {
            art.normalization = dir / "normalization.txt";
            save_normalization(art.normalization, *prepared.normalization);
        }
        csv::write_text(art.training_log, training_log_csv(art.result.log));
        csv::write_text(art.split, split_csv(prepared.split));
    });
    art.data = std::move(prepared.split);
    return art;
}

std::vector<TrackResult> vote_tracks(const std::vector<GaitFeatureRow>& rows,
                                     const std::vector<std::vector<double>>& probs, const std::vector<int>& labels) {
    if (rows.size() != probs.size()) throw ContractViolation("row and prediction counts differ");
    std::map<std::pair<int, int>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < rows.size(); ++i) groups[{rows[i].video_id, rows[i].camera_id}].push_back(i);
    std::vector<TrackResult> out;
    for (const auto& [key, idx] : groups) {
        std::vector<std::vector<double>> track;
        for (auto i : idx) track.push_back(probs[i]);
        TrackResult t;
        t.video_id = key.first;
        t.camera_id = key.second;
        t.frames = idx.size();
        t.true_label = rows[idx.front()].person_id;
        t.predicted = majority_vote(track, labels);
        out.push_back(t);
    }
    return out;
}

EvaluationArtifacts evaluate_rows(const gbdt::BoostedEnsemble& model, const std::vector<GaitFeatureRow>& rows,
                                  bool dedupe_shr) {
    if (rows.empty()) throw EmptyInputError("no rows to evaluate");
    const auto inputs = prepare_inputs(model, rows, dedupe_shr);
    const auto probs = model.predict_proba_batch(inputs, model.params.num_threads);
    const std::set<int> known(model.class_labels.begin(), model.class_labels.end());
    std::vector<int> predicted, actual;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].person_id) throw DataError("evaluation rows need person ids");
        if (!known.count(*rows[i].person_id))
            throw DataError("person " + std::to_string(*rows[i].person_id) + " is not a class of the model");
        actual.push_back(*rows[i].person_id);
        predicted.push_back(model.class_labels[gbdt::argmax(probs[i])]);
    }
    EvaluationArtifacts out;
    out.confusion = confusion_matrix(predicted, actual, model.class_labels);
    out.report = classification_report(out.confusion);
    out.tracks = vote_tracks(rows, probs, model.class_labels);
    std::size_t correct = 0;
    for (const auto& t : out.tracks) correct += t.true_label && *t.true_label == t.predicted;
    out.report.tracks = out.tracks.size();
    out.report.track_accuracy = static_cast<double>(correct) / static_cast<double>(out.tracks.size());
    return out;
}

EvaluationArtifacts run_evaluate(const PipelineConfig& config, const fs::path& model_path) {
    stage("config", [&] { config.validate(); });
    const auto model = stage("model", [&] { return gbdt::load_model(model_path); });
    const auto features = load_features(config);
    const auto split = stage("split", [&] { return split_dataset(features, config); });
    auto out = stage("evaluation", [&] { return evaluate_rows(model, split.test, config.dedupe_shr); });
    stage("output", [&] {
        const auto& dir = config.output_dir;
        csv::write_text(dir / "report.csv", to_report_csv(out.report));
        csv::write_text(dir / "confusion.csv", to_confusion_csv(out.confusion));
        csv::write_text(dir / "tracks.csv", tracks_csv(out.tracks));
        csv::write_text(dir / "report.txt", render_table(out.report));
    });
    return out;
}

TuneResult tune_hyperparameters(const gbdt::LabeledData& train, const gbdt::LabeledData& validation,
                                const gbdt::TrainParams& base, const SearchSpace& space, int trials) {
    space.validate();
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (validation.labels.empty()) throw ConfigError("tuning needs a non-empty validation partition");
    TuneResult result;
    for (int t = 0; t < trials; ++t) {
        auto rng = gbdt::derived_rng(base.seed, {kStreamTune, static_cast<std::uint64_t>(t)});
        auto u = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        auto uniform = [&](Range r) { return r.lo == r.hi ? r.lo : r.lo + (r.hi - r.lo) * u(); };
        auto integer = [&](Range r) {
            const auto lo = static_cast<long long>(std::ceil(r.lo));
            const auto hi = static_cast<long long>(std::floor(r.hi));
            if (hi <= lo) return static_cast<int>(lo);
            return static_cast<int>(lo + static_cast<long long>(gbdt::uniform_below(rng, std::uint64_t(hi - lo + 1))));
        };
        auto log_uniform = [&](Range r) {
            return r.lo == r.hi ? r.lo : std::exp(std::log(r.lo) + (std::log(r.hi) - std::log(r.lo)) * u());
        };
        Trial trial;
        trial.index = t + 1;
        trial.params = base;
        trial.params.num_leaves = integer(space.num_leaves);
        trial.params.learning_rate = log_uniform(space.learning_rate);
        trial.params.colsample_bytree = uniform(space.colsample_bytree);
        trial.params.subsample = uniform(space.subsample);
        trial.params.subsample_freq = integer(space.subsample_freq);
        trial.params.min_child_samples = integer(space.min_child_samples);
        const auto run = gbdt::train(train, trial.params, &validation);
        trial.validation_loss = run.log.valid_loss.empty() ? 0.0 : run.log.valid_loss.back();
        if (result.trials.empty() || trial.validation_loss < result.best_loss) {
            result.best = trial.params;
            result.best_loss = trial.validation_loss;
        }
        result.trials.push_back(trial);
    }
    return result;
}

std::string to_trial_csv(const TuneResult& result) {
    using csv::format_double;
    std::ostringstream out;
    out << "trial,num_leaves,learning_rate,colsample_bytree,subsample,subsample_freq,min_child_samples,validation_loss\n";
    for (const auto& t : result.trials) {
        const auto& p = t.params;
        out << t.index << ',' << p.num_leaves << ',' << format_double(p.learning_rate) << ','
            << format_double(p.colsample_bytree) << ',' << format_double(p.subsample) << ',' << p.subsample_freq << ','
            << p.min_child_samples << ',' << format_double(t.validation_loss) << '\n';
    }
    return out.str();
}

std::string to_params_text(const gbdt::TrainParams& p) {
    using csv::format_double;
    std::ostringstream out;
    out << "num_leaves=" << p.num_leaves << '\n'
        << "learning_rate=" << format_double(p.learning_rate) << '\n'
        << "colsample_bytree=" << format_double(p.colsample_bytree) << '\n'
        << "subsample=" << format_double(p.subsample) << '\n'
        << "subsample_freq=" << p.subsample_freq << '\n'
        << "min_child_samples=" << p.min_child_samples << '\n';
    return out.str();
}

TuneResult run_tune(const PipelineConfig& config) {
    auto prepared = prepare_training(config);
    auto result = stage("tune", [&] {
        return tune_hyperparameters(prepared.train, prepared.validation, config.params, config.search, config.tune_trials);
    });
    stage("output", [&] {
        csv::write_text(config.output_dir / "tune_trials.csv", to_trial_csv(result));
        csv::write_text(config.output_dir / "best_params.txt", to_params_text(result.best));
    });
    return result;
}

gbdt::LabeledData synthetic_benchmark_data(std::size_t rows, std::uint64_t seed) {
    constexpr int kPersons = 4, kCameras = 4;
    const double scales[kCameras] = {1.0, 1.02, 1.78, 1.56};
    const int frames = static_cast<int>((rows + kPersons * kCameras - 1) / (kPersons * kCameras));
    std::vector<PersonProfile> persons;
    for (int p = 1; p <= kPersons; ++p) persons.push_back(generate_person_profile(seed, p, 0.1, 0.005));
    std::vector<SynthCameraSpec> cameras;
    for (int c = 0; c < kCameras; ++c) cameras.push_back({c + 1, scales[c], std::max(frames, 1), 0.0});
    const auto synth = generate_multicamera_dataset(persons, cameras, seed);
    auto features = extract_dataset(synth.data).rows;
    if (features.size() > rows) features.resize(rows);
    return to_labeled(features, false);
}

}  // namespace gaitreid
