#include "gaitreid/gbdt/model_io.hpp"

#include "gaitreid/csv.hpp"
#include "gaitreid/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace gaitreid::gbdt {

using nlohmann::json;

namespace {

json params_to_json(const TrainParams& p) {
    json j;
    j["num_leaves"] = p.num_leaves;
    j["learning_rate"] = p.learning_rate;
    j["colsample_bytree"] = p.colsample_bytree;
    j["subsample"] = p.subsample;
    j["subsample_freq"] = p.subsample_freq;
    j["min_child_samples"] = p.min_child_samples;
    j["num_iterations"] = p.num_iterations;
    j["max_bins"] = p.max_bins;
    j["goss_enabled"] = p.goss_enabled;
    j["goss_top_rate"] = p.goss_top_rate;
    j["goss_other_rate"] = p.goss_other_rate;
    j["efb_enabled"] = p.efb_enabled;
    j["efb_max_conflict"] = p.efb_max_conflict;
    j["seed"] = p.seed;
    j["deterministic"] = p.deterministic;
    return j;
}

TrainParams params_from_json(const json& j) {
    TrainParams p;
    p.num_leaves = j.at("num_leaves").get<int>();
    p.learning_rate = j.at("learning_rate").get<double>();
    p.colsample_bytree = j.at("colsample_bytree").get<double>();
    p.subsample = j.at("subsample").get<double>();
    p.subsample_freq = j.at("subsample_freq").get<int>();
    p.min_child_samples = j.at("min_child_samples").get<int>();
    p.num_iterations = j.at("num_iterations").get<int>();
    p.max_bins = j.at("max_bins").get<int>();
    p.goss_enabled = j.at("goss_enabled").get<bool>();
    p.goss_top_rate = j.at("goss_top_rate").get<double>();
    p.goss_other_rate = j.at("goss_other_rate").get<double>();
    p.efb_enabled = j.at("efb_enabled").get<bool>();
    p.efb_max_conflict = j.at("efb_max_conflict").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.deterministic = j.at("deterministic").get<bool>();
    return p;
}

json tree_to_json(const Tree& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes)
        nodes.push_back({{"feature", n.feature},
                         {"threshold_bin", n.threshold_bin},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"gain", n.gain}});
    return {{"nodes", nodes}, {"leaf_values", t.leaf_values}, {"leaf_counts", t.leaf_counts}};
}

Tree tree_from_json(const json& j) {
    Tree t;
    for (const auto& n : j.at("nodes")) {
        TreeNode node;
        node.feature = n.at("feature").get<int>();
        node.threshold_bin = n.at("threshold_bin").get<int>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<int>();
        node.right = n.at("right").get<int>();
        node.gain = n.at("gain").get<double>();
        t.nodes.push_back(node);
    }
    t.leaf_values = j.at("leaf_values").get<std::vector<double>>();
    t.leaf_counts = j.at("leaf_counts").get<std::vector<std::uint32_t>>();
    return t;
}

void check_tree(const Tree& t, std::size_t num_features) {
    const int leaves = t.num_leaves();
    if (leaves < 1 || t.leaf_counts.size() != t.leaf_values.size() ||
        t.nodes.size() != static_cast<std::size_t>(leaves - 1))
        throw CompatibilityError("tree shape is inconsistent");
    for (const auto& n : t.nodes) {
        if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= num_features)
            throw CompatibilityError("tree references an unknown feature");
        for (int c : {n.left, n.right}) {
            if (c >= static_cast<int>(t.nodes.size()) || (c < 0 && ~c >= leaves))
                throw CompatibilityError("tree child index out of range");
        }
    }
}

}  // namespace

std::string to_json_text(const BoostedEnsemble& model) {
    json j;
    j["format_version"] = model.format_version;
    j["class_labels"] = model.class_labels;
    j["feature_names"] = model.feature_names;
    j["params"] = params_to_json(model.params);
    json mappers = json::array();
    for (const auto& m : model.bin_mappers) mappers.push_back({{"upper_bounds", m.upper_bounds}, {"thresholds", m.thresholds}});
    j["bin_mappers"] = mappers;
    json trees = json::array();
    for (const auto& round : model.trees) {
        json r = json::array();
        for (const auto& t : round) r.push_back(tree_to_json(t));
        trees.push_back(r);
    }
    j["trees"] = trees;
    if (model.normalization) {
        j["normalization"] = {{"min", model.normalization->min}, {"max", model.normalization->max}};
    } else {
        j["normalization"] = nullptr;
    }
    if (model.correction) {
        json factors = json::object();
        for (const auto& [cam, f] : model.correction->factors) factors[std::to_string(cam)] = f;
        json per_person = json::array();
        for (const auto& [key, f] : model.correction->per_person_factors)
            per_person.push_back({{"person", key.first}, {"camera", key.second}, {"factor", f}});
        j["correction"] = {{"ref", model.correction_ref},
                           {"reference_camera", model.correction->reference_camera},
                           {"method", model.correction->method},
                           {"factors", factors},
                           {"per_person_factors", per_person}};
    } else {
        j["correction"] = nullptr;
    }
    return j.dump(1) + "\n";
}

BoostedEnsemble from_json_text(const std::string& text) {
    try {
        const auto j = json::parse(text);
        BoostedEnsemble m;
        m.format_version = j.at("format_version").get<int>();
        if (m.format_version != BoostedEnsemble::kFormatVersion)
            throw CompatibilityError("unsupported model format version " + std::to_string(m.format_version));
        m.class_labels = j.at("class_labels").get<std::vector<int>>();
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        m.params = params_from_json(j.at("params"));
        for (const auto& bm : j.at("bin_mappers")) {
            BinMapper mapper;
            mapper.upper_bounds = bm.at("upper_bounds").get<std::vector<double>>();
            mapper.thresholds = bm.at("thresholds").get<std::vector<double>>();
            m.bin_mappers.push_back(std::move(mapper));
        }
        for (const auto& round : j.at("trees")) {
            std::vector<Tree> r;
            for (const auto& t : round) {
                r.push_back(tree_from_json(t));
                check_tree(r.back(), m.feature_names.size());
            }
            if (r.size() != m.class_labels.size()) throw CompatibilityError("iteration does not hold one tree per class");
            m.trees.push_back(std::move(r));
        }
        if (m.class_labels.size() < 2) throw CompatibilityError("model needs at least two classes");
        if (m.bin_mappers.size() != m.feature_names.size()) throw CompatibilityError("bin mapper count mismatch");
        if (!j.at("normalization").is_null()) {
            NormalizationStats s;
            const auto mins = j["normalization"].at("min").get<std::vector<double>>();
            const auto maxs = j["normalization"].at("max").get<std::vector<double>>();
            if (mins.size() != kFeatureCount || maxs.size() != kFeatureCount)
                throw CompatibilityError("normalization stats have the wrong length");
            std::copy(mins.begin(), mins.end(), s.min.begin());
            std::copy(maxs.begin(), maxs.end(), s.max.begin());
            m.normalization = s;
        }
        if (!j.at("correction").is_null()) {
            const auto& c = j["correction"];
            CorrectionTable t;
            m.correction_ref = c.at("ref").get<std::string>();
            t.reference_camera = c.at("reference_camera").get<int>();
            t.method = c.at("method").get<std::string>();
            for (const auto& [cam, f] : c.at("factors").items()) {
                const auto id = csv::parse_int(cam);
                if (!id) throw CompatibilityError("bad camera id in correction table");
                t.factors[static_cast<int>(*id)] = f.get<double>();
            }
            if (c.contains("per_person_factors"))
                for (const auto& e : c["per_person_factors"])
                    t.per_person_factors[{e.at("person").get<int>(), e.at("camera").get<int>()}] =
                        e.at("factor").get<double>();
            m.correction = t;
        }
        return m;
    } catch (const json::exception& e) {
        throw CompatibilityError(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const BoostedEnsemble& model) {
    csv::write_text(path, to_json_text(model));
}

BoostedEnsemble load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CompatibilityError("cannot open model file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

}  // namespace gaitreid::gbdt
