#include "gaitreid/gbdt/ensemble.hpp"

#include "gaitreid/error.hpp"
#include "gaitreid/gbdt/goss.hpp"
#include "gaitreid/gbdt/histogram.hpp"
#include "gaitreid/gbdt/objective.hpp"
#include "gaitreid/gbdt/parallel.hpp"
#include "gaitreid/gbdt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace gaitreid::gbdt {

std::size_t argmax(std::span<const double> values) {
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

std::vector<double> BoostedEnsemble::predict_raw(std::span<const double> row) const {
    if (row.size() != num_features())
        throw ContractViolation("row has " + std::to_string(row.size()) + " features, model expects " +
                                std::to_string(num_features()));
    std::vector<double> scores(num_classes(), 0.0);
    for (const auto& iteration : trees)
        for (std::size_t k = 0; k < iteration.size(); ++k) scores[k] += params.learning_rate * iteration[k].predict(row);
    return scores;
}

std::vector<double> BoostedEnsemble::predict_proba(std::span<const double> row) const {
    return softmax(predict_raw(row));
}

int BoostedEnsemble::predict_label(std::span<const double> row) const {
    return class_labels[argmax(predict_raw(row))];
}

std::vector<std::vector<double>> BoostedEnsemble::predict_proba_batch(const FeatureMatrix& rows, int threads) const {
    std::vector<std::vector<double>> out(rows.rows());
    parallel_for(rows.rows(), threads, [&](std::size_t i) { out[i] = predict_proba(rows.row(i)); });
    return out;
}

namespace {

std::vector<int> draw_columns(const TrainParams& p, std::size_t num_features, std::size_t iteration,
                              std::size_t klass) {
    std::vector<int> all(num_features);
    std::iota(all.begin(), all.end(), 0);
    if (p.colsample_bytree >= 1.0) return all;
    const auto want = static_cast<std::uint32_t>(
        std::max(1.0, std::round(p.colsample_bytree * static_cast<double>(num_features))));
    auto rng = derived_rng(p.seed, {kStreamColumns, iteration, klass});
    std::vector<int> picked;
    for (auto f : sample_without_replacement(rng, static_cast<std::uint32_t>(num_features), want))
        picked.push_back(static_cast<int>(f));
    return picked;
}

double mean_log_loss(const std::vector<double>& logits, const std::vector<int>& y, std::size_t k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) sum += log_loss({logits.data() + i * k, k}, y[i]);
    return sum / static_cast<double>(y.size());
}

}  // namespace

TrainResult train(const LabeledData& data, const TrainParams& raw_params, const LabeledData* validation,
                  std::vector<std::string> feature_names) {
    raw_params.validate();
    const TrainParams params = raw_params.effective();
    const auto& X = data.features;
    const std::size_t n = X.rows();
    const std::size_t nf = X.cols();
    if (n == 0) throw EmptyInputError("no training rows");
    if (data.labels.size() != n) throw ContractViolation("label count differs from row count");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t f = 0; f < nf; ++f)
            if (!std::isfinite(X(i, f))) throw ContractViolation("non-finite feature value in training data");

    std::vector<int> classes = data.labels;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    if (classes.size() < 2) throw DataError("training labels hold a single class; need at least two");
    std::map<int, int> class_index;
    for (std::size_t k = 0; k < classes.size(); ++k) class_index[classes[k]] = static_cast<int>(k);
    const std::size_t K = classes.size();

    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = class_index.at(data.labels[i]);

    if (feature_names.empty())
        for (std::size_t f = 0; f < nf; ++f) feature_names.push_back("f" + std::to_string(f));
    if (feature_names.size() != nf) throw ContractViolation("feature name count differs from column count");

    TrainResult result;
    auto& model = result.model;
    model.class_labels = classes;
    model.feature_names = std::move(feature_names);
    model.params = params;

    const auto binned = BinnedDataset::build(X, params.max_bins, params.efb_enabled, params.efb_max_conflict);
    model.bin_mappers = binned.mappers;

    std::vector<int> valid_y;
    std::vector<double> valid_logits;
    if (validation) {
        if (validation->features.cols() != nf) throw ContractViolation("validation column count differs");
        for (int label : validation->labels) {
            const auto it = class_index.find(label);
            if (it == class_index.end()) throw DataError("validation label " + std::to_string(label) + " unseen in training");
            valid_y.push_back(it->second);
        }
        valid_logits.assign(validation->features.rows() * K, 0.0);
    }

    std::vector<double> logits(n * K, 0.0);
    std::vector<std::vector<double>> grad(K, std::vector<double>(n)), hess(K, std::vector<double>(n));
    std::vector<std::vector<double>> wgrad(K, std::vector<double>(n)), whess(K, std::vector<double>(n));
    std::vector<double> weight(n, 0.0);
    std::vector<std::uint32_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), 0u);
    std::vector<std::uint32_t> bag = all_rows;

    const TreeParams tree_params{params.num_leaves, params.min_child_samples, kLeafLambda};
    std::vector<double> probs(K);

    for (std::size_t it = 0; it < static_cast<std::size_t>(params.num_iterations); ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            softmax({logits.data() + i * K, K}, probs);
            for (std::size_t k = 0; k < K; ++k) {
                grad[k][i] = probs[k] - (static_cast<int>(k) == y[i] ? 1.0 : 0.0);
                hess[k][i] = probs[k] * (1.0 - probs[k]);
            }
        }

        std::vector<std::uint32_t> working;
        std::fill(weight.begin(), weight.end(), 0.0);
        if (params.goss_enabled) {
            std::vector<double> magnitude(n, 0.0);
            for (std::size_t k = 0; k < K; ++k)
                for (std::size_t i = 0; i < n; ++i) magnitude[i] += std::abs(grad[k][i]);
            auto rng = derived_rng(params.seed, {kStreamGoss, it});
            auto sample = goss_sample(magnitude, params.goss_top_rate, params.goss_other_rate, rng);
            for (std::size_t j = 0; j < sample.rows.size(); ++j) weight[sample.rows[j]] = sample.weights[j];
            working = std::move(sample.rows);
        } else {
            if (params.bagging_active() && it % static_cast<std::size_t>(params.subsample_freq) == 0) {
                auto rng = derived_rng(params.seed, {kStreamBagging, it});
                const auto want = static_cast<std::uint32_t>(
                    std::max(1.0, std::ceil(params.subsample * static_cast<double>(n) - 1e-9)));
                bag = sample_without_replacement(rng, static_cast<std::uint32_t>(n), want);
            }
            working = params.bagging_active() ? bag : all_rows;
            for (auto r : working) weight[r] = 1.0;
        }
        for (std::size_t k = 0; k < K; ++k)
            for (auto r : working) {
                wgrad[k][r] = grad[k][r] * weight[r];
                whess[k][r] = hess[k][r] * weight[r];
            }

        std::vector<Tree> round(K);
        parallel_for(K, raw_params.num_threads, [&](std::size_t k) {
            const auto features = draw_columns(params, nf, it, k);
            const RowStats stats{wgrad[k], whess[k], weight};
            round[k] = grow_tree_leafwise(binned, working, stats, features, tree_params);
        });

        for (std::size_t k = 0; k < K; ++k) {
            const auto& tree = round[k];
            for (std::size_t i = 0; i < n; ++i)
                logits[i * K + k] +=
                    params.learning_rate * tree.leaf_values[static_cast<std::size_t>(tree.leaf_index_binned(binned, i))];
            if (validation)
                for (std::size_t i = 0; i < valid_y.size(); ++i)
                    valid_logits[i * K + k] += params.learning_rate * tree.predict(validation->features.row(i));
        }
        model.trees.push_back(std::move(round));

        result.log.train_loss.push_back(mean_log_loss(logits, y, K));
        if (validation && !valid_y.empty()) result.log.valid_loss.push_back(mean_log_loss(valid_logits, valid_y, K));
    }
    return result;
}

}  // namespace gaitreid::gbdt
