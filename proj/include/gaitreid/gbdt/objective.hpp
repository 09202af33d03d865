#pragma once

#include <span>
#include <vector>

namespace gaitreid::gbdt {

struct GradHess {
    double grad = 0.0;
    double hess = 0.0;
};

/// Max-shifted softmax; `probs` must have the same length as `logits`.
void softmax(std::span<const double> logits, std::span<double> probs);
std::vector<double> softmax(std::span<const double> logits);

/// Multiclass cross-entropy derivatives w.r.t. each logit:
/// grad_k = p_k - [k == label], hess_k = p_k (1 - p_k).
std::vector<GradHess> softmax_gradients(std::span<const double> logits, int label);

/// -log p_label, evaluated with log-sum-exp.
double log_loss(std::span<const double> logits, int label);

}  // namespace gaitreid::gbdt
