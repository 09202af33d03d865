#include "gaitreid/gbdt/objective.hpp"

#include "gaitreid/error.hpp"

#include <algorithm>
#include <cmath>

namespace gaitreid::gbdt {

void softmax(std::span<const double> logits, std::span<double> probs) {
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        probs[k] = std::exp(logits[k] - m);
        sum += probs[k];
    }
    for (auto& p : probs) p /= sum;
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> p(logits.size());
    softmax(logits, p);
    return p;
}

std::vector<GradHess> softmax_gradients(std::span<const double> logits, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= logits.size())
        throw ContractViolation("label outside the class range");
    const auto p = softmax(logits);
    std::vector<GradHess> out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        out[k].grad = p[k] - (static_cast<int>(k) == label ? 1.0 : 0.0);
        out[k].hess = p[k] * (1.0 - p[k]);
    }
    return out;
}

double log_loss(std::span<const double> logits, int label) {
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double l : logits) sum += std::exp(l - m);
    return m + std::log(sum) - logits[static_cast<std::size_t>(label)];
}

}  // namespace gaitreid::gbdt
