#include "gaitreid/gbdt/split.hpp"

#include "gaitreid/error.hpp"

namespace gaitreid::gbdt {

namespace {

double term(const BinStats& s) { return s.weight > 0.0 ? s.grad * s.grad / s.weight : 0.0; }

}  // namespace

double variance_gain(const BinStats& left, const BinStats& right, const BinStats& parent, double total_weight) {
    return (term(left) + term(right) - term(parent)) / total_weight;
}

double gain_tolerance(double weighted_square_sum, double total_weight) {
    return 1e-10 * weighted_square_sum / total_weight;
}

std::optional<SplitCandidate> find_best_split(const std::vector<FeatureHistogram>& histograms,
                                              std::span<const int> features, const BinStats& node,
                                              const SplitContext& ctx) {
    if (histograms.size() != features.size()) throw ContractViolation("one histogram per feature expected");
    std::optional<SplitCandidate> best;
    const auto min_child = static_cast<std::uint32_t>(ctx.min_child_samples);
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& bins = histograms[i].bins;
        BinStats left;
        for (std::size_t t = 0; t + 1 < bins.size(); ++t) {
            left += bins[t];
            if (left.count < min_child) continue;
            if (node.count - left.count < min_child) break;
            const BinStats right = node - left;
            const double gain = variance_gain(left, right, node, ctx.total_weight);
            const double bar = best ? best->gain + ctx.tolerance : ctx.tolerance;
            if (gain > bar) best = SplitCandidate{features[i], static_cast<int>(t), gain, left, right};
        }
    }
    return best;
}

}  // namespace gaitreid::gbdt
