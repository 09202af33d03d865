#include "gaitreid/gbdt/tree.hpp"

#include "gaitreid/error.hpp"

#include <optional>

namespace gaitreid::gbdt {

int Tree::leaf_index(std::span<const double> row) const {
    if (nodes.empty()) return 0;
    int n = 0;
    while (true) {
        const auto& node = nodes[static_cast<std::size_t>(n)];
        const int next = row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
        if (next < 0) return ~next;
        n = next;
    }
}

int Tree::leaf_index_binned(const BinnedDataset& data, std::size_t row) const {
    if (nodes.empty()) return 0;
    int n = 0;
    while (true) {
        const auto& node = nodes[static_cast<std::size_t>(n)];
        const int bin = data.feature_bins[static_cast<std::size_t>(node.feature)][row];
        const int next = bin <= node.threshold_bin ? node.left : node.right;
        if (next < 0) return ~next;
        n = next;
    }
}

namespace {

struct Leaf {
    std::vector<std::uint32_t> rows;
    BinStats totals;
    std::optional<SplitCandidate> best;
    int parent = -1;       // node holding the reference to this leaf
    bool is_left = false;
};

}  // namespace

Tree grow_tree_leafwise(const BinnedDataset& data, std::span<const std::uint32_t> rows, const RowStats& stats,
                        std::span<const int> features, const TreeParams& params) {
    if (rows.empty()) throw ContractViolation("cannot grow a tree on an empty working set");
    if (params.num_leaves < 2) throw ContractViolation("num_leaves must be >= 2");

    double square_sum = 0.0;
    for (auto r : rows) square_sum += stats.weight[r] != 0.0 ? stats.grad[r] * stats.grad[r] / stats.weight[r] : 0.0;

    std::vector<Leaf> leaves(1);
    leaves[0].rows.assign(rows.begin(), rows.end());
    leaves[0].totals = node_totals(rows, stats);

    SplitContext ctx;
    ctx.total_weight = leaves[0].totals.weight;
    ctx.min_child_samples = params.min_child_samples;
    ctx.tolerance = gain_tolerance(square_sum, ctx.total_weight);

    auto evaluate = [&](Leaf& leaf) {
        const auto hists = build_histograms(data, leaf.rows, stats, features, leaf.totals);
        leaf.best = find_best_split(hists, features, leaf.totals, ctx);
    };
    evaluate(leaves[0]);

    Tree tree;
    while (static_cast<int>(leaves.size()) < params.num_leaves) {
        int pick = -1;
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            if (!leaves[i].best) continue;
            if (pick < 0 || leaves[i].best->gain > leaves[static_cast<std::size_t>(pick)].best->gain + ctx.tolerance)
                pick = static_cast<int>(i);
        }
        if (pick < 0) break;

        const auto split = *leaves[static_cast<std::size_t>(pick)].best;
        const auto& bins = data.feature_bins[static_cast<std::size_t>(split.feature)];
        Leaf left, right;
        for (auto r : leaves[static_cast<std::size_t>(pick)].rows)
            (bins[r] <= split.threshold_bin ? left : right).rows.push_back(r);
        left.totals = node_totals(left.rows, stats);
        right.totals = node_totals(right.rows, stats);

        const int node_id = static_cast<int>(tree.nodes.size());
        const int right_leaf = static_cast<int>(leaves.size());
        TreeNode node;
        node.feature = split.feature;
        node.threshold_bin = split.threshold_bin;
        node.threshold = data.mappers[static_cast<std::size_t>(split.feature)]
                             .thresholds[static_cast<std::size_t>(split.threshold_bin)];
        node.left = ~pick;
        node.right = ~right_leaf;
        node.gain = split.gain;
        tree.nodes.push_back(node);

        // Re-point the parent's reference from the old leaf to the new node.
        const auto& old = leaves[static_cast<std::size_t>(pick)];
        if (old.parent >= 0) {
            auto& p = tree.nodes[static_cast<std::size_t>(old.parent)];
            (old.is_left ? p.left : p.right) = node_id;
        }
        left.parent = node_id;
        left.is_left = true;
        right.parent = node_id;
        right.is_left = false;

        if (static_cast<int>(leaves.size()) + 1 < params.num_leaves) {
            evaluate(left);
            evaluate(right);
        }
        leaves[static_cast<std::size_t>(pick)] = std::move(left);
        leaves.push_back(std::move(right));
    }

    tree.leaf_values.reserve(leaves.size());
    for (const auto& leaf : leaves) {
        tree.leaf_values.push_back(-leaf.totals.grad / (leaf.totals.hess + params.lambda));
        tree.leaf_counts.push_back(leaf.totals.count);
    }
    return tree;
}

}  // namespace gaitreid::gbdt
