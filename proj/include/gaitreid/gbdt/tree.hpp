#pragma once

#include "gaitreid/gbdt/histogram.hpp"
#include "gaitreid/gbdt/split.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gaitreid::gbdt {

/// Internal node. Child references >= 0 are node indices; negative values encode leaf ~index.
struct TreeNode {
    int feature = -1;
    int threshold_bin = -1;
    double threshold = 0.0;  // value <= threshold goes left
    int left = -1;
    int right = -1;
    double gain = 0.0;

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Regression tree grown leaf-wise. Nodes are stored in split order; when a leaf splits, its
/// left child keeps the leaf index and the right child takes the next free one, so leaf
/// indices record creation order.
struct Tree {
    std::vector<TreeNode> nodes;
    std::vector<double> leaf_values;  // unscaled Newton steps
    std::vector<std::uint32_t> leaf_counts;

    int num_leaves() const { return static_cast<int>(leaf_values.size()); }
    int leaf_index(std::span<const double> row) const;
    int leaf_index_binned(const BinnedDataset& data, std::size_t row) const;
    double predict(std::span<const double> row) const { return leaf_values[static_cast<std::size_t>(leaf_index(row))]; }

    friend bool operator==(const Tree&, const Tree&) = default;
};

struct TreeParams {
    int num_leaves = 31;
    int min_child_samples = 1;
    double lambda = 1e-3;
};

/// Grows one tree on the working set `rows` (ascending row ids).
///
/// Starting from a single leaf, repeatedly splits the frontier leaf with the largest gain
/// (ties within tolerance go to the earliest-created leaf) until the leaf budget is spent or no
/// leaf has a positive-gain split. Leaf value = -G / (H + lambda) over the leaf's working rows.
/// `features` is the column subset drawn for this tree, ascending.
Tree grow_tree_leafwise(const BinnedDataset& data, std::span<const std::uint32_t> rows, const RowStats& stats,
                        std::span<const int> features, const TreeParams& params);

}  // namespace gaitreid::gbdt
