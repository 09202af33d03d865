#pragma once

// Brute-force reference for the first boosting round. It knows nothing about bins, bundles or
// histograms: every candidate split is a real threshold between adjacent distinct values and
// every sum is taken directly over the rows of the node.

#include "gaitreid/gbdt/matrix.hpp"
#include "gaitreid/gbdt/tree.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

struct OracleNode {
    bool leaf = true;
    int feature = -1;
    double threshold = 0.0;
    int left = -1, right = -1;  // indices into OracleTree::nodes
    double value = 0.0;
};

struct OracleTree {
    std::vector<OracleNode> nodes;  // nodes[0] is the root
};

struct OracleParams {
    int num_leaves = 31;
    int min_child_samples = 1;
    double lambda = 1e-3;
};

/// Candidate real thresholds of one column: midpoints of adjacent distinct values.
inline std::vector<double> oracle_thresholds(const gaitreid::gbdt::FeatureMatrix& X, std::size_t f) {
    std::vector<double> v = X.column(f);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        double mid = v[i] + (v[i + 1] - v[i]) / 2.0;
        if (!(mid >= v[i] && mid < v[i + 1])) mid = v[i];
        out.push_back(mid);
    }
    return out;
}

/// Greedy best-first tree with unit row weights. Gain of a partition is
/// (GL^2/nL + GR^2/nR - G^2/n_node) / N with N the full row count.
inline OracleTree oracle_tree(const gaitreid::gbdt::FeatureMatrix& X, const std::vector<double>& g,
                              const std::vector<double>& h, const OracleParams& p) {
    const std::size_t N = X.rows();
    std::vector<std::vector<double>> thresholds;
    for (std::size_t f = 0; f < X.cols(); ++f) thresholds.push_back(oracle_thresholds(X, f));

    double sq = 0.0;
    for (double v : g) sq += v * v;
    const double tol = 1e-10 * sq / static_cast<double>(N);

    struct Best {
        int feature;
        double threshold;
        double gain;
    };
    struct Frontier {
        int node;
        std::vector<std::size_t> rows;
        std::optional<Best> best;
    };

    auto sum = [&](const std::vector<std::size_t>& rows, const std::vector<double>& v) {
        double s = 0.0;
        for (auto r : rows) s += v[r];
        return s;
    };
    auto search = [&](const std::vector<std::size_t>& rows) {
        std::optional<Best> best;
        const double G = sum(rows, g);
        const double n = static_cast<double>(rows.size());
        for (std::size_t f = 0; f < X.cols(); ++f) {
            for (double thr : thresholds[f]) {
                std::vector<std::size_t> L, R;
                for (auto r : rows) (X(r, f) <= thr ? L : R).push_back(r);
                if (L.size() < static_cast<std::size_t>(p.min_child_samples) ||
                    R.size() < static_cast<std::size_t>(p.min_child_samples))
                    continue;
                const double GL = sum(L, g), GR = sum(R, g);
                const double gain =
                    (GL * GL / static_cast<double>(L.size()) + GR * GR / static_cast<double>(R.size()) - G * G / n) /
                    static_cast<double>(N);
                if (gain > (best ? best->gain + tol : tol)) best = Best{static_cast<int>(f), thr, gain};
            }
        }
        return best;
    };

    OracleTree tree;
    tree.nodes.push_back({});
    std::vector<Frontier> frontier(1);
    frontier[0].node = 0;
    for (std::size_t r = 0; r < N; ++r) frontier[0].rows.push_back(r);
    frontier[0].best = search(frontier[0].rows);

    while (static_cast<int>(frontier.size()) < p.num_leaves) {
        int pick = -1;
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            if (!frontier[i].best) continue;
            if (pick < 0 || frontier[i].best->gain > frontier[static_cast<std::size_t>(pick)].best->gain + tol)
                pick = static_cast<int>(i);
        }
        if (pick < 0) break;
        auto leaf = std::move(frontier[static_cast<std::size_t>(pick)]);
        const auto b = *leaf.best;
        Frontier left, right;
        for (auto r : leaf.rows) (X(r, static_cast<std::size_t>(b.feature)) <= b.threshold ? left : right).rows.push_back(r);
        left.node = static_cast<int>(tree.nodes.size());
        right.node = left.node + 1;
        tree.nodes.push_back({});
        tree.nodes.push_back({});
        auto& n = tree.nodes[static_cast<std::size_t>(leaf.node)];
        n.leaf = false;
        n.feature = b.feature;
        n.threshold = b.threshold;
        n.left = left.node;
        n.right = right.node;
        left.best = search(left.rows);
        right.best = search(right.rows);
        frontier[static_cast<std::size_t>(pick)] = std::move(left);
        frontier.push_back(std::move(right));
    }
    for (const auto& leaf : frontier)
        tree.nodes[static_cast<std::size_t>(leaf.node)].value = -sum(leaf.rows, g) / (sum(leaf.rows, h) + p.lambda);
    return tree;
}

/// Empty string when equal; otherwise a description of the first difference.
inline std::string compare_trees(const gaitreid::gbdt::Tree& t, const OracleTree& o, double leaf_tol = 1e-9) {
    std::ostringstream why;
    // Impl reference: >= 0 node index, < 0 leaf ~index. Start at the root.
    auto walk = [&](auto&& self, int ref, int oi, const std::string& path) -> bool {
        const auto& on = o.nodes[static_cast<std::size_t>(oi)];
        if (ref < 0) {
            if (!on.leaf) {
                why << path << ": implementation has a leaf, oracle splits on f" << on.feature;
                return false;
            }
            const double v = t.leaf_values[static_cast<std::size_t>(~ref)];
            if (std::abs(v - on.value) > leaf_tol * std::max(1.0, std::abs(on.value))) {
                why << path << ": leaf " << v << " vs oracle " << on.value;
                return false;
            }
            return true;
        }
        const auto& tn = t.nodes[static_cast<std::size_t>(ref)];
        if (on.leaf) {
            why << path << ": implementation splits on f" << tn.feature << ", oracle has a leaf";
            return false;
        }
        if (tn.feature != on.feature || tn.threshold != on.threshold) {
            why << path << ": split f" << tn.feature << "<=" << tn.threshold << " vs oracle f" << on.feature
                << "<=" << on.threshold;
            return false;
        }
        return self(self, tn.left, on.left, path + "L") && self(self, tn.right, on.right, path + "R");
    };
    const int root = t.nodes.empty() ? ~0 : 0;
    return walk(walk, root, 0, "root") ? std::string{} : why.str();
}

}  // namespace testing
