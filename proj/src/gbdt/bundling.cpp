#include "gaitreid/gbdt/bundling.hpp"

#include "gaitreid/error.hpp"

#include <algorithm>
#include <numeric>

namespace gaitreid::gbdt {

namespace {

constexpr int kMaxBundleBins = 65535;

BundlePlan empty_plan(const std::vector<BinMapper>& mappers) {
    BundlePlan plan;
    for (const auto& m : mappers) {
        plan.default_bin.push_back(m.default_bin());
        plan.feature_bins.push_back(m.num_bins());
    }
    plan.bundle_of.assign(mappers.size(), -1);
    plan.slot_of.assign(mappers.size(), -1);
    return plan;
}

void finalize(BundlePlan& plan, std::vector<std::vector<int>> groups) {
    for (auto& members : groups) {
        std::sort(members.begin(), members.end());
        BundlePlan::Bundle b;
        b.features = members;
        if (members.size() == 1) {
            b.offsets = {0};
            b.num_bins = plan.feature_bins[static_cast<std::size_t>(members[0])];
        } else {
            int next = 1;
            for (int f : members) {
                b.offsets.push_back(next);
                next += plan.feature_bins[static_cast<std::size_t>(f)] - 1;
            }
            b.num_bins = next;
        }
        const int id = static_cast<int>(plan.bundles.size());
        for (std::size_t s = 0; s < members.size(); ++s) {
            plan.bundle_of[static_cast<std::size_t>(members[s])] = id;
            plan.slot_of[static_cast<std::size_t>(members[s])] = static_cast<int>(s);
        }
        plan.bundles.push_back(std::move(b));
    }
}

}  // namespace

int BundlePlan::bundle_bin(int feature, int bin) const {
    const auto f = static_cast<std::size_t>(feature);
    const auto& b = bundles[static_cast<std::size_t>(bundle_of[f])];
    if (b.features.size() == 1) return bin;
    const int def = default_bin[f];
    if (bin == def) return 0;
    return b.offsets[static_cast<std::size_t>(slot_of[f])] + (bin < def ? bin : bin - 1);
}

BundlePlan::Origin BundlePlan::origin(int bundle, int bundle_bin) const {
    const auto& b = bundles[static_cast<std::size_t>(bundle)];
    if (b.features.size() == 1) return {b.features[0], bundle_bin};
    if (bundle_bin == 0) return {};
    for (std::size_t s = 0; s < b.features.size(); ++s) {
        const auto f = static_cast<std::size_t>(b.features[s]);
        const int lo = b.offsets[s];
        const int hi = lo + feature_bins[f] - 1;
        if (bundle_bin >= lo && bundle_bin < hi) {
            const int r = bundle_bin - lo;
            return {b.features[s], r < default_bin[f] ? r : r + 1};
        }
    }
    throw ContractViolation("bundle bin out of range");
}

BundlePlan singleton_plan(const std::vector<BinMapper>& mappers) {
    auto plan = empty_plan(mappers);
    std::vector<std::vector<int>> groups;
    for (std::size_t f = 0; f < mappers.size(); ++f) groups.push_back({static_cast<int>(f)});
    finalize(plan, std::move(groups));
    return plan;
}

BundlePlan efb_bundle(const std::vector<std::vector<std::uint8_t>>& feature_bins,
                      const std::vector<BinMapper>& mappers, double max_conflict) {
    auto plan = empty_plan(mappers);
    const std::size_t nf = mappers.size();
    const std::size_t rows = nf ? feature_bins[0].size() : 0;

    // Non-default row lists per feature.
    std::vector<std::vector<std::uint32_t>> nonzero(nf);
    for (std::size_t f = 0; f < nf; ++f)
        for (std::size_t r = 0; r < rows; ++r)
            if (feature_bins[f][r] != plan.default_bin[f]) nonzero[f].push_back(static_cast<std::uint32_t>(r));

    const double budget = max_conflict * static_cast<double>(rows);
    std::vector<std::vector<bool>> edge(nf, std::vector<bool>(nf, false));
    std::vector<int> degree(nf, 0);
    for (std::size_t a = 0; a < nf; ++a) {
        for (std::size_t b = a + 1; b < nf; ++b) {
            std::size_t both = 0;
            auto ia = nonzero[a].begin();
            auto ib = nonzero[b].begin();
            while (ia != nonzero[a].end() && ib != nonzero[b].end()) {
                if (*ia < *ib) ++ia;
                else if (*ib < *ia) ++ib;
                else { ++both; ++ia; ++ib; }
            }
            if (static_cast<double>(both) > budget) {
                edge[a][b] = edge[b][a] = true;
                ++degree[a];
                ++degree[b];
            }
        }
    }

    std::vector<int> order(nf);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return degree[static_cast<std::size_t>(a)] > degree[static_cast<std::size_t>(b)]; });

    std::vector<std::vector<int>> groups;
    std::vector<int> group_bins;
    for (int f : order) {
        const auto fu = static_cast<std::size_t>(f);
        const int extra = plan.feature_bins[fu] - 1;
        bool placed = false;
        for (std::size_t g = 0; g < groups.size() && !placed; ++g) {
            const bool clash = std::any_of(groups[g].begin(), groups[g].end(),
                                           [&](int m) { return edge[fu][static_cast<std::size_t>(m)]; });
            if (clash || group_bins[g] + extra > kMaxBundleBins) continue;
            groups[g].push_back(f);
            group_bins[g] += extra;
            placed = true;
        }
        if (!placed) {
            groups.push_back({f});
            group_bins.push_back(1 + extra);
        }
    }
    // Bundle ids follow the smallest member feature so the plan reads in feature order.
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
        return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
    });
    finalize(plan, std::move(groups));
    return plan;
}

std::vector<std::vector<std::uint16_t>> encode_bundles(const BundlePlan& plan,
                                                       const std::vector<std::vector<std::uint8_t>>& feature_bins) {
    const std::size_t rows = feature_bins.empty() ? 0 : feature_bins[0].size();
    std::vector<std::vector<std::uint16_t>> out(plan.bundles.size(), std::vector<std::uint16_t>(rows, 0));
    for (std::size_t g = 0; g < plan.bundles.size(); ++g) {
        const auto& b = plan.bundles[g];
        if (b.features.size() == 1) {
            const auto& col = feature_bins[static_cast<std::size_t>(b.features[0])];
            for (std::size_t r = 0; r < rows; ++r) out[g][r] = col[r];
            continue;
        }
        for (std::size_t r = 0; r < rows; ++r) {
            for (int f : b.features) {
                const int bin = feature_bins[static_cast<std::size_t>(f)][r];
                if (bin != plan.default_bin[static_cast<std::size_t>(f)]) {
                    out[g][r] = static_cast<std::uint16_t>(plan.bundle_bin(f, bin));
                    break;
                }
            }
        }
    }
    return out;
}

}  // namespace gaitreid::gbdt
