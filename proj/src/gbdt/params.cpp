#include "gaitreid/gbdt/params.hpp"

#include "gaitreid/error.hpp"

#include <cmath>
#include <string>

namespace gaitreid::gbdt {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid training parameter: " + what);
}

}  // namespace

void TrainParams::validate() const {
    require(num_leaves >= 2, "num_leaves must be >= 2");
    require(learning_rate > 0.0 && learning_rate <= 1.0, "learning_rate must lie in (0, 1]");
    require(colsample_bytree > 0.0 && colsample_bytree <= 1.0, "colsample_bytree must lie in (0, 1]");
    require(subsample > 0.0 && subsample <= 1.0, "subsample must lie in (0, 1]");
    require(subsample_freq >= 0, "subsample_freq must be >= 0");
    require(min_child_samples >= 1, "min_child_samples must be >= 1");
    require(num_iterations >= 0, "num_iterations must be >= 0");
    require(max_bins >= 2 && max_bins <= 255, "max_bins must lie in [2, 255]");
    require(efb_max_conflict >= 0.0 && efb_max_conflict < 1.0, "efb_max_conflict must lie in [0, 1)");
    require(num_threads >= 1, "num_threads must be >= 1");
    if (goss_enabled) {
        require(goss_top_rate > 0.0 && goss_top_rate <= 1.0, "goss_top_rate must lie in (0, 1]");
        require(goss_other_rate >= 0.0, "goss_other_rate must be >= 0");
        require(goss_top_rate + goss_other_rate <= 1.0 + 1e-12, "goss_top_rate + goss_other_rate must be <= 1");
    }
}

TrainParams TrainParams::effective() const {
    TrainParams p = *this;
    p.num_threads = 1;
    if (p.goss_enabled && p.goss_top_rate >= 1.0) p.goss_enabled = false;  // every row kept with weight 1
    if (goss_enabled || p.subsample >= 1.0 || p.subsample_freq == 0) {
        p.subsample = 1.0;
        p.subsample_freq = 0;
    }
    if (!p.goss_enabled) {
        p.goss_top_rate = 1.0;
        p.goss_other_rate = 0.0;
    }
    if (!p.efb_enabled) p.efb_max_conflict = 0.0;
    return p;
}

TrainParams TrainParams::without_sampling() {
    TrainParams p;
    p.colsample_bytree = 1.0;
    p.subsample = 1.0;
    p.subsample_freq = 0;
    p.goss_enabled = false;
    return p;
}

}  // namespace gaitreid::gbdt
