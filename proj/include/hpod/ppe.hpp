#pragma once

#include "hpod/common.hpp"
#include "hpod/hpspace.hpp"
#include "hpod/ipm.hpp"
#include "hpod/metafeatures.hpp"

#include <vector>

namespace hpod {

// Row (i,j) = [encode(grid hp j) || meta-features of dataset i || IPMs (i,j)]
// with target P(i,j), ordered by (i, j).
struct TrainTable {
    Matrix X;  // rows x feature_dim
    Vector y;  // AP targets in [0,1]
    std::vector<std::pair<int, int>> provenance;  // (dataset index, grid index)
};

TrainTable build_training_table(const Matrix& perf,
                                const std::vector<HpEncoding>& grid_encodings,
                                const std::vector<MetaFeatureVector>& meta_features,
                                const std::vector<std::vector<IpmVector>>& ipms);

struct PpeParams {
    int trees = 200;
    int max_depth = 6;
    double learning_rate = 0.05;
    double row_subsample = 0.8;
    int min_leaf = 5;
    std::uint64_t seed = 0;
};

struct PpeTreeNode {
    int feature = -1;  // -1 = leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    double value = 0.0;  // leaf value, learning rate already applied
};

struct PpeTree {
    std::vector<PpeTreeNode> nodes;
    double predict(const Vector& x) const;
};

struct PpeModel {
    double base_score = 0.0;
    std::vector<PpeTree> trees;
    int feature_dim = 0;
    PpeParams params;

    double predict_raw(const Vector& x) const;
    // Raw ensemble output clamped to [0,1] (targets are AP values).
    double predict(const Vector& x) const;
};

// Stagewise least-squares boosting with greedy variance-reduction splits on a
// seed-deterministic row subsample per tree. Deterministic given seed.
PpeModel train_ppe(const TrainTable& table, const PpeParams& params);

Vector ppe_feature_row(const HpEncoding& enc, const MetaFeatureVector& mf,
                       const IpmVector& ipm);

}  // namespace hpod
