#pragma once

#include "hpod/common.hpp"
#include "hpod/hpspace.hpp"

#include <memory>
#include <string>
#include <vector>

namespace hpod {

struct OutlierScores {
    Vector values;  // higher = more outlying
    std::string detector;
    HpSetting setting;
};

// LOF distances and sorted neighbor lists for one metric; computing this once
// per metric lets a whole n_neighbors sweep reuse it.
class LofContext {
public:
    LofContext(const Matrix& X, const std::string& metric);

    Vector scores(int n_neighbors) const;
    Eigen::Index size() const { return n_; }

private:
    Eigen::Index n_;
    Matrix dist_;                                // n x n, symmetric, 0 diagonal
    std::vector<std::vector<int>> order_;        // per row: other indices by (dist, idx)
};

Vector lof_scores(const Matrix& X, int n_neighbors, const std::string& metric);

Vector iforest_scores(const Matrix& X, int n_estimators, double max_samples,
                      double max_features, std::uint64_t seed);

// Runs the detector named by the space's algorithm on X.
Vector detector_scores(const HpSpace& space, const HpSetting& s, const Matrix& X,
                       std::uint64_t seed);

// Scores every setting, sharing LOF contexts across settings with equal metric.
// Result order matches `settings`; iForest per-setting seed = mix(seed, index).
std::vector<Vector> grid_detector_scores(const HpSpace& space,
                                         const std::vector<HpSetting>& settings,
                                         const Matrix& X, std::uint64_t seed);

// A reusable per-dataset evaluator for the online loop: LOF contexts are built
// lazily per metric and cached.
class DetectorRunner {
public:
    DetectorRunner(const HpSpace& space, const Matrix& X, std::uint64_t seed);
    Vector run(const HpSetting& s, std::uint64_t stream) const;

private:
    const HpSpace& space_;
    const Matrix& X_;
    std::uint64_t seed_;
    mutable std::vector<std::pair<std::string, std::shared_ptr<LofContext>>> lof_cache_;
};

// n_rows sizes the iForest max_samples fraction (256/n); pass 0 when unknown.
HpSetting default_setting(const HpSpace& space, Eigen::Index n_rows = 0);

// Average path length normalizer of an isolation tree leaf of k samples.
double iforest_path_adjustment(std::int64_t k);

}  // namespace hpod
