#pragma once

#include "hpod/common.hpp"

#include <string>

namespace hpod {

inline constexpr int kMetaFeatureDim = 31;
inline constexpr const char* kMetaFeatureSchema = "hpod-mf-v1";

struct MetaFeatureVector {
    Vector values;  // length kMetaFeatureDim, finite (NaN -> 0)
    std::string schema = kMetaFeatureSchema;
};

// Fixed 31-dim dataset descriptor: size/shape, per-column moment aggregates,
// dependence, IQR outlier-rate proxies, top PCA spectrum, iForest landmarker.
// Deterministic given seed, invariant to row permutation.
MetaFeatureVector extract_meta_features(const Matrix& X, std::uint64_t seed);

struct MfScaler {
    Vector mean;  // per-dimension over the meta-train matrix M
    Vector std;   // population std; zero-std dimensions are ignored in distances
};

MfScaler fit_mf_scaler(const std::vector<MetaFeatureVector>& train);

double mf_distance(const MetaFeatureVector& a, const MetaFeatureVector& b,
                   const MfScaler& scaler);

}  // namespace hpod
