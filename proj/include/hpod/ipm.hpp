#pragma once

#include "hpod/common.hpp"
#include "hpod/hpspace.hpp"

#include <vector>

namespace hpod {

// [mc, select, hits]; mc/select in [-1,1], hits in [0,1].
struct IpmVector {
    double mc = 0.0;
    double select = 0.0;
    double hits = 0.0;

    Vector as_vector() const {
        Vector v(3);
        v << mc, select, hits;
        return v;
    }
};

inline constexpr int kIpmDim = 3;

// (avg rank - 1)/(n - 1), ascending, average ranks on ties; n=1 -> [0].
Vector rank_normalize(const Vector& scores);

double pearson_corr(const Vector& a, const Vector& b);  // zero variance -> 0

// Mean Pearson correlation between the rank-normalized candidate and each
// rank-normalized anchor (Pearson on ranks = Spearman on raw scores).
double ipm_mc(const Vector& candidate, const std::vector<Vector>& anchors);

// Two-phase consensus: drop anchors below the median correlation with the mean
// consensus, recompute it, correlate the candidate against the refined consensus.
double ipm_select(const Vector& candidate, const std::vector<Vector>& anchors);

// Hub weight of the candidate in a HITS power iteration over the stacked
// (candidate + anchors) x points matrix, rescaled so the top model scores 1.
double ipm_hits(const Vector& candidate, const std::vector<Vector>& anchors);

IpmVector extract_ipms(const Vector& candidate_scores,
                       const std::vector<Vector>& anchor_rank_scores);

struct AnchorSet {
    std::vector<int> grid_indices;          // into the meta grid
    std::vector<HpSetting> settings;
    std::vector<double> objective_trace;    // greedy objective after each accept
};

// Greedy forward selection of at most max_size grid HPs maximizing the mean
// (across datasets) Spearman correlation between the MC values of all grid
// models and the true performance column. `grid_rank_scores[i][j]` is the
// rank-normalized score vector of grid HP j on meta-train dataset i, `perf` is
// the n x m performance matrix.
AnchorSet build_anchor_set(const Matrix& perf,
                           const std::vector<std::vector<Vector>>& grid_rank_scores,
                           const std::vector<HpSetting>& grid, int max_size = 10);

}  // namespace hpod
