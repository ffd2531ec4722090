#include "hpod/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hpod {

Vector rank_normalize(const Vector& scores) {
    const auto n = scores.size();
    if (n < 1) throw DataError("rank_normalize needs length >= 1");
    if (n == 1) return Vector::Zero(1);
    std::vector<int> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return scores(a) < scores(b); });
    Vector ranks(n);
    size_t i = 0;
    while (i < idx.size()) {
        size_t j = i;
        while (j + 1 < idx.size() && scores(idx[j + 1]) == scores(idx[i])) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) ranks(idx[k]) = avg;
        i = j + 1;
    }
    return (ranks.array() - 1.0) / static_cast<double>(n - 1);
}

double pearson_corr(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DataError("length mismatch in correlation");
    const auto ca = a.array() - a.mean();
    const auto cb = b.array() - b.mean();
    const double denom = std::sqrt(ca.square().sum() * cb.square().sum());
    if (denom == 0.0) return 0.0;
    return ca.cwiseProduct(cb).sum() / denom;
}

double ipm_mc(const Vector& candidate, const std::vector<Vector>& anchors) {
    if (anchors.empty()) throw DataError("mc needs at least one anchor");
    double sum = 0.0;
    for (const auto& a : anchors) sum += pearson_corr(candidate, a);
    return sum / static_cast<double>(anchors.size());
}

double ipm_select(const Vector& candidate, const std::vector<Vector>& anchors) {
    if (anchors.empty()) throw DataError("select needs at least one anchor");
    const auto n = candidate.size();
    Vector consensus = Vector::Zero(n);
    for (const auto& a : anchors) {
        if (a.size() != n) throw DataError("length mismatch in select");
        consensus += a;
    }
    consensus /= static_cast<double>(anchors.size());

    std::vector<double> corr(anchors.size());
    for (size_t i = 0; i < anchors.size(); ++i) corr[i] = pearson_corr(anchors[i], consensus);
    std::vector<double> sorted = corr;
    std::sort(sorted.begin(), sorted.end());
    const size_t m = sorted.size();
    const double median = m % 2 == 1 ? sorted[m / 2]
                                     : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);

    Vector refined = Vector::Zero(n);
    int kept = 0;
    for (size_t i = 0; i < anchors.size(); ++i) {
        if (corr[i] >= median) {
            refined += anchors[i];
            ++kept;
        }
    }
    refined /= static_cast<double>(kept);
    return pearson_corr(candidate, refined);
}

double ipm_hits(const Vector& candidate, const std::vector<Vector>& anchors) {
    if (anchors.empty()) throw DataError("hits needs at least one anchor");
    const auto n = candidate.size();
    const auto rows = static_cast<Eigen::Index>(anchors.size()) + 1;
    Matrix S(rows, n);
    S.row(0) = candidate.transpose();
    for (size_t i = 0; i < anchors.size(); ++i) {
        if (anchors[i].size() != n) throw DataError("length mismatch in hits");
        S.row(static_cast<Eigen::Index>(i) + 1) = anchors[i].transpose();
    }

    Vector h = Vector::Constant(rows, 1.0 / std::sqrt(static_cast<double>(rows)));
    for (int it = 0; it < 100; ++it) {
        Vector a = S.transpose() * h;
        const double an = a.norm();
        if (an > 0.0) a /= an;
        Vector h_next = S * a;
        const double hn = h_next.norm();
        if (hn > 0.0) h_next /= hn;
        const double delta = (h_next - h).cwiseAbs().maxCoeff();
        h = h_next;
        if (delta < 1e-9) break;
    }
    const double mx = h.maxCoeff();
    if (mx <= 0.0) return 0.0;
    return std::clamp(h(0) / mx, 0.0, 1.0);
}

IpmVector extract_ipms(const Vector& candidate_scores,
                       const std::vector<Vector>& anchor_rank_scores) {
    const Vector cand = rank_normalize(candidate_scores);
    IpmVector v;
    v.mc = ipm_mc(cand, anchor_rank_scores);
    v.select = ipm_select(cand, anchor_rank_scores);
    v.hits = ipm_hits(cand, anchor_rank_scores);
    return v;
}

AnchorSet build_anchor_set(const Matrix& perf,
                           const std::vector<std::vector<Vector>>& grid_rank_scores,
                           const std::vector<HpSetting>& grid, int max_size) {
    const auto n_data = perf.rows();
    const auto m = perf.cols();
    if (m < 1 || grid.empty()) throw DataError("empty grid in anchor selection");
    if (static_cast<Eigen::Index>(grid.size()) != m ||
        static_cast<Eigen::Index>(grid_rank_scores.size()) != n_data)
        throw DataError("anchor selection shape mismatch");

    // per-dataset m x m Pearson correlation matrices of the rank-normalized
    // grid score vectors; mc against a tentative anchor set is then a mean of
    // cached entries.
    std::vector<Matrix> corr(static_cast<size_t>(n_data));
    for (Eigen::Index i = 0; i < n_data; ++i) {
        const auto& sc = grid_rank_scores[static_cast<size_t>(i)];
        const auto np = sc[0].size();
        Matrix Z(np, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            Vector c = sc[static_cast<size_t>(j)];
            c.array() -= c.mean();
            const double nrm = c.norm();
            Z.col(j) = nrm > 0.0 ? Vector(c / nrm) : Vector::Zero(np);
        }
        corr[static_cast<size_t>(i)] = Z.transpose() * Z;
    }

    std::vector<Vector> perf_ranks(static_cast<size_t>(n_data));
    for (Eigen::Index i = 0; i < n_data; ++i)
        perf_ranks[static_cast<size_t>(i)] = rank_normalize(perf.row(i).transpose());

    const auto objective_with = [&](const std::vector<int>& anchors) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n_data; ++i) {
            const auto& C = corr[static_cast<size_t>(i)];
            Vector mc = Vector::Zero(m);
            for (int a : anchors) mc += C.col(a);
            mc /= static_cast<double>(anchors.size());
            // Spearman between MC values and the true performance column
            total += pearson_corr(rank_normalize(mc), perf_ranks[static_cast<size_t>(i)]);
        }
        return total / static_cast<double>(n_data);
    };

    AnchorSet result;
    double best_obj = -std::numeric_limits<double>::infinity();
    std::vector<int> chosen;
    while (static_cast<int>(chosen.size()) < max_size) {
        int best_cand = -1;
        double best_cand_obj = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < static_cast<int>(m); ++j) {
            if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
            auto trial = chosen;
            trial.push_back(j);
            const double obj = objective_with(trial);
            if (obj > best_cand_obj) {  // ties keep the lowest grid index
                best_cand_obj = obj;
                best_cand = j;
            }
        }
        if (best_cand < 0) break;
        if (!chosen.empty() && best_cand_obj < best_obj + 1e-4) break;
        chosen.push_back(best_cand);
        best_obj = best_cand_obj;
        result.objective_trace.push_back(best_obj);
    }

    result.grid_indices = chosen;
    for (int j : chosen) result.settings.push_back(grid[static_cast<size_t>(j)]);
    return result;
}

}  // namespace hpod
