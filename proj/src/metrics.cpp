#include "hpod/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace hpod {

double average_precision(const Vector& scores, const Eigen::VectorXi& labels) {
    const auto n = scores.size();
    if (n != labels.size()) throw DataError("AP length mismatch");
    int positives = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (labels(i) != 0 && labels(i) != 1) throw DataError("labels must be 0/1");
        positives += labels(i);
    }
    if (positives == 0 || positives == static_cast<int>(n))
        throw DataError("AP needs both classes present");

    std::vector<int> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return scores(a) != scores(b) ? scores(a) > scores(b) : a < b;
    });

    double ap = 0.0;
    int hits = 0;
    for (size_t k = 0; k < idx.size(); ++k) {
        if (labels(idx[k]) == 1) {
            ++hits;
            ap += static_cast<double>(hits) / static_cast<double>(k + 1);
        }
    }
    return ap / static_cast<double>(positives);
}

double normalized_ap_rank(double ap, const Vector& grid_aps) {
    const auto m = grid_aps.size();
    if (m < 2) throw DataError("normalized_ap_rank needs m >= 2");
    int below = 0, equal = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
        if (grid_aps(j) < ap) ++below;
        if (grid_aps(j) == ap) ++equal;
    }
    return (static_cast<double>(below) + 0.5 * static_cast<double>(equal)) /
           static_cast<double>(m);
}

double top_q(double ap, const Vector& grid_aps) {
    const auto m = grid_aps.size();
    if (m < 1) throw DataError("top_q needs m >= 1");
    std::vector<double> sorted(grid_aps.data(), grid_aps.data() + m);
    std::sort(sorted.rbegin(), sorted.rend());  // descending
    for (int qi = 1; qi <= 100; ++qi) {
        const double q = qi / 100.0;
        const auto k = static_cast<size_t>(
            std::ceil(q * static_cast<double>(m)));
        if (ap >= sorted[std::min(k, static_cast<size_t>(m)) - 1]) return q;
    }
    return 1.0;
}

namespace detail {

double wilcoxon_impl(const Vector& x, const Vector& y, Alternative alt,
                     bool force_normal) {
    if (x.size() != y.size()) throw DataError("wilcoxon length mismatch");
    std::vector<double> diffs;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double d = x(i) - y(i);
        if (d != 0.0) diffs.push_back(d);
    }
    const int n = static_cast<int>(diffs.size());
    if (n == 0) throw DataError("wilcoxon: all differences zero");
    if (n < 5) throw DataError("wilcoxon needs >= 5 non-zero differences");

    // average ranks of |d|
    std::vector<int> idx(diffs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return std::abs(diffs[static_cast<size_t>(a)]) <
               std::abs(diffs[static_cast<size_t>(b)]);
    });
    std::vector<double> rank(diffs.size());
    std::vector<int> tie_sizes;
    size_t i = 0;
    while (i < idx.size()) {
        size_t j = i;
        while (j + 1 < idx.size() &&
               std::abs(diffs[static_cast<size_t>(idx[j + 1])]) ==
                   std::abs(diffs[static_cast<size_t>(idx[i])]))
            ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) rank[static_cast<size_t>(idx[k])] = avg;
        tie_sizes.push_back(static_cast<int>(j - i + 1));
        i = j + 1;
    }

    double w_plus = 0.0;
    for (size_t k = 0; k < diffs.size(); ++k)
        if (diffs[k] > 0.0) w_plus += rank[k];

    if (n <= 25 && !force_normal) {
        // exact null distribution over doubled (integral) ranks
        std::vector<long long> scaled(diffs.size());
        long long total = 0;
        for (size_t k = 0; k < diffs.size(); ++k) {
            scaled[k] = std::llround(2.0 * rank[k]);
            total += scaled[k];
        }
        std::vector<double> count(static_cast<size_t>(total) + 1, 0.0);
        count[0] = 1.0;
        for (size_t k = 0; k < scaled.size(); ++k)
            for (long long w = total; w >= scaled[k]; --w)
                count[static_cast<size_t>(w)] +=
                    count[static_cast<size_t>(w - scaled[k])];
        const double denom = std::ldexp(1.0, n);
        const long long obs = std::llround(2.0 * w_plus);
        double p_le = 0.0, p_ge = 0.0;
        for (long long w = 0; w <= total; ++w) {
            if (w <= obs) p_le += count[static_cast<size_t>(w)];
            if (w >= obs) p_ge += count[static_cast<size_t>(w)];
        }
        p_le /= denom;
        p_ge /= denom;
        if (alt == Alternative::Greater) return std::min(1.0, p_ge);
        return std::min(1.0, 2.0 * std::min(p_le, p_ge));
    }

    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    double tie_corr = 0.0;
    for (int t : tie_sizes)
        tie_corr += static_cast<double>(t) * t * t - t;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_corr / 48.0;
    const double sd = std::sqrt(var);
    const auto phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    if (alt == Alternative::Greater) {
        const double z = (w_plus - mean - 0.5) / sd;
        return std::clamp(1.0 - phi(z), 0.0, 1.0);
    }
    const double z = (std::abs(w_plus - mean) - 0.5) / sd;
    return std::clamp(2.0 * (1.0 - phi(z)), 0.0, 1.0);
}

}  // namespace detail

double wilcoxon_signed_rank(const Vector& x, const Vector& y, Alternative alt) {
    return detail::wilcoxon_impl(x, y, alt, false);
}

}  // namespace hpod
