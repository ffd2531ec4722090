#include "hpod/metafeatures.hpp"

#include "hpod/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace hpod {

namespace {

double nan_to_zero(double v) { return std::isfinite(v) ? v : 0.0; }

struct ColMoments {
    double mean, sd, skew, exkurt;
};

ColMoments column_moments(const Vector& col) {
    const double n = static_cast<double>(col.size());
    const double mean = col.mean();
    const auto c = col.array() - mean;
    const double var = c.square().sum() / n;
    const double sd = std::sqrt(var);
    double skew = 0.0, exkurt = 0.0;
    if (sd > 0.0) {
        skew = (c.pow(3).sum() / n) / (sd * sd * sd);
        exkurt = (c.pow(4).sum() / n) / (var * var) - 3.0;
    }
    return {mean, sd, skew, exkurt};
}

// linear-interpolation percentile, q in [0,1]
double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<size_t>(std::floor(pos));
    const auto hi = static_cast<size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
}

double pearson(const Vector& a, const Vector& b) {
    const double ma = a.mean(), mb = b.mean();
    const auto ca = a.array() - ma;
    const auto cb = b.array() - mb;
    const double denom = std::sqrt(ca.square().sum() * cb.square().sum());
    if (denom == 0.0) return 0.0;
    return ca.cwiseProduct(cb).sum() / denom;
}

}  // namespace

MetaFeatureVector extract_meta_features(const Matrix& X, std::uint64_t seed) {
    const auto n = X.rows();
    const auto d = X.cols();
    if (n < 2 || d < 1) throw DataError("meta-features need n >= 2, d >= 1");

    std::vector<double> out;
    out.reserve(kMetaFeatureDim);

    // 1-3: size and shape
    out.push_back(std::log10(static_cast<double>(n)));
    out.push_back(std::log10(static_cast<double>(d)));
    out.push_back(static_cast<double>(d) / static_cast<double>(n));

    // 4-19: {mean, std, min, max} across columns of each per-column moment
    std::vector<ColMoments> moments;
    moments.reserve(static_cast<size_t>(d));
    for (Eigen::Index c = 0; c < d; ++c) moments.push_back(column_moments(X.col(c)));
    const auto aggregate = [&](auto getter) {
        Vector v(d);
        for (Eigen::Index c = 0; c < d; ++c) v(c) = getter(moments[static_cast<size_t>(c)]);
        const double mean = v.mean();
        const double sd = std::sqrt((v.array() - mean).square().sum() / static_cast<double>(d));
        out.push_back(mean);
        out.push_back(sd);
        out.push_back(v.minCoeff());
        out.push_back(v.maxCoeff());
    };
    aggregate([](const ColMoments& m) { return m.mean; });
    aggregate([](const ColMoments& m) { return m.sd; });
    aggregate([](const ColMoments& m) { return m.skew; });
    aggregate([](const ColMoments& m) { return m.exkurt; });

    // 20-21: {mean, max} |Pearson| over up to 50 seed-sampled column pairs
    {
        std::vector<std::pair<int, int>> pairs;
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b) pairs.emplace_back(a, b);
        Rng rng(mix_seed(seed, 1));
        if (pairs.size() > 50) {
            for (size_t i = 0; i < 50; ++i) {
                const auto j = static_cast<size_t>(rng.uniform_int(
                    static_cast<std::int64_t>(i), static_cast<std::int64_t>(pairs.size()) - 1));
                std::swap(pairs[i], pairs[j]);
            }
            pairs.resize(50);
        }
        double sum = 0.0, mx = 0.0;
        for (const auto& [a, b] : pairs) {
            const double r = std::abs(pearson(X.col(a), X.col(b)));
            sum += r;
            mx = std::max(mx, r);
        }
        out.push_back(pairs.empty() ? 0.0 : sum / static_cast<double>(pairs.size()));
        out.push_back(mx);
    }

    // 22-23: IQR outlier fraction per column, {mean, max}
    {
        Vector frac(d);
        for (Eigen::Index c = 0; c < d; ++c) {
            std::vector<double> col(X.col(c).data(), X.col(c).data() + n);
            const double q1 = percentile(col, 0.25);
            const double q3 = percentile(col, 0.75);
            const double iqr = q3 - q1;
            int cnt = 0;
            for (double v : col)
                if (v < q1 - 1.5 * iqr || v > q3 + 1.5 * iqr) ++cnt;
            frac(c) = static_cast<double>(cnt) / static_cast<double>(n);
        }
        out.push_back(frac.mean());
        out.push_back(frac.maxCoeff());
    }

    // 24-26: top-3 PCA explained-variance ratios on standardized data
    {
        Matrix Z = X;
        for (Eigen::Index c = 0; c < d; ++c) {
            const double mean = Z.col(c).mean();
            const double sd =
                std::sqrt((Z.col(c).array() - mean).square().sum() / static_cast<double>(n));
            if (sd > 0.0)
                Z.col(c) = (Z.col(c).array() - mean) / sd;
            else
                Z.col(c).setZero();
        }
        const Matrix cov = Z.transpose() * Z / static_cast<double>(n);
        Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
        std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + d);
        std::sort(ev.rbegin(), ev.rend());
        const double total = std::accumulate(ev.begin(), ev.end(), 0.0);
        for (int i = 0; i < 3; ++i) {
            const double ratio =
                (i < static_cast<int>(ev.size()) && total > 0.0) ? ev[static_cast<size_t>(i)] / total : 0.0;
            out.push_back(ratio);
        }
    }

    // 27-31: iForest landmarker score statistics; rows are sorted into a
    // canonical order first so the subsampled trees (and hence the score
    // multiset) do not depend on the input row order
    {
        std::vector<int> order(static_cast<size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            for (Eigen::Index c = 0; c < d; ++c) {
                if (X(a, c) != X(b, c)) return X(a, c) < X(b, c);
            }
            return false;
        });
        Matrix Xc(n, d);
        for (Eigen::Index i = 0; i < n; ++i) Xc.row(i) = X.row(order[static_cast<size_t>(i)]);
        const Vector s = iforest_scores(Xc, 50, 0.5, 1.0, mix_seed(seed, 2));
        const auto m = column_moments(s);
        std::vector<double> sv(s.data(), s.data() + n);
        const double median = percentile(sv, 0.5);
        out.push_back(m.mean);
        out.push_back(m.sd);
        out.push_back(m.skew);
        out.push_back(median != 0.0 ? percentile(sv, 0.9) / median : 0.0);
        out.push_back(median != 0.0 ? s.maxCoeff() / median : 0.0);
    }

    MetaFeatureVector mf;
    mf.values.resize(kMetaFeatureDim);
    for (int i = 0; i < kMetaFeatureDim; ++i) mf.values(i) = nan_to_zero(out[static_cast<size_t>(i)]);
    return mf;
}

MfScaler fit_mf_scaler(const std::vector<MetaFeatureVector>& train) {
    if (train.empty()) throw DataError("empty meta-feature matrix");
    const auto n = static_cast<double>(train.size());
    MfScaler sc;
    sc.mean = Vector::Zero(kMetaFeatureDim);
    for (const auto& m : train) sc.mean += m.values;
    sc.mean /= n;
    sc.std = Vector::Zero(kMetaFeatureDim);
    for (const auto& m : train) sc.std += (m.values - sc.mean).cwiseAbs2();
    sc.std = (sc.std / n).cwiseSqrt();
    return sc;
}

double mf_distance(const MetaFeatureVector& a, const MetaFeatureVector& b,
                   const MfScaler& scaler) {
    if (a.schema != b.schema) throw DataError("meta-feature schema mismatch");
    double sum = 0.0;
    for (int i = 0; i < kMetaFeatureDim; ++i) {
        if (scaler.std(i) <= 0.0) continue;
        const double diff = (a.values(i) - b.values(i)) / scaler.std(i);
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

}  // namespace hpod
