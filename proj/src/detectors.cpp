#include "hpod/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace hpod {

namespace {

constexpr double kLrdCap = 1e12;  // stands in for the +inf lrd sentinel

Matrix pairwise_distances(const Matrix& X, const std::string& metric) {
    const auto n = X.rows();
    Matrix D(n, n);
    if (metric == "euclidean" || metric == "minkowski") {
        // p = 2 for minkowski
        const Vector sq = X.rowwise().squaredNorm();
        D.noalias() = -2.0 * X * X.transpose();
        D.colwise() += sq;
        D.rowwise() += sq.transpose();
        D = D.cwiseMax(0.0).cwiseSqrt();
    } else if (metric == "manhattan") {
        for (Eigen::Index i = 0; i < n; ++i) {
            D(i, i) = 0.0;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double d = (X.row(i) - X.row(j)).cwiseAbs().sum();
                D(i, j) = D(j, i) = d;
            }
        }
    } else if (metric == "chebyshev") {
        for (Eigen::Index i = 0; i < n; ++i) {
            D(i, i) = 0.0;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double d = (X.row(i) - X.row(j)).cwiseAbs().maxCoeff();
                D(i, j) = D(j, i) = d;
            }
        }
    } else if (metric == "cosine") {
        const Vector norms = X.rowwise().norm();
        for (Eigen::Index i = 0; i < n; ++i) {
            D(i, i) = 0.0;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                double d;
                if (norms(i) == 0.0 || norms(j) == 0.0) {
                    d = 1.0;  // zero vectors: distance 1 to everything
                } else {
                    d = 1.0 - X.row(i).dot(X.row(j)) / (norms(i) * norms(j));
                }
                D(i, j) = D(j, i) = d;
            }
        }
    } else {
        throw ConfigError("unknown LOF metric: " + metric);
    }
    for (Eigen::Index i = 0; i < n; ++i) D(i, i) = 0.0;
    return D;
}

}  // namespace

LofContext::LofContext(const Matrix& X, const std::string& metric) : n_(X.rows()) {
    if (n_ < 2) throw DataError("LOF needs at least 2 rows");
    dist_ = pairwise_distances(X, metric);
    order_.resize(static_cast<size_t>(n_));
    for (Eigen::Index i = 0; i < n_; ++i) {
        auto& ord = order_[static_cast<size_t>(i)];
        ord.reserve(static_cast<size_t>(n_ - 1));
        for (Eigen::Index j = 0; j < n_; ++j)
            if (j != i) ord.push_back(static_cast<int>(j));
        std::sort(ord.begin(), ord.end(), [&](int a, int b) {
            const double da = dist_(i, a), db = dist_(i, b);
            return da != db ? da < db : a < b;
        });
    }
}

Vector LofContext::scores(int n_neighbors) const {
    if (n_neighbors < 1) throw ConfigError("n_neighbors must be >= 1");
    int k = n_neighbors;
    if (k >= n_) {
        std::fprintf(stderr, "[hpod] warning: n_neighbors=%d >= n=%lld, clamping to %lld\n",
                     n_neighbors, static_cast<long long>(n_), static_cast<long long>(n_ - 1));
        k = static_cast<int>(n_ - 1);
    }

    Vector kdist(n_);
    std::vector<std::vector<int>> nbrs(static_cast<size_t>(n_));
    for (Eigen::Index i = 0; i < n_; ++i) {
        const auto& ord = order_[static_cast<size_t>(i)];
        const double kd = dist_(i, ord[static_cast<size_t>(k - 1)]);
        kdist(i) = kd;
        auto& nb = nbrs[static_cast<size_t>(i)];
        // include every point at exactly k-distance (ties extend the neighborhood)
        for (int j : ord) {
            if (dist_(i, j) <= kd)
                nb.push_back(j);
            else
                break;
        }
    }

    Vector lrd(n_);
    for (Eigen::Index i = 0; i < n_; ++i) {
        double sum = 0.0;
        for (int j : nbrs[static_cast<size_t>(i)])
            sum += std::max(kdist(j), dist_(i, j));
        const double mean_reach = sum / static_cast<double>(nbrs[static_cast<size_t>(i)].size());
        lrd(i) = mean_reach > 0.0 ? 1.0 / mean_reach : kLrdCap;
    }

    Vector s(n_);
    for (Eigen::Index i = 0; i < n_; ++i) {
        double sum = 0.0;
        for (int j : nbrs[static_cast<size_t>(i)]) sum += lrd(j) / lrd(i);
        s(i) = sum / static_cast<double>(nbrs[static_cast<size_t>(i)].size());
    }
    return s;
}

Vector lof_scores(const Matrix& X, int n_neighbors, const std::string& metric) {
    return LofContext(X, metric).scores(n_neighbors);
}

double iforest_path_adjustment(std::int64_t k) {
    if (k <= 1) return 0.0;
    const double kk = static_cast<double>(k);
    const double harmonic = std::log(kk - 1.0) + 0.5772156649;
    return 2.0 * harmonic - 2.0 * (kk - 1.0) / kk;
}

namespace {

struct IsoNode {
    int feature = -1;      // -1 = leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    double leaf_adjust = 0.0;  // c(leaf size) at leaves
};

struct IsoTree {
    std::vector<IsoNode> nodes;
    std::vector<int> features;  // column subset used by this tree
};

int build_iso_node(IsoTree& tree, const Matrix& X, std::vector<int>& rows, int lo,
                   int hi, int depth, int height_limit, Rng& rng) {
    const int size = hi - lo;
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (size <= 1 || depth >= height_limit) {
        tree.nodes[static_cast<size_t>(id)].leaf_adjust = iforest_path_adjustment(size);
        return id;
    }
    // candidate features must have spread in this node
    std::vector<int> usable;
    for (int f : tree.features) {
        double mn = X(rows[static_cast<size_t>(lo)], f), mx = mn;
        for (int r = lo + 1; r < hi; ++r) {
            const double v = X(rows[static_cast<size_t>(r)], f);
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        if (mx > mn) usable.push_back(f);
    }
    if (usable.empty()) {
        tree.nodes[static_cast<size_t>(id)].leaf_adjust = iforest_path_adjustment(size);
        return id;
    }
    const int f = usable[static_cast<size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(usable.size()) - 1))];
    double mn = X(rows[static_cast<size_t>(lo)], f), mx = mn;
    for (int r = lo + 1; r < hi; ++r) {
        const double v = X(rows[static_cast<size_t>(r)], f);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    const double thr = rng.uniform(mn, mx);
    const auto mid_it = std::partition(rows.begin() + lo, rows.begin() + hi,
                                       [&](int r) { return X(r, f) < thr; });
    int mid = static_cast<int>(mid_it - rows.begin());
    if (mid == lo || mid == hi) {
        // degenerate split (threshold at the boundary); fall back to a leaf
        tree.nodes[static_cast<size_t>(id)].leaf_adjust = iforest_path_adjustment(size);
        return id;
    }
    tree.nodes[static_cast<size_t>(id)].feature = f;
    tree.nodes[static_cast<size_t>(id)].threshold = thr;
    const int l = build_iso_node(tree, X, rows, lo, mid, depth + 1, height_limit, rng);
    const int r = build_iso_node(tree, X, rows, mid, hi, depth + 1, height_limit, rng);
    tree.nodes[static_cast<size_t>(id)].left = l;
    tree.nodes[static_cast<size_t>(id)].right = r;
    return id;
}

double iso_path_length(const IsoTree& tree, const Matrix& X, Eigen::Index row) {
    int id = 0;
    int depth = 0;
    for (;;) {
        const auto& nd = tree.nodes[static_cast<size_t>(id)];
        if (nd.feature < 0) return depth + nd.leaf_adjust;
        id = X(row, nd.feature) < nd.threshold ? nd.left : nd.right;
        ++depth;
    }
}

std::vector<int> sample_without_replacement(int n, int k, Rng& rng) {
    std::vector<int> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < k; ++i) {
        const auto j = rng.uniform_int(i, n - 1);
        std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
    }
    idx.resize(static_cast<size_t>(k));
    return idx;
}

}  // namespace

Vector iforest_scores(const Matrix& X, int n_estimators, double max_samples,
                      double max_features, std::uint64_t seed) {
    const auto n = X.rows();
    const auto d = X.cols();
    if (n < 2) throw DataError("iForest needs at least 2 rows");
    if (n_estimators < 1) throw ConfigError("n_estimators must be >= 1");
    if (!(max_samples > 0.0 && max_samples <= 1.0) ||
        !(max_features > 0.0 && max_features <= 1.0))
        throw ConfigError("iForest fractions must lie in (0,1]");

    const int psi = std::max<int>(
        2, static_cast<int>(std::ceil(max_samples * static_cast<double>(n))));
    const int nf = static_cast<int>(std::ceil(max_features * static_cast<double>(d)));
    if (psi < 1 || nf < 1) throw ConfigError("iForest subsample rounds to 0");
    const int height_limit =
        static_cast<int>(std::ceil(std::log2(static_cast<double>(psi))));

    Vector path_sum = Vector::Zero(n);
    for (int t = 0; t < n_estimators; ++t) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
        IsoTree tree;
        tree.features = sample_without_replacement(static_cast<int>(d), nf, rng);
        std::sort(tree.features.begin(), tree.features.end());
        auto rows = sample_without_replacement(static_cast<int>(n), std::min<int>(psi, static_cast<int>(n)), rng);
        build_iso_node(tree, X, rows, 0, static_cast<int>(rows.size()), 0, height_limit, rng);
        for (Eigen::Index i = 0; i < n; ++i) path_sum(i) += iso_path_length(tree, X, i);
    }

    const double cpsi = iforest_path_adjustment(std::min<std::int64_t>(psi, n));
    Vector s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mean_path = path_sum(i) / static_cast<double>(n_estimators);
        s(i) = std::pow(2.0, -mean_path / cpsi);
    }
    return s;
}

Vector detector_scores(const HpSpace& space, const HpSetting& s, const Matrix& X,
                       std::uint64_t seed) {
    validate_setting(space, s);
    if (space.algorithm == "lof") {
        return lof_scores(X, static_cast<int>(get_int(space, s, "n_neighbors")),
                          get_cat(space, s, "metric"));
    }
    if (space.algorithm == "iforest") {
        return iforest_scores(X, static_cast<int>(get_int(space, s, "n_estimators")),
                              get_real(space, s, "max_samples"),
                              get_real(space, s, "max_features"), seed);
    }
    throw ConfigError("unknown algorithm: " + space.algorithm);
}

std::vector<Vector> grid_detector_scores(const HpSpace& space,
                                         const std::vector<HpSetting>& settings,
                                         const Matrix& X, std::uint64_t seed) {
    std::vector<Vector> out(settings.size());
    if (space.algorithm == "lof") {
        std::vector<std::pair<std::string, std::shared_ptr<LofContext>>> cache;
        for (size_t j = 0; j < settings.size(); ++j) {
            const auto& metric = get_cat(space, settings[j], "metric");
            std::shared_ptr<LofContext> ctx;
            for (const auto& [m, c] : cache)
                if (m == metric) ctx = c;
            if (!ctx) {
                ctx = std::make_shared<LofContext>(X, metric);
                cache.emplace_back(metric, ctx);
            }
            out[j] = ctx->scores(static_cast<int>(get_int(space, settings[j], "n_neighbors")));
        }
    } else {
        for (size_t j = 0; j < settings.size(); ++j)
            out[j] = detector_scores(space, settings[j], X,
                                     mix_seed(seed, static_cast<std::uint64_t>(j)));
    }
    return out;
}

DetectorRunner::DetectorRunner(const HpSpace& space, const Matrix& X, std::uint64_t seed)
    : space_(space), X_(X), seed_(seed) {}

Vector DetectorRunner::run(const HpSetting& s, std::uint64_t stream) const {
    if (space_.algorithm == "lof") {
        const auto& metric = get_cat(space_, s, "metric");
        std::shared_ptr<LofContext> ctx;
        for (const auto& [m, c] : lof_cache_)
            if (m == metric) ctx = c;
        if (!ctx) {
            ctx = std::make_shared<LofContext>(X_, metric);
            lof_cache_.emplace_back(metric, ctx);
        }
        return ctx->scores(static_cast<int>(get_int(space_, s, "n_neighbors")));
    }
    return detector_scores(space_, s, X_, mix_seed(seed_, stream));
}

HpSetting default_setting(const HpSpace& space, Eigen::Index n_rows) {
    if (space.algorithm == "lof") {
        HpSetting s;
        s.values = {std::int64_t{20}, std::string{"minkowski"}};
        return s;
    }
    if (space.algorithm == "iforest") {
        HpSetting s;
        // max_samples 256/n as a fraction, max_features 1.0; both clamped to the
        // grid hull so the setting stays inside the declared space.
        double ms = n_rows > 0 ? std::min(256.0 / static_cast<double>(n_rows), 1.0) : 0.9;
        ms = std::clamp(ms, 0.1, 0.9);
        s.values = {std::int64_t{100}, ms, 0.8};
        return s;
    }
    throw ConfigError("unknown algorithm: " + space.algorithm);
}

}  // namespace hpod
