#include "hpod/ppe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hpod {

Vector ppe_feature_row(const HpEncoding& enc, const MetaFeatureVector& mf,
                       const IpmVector& ipm) {
    Vector x(static_cast<Eigen::Index>(enc.v.size()) + kMetaFeatureDim + kIpmDim);
    Eigen::Index p = 0;
    for (double v : enc.v) x(p++) = v;
    x.segment(p, kMetaFeatureDim) = mf.values;
    p += kMetaFeatureDim;
    x(p++) = ipm.mc;
    x(p++) = ipm.select;
    x(p) = ipm.hits;
    return x;
}

TrainTable build_training_table(const Matrix& perf,
                                const std::vector<HpEncoding>& grid_encodings,
                                const std::vector<MetaFeatureVector>& meta_features,
                                const std::vector<std::vector<IpmVector>>& ipms) {
    const auto n = perf.rows();
    const auto m = perf.cols();
    if (static_cast<Eigen::Index>(grid_encodings.size()) != m ||
        static_cast<Eigen::Index>(meta_features.size()) != n ||
        static_cast<Eigen::Index>(ipms.size()) != n)
        throw DataError("training table shape mismatch");
    for (const auto& row : ipms)
        if (static_cast<Eigen::Index>(row.size()) != m)
            throw DataError("training table shape mismatch");

    const auto dim = static_cast<Eigen::Index>(grid_encodings[0].v.size()) +
                     kMetaFeatureDim + kIpmDim;
    TrainTable t;
    t.X.resize(n * m, dim);
    t.y.resize(n * m);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            t.X.row(r) = ppe_feature_row(grid_encodings[static_cast<size_t>(j)],
                                         meta_features[static_cast<size_t>(i)],
                                         ipms[static_cast<size_t>(i)][static_cast<size_t>(j)])
                             .transpose();
            t.y(r) = perf(i, j);
            t.provenance.emplace_back(static_cast<int>(i), static_cast<int>(j));
            ++r;
        }
    return t;
}

double PpeTree::predict(const Vector& x) const {
    int id = 0;
    for (;;) {
        const auto& nd = nodes[static_cast<size_t>(id)];
        if (nd.feature < 0) return nd.value;
        id = x(nd.feature) <= nd.threshold ? nd.left : nd.right;
    }
}

double PpeModel::predict_raw(const Vector& x) const {
    if (x.size() != feature_dim) throw DataError("PPE feature contract mismatch");
    double out = base_score;
    for (const auto& t : trees) out += t.predict(x);
    return out;
}

double PpeModel::predict(const Vector& x) const {
    return std::clamp(predict_raw(x), 0.0, 1.0);
}

namespace {

struct SplitResult {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Exact greedy search: maximize SSE reduction, tie-break lowest feature index
// then lowest threshold.
SplitResult best_split(const Matrix& X, const Vector& residual,
                       const std::vector<int>& rows, int min_leaf) {
    const int n = static_cast<int>(rows.size());
    double total_sum = 0.0;
    for (int r : rows) total_sum += residual(r);
    const double parent = total_sum * total_sum / static_cast<double>(n);

    SplitResult best;
    std::vector<std::pair<double, double>> vals(static_cast<size_t>(n));
    for (int f = 0; f < static_cast<int>(X.cols()); ++f) {
        for (int i = 0; i < n; ++i)
            vals[static_cast<size_t>(i)] = {X(rows[static_cast<size_t>(i)], f),
                                            residual(rows[static_cast<size_t>(i)])};
        std::sort(vals.begin(), vals.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        double left_sum = 0.0;
        for (int i = 0; i + 1 < n; ++i) {
            left_sum += vals[static_cast<size_t>(i)].second;
            if (vals[static_cast<size_t>(i)].first == vals[static_cast<size_t>(i + 1)].first)
                continue;  // not a boundary between distinct values
            const int nl = i + 1, nr = n - nl;
            if (nl < min_leaf || nr < min_leaf) continue;
            const double right_sum = total_sum - left_sum;
            const double thr = 0.5 * (vals[static_cast<size_t>(i)].first +
                                      vals[static_cast<size_t>(i + 1)].first);
            // adjacent values 1 ulp apart round the midpoint up to the right
            // value, which would leave the right child empty
            if (!(thr < vals[static_cast<size_t>(i + 1)].first)) continue;
            const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - parent;
            if (gain > best.gain + 1e-12) {
                best.found = true;
                best.feature = f;
                best.threshold = thr;
                best.gain = gain;
            }
        }
    }
    return best;
}

int grow(PpeTree& tree, const Matrix& X, const Vector& residual,
         std::vector<int>& rows, int lo, int hi, int depth, const PpeParams& p) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::vector<int> node_rows(rows.begin() + lo, rows.begin() + hi);
    const int n = hi - lo;

    SplitResult sp;
    if (depth < p.max_depth && n >= 2 * p.min_leaf)
        sp = best_split(X, residual, node_rows, p.min_leaf);

    if (!sp.found) {
        double sum = 0.0;
        for (int r : node_rows) sum += residual(r);
        tree.nodes[static_cast<size_t>(id)].value =
            p.learning_rate * sum / static_cast<double>(n);
        return id;
    }

    const auto mid_it = std::stable_partition(
        rows.begin() + lo, rows.begin() + hi,
        [&](int r) { return X(r, sp.feature) <= sp.threshold; });
    const int mid = static_cast<int>(mid_it - rows.begin());
    tree.nodes[static_cast<size_t>(id)].feature = sp.feature;
    tree.nodes[static_cast<size_t>(id)].threshold = sp.threshold;
    const int l = grow(tree, X, residual, rows, lo, mid, depth + 1, p);
    const int r = grow(tree, X, residual, rows, mid, hi, depth + 1, p);
    tree.nodes[static_cast<size_t>(id)].left = l;
    tree.nodes[static_cast<size_t>(id)].right = r;
    return id;
}

}  // namespace

PpeModel train_ppe(const TrainTable& table, const PpeParams& params) {
    const auto n = table.X.rows();
    if (n < 20) throw DataError("PPE needs at least 20 training rows");
    for (Eigen::Index i = 0; i < n; ++i)
        if (table.y(i) < 0.0 || table.y(i) > 1.0)
            throw DataError("PPE targets must lie in [0,1]");

    PpeModel model;
    model.params = params;
    model.feature_dim = static_cast<int>(table.X.cols());
    model.base_score = table.y.mean();

    Vector pred = Vector::Constant(n, model.base_score);
    const int sub =
        std::max<int>(1, static_cast<int>(std::floor(params.row_subsample *
                                                     static_cast<double>(n))));
    for (int t = 0; t < params.trees; ++t) {
        const Vector residual = table.y - pred;
        Rng rng(mix_seed(params.seed, static_cast<std::uint64_t>(t)));
        std::vector<int> idx(static_cast<size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        for (int i = 0; i < sub; ++i) {
            const auto j = rng.uniform_int(i, static_cast<std::int64_t>(n) - 1);
            std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
        }
        idx.resize(static_cast<size_t>(sub));
        std::sort(idx.begin(), idx.end());

        PpeTree tree;
        grow(tree, table.X, residual, idx, 0, sub, 0, params);
        for (Eigen::Index i = 0; i < n; ++i)
            pred(i) += tree.predict(table.X.row(i).transpose());
        model.trees.push_back(std::move(tree));
    }
    return model;
}

}  // namespace hpod
