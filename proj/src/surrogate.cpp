#include "hpod/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hpod {

namespace {

double median_pairwise_distance(const Matrix& X) {
    const auto n = X.rows();
    std::vector<double> d;
    d.reserve(static_cast<size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            d.push_back((X.row(i) - X.row(j)).norm());
    if (d.empty()) return 1.0;
    std::sort(d.begin(), d.end());
    const size_t m = d.size();
    const double med = m % 2 == 1 ? d[m / 2] : 0.5 * (d[m / 2 - 1] + d[m / 2]);
    return med > 0.0 ? med : 1.0;
}

Matrix rbf_kernel(const Matrix& A, const Matrix& B, double signal_var, double ell) {
    Matrix K(A.rows(), B.rows());
    const double inv = 1.0 / (2.0 * ell * ell);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < B.rows(); ++j)
            K(i, j) = signal_var * std::exp(-(A.row(i) - B.row(j)).squaredNorm() * inv);
    return K;
}

}  // namespace

void GpModel::factorize() {
    const auto n = X_.rows();
    Matrix K = rbf_kernel(X_, X_, signal_var_, length_scale_);
    K.diagonal().array() += noise_var_;
    llt_.compute(K);
    if (llt_.info() != Eigen::Success) {
        // one retry with 10x noise, then give up
        K.diagonal().array() += 9.0 * noise_var_;
        llt_.compute(K);
        if (llt_.info() != Eigen::Success)
            throw NumericError("GP kernel factorization failed");
        noise_var_ *= 10.0;
    }
    alpha_ = llt_.solve(y_ - Vector::Constant(n, prior_mean_));
}

GpModel GpModel::fit(const Matrix& inputs, const Vector& targets) {
    if (inputs.rows() < 1 || inputs.rows() != targets.size())
        throw DataError("GP fit needs matching non-empty inputs/targets");
    if (!targets.allFinite()) throw NumericError("non-finite GP targets");

    GpModel m;
    m.X_ = inputs;
    m.y_ = targets;
    m.prior_mean_ = targets.mean();
    const double var =
        (targets.array() - m.prior_mean_).square().sum() / static_cast<double>(targets.size());
    m.signal_var_ = std::max(var, 1e-6);
    m.length_scale_ = median_pairwise_distance(inputs);
    m.noise_var_ = 1e-4 * m.signal_var_;
    m.factorize();
    return m;
}

GpModel GpModel::restore(const Matrix& inputs, const Vector& targets,
                         double signal_var, double length_scale, double noise_var) {
    GpModel m;
    m.X_ = inputs;
    m.y_ = targets;
    m.prior_mean_ = targets.mean();
    m.signal_var_ = signal_var;
    m.length_scale_ = length_scale;
    m.noise_var_ = noise_var;
    m.factorize();
    return m;
}

std::pair<double, double> GpModel::predict(const Vector& x) const {
    if (x.size() != X_.cols()) throw DataError("GP input length mismatch");
    const Matrix xs = x.transpose();
    const Matrix kx = rbf_kernel(X_, xs, signal_var_, length_scale_);  // n x 1
    const double mean = prior_mean_ + kx.col(0).dot(alpha_);
    const Vector v = llt_.solve(kx.col(0));
    const double var = signal_var_ - kx.col(0).dot(v);
    return {mean, std::sqrt(std::max(var, 0.0))};
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

double expected_improvement(double mean, double sigma, double best) {
    if (sigma < 0.0) throw NumericError("negative sigma in EI");
    if (sigma == 0.0) return 0.0;
    const double z = (mean - best) / sigma;
    return std::max(0.0, sigma * (z * normal_cdf(z) + normal_pdf(z)));
}

std::vector<GpModel> fit_meta_surrogates(const Matrix& perf, const Matrix& grid_encodings) {
    if (perf.cols() != grid_encodings.rows())
        throw DataError("meta-surrogate shape mismatch");
    std::vector<GpModel> models;
    models.reserve(static_cast<size_t>(perf.rows()));
    for (Eigen::Index i = 0; i < perf.rows(); ++i)
        models.push_back(GpModel::fit(grid_encodings, perf.row(i).transpose()));
    return models;
}

double weighted_kendall(const Vector& a, const Vector& b) {
    const auto n = a.size();
    if (n != b.size()) throw DataError("weighted_kendall length mismatch");
    if (n < 2) throw DataError("weighted_kendall needs length >= 2");

    // 0-based descending ranks of a, average on ties
    std::vector<int> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return a(i) > a(j); });
    Vector rank(n);
    size_t i = 0;
    while (i < idx.size()) {
        size_t j = i;
        while (j + 1 < idx.size() && a(idx[j + 1]) == a(idx[i])) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0;
        for (size_t k = i; k <= j; ++k) rank(idx[k]) = avg;
        i = j + 1;
    }

    double num = 0.0, denom = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = p + 1; q < n; ++q) {
            const double da = a(p) - a(q);
            if (da == 0.0) continue;  // tied in a: outside the normalizer
            const double w = 1.0 / (rank(p) + 1.0) + 1.0 / (rank(q) + 1.0);
            denom += w;
            const double db = b(p) - b(q);
            if (db == 0.0) continue;
            num += da * db > 0.0 ? w : -w;
        }
    if (denom == 0.0) return 0.0;
    return num / denom;
}

std::pair<double, double> transfer_predict(const GpModel& s, const GpModel& t,
                                           double w, const Vector& x) {
    if (!std::isfinite(w)) throw NumericError("non-finite transfer weight");
    const auto [su, ss] = s.predict(x);
    const double wc = std::clamp(w, 0.0, 1.0);
    const double tu = wc > 0.0 ? t.predict(x).first : 0.0;
    return {su + wc * tu, ss};
}

}  // namespace hpod
