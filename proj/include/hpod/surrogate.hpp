#pragma once

#include "hpod/common.hpp"

#include <vector>

namespace hpod {

// RBF-kernel Gaussian process with median-heuristic length scale, prior mean
// at the target mean; no marginal-likelihood optimization.
class GpModel {
public:
    GpModel() = default;

    static GpModel fit(const Matrix& inputs, const Vector& targets);

    std::pair<double, double> predict(const Vector& x) const;  // (mean, std >= 0)
    double mean_at(const Vector& x) const { return predict(x).first; }

    const Matrix& inputs() const { return X_; }
    const Vector& targets() const { return y_; }
    double signal_variance() const { return signal_var_; }
    double length_scale() const { return length_scale_; }
    double noise_variance() const { return noise_var_; }

    // Rebuild from persisted pieces (factorization recomputed).
    static GpModel restore(const Matrix& inputs, const Vector& targets,
                           double signal_var, double length_scale, double noise_var);

private:
    void factorize();

    Matrix X_;
    Vector y_;
    double prior_mean_ = 0.0;
    double signal_var_ = 1.0;
    double length_scale_ = 1.0;
    double noise_var_ = 1e-4;
    Eigen::LLT<Matrix> llt_;
    Vector alpha_;  // K^-1 (y - prior_mean)
};

// Closed-form EI for maximization: 0 when sigma == 0, else
// sigma * (z * Phi(z) + phi(z)) with z = (mean - best)/sigma.
double expected_improvement(double mean, double sigma, double best);

double normal_cdf(double z);
double normal_pdf(double z);

// One GP per meta-train dataset, each fit on (grid encoding, perf row).
std::vector<GpModel> fit_meta_surrogates(const Matrix& perf, const Matrix& grid_encodings);

// Weighted Kendall tau with hyperbolic additive weights 1/(r_i+1) + 1/(r_j+1)
// from a's 0-based descending ranks (average ranks on ties). Pairs tied in a
// are excluded from the normalizer; pairs tied only in b contribute 0.
double weighted_kendall(const Vector& a, const Vector& b);

// Eq-style transfer: mean = s(x) + clamp(w, 0, 1) * t(x), sigma from s only.
std::pair<double, double> transfer_predict(const GpModel& s, const GpModel& t,
                                           double w, const Vector& x);

}  // namespace hpod
