#pragma once

#include "hpod/common.hpp"

namespace hpod {

// Average precision of higher-is-outlying scores against 0/1 labels; score
// ties broken by original index ascending. Requires both classes present.
double average_precision(const Vector& scores, const Eigen::VectorXi& labels);

// (#{grid < ap} + 0.5 * #{grid == ap}) / m; 1 best, 0 worst.
double normalized_ap_rank(double ap, const Vector& grid_aps);

// Smallest q in {0.01, ..., 1.00} with ap >= the ceil(q*m)-th largest grid AP.
double top_q(double ap, const Vector& grid_aps);

enum class Alternative { TwoSided, Greater };

// Paired Wilcoxon signed-rank test. Zero differences dropped; average ranks on
// ties; exact null by dynamic programming for effective n <= 25, normal
// approximation with tie and continuity corrections beyond.
// Alternative::Greater tests x > y.
double wilcoxon_signed_rank(const Vector& x, const Vector& y,
                            Alternative alt = Alternative::TwoSided);

namespace detail {
// force_normal routes around the exact branch (regime-boundary checks).
double wilcoxon_impl(const Vector& x, const Vector& y, Alternative alt,
                     bool force_normal);
}  // namespace detail

}  // namespace hpod
