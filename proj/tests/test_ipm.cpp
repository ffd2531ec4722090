#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hpod/ipm.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>

using namespace hpod;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

// O(n^2) rank oracle: for each element count smaller / equal values.
Vector rank_oracle(const Vector& s) {
    const auto n = s.size();
    Vector out(n);
    if (n == 1) {
        out[0] = 0.0;
        return out;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        double below = 0, equal = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (s[j] < s[i]) ++below;
            if (s[j] == s[i]) ++equal;
        }
        const double avg_rank = below + (equal + 1.0) / 2.0;
        out[i] = (avg_rank - 1.0) / static_cast<double>(n - 1);
    }
    return out;
}

}  // namespace

TEST_CASE("rank_normalize basics") {
    const Vector r = rank_normalize(vec({3, 1, 2}));
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(0.0));
    CHECK(r[2] == doctest::Approx(0.5));

    const Vector t = rank_normalize(vec({4, 4, 4, 4}));
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(t[i] == doctest::Approx(0.5));

    CHECK(rank_normalize(vec({9.5}))[0] == 0.0);
}

TEST_CASE("rank_normalize matches the quadratic oracle") {
    Rng rng(2);
    for (int t = 0; t < 30; ++t) {
        Vector s(7);
        for (Eigen::Index i = 0; i < 7; ++i)
            s[i] = static_cast<double>(rng.uniform_int(0, 4));  // forces ties
        const Vector a = rank_normalize(s);
        const Vector b = rank_oracle(s);
        CHECK((a - b).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    }
}

TEST_CASE("mc on a single anchor") {
    const Vector c = rank_normalize(vec({1, 2, 3, 4, 5}));
    CHECK(ipm_mc(c, {c}) == doctest::Approx(1.0));
    const Vector rev = rank_normalize(vec({5, 4, 3, 2, 1}));
    CHECK(ipm_mc(c, {rev}) == doctest::Approx(-1.0));
}

TEST_CASE("mc matches the direct Pearson oracle over 3 anchors") {
    Rng rng(6);
    for (int t = 0; t < 20; ++t) {
        auto draw = [&] {
            Vector v(6);
            for (Eigen::Index i = 0; i < 6; ++i) v[i] = rng.uniform(0, 1);
            return rank_normalize(v);
        };
        const Vector c = draw();
        const std::vector<Vector> anchors = {draw(), draw(), draw()};
        double expect = 0;
        for (const auto& a : anchors) expect += pearson_corr(c, a);
        expect /= 3.0;
        CHECK(ipm_mc(c, anchors) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("mc and select are anchor-permutation symmetric") {
    Rng rng(10);
    Vector c(8);
    std::vector<Vector> anchors;
    for (int a = 0; a < 4; ++a) {
        Vector v(8);
        for (Eigen::Index i = 0; i < 8; ++i) v[i] = rng.uniform(0, 1);
        anchors.push_back(rank_normalize(v));
    }
    for (Eigen::Index i = 0; i < 8; ++i) c[i] = rng.uniform(0, 1);
    c = rank_normalize(c);
    auto shuffled = anchors;
    std::rotate(shuffled.begin(), shuffled.begin() + 2, shuffled.end());
    CHECK(ipm_mc(c, shuffled) == doctest::Approx(ipm_mc(c, anchors)));
    CHECK(ipm_select(c, shuffled) == doctest::Approx(ipm_select(c, anchors)));
}

TEST_CASE("select reduces to Pearson for one anchor") {
    const Vector c = rank_normalize(vec({0.3, 0.9, 0.1, 0.7}));
    const Vector a = rank_normalize(vec({0.2, 0.8, 0.4, 0.6}));
    CHECK(ipm_select(c, {a}) == doctest::Approx(pearson_corr(c, a)));
}

TEST_CASE("select prunes an anti-correlated anchor, matching a phase oracle") {
    // 3 consistent anchors plus one reversed: the reversed anchor falls below the
    // median correlation with the mean consensus and must not shape c'.
    const Vector base = rank_normalize(vec({1, 2, 3, 4, 5, 6, 7, 8}));
    std::vector<Vector> anchors = {
        base,
        rank_normalize(vec({1, 2, 3, 4, 5, 6, 8, 7})),
        rank_normalize(vec({2, 1, 3, 4, 5, 6, 7, 8})),
        rank_normalize(vec({8, 7, 6, 5, 4, 3, 2, 1})),
    };
    const Vector c = rank_normalize(vec({1, 3, 2, 4, 5, 7, 6, 8}));

    // oracle: enumerate the two phases directly
    Vector consensus = Vector::Zero(8);
    for (const auto& a : anchors) consensus += a;
    consensus /= 4.0;
    std::vector<double> corr;
    for (const auto& a : anchors) corr.push_back(pearson_corr(a, consensus));
    auto sorted = corr;
    std::sort(sorted.begin(), sorted.end());
    const double median = (sorted[1] + sorted[2]) / 2.0;
    Vector refined = Vector::Zero(8);
    int kept = 0;
    for (size_t i = 0; i < anchors.size(); ++i)
        if (corr[i] >= median) {
            refined += anchors[i];
            ++kept;
        }
    refined /= kept;
    CHECK(kept == 3);                 // the reversed anchor is out
    CHECK(corr[3] < median);
    CHECK(ipm_select(c, anchors) ==
          doctest::Approx(pearson_corr(c, refined)).epsilon(1e-12));
}

TEST_CASE("hits equals 1 when the candidate matches every anchor") {
    const Vector c = rank_normalize(vec({0.1, 0.5, 0.9, 0.3}));
    CHECK(ipm_hits(c, {c, c, c}) == doctest::Approx(1.0));
}

TEST_CASE("hits 2x2 matches the closed-form dominant eigenvector") {
    // S = [[0.5, 0.5], [1, 0]] (candidate first): the hub vector is the dominant
    // eigenvector of S S^T = [[0.5, 0.5], [0.5, 1]], solved in closed form.
    const Vector c = vec({0.5, 0.5});
    const Vector a = vec({1.0, 0.0});
    const double tr = 1.5, det = 0.5 * 1.0 - 0.25;
    const double lam = (tr + std::sqrt(tr * tr - 4 * det)) / 2.0;
    // (0.5 - lam) x + 0.5 y = 0  ->  anchor/candidate hub ratio = (lam - 0.5)/0.5
    const double ratio = (lam - 0.5) / 0.5;
    REQUIRE(ratio > 1.0);  // the anchor dominates, so candidate / max hub = 1/ratio
    CHECK(ipm_hits(c, {a}) == doctest::Approx(1.0 / ratio).epsilon(1e-6));
}

TEST_CASE("hits stays in [0,1] and converges on random instances") {
    Rng rng(77);
    for (int t = 0; t < 100; ++t) {
        const int n = 5 + static_cast<int>(rng.uniform_int(0, 10));
        auto draw = [&] {
            Vector v(n);
            for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(0, 1);
            return rank_normalize(v);
        };
        const Vector c = draw();
        std::vector<Vector> anchors;
        const int na = 1 + static_cast<int>(rng.uniform_int(0, 4));
        for (int a = 0; a < na; ++a) anchors.push_back(draw());
        const double h = ipm_hits(c, anchors);
        CHECK(h >= 0.0);
        CHECK(h <= 1.0 + 1e-12);
    }
}

TEST_CASE("measures are invariant to monotone transforms of raw scores") {
    Rng rng(8);
    Vector raw(10);
    for (Eigen::Index i = 0; i < 10; ++i) raw[i] = rng.uniform(0, 1);
    Vector warped = raw;
    for (Eigen::Index i = 0; i < 10; ++i) warped[i] = std::exp(3.0 * warped[i]);
    std::vector<Vector> anchors;
    for (int a = 0; a < 3; ++a) {
        Vector v(10);
        for (Eigen::Index i = 0; i < 10; ++i) v[i] = rng.uniform(0, 1);
        anchors.push_back(rank_normalize(v));
    }
    const auto i1 = extract_ipms(raw, anchors);
    const auto i2 = extract_ipms(warped, anchors);
    CHECK(i1.mc == doctest::Approx(i2.mc));
    CHECK(i1.select == doctest::Approx(i2.select));
    CHECK(i1.hits == doctest::Approx(i2.hits));
}

TEST_CASE("length mismatch is rejected") {
    CHECK_THROWS_AS(ipm_mc(vec({1, 2, 3}), {vec({1, 2})}), DataError);
}

TEST_CASE("anchor forward selection: max_size=1 matches an exhaustive scan") {
    // tiny synthetic meta-train: 3 datasets x 5 grid HPs, 12 points each
    Rng rng(99);
    const int n_ds = 3, m = 5, npts = 12;
    std::vector<std::vector<Vector>> grid_rank(static_cast<size_t>(n_ds));
    Matrix perf(n_ds, m);
    for (int i = 0; i < n_ds; ++i)
        for (int j = 0; j < m; ++j) {
            Vector v(npts);
            for (Eigen::Index p = 0; p < npts; ++p) v[p] = rng.uniform(0, 1);
            grid_rank[static_cast<size_t>(i)].push_back(rank_normalize(v));
            perf(i, j) = rng.uniform(0, 1);
        }
    std::vector<HpSetting> grid(m);

    const auto a1 = build_anchor_set(perf, grid_rank, grid, 1);
    REQUIRE(a1.grid_indices.size() == 1);

    // brute-force scan over all single-anchor sets using the same objective
    double best = -2;
    int best_j = -1;
    for (int cand = 0; cand < m; ++cand) {
        double obj = 0;
        for (int i = 0; i < n_ds; ++i) {
            Vector mc(m);
            for (int j = 0; j < m; ++j)
                mc[j] = ipm_mc(grid_rank[static_cast<size_t>(i)][static_cast<size_t>(j)],
                               {grid_rank[static_cast<size_t>(i)][static_cast<size_t>(cand)]});
            obj += pearson_corr(rank_normalize(mc),
                                rank_normalize(Vector(perf.row(i).transpose())));
        }
        obj /= n_ds;
        if (obj > best + 1e-15) {
            best = obj;
            best_j = cand;
        }
    }
    CHECK(a1.grid_indices[0] == best_j);
    CHECK(a1.objective_trace[0] == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("anchor objective trace is non-decreasing and capped at 10") {
    Rng rng(123);
    const int n_ds = 2, m = 14, npts = 15;
    std::vector<std::vector<Vector>> grid_rank(static_cast<size_t>(n_ds));
    Matrix perf(n_ds, m);
    for (int i = 0; i < n_ds; ++i)
        for (int j = 0; j < m; ++j) {
            Vector v(npts);
            for (Eigen::Index p = 0; p < npts; ++p) v[p] = rng.uniform(0, 1);
            grid_rank[static_cast<size_t>(i)].push_back(rank_normalize(v));
            perf(i, j) = rng.uniform(0, 1);
        }
    std::vector<HpSetting> grid(m);
    const auto a = build_anchor_set(perf, grid_rank, grid, 10);
    REQUIRE(!a.grid_indices.empty());
    CHECK(a.grid_indices.size() <= 10);
    for (size_t i = 1; i < a.objective_trace.size(); ++i)
        CHECK(a.objective_trace[i] >= a.objective_trace[i - 1] + 1e-4 - 1e-12);
    for (int idx : a.grid_indices) {
        CHECK(idx >= 0);
        CHECK(idx < m);
    }
}
