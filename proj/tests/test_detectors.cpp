#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hpod/dataset.hpp"
#include "hpod/detectors.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace hpod;

namespace {

Matrix column(std::initializer_list<double> xs) {
    Matrix X(static_cast<Eigen::Index>(xs.size()), 1);
    Eigen::Index i = 0;
    for (double x : xs) X(i++, 0) = x;
    return X;
}

}  // namespace

TEST_CASE("identical points score 1 everywhere") {
    Matrix X = Matrix::Constant(6, 3, 2.5);
    const Vector s = lof_scores(X, 3, "euclidean");
    for (Eigen::Index i = 0; i < 6; ++i) CHECK(s[i] == doctest::Approx(1.0));
}

TEST_CASE("isolated 1-d point gets the top LOF score") {
    const Vector s = lof_scores(column({0, 1, 2, 3, 100}), 2, "euclidean");
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(s[4] > s[i]);
}

TEST_CASE("square vertices are symmetric under LOF") {
    Matrix X(4, 2);
    X << 0, 0, 0, 1, 1, 0, 1, 1;
    const Vector s = lof_scores(X, 2, "euclidean");
    for (Eigen::Index i = 1; i < 4; ++i) CHECK(s[i] == doctest::Approx(s[0]).epsilon(1e-12));
}

TEST_CASE("minkowski p=2 coincides with euclidean") {
    const auto ds = test::make_blob_dataset("b", 40, 3, 4, 7);
    const Matrix X = standardize_matrix(ds.X);
    const Vector a = lof_scores(X, 5, "minkowski");
    const Vector b = lof_scores(X, 5, "euclidean");
    for (Eigen::Index i = 0; i < a.size(); ++i)
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
}

TEST_CASE("LOF is permutation equivariant") {
    const auto ds = test::make_blob_dataset("p", 25, 2, 3, 11);
    const Matrix X = standardize_matrix(ds.X);
    std::vector<int> perm(25);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(42);
    for (int i = 24; i > 0; --i)
        std::swap(perm[static_cast<size_t>(i)],
                  perm[static_cast<size_t>(rng.uniform_int(0, i))]);
    Matrix Xp(25, 2);
    for (int i = 0; i < 25; ++i) Xp.row(i) = X.row(perm[static_cast<size_t>(i)]);
    const Vector s = lof_scores(X, 4, "manhattan");
    const Vector sp = lof_scores(Xp, 4, "manhattan");
    for (int i = 0; i < 25; ++i)
        CHECK(sp[i] == doctest::Approx(s[perm[static_cast<size_t>(i)]]).epsilon(1e-12));
}

TEST_CASE("LOF against an independent reference implementation") {
    // Reference: direct k-distance / reachability / lrd evaluation from the
    // published definitions, written without reusing any library code.
    const auto ds = test::make_blob_dataset("ref", 30, 2, 3, 3);
    const Matrix X = standardize_matrix(ds.X);
    const int n = 30, k = 5;
    Matrix D(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) D(i, j) = (X.row(i) - X.row(j)).norm();

    auto kdist = [&](int i) {
        std::vector<double> d;
        for (int j = 0; j < n; ++j)
            if (j != i) d.push_back(D(i, j));
        std::sort(d.begin(), d.end());
        return d[k - 1];
    };
    auto neighbors = [&](int i) {
        std::vector<int> out;
        const double kd = kdist(i);
        for (int j = 0; j < n; ++j)
            if (j != i && D(i, j) <= kd) out.push_back(j);
        return out;
    };
    auto lrd = [&](int i) {
        double sum = 0;
        const auto nb = neighbors(i);
        for (int j : nb) sum += std::max(kdist(j), D(i, j));
        return static_cast<double>(nb.size()) / sum;
    };
    const Vector s = lof_scores(X, k, "euclidean");
    for (int i = 0; i < n; ++i) {
        double acc = 0;
        const auto nb = neighbors(i);
        for (int j : nb) acc += lrd(j) / lrd(i);
        CHECK(s[i] == doctest::Approx(acc / static_cast<double>(nb.size())).epsilon(1e-9));
    }
}

TEST_CASE("cosine treats zero vectors as maximally distant") {
    Matrix X(4, 2);
    X << 0, 0, 1, 0, 0, 1, 1, 1;
    CHECK_NOTHROW(lof_scores(X, 2, "cosine"));
}

TEST_CASE("LOF clamps oversized n_neighbors with a warning") {
    Matrix X(4, 1);
    X << 0, 1, 2, 3;
    const Vector a = lof_scores(X, 10, "euclidean");
    const Vector b = lof_scores(X, 3, "euclidean");
    for (int i = 0; i < 4; ++i) CHECK(a[i] == doctest::Approx(b[i]));
}

TEST_CASE("LOF rejects an empty matrix") {
    CHECK_THROWS_AS(lof_scores(Matrix(0, 2), 2, "euclidean"), DataError);
}

TEST_CASE("path adjustment values") {
    CHECK(iforest_path_adjustment(1) == 0.0);
    CHECK(iforest_path_adjustment(2) == doctest::Approx(0.1544).epsilon(1e-3));
    // monotone increasing beyond the base cases
    for (std::int64_t k = 2; k < 200; ++k)
        CHECK(iforest_path_adjustment(k + 1) > iforest_path_adjustment(k));
}

TEST_CASE("iForest scores fall strictly inside (0,1)") {
    const auto ds = test::make_blob_dataset("f", 60, 4, 6, 17);
    const Vector s = iforest_scores(standardize_matrix(ds.X), 50, 0.5, 0.75, 9);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        CHECK(s[i] > 0.0);
        CHECK(s[i] < 1.0);
    }
}

TEST_CASE("an extreme point maxes out iForest across seeds") {
    Matrix X(20, 2);
    Rng rng(5);
    for (int i = 0; i < 19; ++i)
        for (int j = 0; j < 2; ++j) X(i, j) = rng.uniform(-0.5, 0.5);
    X.row(19) << 25.0, -25.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Vector s = iforest_scores(X, 100, 0.9, 1.0, seed);
        Eigen::Index arg = 0;
        s.maxCoeff(&arg);
        CHECK(arg == 19);
    }
}

TEST_CASE("iForest is deterministic per seed and sensitive to it") {
    const auto ds = test::make_blob_dataset("d", 45, 3, 4, 23);
    const Matrix X = standardize_matrix(ds.X);
    const Vector a = iforest_scores(X, 30, 0.6, 0.8, 77);
    const Vector b = iforest_scores(X, 30, 0.6, 0.8, 77);
    const Vector c = iforest_scores(X, 30, 0.6, 0.8, 78);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("more trees reduce per-point score variance") {
    const auto ds = test::make_blob_dataset("v", 40, 3, 4, 31);
    const Matrix X = standardize_matrix(ds.X);
    auto spread = [&](int trees) {
        std::vector<Vector> runs;
        for (std::uint64_t s = 0; s < 12; ++s)
            runs.push_back(iforest_scores(X, trees, 0.5, 1.0, s));
        double total = 0;
        for (Eigen::Index i = 0; i < 40; ++i) {
            double mean = 0, sq = 0;
            for (const auto& r : runs) mean += r[i];
            mean /= static_cast<double>(runs.size());
            for (const auto& r : runs) sq += (r[i] - mean) * (r[i] - mean);
            total += sq / static_cast<double>(runs.size());
        }
        return total;
    };
    CHECK(spread(16) < spread(1));
}

TEST_CASE("iForest rejects subsamples that round to zero rows") {
    Matrix X(1, 2);
    X << 0, 0;
    CHECK_THROWS_AS(iforest_scores(X, 10, 0.5, 0.5, 1), DataError);
}

TEST_CASE("grid scoring matches per-setting scoring") {
    const auto sp = test::tiny_lof_space();
    const auto grid = meta_grid(sp);
    const auto ds = test::make_blob_dataset("g", 35, 3, 4, 13);
    const Matrix X = standardize_matrix(ds.X);
    const auto all = grid_detector_scores(sp, grid, X, 99);
    REQUIRE(all.size() == grid.size());
    for (size_t j = 0; j < grid.size(); ++j) {
        const Vector one = detector_scores(sp, grid[j], X, 99);
        CHECK((all[j] - one).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    }
}

TEST_CASE("DetectorRunner agrees with detector_scores for LOF") {
    const auto sp = test::tiny_lof_space();
    const auto ds = test::make_blob_dataset("r", 30, 2, 3, 19);
    const Matrix X = standardize_matrix(ds.X);
    DetectorRunner runner(sp, X, 7);
    for (const auto& s : meta_grid(sp)) {
        const Vector a = runner.run(s, 0);
        const Vector b = detector_scores(sp, s, X, 7);
        CHECK((a - b).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    }
}

TEST_CASE("default settings") {
    const auto lof = lof_space();
    const auto dl = default_setting(lof);
    CHECK(get_int(lof, dl, "n_neighbors") == 20);
    CHECK(get_cat(lof, dl, "metric") == "minkowski");

    const auto iforest = iforest_space();
    const auto di = default_setting(iforest, 1000);
    CHECK(get_int(iforest, di, "n_estimators") == 100);
    CHECK(get_real(iforest, di, "max_samples") == doctest::Approx(0.256));
    CHECK(get_real(iforest, di, "max_features") == doctest::Approx(0.8));
    // tiny dataset: the 256/n fraction caps at the hull
    const auto small = default_setting(iforest, 100);
    CHECK(get_real(iforest, small, "max_samples") == doctest::Approx(0.9));

    HpSpace other;
    other.algorithm = "unknown";
    CHECK_THROWS_AS(default_setting(other), ConfigError);
}
