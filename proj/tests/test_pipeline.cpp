#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hpod/eval.hpp"
#include "hpod/metrics.hpp"
#include "hpod/pipeline.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

using namespace hpod;

namespace {

// five datasets with distinct shapes so meta-feature similarity is unambiguous
Corpus pipeline_corpus() {
    Corpus c;
    c.datasets.push_back(test::make_blob_dataset("a", 40, 3, 4, 1));
    c.datasets.push_back(test::make_blob_dataset("b", 60, 5, 5, 2));
    c.datasets.push_back(test::make_blob_dataset("c", 80, 8, 6, 3));
    c.datasets.push_back(test::make_blob_dataset("d", 50, 4, 4, 4));
    c.datasets.push_back(test::make_blob_dataset("e", 70, 6, 5, 5));
    return c;
}

const MetaModel& trained_model() {
    static const MetaModel m =
        offline_meta_train(pipeline_corpus(), test::tiny_lof_space(), 7);
    return m;
}

}  // namespace

TEST_CASE("offline meta-training produces a complete model") {
    const auto& m = trained_model();
    CHECK(m.perf.rows() == 5);
    CHECK(m.perf.cols() == 6);
    for (Eigen::Index i = 0; i < m.perf.rows(); ++i)
        for (Eigen::Index j = 0; j < m.perf.cols(); ++j) {
            CHECK(m.perf(i, j) >= 0.0);
            CHECK(m.perf(i, j) <= 1.0);
        }
    CHECK(m.meta_features.size() == 5);
    CHECK(m.meta_surrogates.size() == 5);
    CHECK(!m.anchors.grid_indices.empty());
    CHECK(m.anchors.grid_indices.size() <= 10);
    CHECK(m.ppe.feature_dim ==
          static_cast<int>(encoding_width(m.space)) + kMetaFeatureDim + kIpmDim);
    CHECK(m.dataset_names == std::vector<std::string>{"a", "b", "c", "d", "e"});
    CHECK(m.ppe_train_mse >= 0.0);
    CHECK(m.ppe_train_mse < 0.05);
}

TEST_CASE("performance cells equal an independent detector + AP run") {
    const auto& m = trained_model();
    const auto corpus = pipeline_corpus();
    const auto& ds = corpus.datasets[1];
    const Matrix Xs = standardize_matrix(ds.X);
    for (size_t j = 0; j < m.grid.size(); ++j) {
        const Vector sc = detector_scores(m.space, m.grid[j], Xs, 0);
        CHECK(m.perf(1, static_cast<Eigen::Index>(j)) ==
              doctest::Approx(average_precision(sc, *ds.y)).epsilon(1e-12));
    }
}

TEST_CASE("meta-training is byte-identical across reruns") {
    const auto a = offline_meta_train(pipeline_corpus(), test::tiny_lof_space(), 7);
    CHECK(meta_model_to_json(a) == meta_model_to_json(trained_model()));
}

TEST_CASE("persistence round-trips byte-identically") {
    const auto& m = trained_model();
    const std::string path = "pipeline_roundtrip.json";
    save_meta_model(m, path);
    const auto back = load_meta_model(path);
    CHECK(meta_model_to_json(back) == meta_model_to_json(m));

    // restored PPE and surrogates answer identically
    Rng rng(42);
    Vector x(m.ppe.feature_dim);
    for (int i = 0; i < m.ppe.feature_dim; ++i) x[i] = rng.uniform(0, 1);
    CHECK(back.ppe.predict(x) == m.ppe.predict(x));
    const Vector q = m.grid_encoding_matrix().row(2).transpose();
    CHECK(back.meta_surrogates[0].predict(q).first ==
          doctest::Approx(m.meta_surrogates[0].predict(q).first));
    std::remove(path.c_str());
}

TEST_CASE("format or schema version mismatch is a hard error") {
    const auto& m = trained_model();
    std::string text = meta_model_to_json(m);
    auto swapped = text;
    const auto pos = swapped.find("hpod-metamodel-v1");
    REQUIRE(pos != std::string::npos);
    swapped.replace(pos, 17, "hpod-metamodel-v9");
    try {
        meta_model_from_json(swapped);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("version mismatch") != std::string::npos);
    }

    auto bad_schema = text;
    const auto spos = bad_schema.find("hpod-mf-v1");
    REQUIRE(spos != std::string::npos);
    bad_schema.replace(spos, 10, "hpod-mf-v9");
    CHECK_THROWS_AS(meta_model_from_json(bad_schema), ConfigError);
    CHECK_THROWS_AS(meta_model_from_json("{broken"), DataError);
}

TEST_CASE("online loop: init block, monotone incumbent, distinct evaluations") {
    const auto& m = trained_model();
    const auto test_ds = test::make_blob_dataset("t", 45, 4, 4, 9);
    HpodOptions opt;
    opt.iterations = 4;
    opt.k_init = 3;
    opt.n_candidates = 30;
    opt.seed = 11;
    const auto res = hpod_optimize(m, test_ds.X, opt);

    // init rows are the top-k grid HPs of the most similar meta-train dataset
    const auto m_test = extract_meta_features(test_ds.X, mix_seed(opt.seed, 0xB0));
    int i0 = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < m.meta_features.size(); ++i) {
        const double d = mf_distance(m_test, m.meta_features[i], m.mf_scaler);
        if (d < best_d) {
            best_d = d;
            i0 = static_cast<int>(i);
        }
    }
    std::vector<int> order(m.grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double pa = m.perf(i0, a), pb = m.perf(i0, b);
        return pa != pb ? pa > pb : a < b;
    });
    for (int k = 0; k < opt.k_init; ++k) {
        CHECK(res.trace[static_cast<size_t>(k)].iteration == 0);
        CHECK(res.trace[static_cast<size_t>(k)].setting ==
              m.grid[static_cast<size_t>(order[static_cast<size_t>(k)])]);
    }

    REQUIRE(res.trace.size() == static_cast<size_t>(opt.k_init + opt.iterations));
    for (size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i].incumbent_pred >= res.trace[i - 1].incumbent_pred);

    std::set<std::vector<double>> encs;
    for (const auto& e : res.evaluated) encs.insert(e.encoding.v);
    CHECK(encs.size() == res.evaluated.size());

    // returned best maximizes the predicted performance among evaluations
    double mx = -1;
    for (const auto& e : res.evaluated) mx = std::max(mx, e.predicted_perf);
    CHECK(res.best_pred == doctest::Approx(mx));
    CHECK(res.best_pred == res.trace.back().incumbent_pred);
}

TEST_CASE("online loop is deterministic given the seed") {
    const auto& m = trained_model();
    const auto test_ds = test::make_blob_dataset("t", 40, 3, 4, 10);
    HpodOptions opt;
    opt.iterations = 3;
    opt.k_init = 3;
    opt.n_candidates = 20;
    opt.seed = 5;
    const auto a = hpod_optimize(m, test_ds.X, opt);
    const auto b = hpod_optimize(m, test_ds.X, opt);
    REQUIRE(a.trace.size() == b.trace.size());
    CHECK(a.best == b.best);
    for (size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].setting == b.trace[i].setting);
        CHECK(a.trace[i].predicted_perf == b.trace[i].predicted_perf);
    }
}

TEST_CASE("ablation switches and budget handling") {
    const auto& m = trained_model();
    const auto test_ds = test::make_blob_dataset("t", 40, 3, 4, 12);
    HpodOptions opt;
    opt.iterations = 2;
    opt.k_init = 2;
    opt.n_candidates = 10;
    opt.seed = 3;

    for (auto acq : {Acquisition::Greedy, Acquisition::Random}) {
        auto o = opt;
        o.acquisition = acq;
        CHECK(hpod_optimize(m, test_ds.X, o).trace.size() == 4);
    }
    auto o = opt;
    o.init = InitStrategy::Random;
    o.transfer = false;
    const auto res = hpod_optimize(m, test_ds.X, o);
    CHECK(res.trace.size() == 4);
    for (const auto& row : res.trace) CHECK(row.transfer_weight == 0.0);

    auto tight = opt;
    tight.budget_secs = 0.0;  // exhausted immediately after init
    CHECK(hpod_optimize(m, test_ds.X, tight).trace.size() == 2);

    auto bad = opt;
    bad.k_init = 99;  // larger than the grid
    CHECK_THROWS_AS(hpod_optimize(m, test_ds.X, bad), ConfigError);
}

TEST_CASE("transfer weight is reported and clamped to [0,1]") {
    const auto& m = trained_model();
    const auto test_ds = test::make_blob_dataset("t", 50, 4, 5, 20);
    HpodOptions opt;
    opt.iterations = 5;
    opt.k_init = 4;
    opt.n_candidates = 20;
    opt.seed = 8;
    const auto res = hpod_optimize(m, test_ds.X, opt);
    for (size_t i = static_cast<size_t>(opt.k_init); i < res.trace.size(); ++i) {
        CHECK(res.trace[i].transfer_weight >= 0.0);
        CHECK(res.trace[i].transfer_weight <= 1.0);
        CHECK(res.trace[i].meta_task >= 0);
        CHECK(res.trace[i].meta_task < 5);
    }
}

TEST_CASE("hpod0 random search over the sampling hull") {
    const auto& m = trained_model();
    const auto test_ds = test::make_blob_dataset("t", 40, 3, 4, 14);
    const auto res = hpod0_optimize(m, test_ds.X, 8, 33);
    CHECK(res.trace.size() == 8);
    double mx = -1;
    for (const auto& e : res.evaluated) mx = std::max(mx, e.predicted_perf);
    CHECK(res.best_pred == doctest::Approx(mx));
    CHECK_THROWS_AS(hpod0_optimize(m, test_ds.X, 0, 1), ConfigError);
}

TEST_CASE("baseline selectors") {
    const auto& m = trained_model();
    const auto corpus = pipeline_corpus();
    const Matrix& X0 = corpus.datasets[0].X;

    // global best: argmax of the column means
    Eigen::Index gb = 0;
    m.perf.colwise().mean().maxCoeff(&gb);
    CHECK(baseline_select(BaselineMethod::GlobalBest, m, X0, 0) ==
          m.grid[static_cast<size_t>(gb)]);

    // similarity baseline: replicate the nearest-dataset computation
    const std::uint64_t seed = 77;
    const auto m_test = extract_meta_features(X0, mix_seed(seed, 0xB0));
    int i0 = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < m.meta_features.size(); ++i) {
        const double d = mf_distance(m_test, m.meta_features[i], m.mf_scaler);
        if (d < best_d) {
            best_d = d;
            i0 = static_cast<int>(i);
        }
    }
    CHECK(i0 == 0);  // the held dataset itself is in the corpus here
    Eigen::Index as = 0;
    m.perf.row(i0).maxCoeff(&as);
    CHECK(baseline_select(BaselineMethod::ArgoSmart, m, X0, seed) ==
          m.grid[static_cast<size_t>(as)]);

    // random is reproducible per seed and lies on the grid
    const auto r1 = baseline_select(BaselineMethod::Random, m, X0, 5);
    const auto r2 = baseline_select(BaselineMethod::Random, m, X0, 5);
    CHECK(r1 == r2);
    CHECK(std::find(m.grid.begin(), m.grid.end(), r1) != m.grid.end());

    const auto d = baseline_select(BaselineMethod::Default, m, X0, 0);
    CHECK(get_int(m.space, d, "n_neighbors") == 20);
}

TEST_CASE("hyper-ensemble averages rank-normalized scores") {
    const auto& m = trained_model();
    const auto test_ds = test::make_blob_dataset("t", 30, 3, 3, 16);
    const Vector one = hyper_ensemble_scores(m, test_ds.X, 1, 4);
    // k=1 must be the rank-normalized scores of a single grid draw
    Rng rng(4);
    const auto j = rng.uniform_int(0, static_cast<std::int64_t>(m.grid.size()) - 1);
    const Matrix Xs = standardize_matrix(test_ds.X);
    DetectorRunner runner(m.space, Xs, mix_seed(4, 0xA0));
    const Vector expect = rank_normalize(runner.run(m.grid[static_cast<size_t>(j)], 0));
    CHECK((one - expect).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    const Vector many = hyper_ensemble_scores(m, test_ds.X, 5, 4);
    CHECK(many.size() == 30);
    CHECK(many.minCoeff() >= 0.0);
    CHECK(many.maxCoeff() <= 1.0);
}

TEST_CASE("LOOCV benchmark structure on a small run") {
    const auto corpus = pipeline_corpus();
    BenchmarkConfig cfg;
    cfg.methods = {"default", "random", "gb", "hpod"};
    cfg.trials = 2;
    cfg.seed = 9;
    cfg.hpod.iterations = 2;
    cfg.hpod.k_init = 2;
    cfg.hpod.n_candidates = 10;
    const auto report = loocv_benchmark(corpus, test::tiny_lof_space(), cfg);

    CHECK(report.datasets.size() == 5);
    CHECK(report.rows.size() == 20);
    for (const auto& row : report.rows) {
        CHECK(row.norm_ap_rank >= 0.0);
        CHECK(row.norm_ap_rank <= 1.0);
        CHECK(row.top_q >= 0.01);
        CHECK(row.top_q <= 1.0);
    }
    for (const auto& method : cfg.methods) {
        const auto& agg = report.aggregates.at(method);
        CHECK(agg.mean_norm_rank >= 0.0);
        CHECK(agg.mean_norm_rank <= 1.0);
        CHECK(agg.mean_rank_among_methods >= 1.0);
        CHECK(agg.mean_rank_among_methods <= 4.0);
    }
    CHECK(report.wilcoxon_vs_hpod.size() == 3);

    const auto csv = report_to_csv(report);
    CHECK(csv.find("dataset,method,selected_hp,true_ap,norm_ap_rank,top_q") == 0);
    const auto md = report_to_markdown(report);
    CHECK(md.find("| method |") != std::string::npos);
    CHECK(wilcoxon_to_csv(report).find("baseline,p_two_sided") == 0);
}
