#include "hpod/pipeline.hpp"

#include "hpod/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace hpod {

using nlohmann::json;

Matrix MetaModel::grid_encoding_matrix() const {
    const auto m = static_cast<Eigen::Index>(grid_encodings.size());
    const auto w = static_cast<Eigen::Index>(grid_encodings[0].v.size());
    Matrix E(m, w);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index k = 0; k < w; ++k)
            E(j, k) = grid_encodings[static_cast<size_t>(j)].v[static_cast<size_t>(k)];
    return E;
}

MetaModel offline_meta_train(const Corpus& corpus, const HpSpace& space,
                             std::uint64_t seed) {
    if (corpus.datasets.empty()) throw DataError("empty corpus");

    MetaModel m;
    m.space = space;
    m.seed = seed;
    m.grid = meta_grid(space);
    for (const auto& s : m.grid) m.grid_encodings.push_back(encode(space, s));

    const auto n = static_cast<Eigen::Index>(corpus.datasets.size());
    const auto mm = static_cast<Eigen::Index>(m.grid.size());
    m.perf.resize(n, mm);

    // line 1-3: grid scores, performance matrix, meta-features
    std::vector<std::vector<Vector>> rank_scores(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& ds = corpus.datasets[static_cast<size_t>(i)];
        if (!ds.labeled()) throw DataError("unlabeled corpus dataset: " + ds.name);
        const Matrix Xs = standardize_matrix(ds.X);
        const auto scores = grid_detector_scores(
            space, m.grid, Xs, mix_seed(seed, 0x0F00 + static_cast<std::uint64_t>(i)));
        auto& ranks = rank_scores[static_cast<size_t>(i)];
        ranks.reserve(scores.size());
        for (Eigen::Index j = 0; j < mm; ++j) {
            try {
                m.perf(i, j) = average_precision(scores[static_cast<size_t>(j)], *ds.y);
            } catch (const DataError& e) {
                throw DataError("dataset " + ds.name + ": " + e.what());
            }
            ranks.push_back(rank_normalize(scores[static_cast<size_t>(j)]));
        }
        m.meta_features.push_back(extract_meta_features(
            ds.X, mix_seed(seed, 0x1F00 + static_cast<std::uint64_t>(i))));
        m.dataset_names.push_back(ds.name);
        m.dataset_shapes.emplace_back(static_cast<int>(ds.rows()),
                                      static_cast<int>(ds.dims()));
    }
    m.mf_scaler = fit_mf_scaler(m.meta_features);

    // line 4: anchor set, then IPMs of every (dataset, grid HP)
    m.anchors = build_anchor_set(m.perf, rank_scores, m.grid, 10);
    std::vector<std::vector<IpmVector>> ipms(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<Vector> anchor_ranks;
        for (int a : m.anchors.grid_indices)
            anchor_ranks.push_back(rank_scores[static_cast<size_t>(i)][static_cast<size_t>(a)]);
        auto& row = ipms[static_cast<size_t>(i)];
        row.reserve(static_cast<size_t>(mm));
        for (Eigen::Index j = 0; j < mm; ++j) {
            IpmVector v;
            const Vector& cand = rank_scores[static_cast<size_t>(i)][static_cast<size_t>(j)];
            v.mc = ipm_mc(cand, anchor_ranks);
            v.select = ipm_select(cand, anchor_ranks);
            v.hits = ipm_hits(cand, anchor_ranks);
            row.push_back(v);
        }
    }

    // line 5: PPE
    const auto table = build_training_table(m.perf, m.grid_encodings, m.meta_features, ipms);
    PpeParams params;
    params.seed = mix_seed(seed, 0x2F00);
    m.ppe = train_ppe(table, params);
    double mse = 0.0;
    for (Eigen::Index r = 0; r < table.X.rows(); ++r) {
        const double e = m.ppe.predict(table.X.row(r).transpose()) - table.y(r);
        mse += e * e;
    }
    m.ppe_train_mse = mse / static_cast<double>(table.X.rows());

    // line 6: meta-surrogates
    m.meta_surrogates = fit_meta_surrogates(m.perf, m.grid_encoding_matrix());
    return m;
}

// ---------------------------------------------------------------------------
// Online phase
// ---------------------------------------------------------------------------

namespace {

Vector encoding_to_vector(const HpEncoding& e) {
    Vector v(static_cast<Eigen::Index>(e.v.size()));
    for (size_t i = 0; i < e.v.size(); ++i) v(static_cast<Eigen::Index>(i)) = e.v[i];
    return v;
}

struct OnlineContext {
    const MetaModel& meta;
    Matrix Xs;  // standardized test features
    DetectorRunner runner;
    MetaFeatureVector m_test;
    std::vector<Vector> anchor_ranks;  // anchors run once on the test dataset

    OnlineContext(const MetaModel& meta_, const Matrix& X_test, std::uint64_t seed)
        : meta(meta_),
          Xs(standardize_matrix(X_test)),
          runner(meta_.space, Xs, mix_seed(seed, 0xA0)),
          m_test(extract_meta_features(X_test, mix_seed(seed, 0xB0))) {
        if (m_test.schema != meta.mf_schema)
            throw ConfigError("meta-feature schema mismatch");
        for (size_t a = 0; a < meta.anchors.settings.size(); ++a) {
            const Vector sc = runner.run(meta.anchors.settings[a],
                                         0xC0 + static_cast<std::uint64_t>(a));
            anchor_ranks.push_back(rank_normalize(sc));
        }
    }

    // Runs the detector + IPMs + PPE for one HP; -inf on detector failure.
    double evaluate(const HpSetting& s, const HpEncoding& enc, std::uint64_t stream) const {
        Vector scores;
        try {
            scores = runner.run(s, stream);
        } catch (const std::exception&) {
            return -std::numeric_limits<double>::infinity();
        }
        IpmVector ipm;
        const Vector cand = rank_normalize(scores);
        ipm.mc = ipm_mc(cand, anchor_ranks);
        ipm.select = ipm_select(cand, anchor_ranks);
        ipm.hits = ipm_hits(cand, anchor_ranks);
        return meta.ppe.predict(ppe_feature_row(enc, m_test, ipm));
    }
};

GpModel fit_surrogate(const std::vector<EvaluatedHp>& evaluated) {
    std::vector<const EvaluatedHp*> ok;
    for (const auto& e : evaluated)
        if (std::isfinite(e.predicted_perf)) ok.push_back(&e);
    const auto n = static_cast<Eigen::Index>(ok.size());
    const auto w = static_cast<Eigen::Index>(ok.front()->encoding.v.size());
    Matrix X(n, w);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X.row(i) = encoding_to_vector(ok[static_cast<size_t>(i)]->encoding).transpose();
        y(i) = ok[static_cast<size_t>(i)]->predicted_perf;
    }
    return GpModel::fit(X, y);
}

int incumbent_index(const std::vector<EvaluatedHp>& evaluated) {
    int best = 0;
    for (size_t i = 1; i < evaluated.size(); ++i)
        if (evaluated[i].predicted_perf > evaluated[static_cast<size_t>(best)].predicted_perf)
            best = static_cast<int>(i);
    return best;
}

// Performance-similarity transfer weights; returns (meta task index, weight).
std::pair<int, double> transfer_weight(const MetaModel& meta,
                                       const std::vector<EvaluatedHp>& evaluated) {
    std::vector<const EvaluatedHp*> ok;
    for (const auto& e : evaluated)
        if (std::isfinite(e.predicted_perf)) ok.push_back(&e);
    if (ok.size() < 2) return {-1, 0.0};
    const auto n = meta.perf.rows();
    Vector test_side(static_cast<Eigen::Index>(ok.size()));
    for (size_t k = 0; k < ok.size(); ++k)
        test_side(static_cast<Eigen::Index>(k)) = ok[k]->predicted_perf;

    int best_i = -1;
    double best_w = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector meta_side(static_cast<Eigen::Index>(ok.size()));
        for (size_t k = 0; k < ok.size(); ++k) {
            if (ok[k]->grid_index >= 0)
                meta_side(static_cast<Eigen::Index>(k)) = meta.perf(i, ok[k]->grid_index);
            else
                meta_side(static_cast<Eigen::Index>(k)) =
                    meta.meta_surrogates[static_cast<size_t>(i)].mean_at(
                        encoding_to_vector(ok[k]->encoding));
        }
        const double w = weighted_kendall(meta_side, test_side);
        if (w > best_w) {
            best_w = w;
            best_i = static_cast<int>(i);
        }
    }
    return {best_i, std::clamp(best_w, 0.0, 1.0)};
}

struct Candidate {
    HpSetting setting;
    HpEncoding encoding;
    int grid_index;
};

std::vector<Candidate> candidate_pool(const MetaModel& meta, int n_samples,
                                      std::uint64_t seed,
                                      const std::set<std::vector<double>>& evaluated) {
    std::vector<Candidate> pool;
    for (size_t j = 0; j < meta.grid.size(); ++j)
        pool.push_back({meta.grid[j], meta.grid_encodings[j], static_cast<int>(j)});
    if (n_samples > 0)
        for (auto& s : sample_settings(meta.space, n_samples, seed))
            pool.push_back({s, encode(meta.space, s), -1});

    // deterministic order, then set semantics on encodings
    std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
        return a.encoding.v != b.encoding.v ? a.encoding.v < b.encoding.v
                                            : a.grid_index > b.grid_index;
    });
    std::vector<Candidate> out;
    for (auto& c : pool) {
        if (!out.empty() && out.back().encoding.v == c.encoding.v) continue;
        if (evaluated.count(c.encoding.v)) continue;
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

HpodResult hpod_optimize(const MetaModel& meta, const Matrix& X_test,
                         const HpodOptions& opt) {
    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();
    const auto elapsed_ms = [&] {
        return std::chrono::duration<double, std::milli>(clock::now() - t_start).count();
    };

    if (opt.k_init < 1 || opt.k_init > static_cast<int>(meta.grid.size()))
        throw ConfigError("k_init must lie in [1, |grid|]");
    if (opt.iterations < 0) throw ConfigError("iterations must be >= 0");

    OnlineContext ctx(meta, X_test, opt.seed);

    // surrogate initialization: top HPs of the most similar meta-train dataset,
    // or a random grid subset under the ablation switch
    std::vector<int> init_indices;
    if (opt.init == InitStrategy::Meta) {
        int i0 = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < meta.meta_features.size(); ++i) {
            const double d = mf_distance(ctx.m_test, meta.meta_features[i], meta.mf_scaler);
            if (d < best_d) {
                best_d = d;
                i0 = static_cast<int>(i);
            }
        }
        std::vector<int> order(meta.grid.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double pa = meta.perf(i0, a), pb = meta.perf(i0, b);
            return pa != pb ? pa > pb : a < b;
        });
        init_indices.assign(order.begin(), order.begin() + opt.k_init);
    } else {
        Rng rng(mix_seed(opt.seed, 0xD0));
        std::vector<int> order(meta.grid.size());
        std::iota(order.begin(), order.end(), 0);
        for (int i = 0; i < opt.k_init; ++i) {
            const auto j = rng.uniform_int(i, static_cast<std::int64_t>(order.size()) - 1);
            std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
        }
        init_indices.assign(order.begin(), order.begin() + opt.k_init);
    }

    HpodResult res;
    std::set<std::vector<double>> evaluated_encodings;
    for (size_t k = 0; k < init_indices.size(); ++k) {
        const int j = init_indices[k];
        EvaluatedHp e;
        e.setting = meta.grid[static_cast<size_t>(j)];
        e.encoding = meta.grid_encodings[static_cast<size_t>(j)];
        e.grid_index = j;
        e.predicted_perf =
            ctx.evaluate(e.setting, e.encoding, 0x100 + static_cast<std::uint64_t>(k));
        evaluated_encodings.insert(e.encoding.v);
        res.evaluated.push_back(e);

        const int inc = incumbent_index(res.evaluated);
        res.trace.push_back({0, e.setting, e.predicted_perf,
                             res.evaluated[static_cast<size_t>(inc)].setting,
                             res.evaluated[static_cast<size_t>(inc)].predicted_perf, -1,
                             0.0, elapsed_ms()});
    }

    GpModel s = fit_surrogate(res.evaluated);
    Rng acq_rng(mix_seed(opt.seed, 0xE0));

    for (int e = 1; e <= opt.iterations; ++e) {
        if (opt.budget_secs && elapsed_ms() / 1000.0 > *opt.budget_secs) break;

        const auto [meta_i, w] =
            opt.transfer ? transfer_weight(meta, res.evaluated) : std::pair<int, double>{-1, 0.0};

        const auto pool = candidate_pool(meta, opt.n_candidates,
                                         mix_seed(opt.seed, 0x5000 + static_cast<std::uint64_t>(e)),
                                         evaluated_encodings);
        if (pool.empty()) break;

        double best_pred = -std::numeric_limits<double>::infinity();
        for (const auto& ev : res.evaluated) best_pred = std::max(best_pred, ev.predicted_perf);

        int chosen = 0;
        double chosen_val = -std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < pool.size(); ++c) {
            const Vector x = encoding_to_vector(pool[c].encoding);
            double u, sd;
            if (opt.transfer && meta_i >= 0 && w > 0.0) {
                std::tie(u, sd) = transfer_predict(
                    s, meta.meta_surrogates[static_cast<size_t>(meta_i)], w, x);
            } else {
                std::tie(u, sd) = s.predict(x);
            }
            double val;
            switch (opt.acquisition) {
                case Acquisition::Ei: val = expected_improvement(u, sd, best_pred); break;
                case Acquisition::Greedy: val = u; break;
                case Acquisition::Random: val = acq_rng.next_double(); break;
            }
            if (val > chosen_val) {
                chosen_val = val;
                chosen = static_cast<int>(c);
            }
        }

        EvaluatedHp ev;
        ev.setting = pool[static_cast<size_t>(chosen)].setting;
        ev.encoding = pool[static_cast<size_t>(chosen)].encoding;
        ev.grid_index = pool[static_cast<size_t>(chosen)].grid_index;
        ev.predicted_perf =
            ctx.evaluate(ev.setting, ev.encoding, 0x2000 + static_cast<std::uint64_t>(e));
        evaluated_encodings.insert(ev.encoding.v);
        res.evaluated.push_back(ev);

        if (std::isfinite(ev.predicted_perf)) s = fit_surrogate(res.evaluated);

        const int inc = incumbent_index(res.evaluated);
        res.trace.push_back({e, ev.setting, ev.predicted_perf,
                             res.evaluated[static_cast<size_t>(inc)].setting,
                             res.evaluated[static_cast<size_t>(inc)].predicted_perf,
                             meta_i, w, elapsed_ms()});
    }

    const int inc = incumbent_index(res.evaluated);
    res.best = res.evaluated[static_cast<size_t>(inc)].setting;
    res.best_pred = res.evaluated[static_cast<size_t>(inc)].predicted_perf;
    return res;
}

HpodResult hpod0_optimize(const MetaModel& meta, const Matrix& X_test, int n_random,
                          std::uint64_t seed) {
    if (n_random < 1) throw ConfigError("n_random must be >= 1");
    OnlineContext ctx(meta, X_test, seed);
    HpodResult res;
    const auto samples = sample_settings(meta.space, n_random, mix_seed(seed, 0xF0));
    for (size_t k = 0; k < samples.size(); ++k) {
        EvaluatedHp e;
        e.setting = samples[k];
        e.encoding = encode(meta.space, e.setting);
        e.grid_index = -1;
        e.predicted_perf = ctx.evaluate(e.setting, e.encoding, 0x3000 + static_cast<std::uint64_t>(k));
        res.evaluated.push_back(e);
        const int inc = incumbent_index(res.evaluated);
        res.trace.push_back({static_cast<int>(k), e.setting, e.predicted_perf,
                             res.evaluated[static_cast<size_t>(inc)].setting,
                             res.evaluated[static_cast<size_t>(inc)].predicted_perf, -1,
                             0.0, 0.0});
    }
    const int inc = incumbent_index(res.evaluated);
    res.best = res.evaluated[static_cast<size_t>(inc)].setting;
    res.best_pred = res.evaluated[static_cast<size_t>(inc)].predicted_perf;
    return res;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {

json vector_to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Vector vector_from_json(const json& a) {
    Vector v(static_cast<Eigen::Index>(a.size()));
    for (size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    return v;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        rows.push_back(vector_to_json(m.row(i).transpose()));
    return rows;
}

Matrix matrix_from_json(const json& a) {
    const auto n = static_cast<Eigen::Index>(a.size());
    const auto m = static_cast<Eigen::Index>(a[0].size());
    Matrix M(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            M(i, j) = a[static_cast<size_t>(i)][static_cast<size_t>(j)].get<double>();
    return M;
}

json setting_to_json(const HpSetting& s) {
    json a = json::array();
    for (const auto& v : s.values) {
        if (std::holds_alternative<std::string>(v))
            a.push_back(std::get<std::string>(v));
        else if (std::holds_alternative<std::int64_t>(v))
            a.push_back(std::get<std::int64_t>(v));
        else
            a.push_back(std::get<double>(v));
    }
    return a;
}

HpSetting setting_from_json(const json& a, const HpSpace& space) {
    HpSetting s;
    for (size_t i = 0; i < a.size(); ++i) {
        switch (space.domains[i].kind) {
            case HpKind::Categorical: s.values.emplace_back(a[i].get<std::string>()); break;
            case HpKind::Integer: s.values.emplace_back(a[i].get<std::int64_t>()); break;
            case HpKind::Real: s.values.emplace_back(a[i].get<double>()); break;
        }
    }
    return s;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::string meta_model_to_json(const MetaModel& m) {
    json j;
    j["format_version"] = kMetaModelFormat;
    j["tool_version"] = kToolVersion;
    j["seed"] = m.seed;
    j["mf_schema"] = m.mf_schema;
    j["space"] = json::parse(space_to_json(m.space));
    j["space_hash"] = fnv1a(space_to_json(m.space));

    json corpus = json::array();
    for (size_t i = 0; i < m.dataset_names.size(); ++i)
        corpus.push_back({{"name", m.dataset_names[i]},
                          {"rows", m.dataset_shapes[i].first},
                          {"dims", m.dataset_shapes[i].second}});
    j["corpus"] = corpus;

    json grid = json::array();
    for (const auto& s : m.grid) grid.push_back(setting_to_json(s));
    j["grid"] = grid;

    j["perf"] = matrix_to_json(m.perf);

    json mfs = json::array();
    for (const auto& mf : m.meta_features) mfs.push_back(vector_to_json(mf.values));
    j["meta_features"] = mfs;
    j["mf_scaler"] = {{"mean", vector_to_json(m.mf_scaler.mean)},
                      {"std", vector_to_json(m.mf_scaler.std)}};

    j["anchors"] = {{"grid_indices", m.anchors.grid_indices},
                    {"objective_trace", m.anchors.objective_trace}};

    json trees = json::array();
    for (const auto& t : m.ppe.trees) {
        json nodes = json::array();
        for (const auto& nd : t.nodes)
            nodes.push_back({nd.feature, nd.threshold, nd.left, nd.right, nd.value});
        trees.push_back(std::move(nodes));
    }
    j["ppe"] = {{"base_score", m.ppe.base_score},
                {"feature_dim", m.ppe.feature_dim},
                {"params",
                 {{"trees", m.ppe.params.trees},
                  {"max_depth", m.ppe.params.max_depth},
                  {"learning_rate", m.ppe.params.learning_rate},
                  {"row_subsample", m.ppe.params.row_subsample},
                  {"min_leaf", m.ppe.params.min_leaf},
                  {"seed", m.ppe.params.seed}}},
                {"trees", trees},
                {"train_mse", m.ppe_train_mse}};

    json gps = json::array();
    for (const auto& g : m.meta_surrogates)
        gps.push_back({{"signal_var", g.signal_variance()},
                       {"length_scale", g.length_scale()},
                       {"noise_var", g.noise_variance()}});
    j["meta_surrogates"] = gps;
    return j.dump();
}

MetaModel meta_model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("bad meta-model file: ") + e.what());
    }
    if (!j.contains("format_version") ||
        j["format_version"].get<std::string>() != kMetaModelFormat)
        throw ConfigError("meta-model format version mismatch");

    MetaModel m;
    m.space = space_from_json(j.at("space").dump());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.mf_schema = j.at("mf_schema").get<std::string>();
    if (m.mf_schema != kMetaFeatureSchema)
        throw ConfigError("meta-feature schema version mismatch");

    for (const auto& s : j.at("grid")) m.grid.push_back(setting_from_json(s, m.space));
    for (const auto& s : m.grid) m.grid_encodings.push_back(encode(m.space, s));
    m.perf = matrix_from_json(j.at("perf"));

    for (const auto& c : j.at("corpus")) {
        m.dataset_names.push_back(c.at("name").get<std::string>());
        m.dataset_shapes.emplace_back(c.at("rows").get<int>(), c.at("dims").get<int>());
    }
    for (const auto& v : j.at("meta_features")) {
        MetaFeatureVector mf;
        mf.values = vector_from_json(v);
        mf.schema = m.mf_schema;
        m.meta_features.push_back(std::move(mf));
    }
    m.mf_scaler.mean = vector_from_json(j.at("mf_scaler").at("mean"));
    m.mf_scaler.std = vector_from_json(j.at("mf_scaler").at("std"));

    m.anchors.grid_indices = j.at("anchors").at("grid_indices").get<std::vector<int>>();
    m.anchors.objective_trace =
        j.at("anchors").at("objective_trace").get<std::vector<double>>();
    for (int a : m.anchors.grid_indices)
        m.anchors.settings.push_back(m.grid[static_cast<size_t>(a)]);

    const auto& pj = j.at("ppe");
    m.ppe.base_score = pj.at("base_score").get<double>();
    m.ppe.feature_dim = pj.at("feature_dim").get<int>();
    m.ppe.params.trees = pj.at("params").at("trees").get<int>();
    m.ppe.params.max_depth = pj.at("params").at("max_depth").get<int>();
    m.ppe.params.learning_rate = pj.at("params").at("learning_rate").get<double>();
    m.ppe.params.row_subsample = pj.at("params").at("row_subsample").get<double>();
    m.ppe.params.min_leaf = pj.at("params").at("min_leaf").get<int>();
    m.ppe.params.seed = pj.at("params").at("seed").get<std::uint64_t>();
    m.ppe_train_mse = pj.at("train_mse").get<double>();
    for (const auto& tj : pj.at("trees")) {
        PpeTree t;
        for (const auto& nj : tj) {
            PpeTreeNode nd;
            nd.feature = nj[0].get<int>();
            nd.threshold = nj[1].get<double>();
            nd.left = nj[2].get<int>();
            nd.right = nj[3].get<int>();
            nd.value = nj[4].get<double>();
            t.nodes.push_back(nd);
        }
        m.ppe.trees.push_back(std::move(t));
    }

    const Matrix enc = m.grid_encoding_matrix();
    size_t gi = 0;
    for (const auto& gj : j.at("meta_surrogates")) {
        m.meta_surrogates.push_back(GpModel::restore(
            enc, m.perf.row(static_cast<Eigen::Index>(gi)).transpose(),
            gj.at("signal_var").get<double>(), gj.at("length_scale").get<double>(),
            gj.at("noise_var").get<double>()));
        ++gi;
    }
    return m;
}

void save_meta_model(const MetaModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << meta_model_to_json(m);
}

MetaModel load_meta_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return meta_model_from_json(text);
}

}  // namespace hpod
