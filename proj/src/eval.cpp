#include "hpod/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hpod {

BaselineMethod baseline_from_string(const std::string& name) {
    if (name == "default") return BaselineMethod::Default;
    if (name == "random") return BaselineMethod::Random;
    if (name == "gb") return BaselineMethod::GlobalBest;
    if (name == "as") return BaselineMethod::ArgoSmart;
    if (name == "hpod0") return BaselineMethod::Hpod0;
    throw ConfigError("unknown baseline: " + name);
}

HpSetting baseline_select(BaselineMethod method, const MetaModel& meta,
                          const Matrix& X_test, std::uint64_t seed, int n_random) {
    switch (method) {
        case BaselineMethod::Default:
            return default_setting(meta.space, X_test.rows());
        case BaselineMethod::Random: {
            Rng rng(seed);
            const auto j = rng.uniform_int(0, static_cast<std::int64_t>(meta.grid.size()) - 1);
            return meta.grid[static_cast<size_t>(j)];
        }
        case BaselineMethod::GlobalBest: {
            Eigen::Index best = 0;
            meta.perf.colwise().mean().maxCoeff(&best);
            return meta.grid[static_cast<size_t>(best)];
        }
        case BaselineMethod::ArgoSmart: {
            const auto m_test = extract_meta_features(X_test, mix_seed(seed, 0xB0));
            int i0 = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < meta.meta_features.size(); ++i) {
                const double d = mf_distance(m_test, meta.meta_features[i], meta.mf_scaler);
                if (d < best_d) {
                    best_d = d;
                    i0 = static_cast<int>(i);
                }
            }
            Eigen::Index best = 0;
            meta.perf.row(i0).maxCoeff(&best);
            return meta.grid[static_cast<size_t>(best)];
        }
        case BaselineMethod::Hpod0:
            return hpod0_optimize(meta, X_test, n_random, seed).best;
    }
    throw ConfigError("unreachable baseline");
}

Vector hyper_ensemble_scores(const MetaModel& meta, const Matrix& X_test, int k,
                             std::uint64_t seed) {
    if (k < 1) throw ConfigError("hyper-ensemble needs k >= 1");
    Rng rng(seed);
    const Matrix Xs = standardize_matrix(X_test);
    DetectorRunner runner(meta.space, Xs, mix_seed(seed, 0xA0));
    Vector acc = Vector::Zero(X_test.rows());
    for (int i = 0; i < k; ++i) {
        const auto j = rng.uniform_int(0, static_cast<std::int64_t>(meta.grid.size()) - 1);
        const Vector sc =
            runner.run(meta.grid[static_cast<size_t>(j)], static_cast<std::uint64_t>(i));
        acc += rank_normalize(sc);
    }
    return acc / static_cast<double>(k);
}

namespace {

std::string setting_to_text(const HpSpace& space, const HpSetting& s) {
    std::ostringstream os;
    os << "{";
    for (size_t i = 0; i < s.values.size(); ++i) {
        if (i) os << ", ";
        os << space.domains[i].name << "=" << value_to_string(s.values[i]);
    }
    os << "}";
    return os.str();
}

bool is_stochastic(const std::string& method) {
    return method != "default" && method != "gb" && method != "as";
}

std::uint64_t method_stream(const std::string& method) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : method) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

BenchmarkReport loocv_benchmark(const Corpus& corpus, const HpSpace& space,
                                const BenchmarkConfig& config) {
    if (corpus.datasets.size() < 3) throw DataError("LOOCV needs >= 3 datasets");
    if (config.methods.empty()) throw ConfigError("no methods requested");

    BenchmarkReport report;
    report.methods = config.methods;
    const auto grid = meta_grid(space);

    for (size_t fold = 0; fold < corpus.datasets.size(); ++fold) {
        const auto& held = corpus.datasets[fold];
        report.datasets.push_back(held.name);

        Corpus train;
        for (size_t i = 0; i < corpus.datasets.size(); ++i)
            if (i != fold) train.datasets.push_back(corpus.datasets[i]);

        const auto meta = offline_meta_train(
            train, space, mix_seed(config.seed, static_cast<std::uint64_t>(fold)));

        // ground-truth AP of every grid HP on the held-out dataset
        const Matrix Xs = standardize_matrix(held.X);
        const auto grid_scores = grid_detector_scores(
            space, grid, Xs, mix_seed(config.seed, 0x7000 + static_cast<std::uint64_t>(fold)));
        Vector grid_aps(static_cast<Eigen::Index>(grid.size()));
        for (size_t j = 0; j < grid.size(); ++j)
            grid_aps(static_cast<Eigen::Index>(j)) =
                average_precision(grid_scores[j], *held.y);

        DetectorRunner truth_runner(space, Xs,
                                    mix_seed(config.seed, 0x8000 + static_cast<std::uint64_t>(fold)));

        for (const auto& method : config.methods) {
            const int trials = is_stochastic(method) ? config.trials : 1;
            double sum_ap = 0.0, sum_rank = 0.0, sum_topq = 0.0;
            std::string last_hp;
            for (int trial = 0; trial < trials; ++trial) {
                const std::uint64_t run_seed =
                    mix_seed(config.seed, method_stream(method) +
                                              static_cast<std::uint64_t>(fold) * 131 +
                                              static_cast<std::uint64_t>(trial));
                double ap;
                if (method == "hyperensemble") {
                    const Vector sc = hyper_ensemble_scores(meta, held.X, 10, run_seed);
                    ap = average_precision(sc, *held.y);
                    last_hp = "";
                } else if (method == "hpod" || method == "hpod_greedy" ||
                           method == "hpod_randinit" || method == "hpod_notransfer") {
                    HpodOptions opt = config.hpod;
                    opt.seed = run_seed;
                    if (method == "hpod_greedy") opt.acquisition = Acquisition::Greedy;
                    if (method == "hpod_randinit") opt.init = InitStrategy::Random;
                    if (method == "hpod_notransfer") opt.transfer = false;
                    const auto res = hpod_optimize(meta, held.X, opt);
                    const Vector sc = truth_runner.run(res.best, run_seed);
                    ap = average_precision(sc, *held.y);
                    last_hp = setting_to_text(space, res.best);
                } else {
                    const auto sel =
                        baseline_select(baseline_from_string(method), meta, held.X, run_seed);
                    const Vector sc = truth_runner.run(sel, run_seed);
                    ap = average_precision(sc, *held.y);
                    last_hp = setting_to_text(space, sel);
                }
                sum_ap += ap;
                sum_rank += normalized_ap_rank(ap, grid_aps);
                sum_topq += top_q(ap, grid_aps);
            }
            BenchmarkRow row;
            row.dataset = held.name;
            row.method = method;
            row.selected_hp = last_hp;
            row.true_ap = sum_ap / trials;
            row.norm_ap_rank = sum_rank / trials;
            row.top_q = sum_topq / trials;
            report.rows.push_back(row);
            report.fold_norm_rank[held.name][method] = row.norm_ap_rank;
        }
    }

    // aggregates
    for (const auto& method : config.methods) {
        std::vector<double> ranks, topqs;
        for (const auto& row : report.rows)
            if (row.method == method) {
                ranks.push_back(row.norm_ap_rank);
                topqs.push_back(row.top_q);
            }
        MethodAggregate agg;
        const double n = static_cast<double>(ranks.size());
        agg.mean_norm_rank = std::accumulate(ranks.begin(), ranks.end(), 0.0) / n;
        double var = 0.0;
        for (double r : ranks) var += (r - agg.mean_norm_rank) * (r - agg.mean_norm_rank);
        agg.std_norm_rank = std::sqrt(var / n);
        agg.mean_top_q = std::accumulate(topqs.begin(), topqs.end(), 0.0) / n;
        report.aggregates[method] = agg;
    }
    // mean rank among methods per dataset (1 = best normalized AP rank)
    for (const auto& ds : report.datasets) {
        std::vector<std::pair<double, std::string>> vals;
        for (const auto& method : config.methods)
            vals.emplace_back(report.fold_norm_rank[ds][method], method);
        std::sort(vals.begin(), vals.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        for (size_t r = 0; r < vals.size(); ++r)
            report.aggregates[vals[r].second].mean_rank_among_methods +=
                static_cast<double>(r + 1) / static_cast<double>(report.datasets.size());
    }

    // pairwise Wilcoxon between hpod and each baseline over datasets
    if (std::find(config.methods.begin(), config.methods.end(), "hpod") !=
        config.methods.end()) {
        Vector hp(static_cast<Eigen::Index>(report.datasets.size()));
        for (size_t i = 0; i < report.datasets.size(); ++i)
            hp(static_cast<Eigen::Index>(i)) = report.fold_norm_rank[report.datasets[i]]["hpod"];
        for (const auto& method : config.methods) {
            if (method == "hpod") continue;
            Vector other(hp.size());
            for (size_t i = 0; i < report.datasets.size(); ++i)
                other(static_cast<Eigen::Index>(i)) =
                    report.fold_norm_rank[report.datasets[i]][method];
            try {
                report.wilcoxon_vs_hpod[method] = wilcoxon_signed_rank(hp, other);
            } catch (const DataError&) {
                report.wilcoxon_vs_hpod[method] = std::numeric_limits<double>::quiet_NaN();
            }
        }
    }
    return report;
}

std::string report_to_csv(const BenchmarkReport& r) {
    std::ostringstream os;
    os << "dataset,method,selected_hp,true_ap,norm_ap_rank,top_q\n";
    for (const auto& row : r.rows)
        os << row.dataset << "," << row.method << ",\"" << row.selected_hp << "\","
           << row.true_ap << "," << row.norm_ap_rank << "," << row.top_q << "\n";
    return os.str();
}

std::string report_to_markdown(const BenchmarkReport& r) {
    std::ostringstream os;
    os << "# LOOCV benchmark\n\n";
    os << "| method | mean norm AP rank | std | mean top-q | mean rank |\n";
    os << "|---|---|---|---|---|\n";
    for (const auto& method : r.methods) {
        const auto& a = r.aggregates.at(method);
        os << "| " << method << " | " << a.mean_norm_rank << " | " << a.std_norm_rank
           << " | " << a.mean_top_q << " | " << a.mean_rank_among_methods << " |\n";
    }
    if (!r.wilcoxon_vs_hpod.empty()) {
        os << "\n## Wilcoxon signed-rank, hpod vs baseline (two-sided)\n\n";
        os << "| baseline | p |\n|---|---|\n";
        for (const auto& [m, p] : r.wilcoxon_vs_hpod) os << "| " << m << " | " << p << " |\n";
    }
    os << "\nNote: top-q uses a deterministic grid-quantile threshold.\n";
    return os.str();
}

std::string wilcoxon_to_csv(const BenchmarkReport& r) {
    std::ostringstream os;
    os << "baseline,p_two_sided\n";
    for (const auto& [m, p] : r.wilcoxon_vs_hpod) os << m << "," << p << "\n";
    return os.str();
}

}  // namespace hpod
