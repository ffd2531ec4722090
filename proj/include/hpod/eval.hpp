#pragma once

#include "hpod/metrics.hpp"
#include "hpod/pipeline.hpp"

#include <map>
#include <string>
#include <vector>

namespace hpod {

enum class BaselineMethod { Default, Random, GlobalBest, ArgoSmart, Hpod0 };

BaselineMethod baseline_from_string(const std::string& name);

HpSetting baseline_select(BaselineMethod method, const MetaModel& meta,
                          const Matrix& X_test, std::uint64_t seed,
                          int n_random = 30);

// Averages the rank-normalized score vectors of k grid HPs drawn uniformly.
Vector hyper_ensemble_scores(const MetaModel& meta, const Matrix& X_test, int k,
                             std::uint64_t seed);

struct BenchmarkRow {
    std::string dataset;
    std::string method;
    std::string selected_hp;  // JSON array text; empty for score ensembles
    double true_ap = 0.0;
    double norm_ap_rank = 0.0;
    double top_q = 1.0;
};

struct MethodAggregate {
    double mean_norm_rank = 0.0;
    double std_norm_rank = 0.0;
    double mean_top_q = 0.0;
    double mean_rank_among_methods = 0.0;  // 1 = best per dataset
};

struct BenchmarkReport {
    std::vector<BenchmarkRow> rows;
    std::vector<std::string> methods;
    std::vector<std::string> datasets;
    std::map<std::string, MethodAggregate> aggregates;
    // two-sided Wilcoxon p of hpod vs each other method over datasets
    std::map<std::string, double> wilcoxon_vs_hpod;
    // per (dataset, method) mean normalized rank, for downstream tests
    std::map<std::string, std::map<std::string, double>> fold_norm_rank;
};

// Methods: default, random, gb, as, hpod0, hyperensemble, hpod,
// hpod_greedy, hpod_randinit, hpod_notransfer.
struct BenchmarkConfig {
    std::vector<std::string> methods;
    int trials = 5;
    std::uint64_t seed = 0;
    HpodOptions hpod;  // iterations/k_init/candidates shared by hpod variants
};

BenchmarkReport loocv_benchmark(const Corpus& corpus, const HpSpace& space,
                                const BenchmarkConfig& config);

std::string report_to_csv(const BenchmarkReport& r);
std::string report_to_markdown(const BenchmarkReport& r);
std::string wilcoxon_to_csv(const BenchmarkReport& r);

}  // namespace hpod
