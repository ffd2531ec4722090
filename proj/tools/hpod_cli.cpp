#include "hpod/eval.hpp"
#include "hpod/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// exit codes: 0 ok, 2 config, 3 data, 4 numerical, 5 version mismatch
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitVersion = 5;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw hpod::DataError("cannot write " + path);
    out << text;
}

hpod::HpSpace resolve_space(const std::string& algo, const std::string& space_file) {
    if (!space_file.empty()) {
        std::ifstream in(space_file);
        if (!in) throw hpod::ConfigError("cannot open space manifest: " + space_file);
        std::stringstream ss;
        ss << in.rdbuf();
        return hpod::space_from_json(ss.str());
    }
    return hpod::builtin_space(algo);
}

std::string setting_json(const hpod::HpSpace& space, const hpod::HpSetting& s) {
    json j;
    for (size_t i = 0; i < s.values.size(); ++i) {
        const auto& name = space.domains[i].name;
        if (std::holds_alternative<std::string>(s.values[i]))
            j[name] = std::get<std::string>(s.values[i]);
        else if (std::holds_alternative<std::int64_t>(s.values[i]))
            j[name] = std::get<std::int64_t>(s.values[i]);
        else
            j[name] = std::get<double>(s.values[i]);
    }
    return j.dump();
}

int run(int argc, char** argv) {
    CLI::App app{"HPOD: hyperparameter optimization for unsupervised outlier detection"};
    app.require_subcommand(1);

    // meta-train
    auto* mt = app.add_subcommand("meta-train", "offline meta-training over a labeled corpus");
    std::string mt_corpus, mt_algo = "lof", mt_space, mt_label = "outlier", mt_out = ".";
    std::uint64_t mt_seed = 0;
    mt->add_option("--corpus", mt_corpus, "directory of labeled CSV datasets")->required();
    mt->add_option("--algo", mt_algo, "detector: lof | iforest");
    mt->add_option("--space", mt_space, "HP space manifest JSON (default: built-in)");
    mt->add_option("--label-col", mt_label, "label column name");
    mt->add_option("--seed", mt_seed, "random seed")->required();
    mt->add_option("--out", mt_out, "output directory");

    // optimize
    auto* op = app.add_subcommand("optimize", "online HPO on a new (unlabeled) dataset");
    std::string op_model, op_data, op_out = ".", op_method = "hpod", op_label = "outlier";
    int op_iters = 40, op_kinit = 10, op_cands = 2000, op_nrandom = 30;
    double op_budget = 0.0;
    std::uint64_t op_seed = 0;
    bool op_with_labels = false;
    op->add_option("--model", op_model, "meta-model JSON file")->required();
    op->add_option("--data", op_data, "dataset CSV")->required();
    op->add_option("--iters", op_iters, "SMBO iterations E");
    op->add_option("--k-init", op_kinit, "surrogate initialization size");
    op->add_option("--candidates", op_cands, "sampled candidates per iteration");
    op->add_option("--budget-secs", op_budget, "wall-clock budget (0 = none)");
    op->add_option("--seed", op_seed, "random seed")->required();
    op->add_option("--method", op_method, "hpod | hpod0");
    op->add_option("--n-random", op_nrandom, "random HPs for hpod0");
    op->add_option("--label-col", op_label, "label column (with --with-labels)");
    op->add_flag("--with-labels", op_with_labels,
                 "dataset has labels; append true-AP column to the trace");
    op->add_option("--out", op_out, "output directory");

    // benchmark
    auto* bm = app.add_subcommand("benchmark", "LOOCV benchmark over a labeled corpus");
    std::string bm_corpus, bm_algo = "lof", bm_space, bm_label = "outlier", bm_out = ".";
    std::string bm_methods = "default,random,gb,as,hpod0,hpod";
    int bm_trials = 5, bm_iters = 40, bm_kinit = 10, bm_cands = 2000;
    std::uint64_t bm_seed = 0;
    bm->add_option("--corpus", bm_corpus, "directory of labeled CSV datasets")->required();
    bm->add_option("--algo", bm_algo, "detector: lof | iforest");
    bm->add_option("--space", bm_space, "HP space manifest JSON");
    bm->add_option("--label-col", bm_label, "label column name");
    bm->add_option("--methods", bm_methods, "comma-separated method list");
    bm->add_option("--trials", bm_trials, "trials for stochastic methods");
    bm->add_option("--iters", bm_iters, "SMBO iterations E");
    bm->add_option("--k-init", bm_kinit, "surrogate initialization size");
    bm->add_option("--candidates", bm_cands, "sampled candidates per iteration");
    bm->add_option("--seed", bm_seed, "random seed")->required();
    bm->add_option("--out", bm_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    if (mt->parsed()) {
        const auto space = resolve_space(mt_algo, mt_space);
        const auto corpus = hpod::load_corpus(mt_corpus, mt_label);
        const auto meta = hpod::offline_meta_train(corpus, space, mt_seed);
        fs::create_directories(mt_out);
        const auto path = (fs::path(mt_out) / "meta_model.json").string();
        hpod::save_meta_model(meta, path);
        std::cout << "meta-model written to " << path << "\n"
                  << "datasets: " << meta.perf.rows() << ", grid HPs: " << meta.perf.cols()
                  << ", PPE rows: " << meta.perf.rows() * meta.perf.cols() << "\n"
                  << "anchor set size: " << meta.anchors.grid_indices.size()
                  << ", PPE training MSE: " << meta.ppe_train_mse << "\n";
        return 0;
    }

    if (op->parsed()) {
        const auto meta = hpod::load_meta_model(op_model);
        const auto ds = hpod::load_dataset(
            op_data, op_with_labels ? std::optional<std::string>(op_label) : std::nullopt);

        hpod::HpodResult res;
        if (op_method == "hpod") {
            hpod::HpodOptions opt;
            opt.iterations = op_iters;
            opt.k_init = op_kinit;
            opt.n_candidates = op_cands;
            if (op_budget > 0.0) opt.budget_secs = op_budget;
            opt.seed = op_seed;
            res = hpod::hpod_optimize(meta, ds.X, opt);
        } else if (op_method == "hpod0") {
            res = hpod::hpod0_optimize(meta, ds.X, op_nrandom, op_seed);
        } else {
            throw hpod::ConfigError("unknown method: " + op_method);
        }

        fs::create_directories(op_out);
        write_file((fs::path(op_out) / "selected_hp.json").string(),
                   setting_json(meta.space, res.best) + "\n");

        std::ostringstream trace;
        trace << "iter,hp_json,pred_perf,incumbent_pred,meta_task,transfer_w,ms";
        if (op_with_labels) trace << ",true_ap";
        trace << "\n";
        hpod::DetectorRunner runner(meta.space, hpod::standardize_matrix(ds.X), op_seed);
        for (const auto& row : res.trace) {
            trace << row.iteration << ",\"" << setting_json(meta.space, row.setting)
                  << "\"," << row.predicted_perf << "," << row.incumbent_pred << ","
                  << row.meta_task << "," << row.transfer_weight << "," << row.wall_ms;
            if (op_with_labels)
                trace << ","
                      << hpod::average_precision(
                             runner.run(row.setting, static_cast<std::uint64_t>(row.iteration)),
                             *ds.y);
            trace << "\n";
        }
        write_file((fs::path(op_out) / "trace.csv").string(), trace.str());
        std::cout << "selected HP: " << setting_json(meta.space, res.best)
                  << " (predicted perf " << res.best_pred << ")\n";
        return 0;
    }

    // benchmark
    const auto space = resolve_space(bm_algo, bm_space);
    const auto corpus = hpod::load_corpus(bm_corpus, bm_label);
    hpod::BenchmarkConfig cfg;
    std::stringstream ss(bm_methods);
    std::string tok;
    while (std::getline(ss, tok, ',')) cfg.methods.push_back(tok);
    cfg.trials = bm_trials;
    cfg.seed = bm_seed;
    cfg.hpod.iterations = bm_iters;
    cfg.hpod.k_init = bm_kinit;
    cfg.hpod.n_candidates = bm_cands;
    const auto report = hpod::loocv_benchmark(corpus, space, cfg);
    fs::create_directories(bm_out);
    write_file((fs::path(bm_out) / "report.csv").string(), hpod::report_to_csv(report));
    write_file((fs::path(bm_out) / "report.md").string(), hpod::report_to_markdown(report));
    write_file((fs::path(bm_out) / "wilcoxon.csv").string(), hpod::wilcoxon_to_csv(report));
    std::cout << hpod::report_to_markdown(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const hpod::ConfigError& e) {
        const std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        return msg.find("version mismatch") != std::string::npos ? kExitVersion : kExitConfig;
    } catch (const hpod::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const hpod::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
