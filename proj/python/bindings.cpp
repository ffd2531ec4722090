#include "hpod/dataset.hpp"
#include "hpod/detectors.hpp"
#include "hpod/eval.hpp"
#include "hpod/metafeatures.hpp"
#include "hpod/metrics.hpp"
#include "hpod/pipeline.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <variant>

namespace py = pybind11;
using namespace hpod;

namespace {

py::object value_to_py(const HpValue& v) {
    return std::visit([](const auto& x) { return py::cast(x); }, v);
}

py::dict setting_to_dict(const HpSpace& space, const HpSetting& s) {
    py::dict d;
    for (size_t i = 0; i < space.domains.size(); ++i)
        d[py::str(space.domains[i].name)] = value_to_py(s.values[i]);
    return d;
}

py::dict result_to_dict(const MetaModel& meta, const HpodResult& res) {
    py::dict out;
    out["best"] = setting_to_dict(meta.space, res.best);
    out["best_pred"] = res.best_pred;
    py::list trace;
    for (const auto& row : res.trace) {
        py::dict t;
        t["iteration"] = row.iteration;
        t["setting"] = setting_to_dict(meta.space, row.setting);
        t["predicted_perf"] = row.predicted_perf;
        t["incumbent_pred"] = row.incumbent_pred;
        t["meta_task"] = row.meta_task;
        t["transfer_weight"] = row.transfer_weight;
        trace.append(std::move(t));
    }
    out["trace"] = std::move(trace);
    return out;
}

Alternative alt_from_string(const std::string& name) {
    if (name == "two-sided") return Alternative::TwoSided;
    if (name == "greater") return Alternative::Greater;
    throw ConfigError("unknown alternative: " + name);
}

}  // namespace

PYBIND11_MODULE(_hpod, m) {
    m.doc() = "Meta-learned hyperparameter optimization for outlier detection";

    py::register_exception<ConfigError>(m, "HpodConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "HpodDataError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "HpodNumericError", PyExc_ArithmeticError);

    py::class_<MetaModel>(m, "MetaModel")
        .def_property_readonly(
            "algorithm", [](const MetaModel& mm) { return mm.space.algorithm; })
        .def_property_readonly(
            "dataset_names", [](const MetaModel& mm) { return mm.dataset_names; })
        .def_property_readonly(
            "grid_size", [](const MetaModel& mm) { return mm.grid.size(); })
        .def_property_readonly(
            "ppe_train_mse", [](const MetaModel& mm) { return mm.ppe_train_mse; })
        .def("save", [](const MetaModel& mm, const std::string& path) {
            save_meta_model(mm, path);
        })
        .def("to_json", [](const MetaModel& mm) { return meta_model_to_json(mm); })
        .def_static("load",
                    [](const std::string& path) { return load_meta_model(path); });

    m.def(
        "meta_train",
        [](const std::string& corpus_dir, const std::string& algorithm,
           const std::string& label_col, std::uint64_t seed) {
            return offline_meta_train(load_corpus(corpus_dir, label_col),
                                      builtin_space(algorithm), seed);
        },
        py::arg("corpus_dir"), py::arg("algorithm") = "lof",
        py::arg("label_col") = "outlier", py::arg("seed") = 0);

    m.def(
        "optimize",
        [](const MetaModel& meta, const Matrix& X, int iterations, int k_init,
           int candidates, std::uint64_t seed, const std::string& method) {
            HpodOptions opt;
            opt.iterations = iterations;
            opt.k_init = k_init;
            opt.n_candidates = candidates;
            opt.seed = seed;
            if (method == "hpod")
                return result_to_dict(meta, hpod_optimize(meta, X, opt));
            if (method == "hpod0")
                return result_to_dict(
                    meta, hpod0_optimize(meta, X, iterations + k_init, seed));
            throw ConfigError("unknown method: " + method);
        },
        py::arg("model"), py::arg("X"), py::arg("iterations") = 40,
        py::arg("k_init") = 10, py::arg("candidates") = 2000, py::arg("seed") = 0,
        py::arg("method") = "hpod");

    m.def(
        "lof_scores",
        [](const Matrix& X, int n_neighbors, const std::string& metric) {
            return lof_scores(X, n_neighbors, metric);
        },
        py::arg("X"), py::arg("n_neighbors") = 20, py::arg("metric") = "minkowski");

    m.def("iforest_scores", &iforest_scores, py::arg("X"),
          py::arg("n_estimators") = 100, py::arg("max_samples") = 0.256,
          py::arg("max_features") = 0.8, py::arg("seed") = 0);

    m.def(
        "meta_features",
        [](const Matrix& X, std::uint64_t seed) {
            return extract_meta_features(X, seed).values;
        },
        py::arg("X"), py::arg("seed") = 0);

    m.def("standardize", &standardize_matrix, py::arg("X"));

    m.def("average_precision", &average_precision, py::arg("scores"),
          py::arg("labels"));
    m.def("normalized_ap_rank", &normalized_ap_rank, py::arg("ap"),
          py::arg("grid_aps"));
    m.def("top_q", &top_q, py::arg("ap"), py::arg("grid_aps"));
    m.def(
        "wilcoxon_signed_rank",
        [](const Vector& x, const Vector& y, const std::string& alternative) {
            return wilcoxon_signed_rank(x, y, alt_from_string(alternative));
        },
        py::arg("x"), py::arg("y"), py::arg("alternative") = "two-sided");
}
