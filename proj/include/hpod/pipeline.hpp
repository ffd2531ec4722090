#pragma once

#include "hpod/common.hpp"
#include "hpod/dataset.hpp"
#include "hpod/detectors.hpp"
#include "hpod/hpspace.hpp"
#include "hpod/ipm.hpp"
#include "hpod/metafeatures.hpp"
#include "hpod/ppe.hpp"
#include "hpod/surrogate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hpod {

inline constexpr const char* kMetaModelFormat = "hpod-metamodel-v1";

// Everything the online phase needs, persisted as one JSON document.
struct MetaModel {
    HpSpace space;
    std::vector<HpSetting> grid;
    std::vector<HpEncoding> grid_encodings;
    Matrix perf;  // n datasets x m grid HPs, AP values
    std::vector<std::string> dataset_names;
    std::vector<std::pair<int, int>> dataset_shapes;  // (rows, dims)
    std::vector<MetaFeatureVector> meta_features;
    MfScaler mf_scaler;
    AnchorSet anchors;
    PpeModel ppe;
    std::vector<GpModel> meta_surrogates;
    std::uint64_t seed = 0;
    double ppe_train_mse = 0.0;
    std::string mf_schema = kMetaFeatureSchema;

    Matrix grid_encoding_matrix() const;
};

MetaModel offline_meta_train(const Corpus& corpus, const HpSpace& space,
                             std::uint64_t seed);

std::string meta_model_to_json(const MetaModel& m);
MetaModel meta_model_from_json(const std::string& text);
void save_meta_model(const MetaModel& m, const std::string& path);
MetaModel load_meta_model(const std::string& path);

enum class Acquisition { Ei, Greedy, Random };
enum class InitStrategy { Meta, Random };

struct HpodOptions {
    int iterations = 40;     // E
    int k_init = 10;
    int n_candidates = 2000;
    std::optional<double> budget_secs;
    std::uint64_t seed = 0;
    Acquisition acquisition = Acquisition::Ei;
    InitStrategy init = InitStrategy::Meta;
    bool transfer = true;
};

struct TraceRow {
    int iteration;  // 0 for init rows
    HpSetting setting;
    double predicted_perf;
    HpSetting incumbent;
    double incumbent_pred;
    int meta_task = -1;       // transferred meta-train dataset index
    double transfer_weight = 0.0;
    double wall_ms = 0.0;
};

struct EvaluatedHp {
    HpSetting setting;
    HpEncoding encoding;
    int grid_index = -1;  // -1 when off the meta grid
    double predicted_perf;
};

struct HpodResult {
    HpSetting best;
    double best_pred = 0.0;
    std::vector<TraceRow> trace;
    std::vector<EvaluatedHp> evaluated;
};

HpodResult hpod_optimize(const MetaModel& meta, const Matrix& X_test,
                         const HpodOptions& opt);

HpodResult hpod0_optimize(const MetaModel& meta, const Matrix& X_test, int n_random,
                          std::uint64_t seed);

}  // namespace hpod
