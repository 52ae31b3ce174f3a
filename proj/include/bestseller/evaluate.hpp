#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bestseller/classify.hpp"
#include "bestseller/corpus.hpp"
#include "bestseller/matrix.hpp"

#include <nlohmann/json_fwd.hpp>

namespace bestseller {

struct CVScheme {
    enum class Kind { LOO, KFold };
    Kind kind = Kind::LOO;
    int k = 10;              // ignored for LOO
    bool stratified = true;  // KFold only
    std::uint64_t seed = 0;
};

// Train/test index pairs; LOO -> n singleton test sets, stratified KFold ->
// seeded shuffle with per-class fold counts within 1 of proportionality.
std::vector<std::pair<std::vector<int>, std::vector<int>>> split(int n,
                                                                 const std::vector<int>& labels,
                                                                 const CVScheme& scheme);

enum class StandardizeScope { Fold, Global };

struct CVResult {
    double mean_accuracy = 0.0;
    std::optional<double> std_dev;  // present for KFold only (population std)
    std::vector<double> per_fold;
};

CVResult cross_validate(const EmbeddingMatrix& matrix, const std::vector<int>& labels,
                        const ModelSpec& spec, const CVScheme& scheme, bool standardized,
                        StandardizeScope scope = StandardizeScope::Fold);

struct GridConfig {
    double bow_min_fraction = 0.5;
    std::vector<int> d2v_dims = {32, 64, 128, 256};
    int d2v_window = 5;
    int d2v_min_count = 1;
    int d2v_epochs = 40;
    int d2v_negatives = 5;
    double d2v_initial_lr = 0.025;
    double d2v_final_lr = 0.0001;
    bool deterministic = true;
    int threads = 1;
    std::vector<ModelKind> models = {ModelKind::KNN, ModelKind::LR, ModelKind::NB,
                                     ModelKind::DT, ModelKind::RF, ModelKind::SVM};
    SVMKernel svm_kernel = SVMKernel::RBF;
    std::vector<CVScheme::Kind> validations = {CVScheme::Kind::LOO, CVScheme::Kind::KFold};
    int kfold_k = 10;
    StandardizeScope standardize_scope = StandardizeScope::Fold;
    std::uint64_t seed = 1;

    // Optional cell filter; empty means everything. Keys: embed, prep, model,
    // validation (e.g. embed=bow, prep=standardized, model=lr).
    std::map<std::string, std::string> only;

    std::string canonical_string() const;
    std::uint64_t config_hash() const;
};

struct EvalCell {
    std::string embedding;      // "bow", "d2v-32", ...
    std::string preprocessing;  // "raw" | "standardized"
    std::string model;
    std::string validation;     // "loo" | "10-fold"
    double accuracy = 0.0;
    std::optional<double> std_dev;
    std::vector<double> per_fold;
    std::string error;  // non-empty when the cell failed
};

struct EvalReport {
    std::vector<EvalCell> cells;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string timestamp;
    std::map<std::string, std::string> parameters;  // effective config echo
    bool has_failures() const;
};

// Full cartesian grid {BoW, D2V x dims} x {raw, standardized} x models x
// validations; embeddings computed once and reused across cells.
EvalReport run_grid(Corpus& corpus, const GridConfig& config);

// include_timestamp=false yields the determinism-comparable body.
nlohmann::json report_to_json(const EvalReport& report, bool include_timestamp = true);
EvalReport report_from_json(const nlohmann::json& j);
std::string render_table(const EvalReport& report);

}  // namespace bestseller
