#include "bestseller/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bestseller/bow.hpp"
#include "bestseller/d2v.hpp"
#include "bestseller/errors.hpp"
#include "bestseller/preprocess.hpp"
#include "bestseller/util.hpp"

namespace bestseller {

std::vector<std::pair<std::vector<int>, std::vector<int>>> split(
    int n, const std::vector<int>& labels, const CVScheme& scheme) {
    if (n < 2) throw SplitError("need at least 2 samples");
    std::vector<std::pair<std::vector<int>, std::vector<int>>> folds;

    if (scheme.kind == CVScheme::Kind::LOO) {
        for (int held = 0; held < n; ++held) {
            std::vector<int> train;
            train.reserve(static_cast<std::size_t>(n - 1));
            for (int i = 0; i < n; ++i)
                if (i != held) train.push_back(i);
            folds.emplace_back(std::move(train), std::vector<int>{held});
        }
        return folds;
    }

    const int k = scheme.k;
    if (k < 2 || k > n) throw SplitError("k must satisfy 2 <= k <= n");

    std::vector<std::vector<int>> test_sets(static_cast<std::size_t>(k));
    std::mt19937_64 rng(derive_seed(scheme.seed, "kfold"));
    auto shuffle = [&rng](std::vector<int>& v) {
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            const std::size_t j =
                i + static_cast<std::size_t>(to_unit_double(rng()) *
                                             static_cast<double>(v.size() - i));
            std::swap(v[i], v[j]);
        }
    };

    if (scheme.stratified) {
        // Deal each class's shuffled indices round-robin; rotate the starting
        // fold between classes so remainders spread evenly.
        std::vector<int> classes;
        for (int label : labels)
            if (std::find(classes.begin(), classes.end(), label) == classes.end())
                classes.push_back(label);
        std::sort(classes.begin(), classes.end());
        int fold_cursor = 0;
        for (int cls : classes) {
            std::vector<int> members;
            for (int i = 0; i < n; ++i)
                if (labels[static_cast<std::size_t>(i)] == cls) members.push_back(i);
            shuffle(members);
            for (int idx : members) {
                test_sets[static_cast<std::size_t>(fold_cursor % k)].push_back(idx);
                ++fold_cursor;
            }
        }
    } else {
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        shuffle(order);
        for (int i = 0; i < n; ++i)
            test_sets[static_cast<std::size_t>(i % k)].push_back(order[static_cast<std::size_t>(i)]);
    }

    for (auto& test : test_sets) {
        std::sort(test.begin(), test.end());
        std::vector<int> train;
        train.reserve(static_cast<std::size_t>(n) - test.size());
        std::size_t t = 0;
        for (int i = 0; i < n; ++i) {
            if (t < test.size() && test[t] == i) {
                ++t;
                continue;
            }
            train.push_back(i);
        }
        folds.emplace_back(std::move(train), std::move(test));
    }
    return folds;
}

CVResult cross_validate(const EmbeddingMatrix& matrix, const std::vector<int>& labels,
                        const ModelSpec& spec, const CVScheme& scheme, bool standardized,
                        StandardizeScope scope) {
    if (matrix.rows() != static_cast<Eigen::Index>(labels.size()))
        throw Error("matrix rows and labels must align");
    const int n = static_cast<int>(matrix.rows());
    const auto folds = split(n, labels, scheme);

    const EmbeddingMatrix* source = &matrix;
    EmbeddingMatrix global;
    if (standardized && scope == StandardizeScope::Global) {
        global = standardize(matrix);
        source = &global;
    }

    CVResult result;
    int total_correct = 0;
    for (const auto& [train_idx, test_idx] : folds) {
        const EmbeddingMatrix* view = source;
        EmbeddingMatrix fold_scaled;
        if (standardized && scope == StandardizeScope::Fold) {
            fold_scaled = standardize(matrix, train_idx);
            view = &fold_scaled;
        }

        Eigen::MatrixXd X_train(train_idx.size(), view->cols());
        std::vector<int> y_train;
        y_train.reserve(train_idx.size());
        for (std::size_t i = 0; i < train_idx.size(); ++i) {
            X_train.row(static_cast<Eigen::Index>(i)) = view->values.row(train_idx[i]);
            y_train.push_back(labels[static_cast<std::size_t>(train_idx[i])]);
        }
        Eigen::MatrixXd X_test(test_idx.size(), view->cols());
        for (std::size_t i = 0; i < test_idx.size(); ++i)
            X_test.row(static_cast<Eigen::Index>(i)) = view->values.row(test_idx[i]);

        auto model = fit(spec, X_train, y_train);
        const auto predicted = model->predict(X_test);
        int correct = 0;
        for (std::size_t i = 0; i < test_idx.size(); ++i)
            if (predicted[i] == labels[static_cast<std::size_t>(test_idx[i])]) ++correct;
        total_correct += correct;
        result.per_fold.push_back(static_cast<double>(correct) /
                                  static_cast<double>(test_idx.size()));
    }

    if (scheme.kind == CVScheme::Kind::LOO) {
        // Pooled accuracy, no std.
        result.mean_accuracy = static_cast<double>(total_correct) / static_cast<double>(n);
    } else {
        double mean = 0.0;
        for (double a : result.per_fold) mean += a;
        mean /= static_cast<double>(result.per_fold.size());
        double var = 0.0;
        for (double a : result.per_fold) var += (a - mean) * (a - mean);
        var /= static_cast<double>(result.per_fold.size());
        result.mean_accuracy = mean;
        result.std_dev = std::sqrt(var);
    }
    return result;
}

std::string GridConfig::canonical_string() const {
    std::ostringstream ss;
    ss << std::setprecision(17);
    ss << "bow.min_fraction=" << bow_min_fraction << '\n';
    ss << "d2v.dims=";
    for (std::size_t i = 0; i < d2v_dims.size(); ++i) ss << (i ? "," : "") << d2v_dims[i];
    ss << "\nd2v.window=" << d2v_window << "\nd2v.min_count=" << d2v_min_count
       << "\nd2v.epochs=" << d2v_epochs << "\nd2v.negatives=" << d2v_negatives
       << "\nd2v.initial_lr=" << d2v_initial_lr << "\nd2v.final_lr=" << d2v_final_lr
       << "\ndeterministic=" << deterministic << "\nmodels=";
    for (std::size_t i = 0; i < models.size(); ++i)
        ss << (i ? "," : "") << model_kind_name(models[i]);
    ss << "\nsvm_kernel=" << (svm_kernel == SVMKernel::RBF ? "rbf" : "linear")
       << "\nvalidations=";
    for (std::size_t i = 0; i < validations.size(); ++i)
        ss << (i ? "," : "")
           << (validations[i] == CVScheme::Kind::LOO ? "loo" : "kfold");
    ss << "\nkfold_k=" << kfold_k << "\nstandardize_scope="
       << (standardize_scope == StandardizeScope::Fold ? "fold" : "global")
       << "\nseed=" << seed << '\n';
    for (const auto& [key, value] : only) ss << "only." << key << '=' << value << '\n';
    return ss.str();
}

std::uint64_t GridConfig::config_hash() const { return fnv1a64(canonical_string()); }

bool EvalReport::has_failures() const {
    for (const auto& cell : cells)
        if (!cell.error.empty()) return true;
    return false;
}

namespace {

bool cell_selected(const GridConfig& config, const std::string& embed,
                   const std::string& prep, const std::string& model,
                   const std::string& validation) {
    auto match = [&](const char* key, const std::string& value) {
        auto it = config.only.find(key);
        return it == config.only.end() || it->second == value;
    };
    return match("embed", embed) && match("prep", prep) && match("model", model) &&
           match("validation", validation);
}

}  // namespace

EvalReport run_grid(Corpus& corpus, const GridConfig& config) {
    // Tokenize once.
    for (auto& doc : corpus.documents)
        if (!doc.tokens)
            doc.tokens = preprocess_document(doc.raw_text, StopwordList::builtin(),
                                             LemmaLexicon::builtin());

    std::vector<int> labels;
    for (const auto& doc : corpus.documents)
        labels.push_back(static_cast<int>(doc.label));

    // Embeddings, computed once per corpus and shared across cells.
    std::vector<std::pair<std::string, EmbeddingMatrix>> embeddings;
    {
        Vocabulary vocab = build_vocabulary(corpus, config.bow_min_fraction);
        embeddings.emplace_back("bow", bow_matrix(corpus, vocab));
    }
    for (int dim : config.d2v_dims) {
        D2VConfig d2v;
        d2v.dim = dim;
        d2v.window = config.d2v_window;
        d2v.min_count = config.d2v_min_count;
        d2v.epochs = config.d2v_epochs;
        d2v.negatives = config.d2v_negatives;
        d2v.initial_lr = config.d2v_initial_lr;
        d2v.final_lr = config.d2v_final_lr;
        d2v.deterministic = config.deterministic;
        d2v.threads = config.threads;
        d2v.seed = derive_seed(config.seed, "d2v/dim/" + std::to_string(dim));
        embeddings.emplace_back("d2v-" + std::to_string(dim),
                                train(corpus, d2v).doc_matrix());
    }

    EvalReport report;
    report.seed = config.seed;
    report.config_hash = hex64(config.config_hash());
    {
        auto now = std::chrono::system_clock::now();
        auto t = std::chrono::system_clock::to_time_t(now);
        std::ostringstream ts;
        ts << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
        report.timestamp = ts.str();
    }
    for (const auto& line : split_on(config.canonical_string(), '\n')) {
        auto pos = line.find('=');
        if (pos != std::string::npos)
            report.parameters[line.substr(0, pos)] = line.substr(pos + 1);
    }

    for (const auto& [embed_name, matrix] : embeddings) {
        for (const std::string prep : {"raw", "standardized"}) {
            for (ModelKind kind : config.models) {
                for (CVScheme::Kind val : config.validations) {
                    const std::string val_name = val == CVScheme::Kind::LOO
                                                     ? "loo"
                                                     : std::to_string(config.kfold_k) + "-fold";
                    if (!cell_selected(config, embed_name, prep, model_kind_name(kind),
                                       val == CVScheme::Kind::LOO ? "loo" : "kfold"))
                        continue;

                    EvalCell cell;
                    cell.embedding = embed_name;
                    cell.preprocessing = prep;
                    cell.model = model_kind_name(kind);
                    cell.validation = val_name;

                    ModelSpec spec;
                    spec.kind = kind;
                    spec.svm_kernel = config.svm_kernel;
                    spec.seed = derive_seed(config.seed, "model/" + embed_name + "/" + prep +
                                                             "/" + cell.model + "/" + val_name);
                    CVScheme scheme;
                    scheme.kind = val;
                    scheme.k = config.kfold_k;
                    scheme.seed = derive_seed(config.seed, "cv/" + embed_name + "/" + prep +
                                                               "/" + cell.model + "/" + val_name);
                    try {
                        CVResult r = cross_validate(matrix, labels, spec, scheme,
                                                    prep == std::string("standardized"),
                                                    config.standardize_scope);
                        cell.accuracy = r.mean_accuracy;
                        cell.std_dev = r.std_dev;
                        cell.per_fold = r.per_fold;
                    } catch (const Error& e) {
                        cell.error = e.what();
                    }
                    report.cells.push_back(std::move(cell));
                }
            }
        }
    }
    return report;
}

nlohmann::json report_to_json(const EvalReport& report, bool include_timestamp) {
    nlohmann::json j;
    j["config_hash"] = report.config_hash;
    j["seed"] = report.seed;
    if (include_timestamp) j["timestamp"] = report.timestamp;
    j["parameters"] = report.parameters;
    j["cells"] = nlohmann::json::array();
    for (const auto& cell : report.cells) {
        nlohmann::json c;
        c["embedding"] = cell.embedding;
        c["preprocessing"] = cell.preprocessing;
        c["model"] = cell.model;
        c["validation"] = cell.validation;
        if (cell.error.empty()) {
            c["accuracy"] = cell.accuracy;
            if (cell.std_dev) c["std"] = *cell.std_dev;
            c["per_fold"] = cell.per_fold;
        } else {
            c["error"] = cell.error;
        }
        j["cells"].push_back(std::move(c));
    }
    return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport report;
    report.config_hash = j.value("config_hash", "");
    report.seed = j.value("seed", std::uint64_t{0});
    report.timestamp = j.value("timestamp", "");
    if (j.contains("parameters"))
        for (auto it = j["parameters"].begin(); it != j["parameters"].end(); ++it)
            report.parameters[it.key()] = it.value().get<std::string>();
    for (const auto& c : j.at("cells")) {
        EvalCell cell;
        cell.embedding = c.at("embedding");
        cell.preprocessing = c.at("preprocessing");
        cell.model = c.at("model");
        cell.validation = c.at("validation");
        if (c.contains("error")) {
            cell.error = c["error"];
        } else {
            cell.accuracy = c.at("accuracy");
            if (c.contains("std")) cell.std_dev = c["std"].get<double>();
            if (c.contains("per_fold")) cell.per_fold = c["per_fold"].get<std::vector<double>>();
        }
        report.cells.push_back(std::move(cell));
    }
    return report;
}

std::string render_table(const EvalReport& report) {
    // Rows = models, column groups = embedding x preprocessing x validation.
    std::vector<std::string> models, columns;
    std::map<std::string, const EvalCell*> by_key;
    for (const auto& cell : report.cells) {
        if (std::find(models.begin(), models.end(), cell.model) == models.end())
            models.push_back(cell.model);
        const std::string col = cell.embedding + "/" + cell.preprocessing + "/" + cell.validation;
        if (std::find(columns.begin(), columns.end(), col) == columns.end())
            columns.push_back(col);
        by_key[cell.model + "|" + col] = &cell;
    }

    std::ostringstream out;
    const int w = 26;
    out << std::left << std::setw(6) << "model";
    for (const auto& col : columns) out << std::setw(w) << col;
    out << '\n';
    for (const auto& model : models) {
        out << std::left << std::setw(6) << model;
        for (const auto& col : columns) {
            auto it = by_key.find(model + "|" + col);
            std::ostringstream cellstr;
            if (it == by_key.end()) {
                cellstr << "-";
            } else if (!it->second->error.empty()) {
                cellstr << "FAILED";
            } else {
                cellstr << std::fixed << std::setprecision(2) << it->second->accuracy;
                if (it->second->std_dev)
                    cellstr << "±" << std::fixed << std::setprecision(2)
                            << *it->second->std_dev;
            }
            out << std::setw(w) << cellstr.str();
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace bestseller
