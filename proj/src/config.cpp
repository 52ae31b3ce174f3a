#include "bestseller/config.hpp"

#include <fstream>

#include "bestseller/errors.hpp"
#include "bestseller/util.hpp"

namespace bestseller {

KVConfig KVConfig::parse(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    KVConfig config;
    std::string line, section;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        auto t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            config.sections[section];
            continue;
        }
        auto pos = t.find('=');
        if (pos == std::string::npos)
            throw ConfigError("expected key=value at line " + std::to_string(row) + ": " + t);
        config.sections[section][trim(t.substr(0, pos))] = trim(t.substr(pos + 1));
    }
    return config;
}

bool KVConfig::has(const std::string& section, const std::string& key) const {
    auto s = sections.find(section);
    return s != sections.end() && s->second.count(key) > 0;
}

std::string KVConfig::get(const std::string& section, const std::string& key,
                          const std::string& fallback) const {
    auto s = sections.find(section);
    if (s == sections.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

std::string KVConfig::require(const std::string& section, const std::string& key) const {
    if (!has(section, key))
        throw ConfigError("missing required config key [" + section + "] " + key);
    return sections.at(section).at(key);
}

namespace {

bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("bad boolean for " + where + ": '" + v + "'");
}

}  // namespace

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    const KVConfig kv = KVConfig::parse(path);
    ExperimentConfig config;
    config.corpus_archive = kv.require("corpus", "archive");
    config.subject = kv.get("corpus", "subject", "");
    config.output_dir = kv.get("output", "dir", "eval_out");

    GridConfig& g = config.grid;
    g.bow_min_fraction = std::stod(kv.get("bow", "min_fraction", "0.5"));
    if (kv.has("d2v", "dims")) {
        g.d2v_dims.clear();
        for (const auto& d : split_on(kv.get("d2v", "dims", ""), ','))
            if (!trim(d).empty()) g.d2v_dims.push_back(std::stoi(trim(d)));
    }
    g.d2v_window = std::stoi(kv.get("d2v", "window", "5"));
    g.d2v_min_count = std::stoi(kv.get("d2v", "min_count", "1"));
    g.d2v_epochs = std::stoi(kv.get("d2v", "epochs", "40"));
    g.d2v_negatives = std::stoi(kv.get("d2v", "negatives", "5"));
    g.d2v_initial_lr = std::stod(kv.get("d2v", "initial_lr", "0.025"));
    g.d2v_final_lr = std::stod(kv.get("d2v", "final_lr", "0.0001"));

    if (kv.has("models", "kinds")) {
        g.models.clear();
        for (const auto& m : split_on(kv.get("models", "kinds", ""), ','))
            if (!trim(m).empty()) g.models.push_back(model_kind_from_name(trim(m)));
    }
    const std::string kernel = kv.get("models", "svm_kernel", "rbf");
    if (kernel == "rbf")
        g.svm_kernel = SVMKernel::RBF;
    else if (kernel == "linear")
        g.svm_kernel = SVMKernel::Linear;
    else
        throw ConfigError("bad [models] svm_kernel: '" + kernel + "'");

    if (kv.has("validation", "schemes")) {
        g.validations.clear();
        for (const auto& v : split_on(kv.get("validation", "schemes", ""), ',')) {
            auto name = trim(v);
            if (name == "loo")
                g.validations.push_back(CVScheme::Kind::LOO);
            else if (name == "kfold")
                g.validations.push_back(CVScheme::Kind::KFold);
            else if (!name.empty())
                throw ConfigError("bad [validation] scheme: '" + name + "'");
        }
    }
    g.kfold_k = std::stoi(kv.get("validation", "k", "10"));
    const std::string scope = kv.get("validation", "standardize_scope", "fold");
    if (scope == "fold")
        g.standardize_scope = StandardizeScope::Fold;
    else if (scope == "global")
        g.standardize_scope = StandardizeScope::Global;
    else
        throw ConfigError("bad [validation] standardize_scope: '" + scope + "'");
    g.seed = std::stoull(kv.get("validation", "seed", "1"));
    g.deterministic = parse_bool(kv.get("validation", "deterministic", "true"),
                                 "[validation] deterministic");
    return config;
}

}  // namespace bestseller
