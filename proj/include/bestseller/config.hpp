#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "bestseller/evaluate.hpp"

namespace bestseller {

// Line-oriented key=value file with [section] headers.
struct KVConfig {
    std::map<std::string, std::map<std::string, std::string>> sections;

    static KVConfig parse(const std::filesystem::path& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    // Missing key -> ConfigError naming section.key.
    std::string require(const std::string& section, const std::string& key) const;
};

struct ExperimentConfig {
    std::string corpus_archive;  // [corpus] archive=
    std::string subject;         // optional [corpus] subject=
    std::string output_dir;      // [output] dir=
    GridConfig grid;
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace bestseller
