#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bestseller/corpus.hpp"

namespace testutil {

// Self-cleaning temporary directory for fixture files.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("bestseller_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::filesystem::path file(const std::string& name) const { return path / name; }
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline bestseller::Document make_doc(const std::string& id, bestseller::Label label,
                                     const std::vector<std::string>& tokens,
                                     const std::string& author = "", int year = 1900) {
    bestseller::Document d;
    d.id = id;
    d.title = "title " + id;
    d.author = author.empty() ? "author " + id : author;
    d.year = year;
    d.label = label;
    d.tokens = tokens;
    std::string raw;
    for (const auto& t : tokens) raw += t + " ";
    d.raw_text = raw;
    return d;
}

inline bestseller::Corpus make_corpus(const std::vector<bestseller::Document>& docs) {
    bestseller::Corpus c;
    c.documents = docs;
    return c;
}

}  // namespace testutil
