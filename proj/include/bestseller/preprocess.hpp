#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace bestseller {

struct StopwordList {
    std::unordered_set<std::string> words;  // lowercase, no inner whitespace
    std::string source_name;

    bool contains(const std::string& w) const { return words.count(w) > 0; }
    std::uint64_t content_hash() const;

    // The fixed 179-entry English list shipped with the tool.
    static const StopwordList& builtin();
    // One word per line, UTF-8.
    static StopwordList load(const std::filesystem::path& path);
};

// Data-driven lemmatizer: irregular-form exceptions first, then ordered
// suffix rules whose result must be a known lemma.
struct LemmaLexicon {
    std::unordered_map<std::string, std::string> exceptions;
    std::vector<std::pair<std::string, std::string>> suffix_rules;  // (suffix, replacement)
    std::unordered_set<std::string> base_vocabulary;
    std::string source_name;

    std::uint64_t content_hash() const;

    static const LemmaLexicon& builtin();
    // Line-oriented records: `exception<TAB>word<TAB>lemma`,
    // `rule<TAB>suffix<TAB>replacement`, `base<TAB>word`.
    static LemmaLexicon load(const std::filesystem::path& path);
};

std::string lemmatize(const std::string& token, const LemmaLexicon& lexicon);

// Lowercase -> whitespace chunks -> stopword filter (on the
// punctuation-stripped chunk) -> split on non-alphabetic -> lemmatize.
std::vector<std::string> preprocess_document(const std::string& raw_text,
                                             const StopwordList& stopwords,
                                             const LemmaLexicon& lexicon);

}  // namespace bestseller
