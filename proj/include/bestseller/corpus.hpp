#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bestseller {

enum class Label { Success = 0, Other = 1 };

inline const char* label_name(Label l) { return l == Label::Success ? "success" : "other"; }

struct Document {
    std::string id;
    std::string title;
    std::string author;
    int year = 0;
    Label label = Label::Other;
    std::optional<std::string> subject;  // Library-of-Congress class code, e.g. "PS"
    std::string raw_text;
    std::optional<std::vector<std::string>> tokens;
};

enum class Profile { Full, SubjectPS };

struct Corpus {
    std::vector<Document> documents;
    std::uint64_t seed = 0;
    Profile profile = Profile::Full;

    std::size_t size() const { return documents.size(); }
    std::vector<Label> labels() const;
    std::vector<std::string> ids() const;
};

struct StripResult {
    std::string text;
    bool markers_found = false;
};

// Cuts the Project Gutenberg header/footer: keeps the text strictly between
// the last recognized start marker and the first end marker after it.
// No markers -> input returned unchanged with markers_found=false.
StripResult strip_gutenberg_boilerplate(const std::string& raw_text);

// Manifest: UTF-8 TSV, header `id title author year label subject path`
// with an optional trailing `cuts` column holding `a..b;c..d` line ranges
// removed from the raw file before boilerplate stripping.
Corpus load_manifest(const std::filesystem::path& path);

struct BalanceResult {
    Corpus corpus;
    std::map<int, int> shortfall_by_year;  // year -> missing Other count
};

// Per-year class balancing: for every year keep all Success titles and a
// seeded random sample of min(#success(y), #available) Other titles.
BalanceResult balance_by_year(const Corpus& success_pool, const Corpus& other_pool,
                              std::uint64_t seed);

struct DedupResult {
    Corpus corpus;
    std::vector<std::string> dropped_ids;
};

// One book per author; Success preferred when an author spans both classes.
DedupResult enforce_one_per_author(const Corpus& corpus, std::uint64_t seed);

Corpus filter_by_subject(const Corpus& corpus, const std::string& subject);

// Cleaned-corpus archive: `<dir>/corpus.tsv` plus `<dir>/texts/<id>.txt`.
void save_corpus_archive(const Corpus& corpus, const std::filesystem::path& dir);
Corpus load_corpus_archive(const std::filesystem::path& dir);

}  // namespace bestseller
