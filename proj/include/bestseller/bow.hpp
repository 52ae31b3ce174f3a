#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bestseller/corpus.hpp"
#include "bestseller/matrix.hpp"

namespace bestseller {

struct Vocabulary {
    std::vector<std::string> words;      // ascending lexicographic
    std::vector<int> doc_frequency;      // aligned with words
    int min_doc_count = 0;

    std::size_t size() const { return words.size(); }
};

// Word included iff it occurs in at least ceil(min_fraction * N) documents.
Vocabulary build_vocabulary(const Corpus& corpus, double min_fraction = 0.5);

// Entry (d, w) = count(w in d) / total tokens of d; out-of-vocabulary tokens
// still count in the denominator.
EmbeddingMatrix bow_matrix(const Corpus& corpus, const Vocabulary& vocab);

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary load_vocabulary(const std::filesystem::path& path);

}  // namespace bestseller
