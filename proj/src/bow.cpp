#include "bestseller/bow.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <unordered_map>

#include "bestseller/errors.hpp"
#include "bestseller/util.hpp"

namespace bestseller {

Vocabulary build_vocabulary(const Corpus& corpus, double min_fraction) {
    if (corpus.documents.empty()) throw VocabularyError("empty corpus");
    if (min_fraction <= 0.0 || min_fraction > 1.0)
        throw VocabularyError("min_fraction must be in (0, 1]");

    std::map<std::string, int> doc_freq;
    for (const auto& doc : corpus.documents) {
        if (!doc.tokens) throw VocabularyError("document '" + doc.id + "' has no tokens");
        std::set<std::string> seen(doc.tokens->begin(), doc.tokens->end());
        for (const auto& w : seen) doc_freq[w]++;
    }

    const int threshold = static_cast<int>(
        std::ceil(min_fraction * static_cast<double>(corpus.documents.size())));

    Vocabulary vocab;
    vocab.min_doc_count = threshold;
    for (const auto& [word, df] : doc_freq) {  // std::map: already sorted
        if (df >= threshold) {
            vocab.words.push_back(word);
            vocab.doc_frequency.push_back(df);
        }
    }
    return vocab;
}

EmbeddingMatrix bow_matrix(const Corpus& corpus, const Vocabulary& vocab) {
    std::unordered_map<std::string, Eigen::Index> index;
    for (std::size_t j = 0; j < vocab.words.size(); ++j)
        index[vocab.words[j]] = static_cast<Eigen::Index>(j);

    EmbeddingMatrix m;
    m.kind = EmbeddingKind::BoW;
    m.doc_ids = corpus.ids();
    m.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(corpus.size()),
                                     static_cast<Eigen::Index>(vocab.size()));

    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        const auto& doc = corpus.documents[i];
        if (!doc.tokens) throw VocabularyError("document '" + doc.id + "' has no tokens");
        const double total = static_cast<double>(doc.tokens->size());
        if (total == 0.0) {
            std::cerr << "warning: document '" << doc.id << "' has no tokens, zero row\n";
            continue;
        }
        for (const auto& w : *doc.tokens) {
            auto it = index.find(w);
            if (it != index.end()) m.values(static_cast<Eigen::Index>(i), it->second) += 1.0;
        }
        m.values.row(static_cast<Eigen::Index>(i)) /= total;
    }
    return m;
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IOError("cannot write vocabulary file: " + path.string());
    for (std::size_t i = 0; i < vocab.words.size(); ++i)
        out << vocab.words[i] << '\t' << vocab.doc_frequency[i] << '\n';
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open vocabulary file: " + path.string());
    Vocabulary vocab;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cols = split_on(line, '\t');
        if (cols.size() != 2) throw IOError("malformed vocabulary row: " + line);
        vocab.words.push_back(cols[0]);
        vocab.doc_frequency.push_back(std::stoi(cols[1]));
    }
    return vocab;
}

}  // namespace bestseller
