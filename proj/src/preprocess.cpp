#include "bestseller/preprocess.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "bestseller/errors.hpp"
#include "bestseller/util.hpp"

namespace bestseller {

std::uint64_t StopwordList::content_hash() const {
    std::vector<std::string> sorted(words.begin(), words.end());
    std::sort(sorted.begin(), sorted.end());
    std::string joined;
    for (const auto& w : sorted) {
        joined += w;
        joined += '\n';
    }
    return fnv1a64(joined);
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open stopword file: " + path.string());
    StopwordList list;
    list.source_name = path.filename().string();
    std::string line;
    while (std::getline(in, line)) {
        auto w = trim(line);
        if (!w.empty()) list.words.insert(to_lower_ascii(w));
    }
    return list;
}

std::uint64_t LemmaLexicon::content_hash() const {
    std::ostringstream ss;
    std::vector<std::string> lines;
    for (const auto& [w, l] : exceptions) lines.push_back("e\t" + w + "\t" + l);
    for (const auto& w : base_vocabulary) lines.push_back("b\t" + w);
    std::sort(lines.begin(), lines.end());
    for (const auto& [s, r] : suffix_rules) lines.push_back("r\t" + s + "\t" + r);
    for (const auto& l : lines) ss << l << '\n';
    return fnv1a64(ss.str());
}

LemmaLexicon LemmaLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open lemma lexicon: " + path.string());
    LemmaLexicon lex;
    lex.source_name = path.filename().string();
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line[0] == '#') continue;
        auto cols = split_on(line, '\t');
        if (cols[0] == "exception" && cols.size() == 3)
            lex.exceptions[cols[1]] = cols[2];
        else if (cols[0] == "rule" && cols.size() == 3)
            lex.suffix_rules.emplace_back(cols[1], cols[2]);
        else if (cols[0] == "base" && cols.size() == 2)
            lex.base_vocabulary.insert(cols[1]);
        else
            throw IOError("bad lexicon record at line " + std::to_string(row) + ": " + line);
    }
    return lex;
}

std::string lemmatize(const std::string& token, const LemmaLexicon& lexicon) {
    auto it = lexicon.exceptions.find(token);
    if (it != lexicon.exceptions.end()) return it->second;
    // Known lemmas are fixpoints; suffix rules only fire on unknown forms.
    if (lexicon.base_vocabulary.count(token)) return token;
    for (const auto& [suffix, replacement] : lexicon.suffix_rules) {
        if (token.size() <= suffix.size()) continue;
        if (token.compare(token.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
        std::string candidate = token.substr(0, token.size() - suffix.size()) + replacement;
        if (lexicon.base_vocabulary.count(candidate)) return candidate;
    }
    return token;
}

namespace {

inline bool is_alpha(char c) { return c >= 'a' && c <= 'z'; }

std::string strip_non_alpha(const std::string& chunk) {
    std::string out;
    for (char c : chunk)
        if (is_alpha(c)) out += c;
    return out;
}

}  // namespace

std::vector<std::string> preprocess_document(const std::string& raw_text,
                                             const StopwordList& stopwords,
                                             const LemmaLexicon& lexicon) {
    const std::string lower = to_lower_ascii(raw_text);

    std::vector<std::string> tokens;
    std::size_t i = 0;
    const std::size_t n = lower.size();
    while (i < n) {
        while (i < n && std::isspace(static_cast<unsigned char>(lower[i]))) ++i;
        std::size_t start = i;
        while (i < n && !std::isspace(static_cast<unsigned char>(lower[i]))) ++i;
        if (i == start) continue;
        const std::string chunk = lower.substr(start, i - start);

        // Stopword check runs on the whole punctuation-stripped chunk, before
        // the chunk is split into tokens ("thing," passes, "schule-house" too).
        if (stopwords.contains(strip_non_alpha(chunk))) continue;

        std::string piece;
        for (std::size_t k = 0; k <= chunk.size(); ++k) {
            if (k < chunk.size() && is_alpha(chunk[k])) {
                piece += chunk[k];
                continue;
            }
            if (!piece.empty()) tokens.push_back(lemmatize(piece, lexicon));
            piece.clear();
        }
    }
    return tokens;
}

}  // namespace bestseller
