#include "bestseller/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "bestseller/errors.hpp"
#include "bestseller/util.hpp"

namespace fs = std::filesystem;

namespace bestseller {

std::vector<Label> Corpus::labels() const {
    std::vector<Label> out;
    out.reserve(documents.size());
    for (const auto& d : documents) out.push_back(d.label);
    return out;
}

std::vector<std::string> Corpus::ids() const {
    std::vector<std::string> out;
    out.reserve(documents.size());
    for (const auto& d : documents) out.push_back(d.id);
    return out;
}

namespace {

const std::regex kStartMarker(
    R"(\*\s*\*\s*\*\s*START OF (THE|THIS) PROJECT GUTENBERG)",
    std::regex::icase);
const std::regex kEndMarker(
    R"(\*\s*\*\s*\*\s*END OF (THE|THIS) PROJECT GUTENBERG)",
    std::regex::icase);
// Legacy pre-2001 header form.
const std::regex kSmallPrintEnd(R"(\*END\s*\*?\s*THE SMALL PRINT)", std::regex::icase);

bool is_start_marker(const std::string& line) {
    return std::regex_search(line, kStartMarker) || std::regex_search(line, kSmallPrintEnd);
}

bool is_end_marker(const std::string& line) {
    return std::regex_search(line, kEndMarker);
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t pos = text.find('\n', start);
        if (pos == std::string::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return lines;
}

std::string join_lines(const std::vector<std::string>& lines, std::size_t first,
                       std::size_t last /*exclusive*/) {
    std::string out;
    for (std::size_t i = first; i < last; ++i) {
        out += lines[i];
        if (i + 1 < last) out += '\n';
    }
    return out;
}

}  // namespace

StripResult strip_gutenberg_boilerplate(const std::string& raw_text) {
    const auto lines = split_lines(raw_text);

    std::ptrdiff_t last_start = -1;
    for (std::size_t i = 0; i < lines.size(); ++i)
        if (is_start_marker(lines[i])) last_start = static_cast<std::ptrdiff_t>(i);

    std::ptrdiff_t first_end = -1;
    for (std::size_t i = last_start + 1; i < lines.size(); ++i) {
        if (is_end_marker(lines[i])) {
            first_end = static_cast<std::ptrdiff_t>(i);
            break;
        }
    }

    if (last_start < 0 && first_end < 0) return {raw_text, false};

    std::size_t body_first = last_start < 0 ? 0 : static_cast<std::size_t>(last_start) + 1;
    std::size_t body_last = first_end < 0 ? lines.size() : static_cast<std::size_t>(first_end);

    std::string body = trim(join_lines(lines, body_first, body_last));
    if (body.empty())
        throw BoilerplateError("text is empty after boilerplate stripping");
    return {std::move(body), true};
}

namespace {

// Parse "a..b;c..d" into 1-based inclusive line ranges.
std::vector<std::pair<int, int>> parse_cuts(const std::string& spec, int row) {
    std::vector<std::pair<int, int>> cuts;
    if (trim(spec).empty()) return cuts;
    for (const auto& part : split_on(spec, ';')) {
        auto p = trim(part);
        if (p.empty()) continue;
        auto pos = p.find("..");
        if (pos == std::string::npos)
            throw ManifestError("bad cut range '" + p + "'", row);
        try {
            int a = std::stoi(p.substr(0, pos));
            int b = std::stoi(p.substr(pos + 2));
            if (a < 1 || b < a) throw std::invalid_argument("range");
            cuts.emplace_back(a, b);
        } catch (const std::exception&) {
            throw ManifestError("bad cut range '" + p + "'", row);
        }
    }
    return cuts;
}

std::string apply_cuts(const std::string& text, const std::vector<std::pair<int, int>>& cuts) {
    if (cuts.empty()) return text;
    auto lines = split_lines(text);
    std::vector<bool> drop(lines.size(), false);
    for (auto [a, b] : cuts)
        for (int i = a; i <= b && i <= static_cast<int>(lines.size()); ++i)
            drop[static_cast<std::size_t>(i - 1)] = true;
    std::string out;
    bool first = true;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (drop[i]) continue;
        if (!first) out += '\n';
        out += lines[i];
        first = false;
    }
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

Corpus load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open manifest: " + path.string());

    std::string header;
    if (!std::getline(in, header)) throw ManifestError("empty manifest", 1);
    if (!header.empty() && header.back() == '\r') header.pop_back();

    const std::string base = "id\ttitle\tauthor\tyear\tlabel\tsubject\tpath";
    bool has_cuts = false;
    if (header == base + "\tcuts")
        has_cuts = true;
    else if (header != base)
        throw ManifestError("unexpected manifest header: '" + header + "'", 1);

    const std::size_t ncols = has_cuts ? 8 : 7;
    Corpus corpus;
    std::set<std::string> seen_ids;
    std::string line;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto cols = split_on(line, '\t');
        if (cols.size() != ncols)
            throw ManifestError("expected " + std::to_string(ncols) + " columns, got " +
                                    std::to_string(cols.size()),
                                row);

        Document doc;
        doc.id = trim(cols[0]);
        doc.title = trim(cols[1]);
        doc.author = trim(cols[2]);
        if (doc.id.empty()) throw ManifestError("empty id", row);
        if (!seen_ids.insert(doc.id).second)
            throw ManifestError("duplicate id '" + doc.id + "'", row);
        try {
            doc.year = std::stoi(trim(cols[3]));
        } catch (const std::exception&) {
            throw ManifestError("bad year '" + cols[3] + "'", row);
        }
        std::string label = to_lower_ascii(trim(cols[4]));
        if (label == "success")
            doc.label = Label::Success;
        else if (label == "other")
            doc.label = Label::Other;
        else
            throw ManifestError("unknown label '" + cols[4] + "'", row);
        std::string subject = trim(cols[5]);
        if (!subject.empty()) doc.subject = subject;

        fs::path book_path = trim(cols[6]);
        if (book_path.is_relative()) book_path = path.parent_path() / book_path;
        std::string raw;
        try {
            raw = read_file(book_path);
        } catch (const IOError& e) {
            throw ManifestError(e.what(), row);
        }
        if (has_cuts) raw = apply_cuts(raw, parse_cuts(cols[7], row));
        doc.raw_text = strip_gutenberg_boilerplate(raw).text;

        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

BalanceResult balance_by_year(const Corpus& success_pool, const Corpus& other_pool,
                              std::uint64_t seed) {
    std::set<std::string> success_authors;
    for (const auto& d : success_pool.documents) success_authors.insert(d.author);
    for (const auto& d : other_pool.documents)
        if (success_authors.count(d.author))
            throw BalanceError("author '" + d.author + "' appears in both pools");

    std::map<int, int> needed;
    for (const auto& d : success_pool.documents) needed[d.year]++;

    std::map<int, std::vector<const Document*>> candidates;
    for (const auto& d : other_pool.documents) candidates[d.year].push_back(&d);
    // Canonical candidate order: selection depends only on content and seed.
    for (auto& [year, docs] : candidates)
        std::sort(docs.begin(), docs.end(),
                  [](const Document* a, const Document* b) { return a->id < b->id; });

    BalanceResult result;
    result.corpus.seed = seed;
    result.corpus.documents = success_pool.documents;

    for (const auto& [year, want] : needed) {
        auto it = candidates.find(year);
        std::vector<const Document*> pool = it == candidates.end()
                                                ? std::vector<const Document*>{}
                                                : it->second;
        std::mt19937_64 rng(derive_seed(seed, "balance_by_year/" + std::to_string(year)));
        // Partial Fisher-Yates: the first `take` slots are a uniform sample.
        const int take = std::min<int>(want, static_cast<int>(pool.size()));
        for (int i = 0; i < take; ++i) {
            std::size_t j = i + static_cast<std::size_t>(
                                    to_unit_double(rng()) * static_cast<double>(pool.size() - i));
            std::swap(pool[i], pool[static_cast<std::size_t>(j)]);
            result.corpus.documents.push_back(*pool[i]);
        }
        if (take < want) result.shortfall_by_year[year] = want - take;
    }
    std::sort(result.corpus.documents.begin(), result.corpus.documents.end(),
              [](const Document& a, const Document& b) { return a.id < b.id; });
    return result;
}

DedupResult enforce_one_per_author(const Corpus& corpus, std::uint64_t seed) {
    std::map<std::string, std::vector<const Document*>> by_author;
    for (const auto& d : corpus.documents) by_author[d.author].push_back(&d);

    std::set<std::string> keep;
    DedupResult result;
    for (auto& [author, docs] : by_author) {
        std::vector<const Document*> pool;
        // Success is scarce: prefer it when an author spans both classes.
        for (const auto* d : docs)
            if (d->label == Label::Success) pool.push_back(d);
        if (pool.empty()) pool = docs;
        std::sort(pool.begin(), pool.end(),
                  [](const Document* a, const Document* b) { return a->id < b->id; });
        std::mt19937_64 rng(derive_seed(seed, "one_per_author/" + author));
        std::size_t pick = static_cast<std::size_t>(
            to_unit_double(rng()) * static_cast<double>(pool.size()));
        keep.insert(pool[pick]->id);
    }

    result.corpus.seed = corpus.seed;
    result.corpus.profile = corpus.profile;
    for (const auto& d : corpus.documents) {
        if (keep.count(d.id))
            result.corpus.documents.push_back(d);
        else
            result.dropped_ids.push_back(d.id);
    }
    return result;
}

Corpus filter_by_subject(const Corpus& corpus, const std::string& subject) {
    Corpus out;
    out.seed = corpus.seed;
    out.profile = subject == "PS" ? Profile::SubjectPS : corpus.profile;
    for (const auto& d : corpus.documents)
        if (d.subject && *d.subject == subject) out.documents.push_back(d);
    return out;
}

void save_corpus_archive(const Corpus& corpus, const fs::path& dir) {
    fs::create_directories(dir / "texts");
    std::ofstream idx(dir / "corpus.tsv");
    if (!idx) throw IOError("cannot write archive index: " + (dir / "corpus.tsv").string());
    idx << "id\ttitle\tauthor\tyear\tlabel\tsubject\tpath\n";
    for (const auto& d : corpus.documents) {
        fs::path rel = fs::path("texts") / (d.id + ".txt");
        std::ofstream txt(dir / rel, std::ios::binary);
        txt << d.raw_text;
        idx << d.id << '\t' << d.title << '\t' << d.author << '\t' << d.year << '\t'
            << label_name(d.label) << '\t' << (d.subject ? *d.subject : "") << '\t'
            << rel.string() << '\n';
    }
    std::ofstream meta(dir / "profile.txt");
    meta << (corpus.profile == Profile::SubjectPS ? "SubjectPS" : "Full") << '\n'
         << corpus.seed << '\n';
}

Corpus load_corpus_archive(const fs::path& dir) {
    std::ifstream in(dir / "corpus.tsv");
    if (!in) throw IOError("cannot open archive index: " + (dir / "corpus.tsv").string());
    Corpus corpus;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto cols = split_on(line, '\t');
        if (cols.size() != 7) throw IOError("malformed archive index row");
        Document d;
        d.id = cols[0];
        d.title = cols[1];
        d.author = cols[2];
        d.year = std::stoi(cols[3]);
        d.label = cols[4] == "success" ? Label::Success : Label::Other;
        if (!cols[5].empty()) d.subject = cols[5];
        d.raw_text = read_file(dir / cols[6]);
        corpus.documents.push_back(std::move(d));
    }
    std::ifstream meta(dir / "profile.txt");
    if (meta) {
        std::string profile;
        std::getline(meta, profile);
        corpus.profile = profile == "SubjectPS" ? Profile::SubjectPS : Profile::Full;
        meta >> corpus.seed;
    }
    return corpus;
}

}  // namespace bestseller
