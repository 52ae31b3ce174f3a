#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"

#include "bestseller/bow.hpp"
#include "bestseller/errors.hpp"
#include "bestseller/matrix.hpp"

using namespace bestseller;
using testutil::make_corpus;
using testutil::make_doc;

TEST_CASE("build_vocabulary applies the ceil(min_fraction*N) threshold") {
    auto c = make_corpus({
        make_doc("d1", Label::Success, {"a", "b"}),
        make_doc("d2", Label::Success, {"a"}),
        make_doc("d3", Label::Other, {"a", "c"}),
        make_doc("d4", Label::Other, {"b", "c"}),
    });
    auto v = build_vocabulary(c, 0.5);
    CHECK(v.min_doc_count == 2);
    CHECK(v.words == std::vector<std::string>{"a", "b", "c"});
    CHECK(v.doc_frequency == std::vector<int>{3, 2, 2});
}

TEST_CASE("build_vocabulary with impossible threshold is empty") {
    auto c = make_corpus({
        make_doc("d1", Label::Success, {"a"}),
        make_doc("d2", Label::Other, {"b"}),
    });
    auto v = build_vocabulary(c, 1.0);
    CHECK(v.size() == 0);
}

TEST_CASE("build_vocabulary on an empty corpus throws") {
    Corpus empty;
    CHECK_THROWS_AS(build_vocabulary(empty, 0.5), VocabularyError);
}

TEST_CASE("build_vocabulary counts distinct documents, not occurrences") {
    auto c = make_corpus({
        make_doc("d1", Label::Success, {"a", "a", "a", "a"}),
        make_doc("d2", Label::Other, {"b", "c"}),
    });
    auto v = build_vocabulary(c, 1.0);  // threshold 2: nothing appears in both docs
    CHECK(v.size() == 0);
}

TEST_CASE("vocabulary is invariant under document order permutation") {
    auto docs = std::vector<Document>{
        make_doc("d1", Label::Success, {"a", "b"}),
        make_doc("d2", Label::Success, {"b", "c"}),
        make_doc("d3", Label::Other, {"c", "a"}),
    };
    auto v1 = build_vocabulary(make_corpus(docs), 0.5);
    std::reverse(docs.begin(), docs.end());
    auto v2 = build_vocabulary(make_corpus(docs), 0.5);
    CHECK(v1.words == v2.words);
    CHECK(v1.doc_frequency == v2.doc_frequency);
}

TEST_CASE("bow_matrix hand-counted row with out-of-vocab denominator") {
    auto c = make_corpus({make_doc("d", Label::Success, {"a", "a", "b", "c"})});
    Vocabulary v;
    v.words = {"a", "b"};
    v.doc_frequency = {1, 1};
    auto m = bow_matrix(c, v);
    REQUIRE(m.rows() == 1);
    REQUIRE(m.cols() == 2);
    CHECK(m.values(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.values(0, 1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(m.kind == EmbeddingKind::BoW);
    CHECK_FALSE(m.standardized);
}

TEST_CASE("bow_matrix gives zero rows for docs without in-vocab tokens") {
    auto c = make_corpus({
        make_doc("d1", Label::Success, {"z", "z"}),
        make_doc("d2", Label::Other, std::vector<std::string>{}),
    });
    Vocabulary v;
    v.words = {"a"};
    v.doc_frequency = {1};
    auto m = bow_matrix(c, v);
    CHECK(m.values(0, 0) == 0.0);
    CHECK(m.values(1, 0) == 0.0);
}

TEST_CASE("bow against a brute-force recount oracle on tiny corpora") {
    std::mt19937_64 rng(11);
    std::vector<std::string> lexicon = {"a", "b", "c", "d", "e"};
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng() % 5);  // 2..6 docs
        std::vector<Document> docs;
        for (int i = 0; i < n; ++i) {
            std::vector<std::string> toks;
            int len = 1 + static_cast<int>(rng() % 8);
            for (int t = 0; t < len; ++t) toks.push_back(lexicon[rng() % lexicon.size()]);
            docs.push_back(make_doc("d" + std::to_string(i),
                                    i % 2 ? Label::Other : Label::Success, toks));
        }
        auto corpus = make_corpus(docs);
        auto v = build_vocabulary(corpus, 0.5);

        // Oracle: exhaustive recount of document frequencies and thresholds.
        int threshold = (n + 1) / 2;
        std::map<std::string, int> df;
        for (const auto& d : docs)
            for (const auto& w : std::set<std::string>(d.tokens->begin(), d.tokens->end())) df[w]++;
        std::vector<std::string> want_words;
        for (const auto& [w, f] : df)
            if (f >= threshold) want_words.push_back(w);
        CHECK(v.words == want_words);

        auto m = bow_matrix(corpus, v);
        for (int i = 0; i < n; ++i) {
            double total = static_cast<double>(docs[i].tokens->size());
            for (std::size_t j = 0; j < v.words.size(); ++j) {
                double count = static_cast<double>(
                    std::count(docs[i].tokens->begin(), docs[i].tokens->end(), v.words[j]));
                CHECK(m.values(i, j) == doctest::Approx(count / total).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("standardize matches the closed form on column (1,2,3)") {
    EmbeddingMatrix m;
    m.doc_ids = {"a", "b", "c"};
    m.values.resize(3, 1);
    m.values << 1, 2, 3;
    auto s = standardize(m);
    double std_pop = std::sqrt(2.0 / 3.0);
    CHECK(s.values(0, 0) == doctest::Approx(-1.0 / std_pop).epsilon(1e-9));
    CHECK(s.values(0, 0) == doctest::Approx(-1.2247448).epsilon(1e-6));
    CHECK(s.values(1, 0) == doctest::Approx(0.0));
    CHECK(s.values(2, 0) == doctest::Approx(1.2247448).epsilon(1e-6));
    CHECK(s.standardized);
    REQUIRE(s.column_means.has_value());
    CHECK((*s.column_means)(0) == doctest::Approx(2.0));
}

TEST_CASE("standardize maps constant columns to zero") {
    EmbeddingMatrix m;
    m.doc_ids = {"a", "b"};
    m.values.resize(2, 2);
    m.values << 5, 1, 5, 3;
    auto s = standardize(m);
    CHECK(s.values(0, 0) == 0.0);
    CHECK(s.values(1, 0) == 0.0);
    CHECK((*s.column_stds)(0) == 1.0);
}

TEST_CASE("standardize fit on a row subset transforms held-out rows with fitted stats") {
    EmbeddingMatrix m;
    m.doc_ids = {"a", "b", "c"};
    m.values.resize(3, 1);
    m.values << 0, 2, 10;
    auto s = standardize(m, {0, 1});  // mean 1, population std 1
    CHECK(s.values(0, 0) == doctest::Approx(-1.0));
    CHECK(s.values(1, 0) == doctest::Approx(1.0));
    CHECK(s.values(2, 0) == doctest::Approx(9.0));
}

TEST_CASE("standardize is idempotent for the same fit set") {
    EmbeddingMatrix m;
    m.doc_ids = {"a", "b", "c", "d"};
    m.values.resize(4, 2);
    m.values << 1, 9, 4, 2, 7, 5, 3, 8;
    auto once = standardize(m);
    auto twice = standardize(once);
    CHECK((once.values - twice.values).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("standardized fit rows have mean 0 and population std 1") {
    EmbeddingMatrix m;
    m.doc_ids = {"a", "b", "c", "d", "e"};
    m.values.resize(5, 3);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 3; ++j) m.values(i, j) = static_cast<double>(rng() % 100);
    auto s = standardize(m);
    for (int j = 0; j < 3; ++j) {
        double mean = s.values.col(j).mean();
        double var = (s.values.col(j).array() - mean).square().mean();
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
    }
}

TEST_CASE("matrix and vocabulary files round-trip") {
    testutil::TempDir dir;
    EmbeddingMatrix m;
    m.kind = EmbeddingKind::D2V;
    m.doc_ids = {"x", "y"};
    m.values.resize(2, 3);
    m.values << 0.125, -3.5, 1e-17, 2.0 / 3.0, 0, 42;
    save_matrix(m, dir.file("m.txt"));
    auto back = load_matrix(dir.file("m.txt"));
    CHECK(back.kind == EmbeddingKind::D2V);
    CHECK(back.doc_ids == m.doc_ids);
    CHECK((back.values - m.values).cwiseAbs().maxCoeff() == 0.0);

    Vocabulary v;
    v.words = {"alpha", "beta"};
    v.doc_frequency = {7, 3};
    v.min_doc_count = 2;
    save_vocabulary(v, dir.file("v.tsv"));
    auto vb = load_vocabulary(dir.file("v.tsv"));
    CHECK(vb.words == v.words);
    CHECK(vb.doc_frequency == v.doc_frequency);
}
