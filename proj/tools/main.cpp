// bestseller_lab: corpus ingestion, embeddings, axis projections, and the
// classifier evaluation grid, with reproducible run manifests.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bestseller/bow.hpp"
#include "bestseller/config.hpp"
#include "bestseller/corpus.hpp"
#include "bestseller/d2v.hpp"
#include "bestseller/errors.hpp"
#include "bestseller/evaluate.hpp"
#include "bestseller/preprocess.hpp"
#include "bestseller/project.hpp"
#include "bestseller/util.hpp"

namespace fs = std::filesystem;
using namespace bestseller;

namespace {

constexpr const char* kToolVersion = "1.0.0";

std::uint64_t file_hash(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open file for hashing: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a64(ss.str());
}

class RunManifest {
public:
    RunManifest(std::string command, std::uint64_t seed) {
        j_["tool_version"] = kToolVersion;
        j_["command"] = std::move(command);
        j_["seed"] = seed;
        start_ = std::chrono::steady_clock::now();
        stage_start_ = start_;
    }

    void parameter(const std::string& key, const nlohmann::json& value) {
        j_["parameters"][key] = value;
    }
    void input(const fs::path& path) {
        j_["input_hashes"][path.string()] = hex64(file_hash(path));
    }
    void output(const fs::path& path) { j_["outputs"].push_back(path.string()); }
    void stage_done(const std::string& name) {
        auto now = std::chrono::steady_clock::now();
        j_["stage_seconds"][name] =
            std::chrono::duration<double>(now - stage_start_).count();
        stage_start_ = now;
    }

    // Atomic write: temp file then rename.
    void write(const fs::path& path) {
        j_["total_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        j_["config_hash"] = hex64(fnv1a64(j_["parameters"].dump()));
        fs::path tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp);
            if (!out) throw IOError("cannot write run manifest: " + path.string());
            out << j_.dump(2) << '\n';
        }
        fs::rename(tmp, path);
    }

private:
    nlohmann::json j_;
    std::chrono::steady_clock::time_point start_, stage_start_;
};

void tokenize_corpus(Corpus& corpus, const std::string& stopword_file,
                     const std::string& lexicon_file) {
    const StopwordList stopwords =
        stopword_file.empty() ? StopwordList::builtin() : StopwordList::load(stopword_file);
    const LemmaLexicon lexicon =
        lexicon_file.empty() ? LemmaLexicon::builtin() : LemmaLexicon::load(lexicon_file);
    for (auto& doc : corpus.documents)
        doc.tokens = preprocess_document(doc.raw_text, stopwords, lexicon);
}

int run_ingest(const std::string& manifest_path, const std::string& out_dir,
               std::uint64_t seed, const std::string& subject) {
    RunManifest manifest("ingest", seed);
    manifest.parameter("manifest", manifest_path);
    manifest.parameter("subject", subject);
    manifest.input(manifest_path);

    Corpus loaded = load_manifest(manifest_path);
    manifest.stage_done("load");

    // Resolve author duplicates before pooling so the balance pools are
    // author-disjoint (Success preferred when an author spans classes).
    DedupResult dedup = enforce_one_per_author(loaded, derive_seed(seed, "ingest/dedup"));
    manifest.parameter("dropped_duplicate_author_ids", dedup.dropped_ids);

    Corpus success_pool, other_pool;
    for (const auto& doc : dedup.corpus.documents)
        (doc.label == Label::Success ? success_pool : other_pool).documents.push_back(doc);

    BalanceResult balanced =
        balance_by_year(success_pool, other_pool, derive_seed(seed, "ingest/balance"));
    for (const auto& [year, missing] : balanced.shortfall_by_year)
        std::cerr << "warning: year " << year << " short " << missing << " other titles\n";
    {
        nlohmann::json shortfall = nlohmann::json::object();
        for (const auto& [year, missing] : balanced.shortfall_by_year)
            shortfall[std::to_string(year)] = missing;
        manifest.parameter("shortfall_by_year", shortfall);
    }
    manifest.stage_done("balance");

    Corpus final_corpus = std::move(balanced.corpus);
    final_corpus.seed = seed;
    if (!subject.empty()) final_corpus = filter_by_subject(final_corpus, subject);

    save_corpus_archive(final_corpus, out_dir);
    manifest.output(out_dir);
    manifest.stage_done("write");
    manifest.write(fs::path(out_dir) / "run_manifest.json");
    std::cout << "ingested " << final_corpus.size() << " documents into " << out_dir << '\n';
    return 0;
}

int run_embed(const std::string& archive, const std::string& kind, const std::string& out,
              std::uint64_t seed, double min_fraction, int dim, int window, int epochs,
              int min_count, int negatives, bool deterministic, int threads,
              const std::string& stopword_file, const std::string& lexicon_file) {
    RunManifest manifest("embed", seed);
    manifest.parameter("archive", archive);
    manifest.parameter("kind", kind);

    Corpus corpus = load_corpus_archive(archive);
    tokenize_corpus(corpus, stopword_file, lexicon_file);
    manifest.parameter("stopword_hash", hex64(StopwordList::builtin().content_hash()));
    manifest.parameter("lexicon_hash", hex64(LemmaLexicon::builtin().content_hash()));
    manifest.stage_done("preprocess");

    fs::path out_dir = out;
    fs::create_directories(out_dir);

    if (kind == "bow") {
        manifest.parameter("min_fraction", min_fraction);
        Vocabulary vocab = build_vocabulary(corpus, min_fraction);
        EmbeddingMatrix m = bow_matrix(corpus, vocab);
        save_matrix(m, out_dir / "bow_matrix.txt");
        save_vocabulary(vocab, out_dir / "vocabulary.tsv");
        manifest.output(out_dir / "bow_matrix.txt");
        manifest.output(out_dir / "vocabulary.tsv");
        std::cout << "bow matrix " << m.rows() << " x " << m.cols() << '\n';
    } else {
        D2VConfig config;
        config.dim = dim;
        config.window = window;
        config.epochs = epochs;
        config.min_count = min_count;
        config.negatives = negatives;
        config.deterministic = deterministic;
        config.threads = threads;
        config.seed = derive_seed(seed, "embed/d2v");
        manifest.parameter("dim", dim);
        manifest.parameter("window", window);
        manifest.parameter("epochs", epochs);
        manifest.parameter("min_count", min_count);
        manifest.parameter("negatives", negatives);
        manifest.parameter("deterministic", deterministic);

        // Content-addressed cache, enabled via BESTSELLER_LAB_CACHE.
        std::string cache_key;
        if (const char* cache_dir = std::getenv("BESTSELLER_LAB_CACHE")) {
            std::ostringstream key;
            for (const auto& doc : corpus.documents) {
                key << doc.id << ':';
                for (const auto& t : *doc.tokens) key << t << ' ';
            }
            key << '|' << dim << '|' << window << '|' << epochs << '|' << min_count << '|'
                << negatives << '|' << config.seed << '|' << deterministic;
            cache_key = (fs::path(cache_dir) /
                         ("d2v_" + hex64(fnv1a64(key.str())) + ".txt"))
                            .string();
            if (deterministic && fs::exists(cache_key)) {
                fs::create_directories(out_dir);
                fs::copy_file(cache_key, out_dir / "d2v_matrix.txt",
                              fs::copy_options::overwrite_existing);
                manifest.output(out_dir / "d2v_matrix.txt");
                manifest.write(out_dir / "run_manifest.json");
                std::cout << "d2v matrix restored from cache\n";
                return 0;
            }
        }

        D2VModel model = train(corpus, config);
        EmbeddingMatrix m = model.doc_matrix();
        save_matrix(m, out_dir / "d2v_matrix.txt");
        save_d2v_model(model, out_dir / "d2v_model.txt");
        manifest.output(out_dir / "d2v_matrix.txt");
        manifest.output(out_dir / "d2v_model.txt");
        if (!cache_key.empty() && deterministic) {
            fs::create_directories(fs::path(cache_key).parent_path());
            fs::copy_file(out_dir / "d2v_matrix.txt", cache_key,
                          fs::copy_options::overwrite_existing);
        }
        std::cout << "d2v matrix " << m.rows() << " x " << m.cols() << " (final loss "
                  << model.training_loss_per_epoch.back() << ")\n";
    }
    manifest.stage_done("embed");
    manifest.write(out_dir / "run_manifest.json");
    return 0;
}

int run_project(const std::string& matrix_file, const std::string& archive,
                const std::string& method_name, const std::string& out, double shrinkage,
                bool standardize_folds, int grid_points, int words,
                const std::string& vocab_file, bool svg, std::uint64_t seed) {
    RunManifest manifest("project", seed);
    manifest.parameter("matrix", matrix_file);
    manifest.parameter("method", method_name);
    manifest.parameter("shrinkage", shrinkage);
    manifest.input(matrix_file);

    EmbeddingMatrix matrix = load_matrix(matrix_file);
    Corpus corpus = load_corpus_archive(archive);
    std::map<std::string, Label> label_of;
    for (const auto& doc : corpus.documents) label_of[doc.id] = doc.label;
    std::vector<Label> labels;
    for (const auto& id : matrix.doc_ids) {
        auto it = label_of.find(id);
        if (it == label_of.end())
            throw ConfigError("matrix document '" + id + "' not present in archive");
        labels.push_back(it->second);
    }

    const AxisMethod method =
        method_name == "lda" ? AxisMethod::LDA : AxisMethod::SemAxis;
    fs::path out_dir = out;
    fs::create_directories(out_dir);

    ProjectionResult result =
        loo_projection(matrix, labels, method, shrinkage, standardize_folds);
    write_projection_tsv(result, out_dir / "projection.tsv");
    manifest.output(out_dir / "projection.tsv");
    manifest.stage_done("loo_projection");

    DensityCurve curve = kde(result, grid_points);
    write_kde_tsv(curve, out_dir / "kde.tsv");
    manifest.output(out_dir / "kde.tsv");
    if (svg) {
        write_kde_svg(curve, out_dir / "kde.svg");
        manifest.output(out_dir / "kde.svg");
    }

    if (words > 0) {
        if (vocab_file.empty())
            throw ConfigError("--words requires --vocab (bag-of-words vocabulary file)");
        Vocabulary vocab = load_vocabulary(vocab_file);
        std::vector<int> all_rows;
        for (int i = 0; i < static_cast<int>(matrix.rows()); ++i) all_rows.push_back(i);
        EmbeddingMatrix scaled = standardize(matrix);
        Axis axis = method == AxisMethod::SemAxis
                        ? semaxis_axis(scaled, labels, all_rows)
                        : lda_axis(scaled, labels, all_rows, shrinkage);
        auto [success_words, other_words] =
            top_axis_words(axis, vocab, words, matrix.kind);
        std::ofstream wout(out_dir / "top_words.tsv");
        wout << "rank\tsuccess\tother\n";
        for (std::size_t i = 0; i < std::max(success_words.size(), other_words.size()); ++i)
            wout << i + 1 << '\t' << (i < success_words.size() ? success_words[i] : "") << '\t'
                 << (i < other_words.size() ? other_words[i] : "") << '\n';
        manifest.output(out_dir / "top_words.tsv");
    }
    manifest.stage_done("export");
    manifest.write(out_dir / "run_manifest.json");
    std::cout << "projection written to " << out_dir.string() << '\n';
    return 0;
}

int run_evaluate(const std::string& config_file, const std::vector<std::string>& only,
                 std::uint64_t seed_override, bool has_seed_override, int threads) {
    ExperimentConfig config = load_experiment_config(config_file);
    if (has_seed_override) config.grid.seed = seed_override;
    config.grid.threads = threads;
    for (const auto& clause : only) {
        for (const auto& kv : split_on(clause, ',')) {
            auto pos = kv.find('=');
            if (pos == std::string::npos)
                throw ConfigError("bad --only clause '" + kv + "', expected key=value");
            config.grid.only[trim(kv.substr(0, pos))] = trim(kv.substr(pos + 1));
        }
    }

    RunManifest manifest("evaluate", config.grid.seed);
    manifest.input(config_file);
    manifest.parameter("config_file", config_file);
    for (const auto& line : split_on(config.grid.canonical_string(), '\n')) {
        auto pos = line.find('=');
        if (pos != std::string::npos)
            manifest.parameter(line.substr(0, pos), line.substr(pos + 1));
    }

    Corpus corpus = load_corpus_archive(config.corpus_archive);
    if (!config.subject.empty()) corpus = filter_by_subject(corpus, config.subject);
    manifest.stage_done("load");

    EvalReport report = run_grid(corpus, config.grid);
    manifest.stage_done("grid");

    fs::path out_dir = config.output_dir;
    fs::create_directories(out_dir);
    {
        std::ofstream out(out_dir / "report.json");
        out << report_to_json(report).dump(2) << '\n';
    }
    {
        std::ofstream out(out_dir / "report.txt");
        out << render_table(report);
    }
    manifest.output(out_dir / "report.json");
    manifest.output(out_dir / "report.txt");
    manifest.stage_done("write");
    manifest.write(out_dir / "run_manifest.json");

    std::cout << render_table(report);
    if (report.has_failures()) {
        std::cerr << "warning: some grid cells failed; see report.json\n";
        return 2;
    }
    return 0;
}

int run_report(const std::string& report_file) {
    std::ifstream in(report_file);
    if (!in) throw IOError("cannot open report: " + report_file);
    nlohmann::json j;
    in >> j;
    std::cout << render_table(report_from_json(j));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"best-seller identification pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // let global flags appear after the subcommand

    std::uint64_t seed = 1;
    int threads = 1;
    bool deterministic = true;
    app.add_option("--seed", seed, "top-level RNG seed")->capture_default_str();
    app.add_option("--threads", threads, "worker cap")->capture_default_str();
    app.add_flag("--deterministic,!--no-deterministic", deterministic,
                 "bit-reproducible single-worker mode");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "load, clean, balance a manifest");
    std::string manifest_path, out_path = "corpus_out", subject;
    ingest->add_option("--manifest", manifest_path, "TSV manifest")->required();
    ingest->add_option("--out", out_path, "output archive directory");
    ingest->add_option("--subject", subject, "keep only this LCC subject code");

    // embed
    auto* embed = app.add_subcommand("embed", "build bow or d2v embeddings");
    std::string archive, embed_kind = "bow", embed_out = "embed_out";
    std::string stopword_file, lexicon_file;
    double min_fraction = 0.5;
    int dim = 64, window = 5, epochs = 40, min_count = 1, negatives = 5;
    embed->add_option("--archive", archive, "corpus archive directory")->required();
    embed->add_option("--kind", embed_kind, "bow | d2v")
        ->check(CLI::IsMember({"bow", "d2v"}));
    embed->add_option("--out", embed_out, "output directory");
    embed->add_option("--min-fraction", min_fraction, "bow document-frequency threshold")
        ->check(CLI::Range(1e-9, 1.0));
    embed->add_option("--dim", dim, "d2v vector size")->check(CLI::PositiveNumber);
    embed->add_option("--window", window)->check(CLI::PositiveNumber);
    embed->add_option("--epochs", epochs)->check(CLI::PositiveNumber);
    embed->add_option("--min-count", min_count)->check(CLI::PositiveNumber);
    embed->add_option("--negatives", negatives)->check(CLI::PositiveNumber);
    embed->add_option("--stopwords", stopword_file, "override stopword list file");
    embed->add_option("--lexicon", lexicon_file, "override lemma lexicon file");

    // project
    auto* project_cmd = app.add_subcommand("project", "LOO axis projection + KDE");
    std::string matrix_file, project_archive, method = "semaxis", project_out = "project_out";
    std::string vocab_file;
    double shrinkage = 1e-3;
    bool standardize_folds = true, svg = false;
    int grid_points = 200, words = 0;
    project_cmd->add_option("--matrix", matrix_file, "embedding matrix file")->required();
    project_cmd->add_option("--archive", project_archive, "corpus archive (for labels)")
        ->required();
    project_cmd->add_option("--method", method, "semaxis | lda")
        ->check(CLI::IsMember({"semaxis", "lda"}));
    project_cmd->add_option("--out", project_out, "output directory");
    project_cmd->add_option("--shrinkage", shrinkage, "LDA ridge fraction");
    project_cmd->add_flag("--standardize,!--no-standardize", standardize_folds,
                          "fit z-scores per LOO fold");
    project_cmd->add_option("--grid-points", grid_points)->check(CLI::PositiveNumber);
    project_cmd->add_option("--words", words, "emit top-k discriminative words");
    project_cmd->add_option("--vocab", vocab_file, "vocabulary file (for --words)");
    project_cmd->add_flag("--svg", svg, "also render the KDE as SVG");

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "run the full grid");
    std::string config_file;
    std::vector<std::string> only;
    evaluate_cmd->add_option("--config", config_file, "experiment config file")->required();
    evaluate_cmd->add_option("--only", only, "cell filter, e.g. model=lr,embed=bow");

    // report
    auto* report_cmd = app.add_subcommand("report", "render a report.json as a table");
    std::string report_file;
    report_cmd->add_option("--report", report_file, "report.json path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) return run_ingest(manifest_path, out_path, seed, subject);
        if (*embed)
            return run_embed(archive, embed_kind, embed_out, seed, min_fraction, dim, window,
                             epochs, min_count, negatives, deterministic, threads,
                             stopword_file, lexicon_file);
        if (*project_cmd)
            return run_project(matrix_file, project_archive, method, project_out, shrinkage,
                               standardize_folds, grid_points, words, vocab_file, svg, seed);
        if (*evaluate_cmd)
            return run_evaluate(config_file, only, seed, app.count("--seed") > 0, threads);
        if (*report_cmd) return run_report(report_file);
    } catch (const IOError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
