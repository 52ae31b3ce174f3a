#include "bestseller/d2v.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <thread>

#include "bestseller/errors.hpp"
#include "bestseller/util.hpp"

namespace bestseller {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

int D2VModel::word_id(const std::string& w) const {
    auto it = std::lower_bound(vocab.begin(), vocab.end(), w);
    if (it == vocab.end() || *it != w) return -1;
    return static_cast<int>(it - vocab.begin());
}

EmbeddingMatrix D2VModel::doc_matrix() const {
    EmbeddingMatrix m;
    m.kind = EmbeddingKind::D2V;
    m.doc_ids = doc_ids;
    m.values = doc_vectors;
    return m;
}

NegativeSampler::NegativeSampler(const std::vector<double>& weights) {
    cumulative_.reserve(weights.size());
    double acc = 0.0;
    for (double w : weights) {
        acc += w;
        cumulative_.push_back(acc);
    }
    if (acc <= 0.0) throw TrainError("negative sampler: zero total weight");
    for (double& c : cumulative_) c /= acc;
    cumulative_.back() = 1.0;
}

int NegativeSampler::sample(std::uint64_t random_word) const {
    const double u = to_unit_double(random_word);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<int>(it - cumulative_.begin());
}

LossGradient loss_and_gradient(const Eigen::VectorXd& h, int target,
                               const std::vector<int>& negatives, const D2VModel& model) {
    LossGradient out;
    out.grad_h = Eigen::VectorXd::Zero(h.size());
    out.grad_outputs.reserve(negatives.size() + 1);

    const Eigen::VectorXd o_t = model.output_weights.row(target).transpose();
    const double s_pos = sigmoid(h.dot(o_t));
    out.loss -= std::log(std::max(s_pos, 1e-300));
    out.grad_h += (s_pos - 1.0) * o_t;
    out.grad_outputs.push_back((s_pos - 1.0) * h);

    for (int neg : negatives) {
        const Eigen::VectorXd o_n = model.output_weights.row(neg).transpose();
        const double s_neg = sigmoid(h.dot(o_n));
        out.loss -= std::log(std::max(1.0 - s_neg, 1e-300));
        out.grad_h += s_neg * o_n;
        out.grad_outputs.push_back(s_neg * h);
    }
    return out;
}

namespace {

struct TrainingPlan {
    std::vector<std::vector<int>> doc_token_ids;  // OOV-filtered, in order
    std::size_t positions_per_epoch = 0;
};

// One SGD pass over a set of documents. Updates model matrices in place;
// in multi-worker mode the races on small row updates are accepted.
void train_docs(D2VModel& model, const TrainingPlan& plan, const D2VConfig& config,
                const NegativeSampler& sampler, const std::vector<int>& doc_indices,
                std::mt19937_64& rng, std::atomic<std::uint64_t>& processed,
                std::uint64_t total_examples, double& loss_sum, std::size_t& loss_count) {
    const int dim = config.dim;
    Eigen::VectorXd h(dim), grad_h(dim);
    std::vector<int> negatives(static_cast<std::size_t>(config.negatives));

    for (int d : doc_indices) {
        const auto& ids = plan.doc_token_ids[static_cast<std::size_t>(d)];
        const int len = static_cast<int>(ids.size());
        for (int t = 0; t < len; ++t) {
            const std::uint64_t done = processed.fetch_add(1, std::memory_order_relaxed);
            const double progress =
                static_cast<double>(done) / static_cast<double>(total_examples);
            const double lr =
                config.initial_lr + (config.final_lr - config.initial_lr) * progress;

            const int lo = std::max(0, t - config.window);
            const int hi = std::min(len - 1, t + config.window);

            h = model.doc_vectors.row(d).transpose();
            int count = 1;
            for (int c = lo; c <= hi; ++c) {
                if (c == t) continue;
                h += model.word_vectors.row(ids[static_cast<std::size_t>(c)]).transpose();
                ++count;
            }
            h /= static_cast<double>(count);

            const int target = ids[static_cast<std::size_t>(t)];
            for (auto& n : negatives) n = sampler.sample(rng());

            // Inline negative-sampling loss; mirrors loss_and_gradient.
            grad_h.setZero();
            double loss = 0.0;
            {
                const double s = sigmoid(h.dot(model.output_weights.row(target)));
                loss -= std::log(std::max(s, 1e-300));
                grad_h += (s - 1.0) * model.output_weights.row(target).transpose();
                model.output_weights.row(target) -= lr * (s - 1.0) * h.transpose();
            }
            for (int neg : negatives) {
                const double s = sigmoid(h.dot(model.output_weights.row(neg)));
                loss -= std::log(std::max(1.0 - s, 1e-300));
                grad_h += s * model.output_weights.row(neg).transpose();
                model.output_weights.row(neg) -= lr * s * h.transpose();
            }

            // h is a mean of `count` inputs: each gets grad_h / count.
            const Eigen::RowVectorXd delta =
                (lr / static_cast<double>(count)) * grad_h.transpose();
            model.doc_vectors.row(d) -= delta;
            for (int c = lo; c <= hi; ++c) {
                if (c == t) continue;
                model.word_vectors.row(ids[static_cast<std::size_t>(c)]) -= delta;
            }

            loss_sum += loss;
            ++loss_count;
        }
    }
}

}  // namespace

D2VModel train(const Corpus& corpus, const D2VConfig& config) {
    if (config.dim < 1 || config.window < 1 || config.epochs < 1 || config.negatives < 1)
        throw TrainError("invalid d2v configuration");
    if (config.initial_lr < config.final_lr || config.final_lr <= 0.0)
        throw TrainError("learning rates must satisfy initial_lr >= final_lr > 0");

    std::map<std::string, long long> counts;
    for (const auto& doc : corpus.documents) {
        if (!doc.tokens) throw TrainError("document '" + doc.id + "' has no tokens");
        for (const auto& w : *doc.tokens) counts[w]++;
    }

    D2VModel model;
    model.dim = config.dim;
    model.seed = config.seed;
    model.doc_ids = corpus.ids();
    std::vector<double> noise_raw;
    for (const auto& [word, count] : counts) {
        if (count < config.min_count) continue;
        model.vocab.push_back(word);
        noise_raw.push_back(std::pow(static_cast<double>(count), 0.75));
    }
    if (model.vocab.empty()) throw TrainError("empty effective vocabulary");

    const double noise_total =
        std::accumulate(noise_raw.begin(), noise_raw.end(), 0.0);
    model.noise_distribution = noise_raw;
    for (double& w : model.noise_distribution) w /= noise_total;

    TrainingPlan plan;
    plan.doc_token_ids.resize(corpus.size());
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        for (const auto& w : *corpus.documents[i].tokens) {
            int id = model.word_id(w);
            if (id >= 0) plan.doc_token_ids[i].push_back(id);
        }
        if (plan.doc_token_ids[i].size() < 2) {
            std::cerr << "warning: document '" << corpus.documents[i].id
                      << "' shorter than 2 tokens, skipped\n";
            plan.doc_token_ids[i].clear();
        }
        plan.positions_per_epoch += plan.doc_token_ids[i].size();
    }
    if (plan.positions_per_epoch == 0) throw TrainError("no trainable documents");

    const auto n_docs = static_cast<Eigen::Index>(corpus.size());
    const auto n_words = static_cast<Eigen::Index>(model.vocab.size());
    std::mt19937_64 init_rng(derive_seed(config.seed, "d2v/init"));
    const double bound = 0.5 / static_cast<double>(config.dim);
    auto uniform_init = [&](Eigen::MatrixXd& m, Eigen::Index rows) {
        m.resize(rows, config.dim);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < config.dim; ++j)
                m(i, j) = (2.0 * to_unit_double(init_rng()) - 1.0) * bound;
    };
    uniform_init(model.word_vectors, n_words);
    uniform_init(model.doc_vectors, n_docs);
    model.output_weights = Eigen::MatrixXd::Zero(n_words, config.dim);

    const NegativeSampler sampler(model.noise_distribution);
    const std::uint64_t total_examples =
        static_cast<std::uint64_t>(config.epochs) * plan.positions_per_epoch;
    std::atomic<std::uint64_t> processed{0};

    std::vector<int> all_docs;
    for (Eigen::Index i = 0; i < n_docs; ++i) all_docs.push_back(static_cast<int>(i));

    const int workers = (config.deterministic || config.threads < 2) ? 1 : config.threads;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double loss_sum = 0.0;
        std::size_t loss_count = 0;
        if (workers == 1) {
            std::mt19937_64 rng(derive_seed(config.seed, "d2v/epoch/" + std::to_string(epoch)));
            train_docs(model, plan, config, sampler, all_docs, rng, processed, total_examples,
                       loss_sum, loss_count);
        } else {
            std::vector<std::thread> pool;
            std::vector<double> sums(static_cast<std::size_t>(workers), 0.0);
            std::vector<std::size_t> cnts(static_cast<std::size_t>(workers), 0);
            for (int w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    std::vector<int> mine;
                    for (std::size_t i = static_cast<std::size_t>(w); i < all_docs.size();
                         i += static_cast<std::size_t>(workers))
                        mine.push_back(all_docs[i]);
                    std::mt19937_64 rng(derive_seed(
                        config.seed, "d2v/worker/" + std::to_string(epoch * workers + w)));
                    train_docs(model, plan, config, sampler, mine, rng, processed,
                               total_examples, sums[static_cast<std::size_t>(w)],
                               cnts[static_cast<std::size_t>(w)]);
                });
            }
            for (auto& t : pool) t.join();
            for (int w = 0; w < workers; ++w) {
                loss_sum += sums[static_cast<std::size_t>(w)];
                loss_count += cnts[static_cast<std::size_t>(w)];
            }
        }
        model.training_loss_per_epoch.push_back(loss_sum / static_cast<double>(loss_count));
    }

    if (!model.doc_vectors.allFinite() || !model.word_vectors.allFinite() ||
        !model.output_weights.allFinite())
        throw TrainError("non-finite parameters after training (diverged)");
    return model;
}

void save_d2v_model(const D2VModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IOError("cannot write model file: " + path.string());
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << model.dim << ' ' << model.vocab.size() << ' ' << model.doc_ids.size() << ' '
        << model.seed << '\n';
    auto dump = [&](const char* name, const Eigen::MatrixXd& m,
                    const std::vector<std::string>& names) {
        out << name << '\n';
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            out << names[static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < m.cols(); ++j) out << ' ' << m(i, j);
            out << '\n';
        }
    };
    dump("doc_vectors", model.doc_vectors, model.doc_ids);
    dump("word_vectors", model.word_vectors, model.vocab);
    dump("output_weights", model.output_weights, model.vocab);
}

D2VModel load_d2v_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open model file: " + path.string());
    D2VModel model;
    std::size_t vocab_size = 0, doc_count = 0;
    in >> model.dim >> vocab_size >> doc_count >> model.seed;
    model.doc_ids.resize(doc_count);
    model.vocab.resize(vocab_size);
    auto read = [&](const char* name, Eigen::MatrixXd& m, std::vector<std::string>& names) {
        std::string section;
        in >> section;
        if (section != name) throw IOError("expected section '" + std::string(name) + "'");
        m.resize(static_cast<Eigen::Index>(names.size()), model.dim);
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            in >> names[static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < model.dim; ++j) in >> m(i, j);
        }
    };
    read("doc_vectors", model.doc_vectors, model.doc_ids);
    read("word_vectors", model.word_vectors, model.vocab);
    read("output_weights", model.output_weights, model.vocab);
    if (!in) throw IOError("truncated model file: " + path.string());
    return model;
}

}  // namespace bestseller
