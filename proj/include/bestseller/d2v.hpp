#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bestseller/corpus.hpp"
#include "bestseller/matrix.hpp"

namespace bestseller {

struct D2VConfig {
    int dim = 64;
    int window = 5;
    int min_count = 1;
    int epochs = 40;
    int negatives = 5;
    double initial_lr = 0.025;
    double final_lr = 0.0001;
    std::uint64_t seed = 1;
    bool deterministic = true;
    int threads = 1;  // >1 only takes effect when deterministic == false
};

// PV-DM with mean combination: the document vector joins the averaged
// context-word vectors to predict the target word via negative sampling.
struct D2VModel {
    int dim = 0;
    std::vector<std::string> doc_ids;
    std::vector<std::string> vocab;            // lexicographically sorted
    Eigen::MatrixXd doc_vectors;               // |docs| x dim (the book embeddings)
    Eigen::MatrixXd word_vectors;              // |vocab| x dim
    Eigen::MatrixXd output_weights;            // |vocab| x dim
    std::vector<double> noise_distribution;    // normalized sampling weights
    std::vector<double> training_loss_per_epoch;
    std::uint64_t seed = 0;

    int word_id(const std::string& w) const;
    EmbeddingMatrix doc_matrix() const;
};

D2VModel train(const Corpus& corpus, const D2VConfig& config);

struct LossGradient {
    double loss = 0.0;
    Eigen::VectorXd grad_h;
    // Aligned with [target, negatives...]; gradients w.r.t. output vectors.
    std::vector<Eigen::VectorXd> grad_outputs;
};

// L = -log s(h.o_t) - sum_neg log s(-h.o_neg) and its analytic gradients.
LossGradient loss_and_gradient(const Eigen::VectorXd& h, int target,
                               const std::vector<int>& negatives, const D2VModel& model);

// Cumulative-table sampler over a normalized distribution.
class NegativeSampler {
public:
    explicit NegativeSampler(const std::vector<double>& weights);
    int sample(std::uint64_t random_word) const;

private:
    std::vector<double> cumulative_;
};

void save_d2v_model(const D2VModel& model, const std::filesystem::path& path);
D2VModel load_d2v_model(const std::filesystem::path& path);

}  // namespace bestseller
