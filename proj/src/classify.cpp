#include "bestseller/classify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>

#include "bestseller/errors.hpp"
#include "bestseller/util.hpp"

namespace bestseller {

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::KNN: return "knn";
        case ModelKind::LR: return "lr";
        case ModelKind::NB: return "nb";
        case ModelKind::DT: return "dt";
        case ModelKind::RF: return "rf";
        case ModelKind::SVM: return "svm";
    }
    return "?";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "knn") return ModelKind::KNN;
    if (name == "lr") return ModelKind::LR;
    if (name == "nb") return ModelKind::NB;
    if (name == "dt") return ModelKind::DT;
    if (name == "rf") return ModelKind::RF;
    if (name == "svm") return ModelKind::SVM;
    throw ConfigError("unknown model kind '" + name + "'");
}

namespace {

void check_training_input(const Eigen::MatrixXd& X, const std::vector<int>& y) {
    if (X.rows() != static_cast<Eigen::Index>(y.size()))
        throw FitError("row/label count mismatch");
    if (!X.allFinite()) throw FitError("non-finite features");
    bool has0 = false, has1 = false;
    for (int label : y) {
        if (label == 0) has0 = true;
        else if (label == 1) has1 = true;
        else throw FitError("labels must be 0 or 1");
    }
    if (!has0 || !has1) throw FitError("training data contains a single class");
}

void check_predict_input(const Eigen::MatrixXd& rows, Eigen::Index p) {
    if (rows.cols() != p) throw PredictError("feature dimension mismatch");
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// ---------------------------------------------------------------- KNN

class KnnModel final : public TrainedModel {
public:
    KnnModel(ModelSpec spec, Eigen::MatrixXd X, std::vector<int> y)
        : spec_(std::move(spec)), X_(std::move(X)), y_(std::move(y)) {}

    std::vector<double> decision_scores(const Eigen::MatrixXd& rows) const override {
        check_predict_input(rows, X_.cols());
        std::vector<double> scores;
        scores.reserve(static_cast<std::size_t>(rows.rows()));
        for (Eigen::Index r = 0; r < rows.rows(); ++r) {
            std::vector<std::pair<double, int>> dist;
            dist.reserve(static_cast<std::size_t>(X_.rows()));
            for (Eigen::Index i = 0; i < X_.rows(); ++i)
                dist.emplace_back((X_.row(i) - rows.row(r)).squaredNorm(),
                                  static_cast<int>(i));
            // Distance ties break toward the lower training-row index.
            std::sort(dist.begin(), dist.end());
            int votes1 = 0;
            for (int i = 0; i < spec_.knn_k; ++i)
                votes1 += y_[static_cast<std::size_t>(dist[static_cast<std::size_t>(i)].second)];
            scores.push_back(static_cast<double>(votes1) / spec_.knn_k);
        }
        return scores;
    }

    std::vector<int> predict(const Eigen::MatrixXd& rows) const override {
        std::vector<int> out;
        for (double s : decision_scores(rows)) out.push_back(s > 0.5 ? 1 : 0);
        return out;
    }

    const ModelSpec& spec() const override { return spec_; }

private:
    ModelSpec spec_;
    Eigen::MatrixXd X_;
    std::vector<int> y_;
};

// ---------------------------------------------------------------- LR

}  // namespace

double lr_loss_and_gradient(const Eigen::MatrixXd& X, const std::vector<int>& y,
                            const Eigen::VectorXd& params, double c, Eigen::VectorXd& grad) {
    const Eigen::Index p = X.cols();
    const Eigen::VectorXd w = params.head(p);
    const double b = params[p];

    grad = Eigen::VectorXd::Zero(p + 1);
    grad.head(p) = w;  // L2 penalty; intercept unpenalized
    double loss = 0.5 * w.squaredNorm();

    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double s = y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
        const double z = s * (X.row(i).dot(w) + b);
        // log(1 + exp(-z)) without overflow
        loss += c * (z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z)));
        const double coeff = -c * s * sigmoid(-z);
        grad.head(p) += coeff * X.row(i).transpose();
        grad[p] += coeff;
    }
    return loss;
}

namespace {

// L-BFGS (memory 10) with Armijo backtracking.
Eigen::VectorXd minimize_lbfgs(const Eigen::MatrixXd& X, const std::vector<int>& y, double c,
                               double tol, int max_iter) {
    const Eigen::Index dim = X.cols() + 1;
    Eigen::VectorXd params = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd grad(dim);
    double loss = lr_loss_and_gradient(X, y, params, c, grad);

    std::deque<Eigen::VectorXd> s_hist, y_hist;
    const std::size_t memory = 10;

    for (int iter = 0; iter < max_iter && grad.norm() > tol; ++iter) {
        // Two-loop recursion
        Eigen::VectorXd q = grad;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t i = s_hist.size(); i-- > 0;) {
            const double rho = 1.0 / y_hist[i].dot(s_hist[i]);
            alpha[i] = rho * s_hist[i].dot(q);
            q -= alpha[i] * y_hist[i];
        }
        if (!s_hist.empty()) {
            const auto& s = s_hist.back();
            const auto& yv = y_hist.back();
            q *= s.dot(yv) / yv.dot(yv);
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double rho = 1.0 / y_hist[i].dot(s_hist[i]);
            const double beta = rho * y_hist[i].dot(q);
            q += (alpha[i] - beta) * s_hist[i];
        }
        Eigen::VectorXd direction = -q;
        if (direction.dot(grad) >= 0.0) direction = -grad;  // safeguard

        double step = 1.0;
        const double slope = grad.dot(direction);
        Eigen::VectorXd next_params, next_grad(dim);
        double next_loss = loss;
        for (int ls = 0; ls < 50; ++ls) {
            next_params = params + step * direction;
            next_loss = lr_loss_and_gradient(X, y, next_params, c, next_grad);
            if (next_loss <= loss + 1e-4 * step * slope) break;
            step *= 0.5;
        }

        Eigen::VectorXd s_vec = next_params - params;
        Eigen::VectorXd y_vec = next_grad - grad;
        if (s_vec.dot(y_vec) > 1e-12) {
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            if (s_hist.size() > memory) {
                s_hist.pop_front();
                y_hist.pop_front();
            }
        }
        params = std::move(next_params);
        grad = next_grad;
        loss = next_loss;
    }
    return params;
}

class LrModel final : public TrainedModel {
public:
    LrModel(ModelSpec spec, Eigen::VectorXd params, Eigen::Index p)
        : spec_(std::move(spec)), params_(std::move(params)), p_(p) {}

    std::vector<double> decision_scores(const Eigen::MatrixXd& rows) const override {
        check_predict_input(rows, p_);
        std::vector<double> out;
        for (Eigen::Index r = 0; r < rows.rows(); ++r)
            out.push_back(sigmoid(rows.row(r).dot(params_.head(p_)) + params_[p_]));
        return out;
    }

    std::vector<int> predict(const Eigen::MatrixXd& rows) const override {
        std::vector<int> out;
        for (double p1 : decision_scores(rows)) out.push_back(p1 > 0.5 ? 1 : 0);
        return out;
    }

    const ModelSpec& spec() const override { return spec_; }

private:
    ModelSpec spec_;
    Eigen::VectorXd params_;
    Eigen::Index p_;
};

// ---------------------------------------------------------------- NB

class NbModel final : public TrainedModel {
public:
    NbModel(ModelSpec spec, const Eigen::MatrixXd& X, const std::vector<int>& y)
        : spec_(std::move(spec)), p_(X.cols()) {
        const Eigen::Index n = X.rows();
        Eigen::VectorXd global_mean = X.colwise().mean();
        double max_var = 0.0;
        for (Eigen::Index j = 0; j < p_; ++j) {
            double v = (X.col(j).array() - global_mean[j]).square().sum() / n;
            max_var = std::max(max_var, v);
        }
        const double epsilon = spec_.nb_var_smoothing * max_var;

        for (int cls = 0; cls < 2; ++cls) {
            std::vector<Eigen::Index> rows;
            for (Eigen::Index i = 0; i < n; ++i)
                if (y[static_cast<std::size_t>(i)] == cls) rows.push_back(i);
            mean_[cls] = Eigen::VectorXd::Zero(p_);
            for (auto i : rows) mean_[cls] += X.row(i).transpose();
            mean_[cls] /= static_cast<double>(rows.size());
            var_[cls] = Eigen::VectorXd::Zero(p_);
            for (auto i : rows) {
                Eigen::VectorXd d = X.row(i).transpose() - mean_[cls];
                var_[cls] += d.cwiseProduct(d);
            }
            var_[cls] /= static_cast<double>(rows.size());
            var_[cls].array() += epsilon;
            log_prior_[cls] = std::log(static_cast<double>(rows.size()) / n);
        }
    }

    std::vector<double> decision_scores(const Eigen::MatrixXd& rows) const override {
        check_predict_input(rows, p_);
        std::vector<double> out;
        for (Eigen::Index r = 0; r < rows.rows(); ++r)
            out.push_back(log_posterior(rows.row(r), 1) - log_posterior(rows.row(r), 0));
        return out;
    }

    std::vector<int> predict(const Eigen::MatrixXd& rows) const override {
        std::vector<int> out;
        for (double d : decision_scores(rows)) out.push_back(d > 0.0 ? 1 : 0);
        return out;
    }

    const ModelSpec& spec() const override { return spec_; }

private:
    double log_posterior(const Eigen::RowVectorXd& x, int cls) const {
        double lp = log_prior_[cls];
        for (Eigen::Index j = 0; j < p_; ++j) {
            const double d = x[j] - mean_[cls][j];
            lp += -0.5 * std::log(2.0 * M_PI * var_[cls][j]) - d * d / (2.0 * var_[cls][j]);
        }
        return lp;
    }

    ModelSpec spec_;
    Eigen::Index p_;
    Eigen::VectorXd mean_[2], var_[2];
    double log_prior_[2] = {0.0, 0.0};
};

// ---------------------------------------------------------------- DT / RF

struct TreeNode {
    int feature = -1;           // -1 marks a leaf
    double threshold = 0.0;     // go left when x[feature] <= threshold
    int left = -1, right = -1;
    double class1_fraction = 0.0;
};

double gini(int n0, int n1) {
    const double n = n0 + n1;
    if (n == 0.0) return 0.0;
    const double p0 = n0 / n, p1 = n1 / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

class Tree {
public:
    // feature_picker selects the candidate feature subset for one split.
    template <typename FeaturePicker>
    void build(const Eigen::MatrixXd& X, const std::vector<int>& y,
               std::vector<int> rows, FeaturePicker&& pick_features) {
        nodes_.clear();
        build_node(X, y, std::move(rows), pick_features);
    }

    int predict_row(const Eigen::RowVectorXd& x) const {
        return leaf_for(x).class1_fraction > 0.5 ? 1 : 0;
    }
    double score_row(const Eigen::RowVectorXd& x) const { return leaf_for(x).class1_fraction; }

private:
    const TreeNode& leaf_for(const Eigen::RowVectorXd& x) const {
        int node = 0;
        while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
            const auto& nd = nodes_[static_cast<std::size_t>(node)];
            node = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
        }
        return nodes_[static_cast<std::size_t>(node)];
    }

    template <typename FeaturePicker>
    int build_node(const Eigen::MatrixXd& X, const std::vector<int>& y, std::vector<int> rows,
                   FeaturePicker& pick_features) {
        int n1 = 0;
        for (int r : rows) n1 += y[static_cast<std::size_t>(r)];
        const int n0 = static_cast<int>(rows.size()) - n1;

        const int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        nodes_[static_cast<std::size_t>(id)].class1_fraction =
            static_cast<double>(n1) / static_cast<double>(rows.size());

        // Grow until pure or fewer than 2 samples.
        if (n0 == 0 || n1 == 0 || rows.size() < 2) return id;

        // Split whenever the node is impure and any candidate threshold
        // exists, even at zero Gini gain, so the tree can grow to purity
        // (e.g. the XOR layout needs a gainless root split).
        double best_score = std::numeric_limits<double>::infinity();
        int best_feature = -1;
        double best_threshold = 0.0;

        for (int f : pick_features()) {
            std::vector<std::pair<double, int>> vals;
            vals.reserve(rows.size());
            for (int r : rows)
                vals.emplace_back(X(r, f), y[static_cast<std::size_t>(r)]);
            std::sort(vals.begin(), vals.end());

            int left0 = 0, left1 = 0;
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                (vals[i].second == 1 ? left1 : left0)++;
                if (vals[i].first == vals[i + 1].first) continue;
                const double thr = 0.5 * (vals[i].first + vals[i + 1].first);
                const int right0 = n0 - left0, right1 = n1 - left1;
                const double nl = static_cast<double>(left0 + left1);
                const double nr = static_cast<double>(right0 + right1);
                const double score =
                    (nl * gini(left0, left1) + nr * gini(right0, right1)) / (nl + nr);
                // Strict < keeps the first (lowest feature, lowest threshold) best.
                if (score < best_score - 1e-12) {
                    best_score = score;
                    best_feature = f;
                    best_threshold = thr;
                }
            }
        }
        if (best_feature < 0) return id;  // no improving split (e.g. identical rows)

        std::vector<int> left_rows, right_rows;
        for (int r : rows)
            (X(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        const int left = build_node(X, y, std::move(left_rows), pick_features);
        const int right = build_node(X, y, std::move(right_rows), pick_features);
        auto& node = nodes_[static_cast<std::size_t>(id)];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = left;
        node.right = right;
        return id;
    }

    std::vector<TreeNode> nodes_;
};

class DtModel final : public TrainedModel {
public:
    DtModel(ModelSpec spec, const Eigen::MatrixXd& X, const std::vector<int>& y)
        : spec_(std::move(spec)), p_(X.cols()) {
        std::vector<int> rows(static_cast<std::size_t>(X.rows()));
        std::iota(rows.begin(), rows.end(), 0);
        std::vector<int> all_features(static_cast<std::size_t>(p_));
        std::iota(all_features.begin(), all_features.end(), 0);
        auto pick = [&all_features]() -> const std::vector<int>& { return all_features; };
        tree_.build(X, y, std::move(rows), pick);
    }

    std::vector<int> predict(const Eigen::MatrixXd& rows) const override {
        check_predict_input(rows, p_);
        std::vector<int> out;
        for (Eigen::Index r = 0; r < rows.rows(); ++r)
            out.push_back(tree_.predict_row(rows.row(r)));
        return out;
    }

    std::vector<double> decision_scores(const Eigen::MatrixXd& rows) const override {
        check_predict_input(rows, p_);
        std::vector<double> out;
        for (Eigen::Index r = 0; r < rows.rows(); ++r)
            out.push_back(tree_.score_row(rows.row(r)));
        return out;
    }

    const ModelSpec& spec() const override { return spec_; }

private:
    ModelSpec spec_;
    Eigen::Index p_;
    Tree tree_;
};

class RfModel final : public TrainedModel {
public:
    RfModel(ModelSpec spec, const Eigen::MatrixXd& X, const std::vector<int>& y)
        : spec_(std::move(spec)), p_(X.cols()) {
        const int n = static_cast<int>(X.rows());
        const int mtry = spec_.rf_max_features > 0
                             ? spec_.rf_max_features
                             : std::max(1, static_cast<int>(std::sqrt(
                                               static_cast<double>(p_))));
        trees_.resize(static_cast<std::size_t>(spec_.rf_trees));
        for (int t = 0; t < spec_.rf_trees; ++t) {
            std::mt19937_64 rng(derive_seed(spec_.seed, "rf/tree/" + std::to_string(t)));
            std::vector<int> rows;
            rows.reserve(static_cast<std::size_t>(n));
            if (spec_.rf_bootstrap) {
                for (int i = 0; i < n; ++i)
                    rows.push_back(static_cast<int>(to_unit_double(rng()) * n));
            } else {
                for (int i = 0; i < n; ++i) rows.push_back(i);
            }

            std::vector<int> all_features(static_cast<std::size_t>(p_));
            std::iota(all_features.begin(), all_features.end(), 0);
            std::vector<int> subset;
            auto pick = [&]() -> const std::vector<int>& {
                if (mtry >= static_cast<int>(p_)) return all_features;
                subset = all_features;
                for (int i = 0; i < mtry; ++i) {
                    const std::size_t j =
                        static_cast<std::size_t>(i) +
                        static_cast<std::size_t>(to_unit_double(rng()) *
                                                 static_cast<double>(subset.size() - i));
                    std::swap(subset[static_cast<std::size_t>(i)], subset[j]);
                }
                subset.resize(static_cast<std::size_t>(mtry));
                std::sort(subset.begin(), subset.end());
                return subset;
            };
            trees_[static_cast<std::size_t>(t)].build(X, y, std::move(rows), pick);
        }
    }

    std::vector<double> decision_scores(const Eigen::MatrixXd& rows) const override {
        check_predict_input(rows, p_);
        std::vector<double> out;
        for (Eigen::Index r = 0; r < rows.rows(); ++r) {
            int votes1 = 0;
            for (const auto& tree : trees_) votes1 += tree.predict_row(rows.row(r));
            out.push_back(static_cast<double>(votes1) / static_cast<double>(trees_.size()));
        }
        return out;
    }

    std::vector<int> predict(const Eigen::MatrixXd& rows) const override {
        std::vector<int> out;
        for (double s : decision_scores(rows)) out.push_back(s > 0.5 ? 1 : 0);
        return out;
    }

    const ModelSpec& spec() const override { return spec_; }

private:
    ModelSpec spec_;
    Eigen::Index p_;
    std::vector<Tree> trees_;
};

// ---------------------------------------------------------------- SVM (SMO)

class SvmModel final : public TrainedModel {
public:
    SvmModel(ModelSpec spec, Eigen::MatrixXd X, const std::vector<int>& y)
        : spec_(std::move(spec)), X_(std::move(X)) {
        const int n = static_cast<int>(X_.rows());
        y_.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) y_[static_cast<std::size_t>(i)] =
            y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;

        if (spec_.svm_kernel == SVMKernel::RBF) {
            const double mean = X_.mean();
            const double var = (X_.array() - mean).square().mean();
            gamma_ = var > 0.0 ? 1.0 / (static_cast<double>(X_.cols()) * var) : 1.0;
        }

        kernel_.resize(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j)
                kernel_(i, j) = kernel_(j, i) = kernel_rows(X_.row(i), X_.row(j));

        alpha_ = Eigen::VectorXd::Zero(n);
        errors_ = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) errors_[i] = -y_[static_cast<std::size_t>(i)];

        smo(n);
    }

    std::vector<double> decision_scores(const Eigen::MatrixXd& rows) const override {
        check_predict_input(rows, X_.cols());
        std::vector<double> out;
        for (Eigen::Index r = 0; r < rows.rows(); ++r) {
            double f = b_;
            for (Eigen::Index i = 0; i < X_.rows(); ++i)
                if (alpha_[i] > 0.0)
                    f += alpha_[i] * y_[static_cast<std::size_t>(i)] *
                         kernel_rows(X_.row(i), rows.row(r));
            out.push_back(f);
        }
        return out;
    }

    std::vector<int> predict(const Eigen::MatrixXd& rows) const override {
        std::vector<int> out;
        for (double f : decision_scores(rows)) out.push_back(f > 0.0 ? 1 : 0);
        return out;
    }

    const ModelSpec& spec() const override { return spec_; }

    // Exposed for KKT verification in tests.
    const Eigen::VectorXd& alphas() const { return alpha_; }
    double bias() const { return b_; }
    double dual_objective() const {
        double obj = alpha_.sum();
        for (Eigen::Index i = 0; i < alpha_.size(); ++i) {
            if (alpha_[i] == 0.0) continue;
            for (Eigen::Index j = 0; j < alpha_.size(); ++j)
                obj -= 0.5 * alpha_[i] * alpha_[j] * y_[static_cast<std::size_t>(i)] *
                       y_[static_cast<std::size_t>(j)] * kernel_(i, j);
        }
        return obj;
    }

private:
    double kernel_rows(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) const {
        if (spec_.svm_kernel == SVMKernel::Linear) return a.dot(b);
        return std::exp(-gamma_ * (a - b).squaredNorm());
    }

    double decision_train(int i) const {
        double f = b_;
        for (Eigen::Index j = 0; j < alpha_.size(); ++j)
            if (alpha_[j] > 0.0)
                f += alpha_[j] * y_[static_cast<std::size_t>(j)] * kernel_(j, i);
        return f;
    }

    bool take_step(int i1, int i2) {
        if (i1 == i2) return false;
        const double y1 = y_[static_cast<std::size_t>(i1)];
        const double y2 = y_[static_cast<std::size_t>(i2)];
        const double a1_old = alpha_[i1], a2_old = alpha_[i2];
        const double e1 = errors_[i1], e2 = errors_[i2];
        const double s = y1 * y2;
        const double c = spec_.svm_c;

        double lo, hi;
        if (s < 0) {
            lo = std::max(0.0, a2_old - a1_old);
            hi = std::min(c, c + a2_old - a1_old);
        } else {
            lo = std::max(0.0, a1_old + a2_old - c);
            hi = std::min(c, a1_old + a2_old);
        }
        if (lo >= hi) return false;

        const double k11 = kernel_(i1, i1), k12 = kernel_(i1, i2), k22 = kernel_(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;
        double a2;
        if (eta > 0) {
            a2 = std::clamp(a2_old + y2 * (e1 - e2) / eta, lo, hi);
        } else {
            // Flat direction: pick the bound with the lower objective.
            auto objective_at = [&](double a2_try) {
                const double a1_try = a1_old + s * (a2_old - a2_try);
                const double d1 = a1_try - a1_old, d2 = a2_try - a2_old;
                return 0.5 * (d1 * d1 * k11 + d2 * d2 * k22) + s * d1 * d2 * k12 +
                       y1 * d1 * e1 + y2 * d2 * e2 - d1 - d2;
            };
            a2 = objective_at(lo) < objective_at(hi) - 1e-12 ? lo : hi;
        }
        if (std::abs(a2 - a2_old) < 1e-12 * (a2 + a2_old + 1e-12)) return false;
        const double a1 = a1_old + s * (a2_old - a2);

        // Bias update (Platt's b1/b2 rule); b enters f as +b.
        const double b1 =
            b_ - e1 - y1 * (a1 - a1_old) * k11 - y2 * (a2 - a2_old) * k12;
        const double b2 =
            b_ - e2 - y1 * (a1 - a1_old) * k12 - y2 * (a2 - a2_old) * k22;
        double b_new;
        if (a1 > 0 && a1 < c)
            b_new = b1;
        else if (a2 > 0 && a2 < c)
            b_new = b2;
        else
            b_new = 0.5 * (b1 + b2);

        const double db = b_new - b_;
        for (Eigen::Index j = 0; j < errors_.size(); ++j)
            errors_[j] += y1 * (a1 - a1_old) * kernel_(i1, j) +
                          y2 * (a2 - a2_old) * kernel_(i2, j) + db;
        alpha_[i1] = a1;
        alpha_[i2] = a2;
        b_ = b_new;
        ++steps_;
        return true;
    }

    bool examine(int i2, std::mt19937_64& rng) {
        const double y2 = y_[static_cast<std::size_t>(i2)];
        const double e2 = errors_[i2];
        const double r2 = e2 * y2;
        const double tol = spec_.svm_tol;
        const double c = spec_.svm_c;
        if (!((r2 < -tol && alpha_[i2] < c) || (r2 > tol && alpha_[i2] > 0))) return false;

        const int n = static_cast<int>(alpha_.size());
        // Second-choice heuristic: maximize |E1 - E2| over non-bound points.
        int best = -1;
        double best_gap = -1.0;
        for (int i = 0; i < n; ++i) {
            if (alpha_[i] <= 0.0 || alpha_[i] >= c) continue;
            const double gap = std::abs(errors_[i] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best >= 0 && take_step(best, i2)) return true;

        const int offset = static_cast<int>(to_unit_double(rng()) * n);
        for (int k = 0; k < n; ++k) {
            const int i = (k + offset) % n;
            if (alpha_[i] > 0.0 && alpha_[i] < c && take_step(i, i2)) return true;
        }
        for (int k = 0; k < n; ++k)
            if (take_step((k + offset) % n, i2)) return true;
        return false;
    }

    void smo(int n) {
        std::mt19937_64 rng(derive_seed(spec_.seed, "svm/smo"));
        bool examine_all = true;
        int changed = 0;
        while ((changed > 0 || examine_all) && steps_ < spec_.svm_max_iter) {
            changed = 0;
            for (int i = 0; i < n && steps_ < spec_.svm_max_iter; ++i) {
                if (!examine_all && (alpha_[i] <= 0.0 || alpha_[i] >= spec_.svm_c)) continue;
                if (examine(i, rng)) ++changed;
            }
            examine_all = examine_all ? false : changed == 0;
            if (!examine_all && changed == 0) break;
        }
        if (steps_ >= spec_.svm_max_iter)
            std::cerr << "warning: SVM hit the iteration cap (" << spec_.svm_max_iter
                      << ") before reaching KKT tolerance\n";
        // Recompute b against a free support vector to shed error-cache drift.
        for (int i = 0; i < n; ++i) {
            if (alpha_[i] > 0.0 && alpha_[i] < spec_.svm_c) {
                const double f_wo_b = decision_train(i) - b_;
                b_ = y_[static_cast<std::size_t>(i)] - f_wo_b;
                break;
            }
        }
    }

    ModelSpec spec_;
    Eigen::MatrixXd X_;
    std::vector<double> y_;
    Eigen::MatrixXd kernel_;
    Eigen::VectorXd alpha_;
    Eigen::VectorXd errors_;
    double gamma_ = 1.0;
    double b_ = 0.0;
    int steps_ = 0;
};

}  // namespace

SvmDiagnostics svm_diagnostics(const TrainedModel& model) {
    const auto* svm = dynamic_cast<const SvmModel*>(&model);
    if (svm == nullptr) throw FitError("svm_diagnostics requires an SVM model");
    return {svm->alphas(), svm->bias(), svm->dual_objective()};
}

std::unique_ptr<TrainedModel> fit(const ModelSpec& spec, const Eigen::MatrixXd& X,
                                  const std::vector<int>& y) {
    check_training_input(X, y);
    switch (spec.kind) {
        case ModelKind::KNN:
            if (X.rows() < spec.knn_k)
                throw FitError("KNN needs at least k=" + std::to_string(spec.knn_k) + " rows");
            return std::make_unique<KnnModel>(spec, X, y);
        case ModelKind::LR: {
            Eigen::VectorXd params =
                minimize_lbfgs(X, y, spec.lr_c, spec.lr_tol, spec.lr_max_iter);
            return std::make_unique<LrModel>(spec, std::move(params), X.cols());
        }
        case ModelKind::NB:
            return std::make_unique<NbModel>(spec, X, y);
        case ModelKind::DT:
            return std::make_unique<DtModel>(spec, X, y);
        case ModelKind::RF:
            return std::make_unique<RfModel>(spec, X, y);
        case ModelKind::SVM:
            return std::make_unique<SvmModel>(spec, X, y);
    }
    throw FitError("unknown model kind");
}

}  // namespace bestseller
