#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace bestseller {

enum class ModelKind { KNN, LR, NB, DT, RF, SVM };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

enum class SVMKernel { RBF, Linear };

// Pinned defaults; every field is echoed into run manifests.
struct ModelSpec {
    ModelKind kind = ModelKind::LR;
    std::uint64_t seed = 0;

    int knn_k = 5;

    double lr_c = 1.0;          // inverse regularization strength
    double lr_tol = 1e-4;       // gradient-norm stop
    int lr_max_iter = 100;

    double nb_var_smoothing = 1e-9;  // times max feature variance

    int rf_trees = 100;
    bool rf_bootstrap = true;
    int rf_max_features = 0;  // 0 -> floor(sqrt(p))

    double svm_c = 1.0;
    double svm_tol = 1e-3;      // KKT tolerance
    int svm_max_iter = 10000;
    SVMKernel svm_kernel = SVMKernel::RBF;
};

// Labels are class ids 0/1 (0 = Success). Ties always break toward the
// smaller class id.
class TrainedModel {
public:
    virtual ~TrainedModel() = default;
    virtual std::vector<int> predict(const Eigen::MatrixXd& rows) const = 0;
    // Continuous score per row: LR probability of class 1, SVM margin,
    // NB log-posterior difference, vote/leaf fractions for the rest.
    virtual std::vector<double> decision_scores(const Eigen::MatrixXd& rows) const = 0;
    virtual const ModelSpec& spec() const = 0;
};

std::unique_ptr<TrainedModel> fit(const ModelSpec& spec, const Eigen::MatrixXd& X,
                                  const std::vector<int>& y);

// Dual-solution internals of a trained SVM; exposed so KKT conditions and
// the dual objective can be verified against independent oracles.
struct SvmDiagnostics {
    Eigen::VectorXd alphas;
    double bias = 0.0;
    double dual_objective = 0.0;
};

// Throws FitError when the model is not an SVM.
SvmDiagnostics svm_diagnostics(const TrainedModel& model);

// Regularized logistic loss and gradient over [w, b]; exposed so the
// optimizer can be checked against finite differences.
double lr_loss_and_gradient(const Eigen::MatrixXd& X, const std::vector<int>& y,
                            const Eigen::VectorXd& params, double c, Eigen::VectorXd& grad);

}  // namespace bestseller
