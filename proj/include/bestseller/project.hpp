#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bestseller/bow.hpp"
#include "bestseller/corpus.hpp"
#include "bestseller/matrix.hpp"

namespace bestseller {

enum class AxisMethod { SemAxis, LDA };

inline const char* axis_method_name(AxisMethod m) {
    return m == AxisMethod::SemAxis ? "semaxis" : "lda";
}

// Unit direction in feature space; positive scores are the Success side.
struct Axis {
    Eigen::VectorXd direction;
    AxisMethod method = AxisMethod::SemAxis;
    std::vector<std::string> fitted_on;  // document ids used for the fit
};

struct ProjectionResult {
    std::vector<std::string> doc_ids;
    std::vector<Label> labels;
    std::vector<double> scores;        // aligned with doc_ids
    AxisMethod method = AxisMethod::SemAxis;
    EmbeddingKind kind = EmbeddingKind::BoW;
    std::vector<int> skipped;          // indices whose LOO fit was degenerate
};

// Normalized difference of class centroids over fit_rows.
Axis semaxis_axis(const EmbeddingMatrix& matrix, const std::vector<Label>& labels,
                  const std::vector<int>& fit_rows);

// Fisher direction (S_W + shrinkage*trace(S_W)/p * I)^-1 (mu_S - mu_O),
// sign oriented so the Success centroid projects positive.
Axis lda_axis(const EmbeddingMatrix& matrix, const std::vector<Label>& labels,
              const std::vector<int>& fit_rows, double shrinkage);

ProjectionResult project(const EmbeddingMatrix& matrix, const Axis& axis,
                         const std::vector<Label>& labels);

// Leave-one-out: refit the axis (and, when requested, the standardization
// statistics) without the held-out row, then project it.
ProjectionResult loo_projection(const EmbeddingMatrix& matrix, const std::vector<Label>& labels,
                                AxisMethod method, double shrinkage = 1e-3,
                                bool standardize_per_fold = false);

struct DensityCurve {
    std::vector<double> grid;
    std::vector<double> density_success;
    std::vector<double> density_other;
    double bandwidth_success = 0.0;
    double bandwidth_other = 0.0;
};

// Gaussian KDE per class, Scott bandwidth unless forced.
DensityCurve kde(const ProjectionResult& result, int grid_points,
                 std::optional<double> forced_bandwidth = std::nullopt);

// k/2 strongest positive-direction words (Success side) and k/2 strongest
// negative ones, both in decreasing |component| order.
std::pair<std::vector<std::string>, std::vector<std::string>> top_axis_words(
    const Axis& axis, const Vocabulary& vocab, int k, EmbeddingKind axis_kind);

void write_projection_tsv(const ProjectionResult& result, const std::filesystem::path& path);
void write_kde_tsv(const DensityCurve& curve, const std::filesystem::path& path);
void write_kde_svg(const DensityCurve& curve, const std::filesystem::path& path,
                   const std::string& success_color = "#1f77b4",
                   const std::string& other_color = "#ff7f0e");

}  // namespace bestseller
