#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bestseller {

enum class EmbeddingKind { BoW, D2V };

inline const char* embedding_kind_name(EmbeddingKind k) {
    return k == EmbeddingKind::BoW ? "bow" : "d2v";
}

// Rows = documents, columns = features. Standardized matrices carry the
// fitted per-column statistics so the same transform can be replayed.
struct EmbeddingMatrix {
    EmbeddingKind kind = EmbeddingKind::BoW;
    std::vector<std::string> doc_ids;
    Eigen::MatrixXd values;
    bool standardized = false;
    std::optional<Eigen::VectorXd> column_means;
    std::optional<Eigen::VectorXd> column_stds;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

// Per-feature z-score with mean/population-std computed over fit_rows only,
// applied to every row. Constant columns get std 1 (and so map to zero
// over the fit rows).
EmbeddingMatrix standardize(const EmbeddingMatrix& matrix, const std::vector<int>& fit_rows);

// Standardize fitting on all rows.
EmbeddingMatrix standardize(const EmbeddingMatrix& matrix);

// Text format: `kind rows cols standardized`, one doc id + row per line.
void save_matrix(const EmbeddingMatrix& matrix, const std::filesystem::path& path);
EmbeddingMatrix load_matrix(const std::filesystem::path& path);

}  // namespace bestseller
