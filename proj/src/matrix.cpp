#include "bestseller/matrix.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "bestseller/errors.hpp"

namespace bestseller {

EmbeddingMatrix standardize(const EmbeddingMatrix& matrix, const std::vector<int>& fit_rows) {
    if (fit_rows.empty()) throw Error("standardize: empty fit row set");
    const auto p = matrix.cols();
    const double n = static_cast<double>(fit_rows.size());

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
    for (int r : fit_rows) mean += matrix.values.row(r).transpose();
    mean /= n;

    Eigen::VectorXd var = Eigen::VectorXd::Zero(p);
    for (int r : fit_rows) {
        Eigen::VectorXd d = matrix.values.row(r).transpose() - mean;
        var += d.cwiseProduct(d);
    }
    var /= n;  // population variance

    Eigen::VectorXd std_dev = var.cwiseSqrt();
    for (Eigen::Index j = 0; j < p; ++j)
        if (std_dev[j] == 0.0) std_dev[j] = 1.0;

    EmbeddingMatrix out;
    out.kind = matrix.kind;
    out.doc_ids = matrix.doc_ids;
    out.values = (matrix.values.rowwise() - mean.transpose()).array().rowwise() /
                 std_dev.transpose().array();
    out.standardized = true;
    out.column_means = std::move(mean);
    out.column_stds = std::move(std_dev);
    return out;
}

EmbeddingMatrix standardize(const EmbeddingMatrix& matrix) {
    std::vector<int> all(static_cast<std::size_t>(matrix.rows()));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return standardize(matrix, all);
}

void save_matrix(const EmbeddingMatrix& matrix, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IOError("cannot write matrix file: " + path.string());
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << embedding_kind_name(matrix.kind) << ' ' << matrix.rows() << ' ' << matrix.cols()
        << ' ' << (matrix.standardized ? 1 : 0) << '\n';
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        out << matrix.doc_ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < matrix.cols(); ++j) out << ' ' << matrix.values(i, j);
        out << '\n';
    }
}

EmbeddingMatrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open matrix file: " + path.string());
    std::string kind;
    Eigen::Index rows = 0, cols = 0;
    int standardized = 0;
    in >> kind >> rows >> cols >> standardized;
    if (!in || (kind != "bow" && kind != "d2v"))
        throw IOError("malformed matrix header in " + path.string());

    EmbeddingMatrix m;
    m.kind = kind == "bow" ? EmbeddingKind::BoW : EmbeddingKind::D2V;
    m.standardized = standardized != 0;
    m.doc_ids.resize(static_cast<std::size_t>(rows));
    m.values.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        in >> m.doc_ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < cols; ++j) in >> m.values(i, j);
    }
    if (!in) throw IOError("truncated matrix file: " + path.string());
    return m;
}

}  // namespace bestseller
