#include "bestseller/project.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>

#include "bestseller/errors.hpp"

namespace bestseller {

namespace {

std::pair<Eigen::VectorXd, Eigen::VectorXd> class_centroids(const EmbeddingMatrix& matrix,
                                                            const std::vector<Label>& labels,
                                                            const std::vector<int>& fit_rows) {
    const auto p = matrix.cols();
    Eigen::VectorXd mu_s = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd mu_o = Eigen::VectorXd::Zero(p);
    int n_s = 0, n_o = 0;
    for (int r : fit_rows) {
        if (labels[static_cast<std::size_t>(r)] == Label::Success) {
            mu_s += matrix.values.row(r).transpose();
            ++n_s;
        } else {
            mu_o += matrix.values.row(r).transpose();
            ++n_o;
        }
    }
    if (n_s == 0 || n_o == 0) throw AxisError("fit set must contain both classes");
    return {mu_s / n_s, mu_o / n_o};
}

std::vector<std::string> fit_ids(const EmbeddingMatrix& matrix, const std::vector<int>& rows) {
    std::vector<std::string> ids;
    ids.reserve(rows.size());
    for (int r : rows) ids.push_back(matrix.doc_ids[static_cast<std::size_t>(r)]);
    return ids;
}

}  // namespace

Axis semaxis_axis(const EmbeddingMatrix& matrix, const std::vector<Label>& labels,
                  const std::vector<int>& fit_rows) {
    auto [mu_s, mu_o] = class_centroids(matrix, labels, fit_rows);
    Eigen::VectorXd diff = mu_s - mu_o;
    const double norm = diff.norm();
    if (norm == 0.0) throw DegenerateAxisError("identical class centroids");
    Axis axis;
    axis.direction = diff / norm;
    axis.method = AxisMethod::SemAxis;
    axis.fitted_on = fit_ids(matrix, fit_rows);
    return axis;
}

Axis lda_axis(const EmbeddingMatrix& matrix, const std::vector<Label>& labels,
              const std::vector<int>& fit_rows, double shrinkage) {
    auto [mu_s, mu_o] = class_centroids(matrix, labels, fit_rows);
    const auto p = matrix.cols();

    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(p, p);
    for (int r : fit_rows) {
        const Eigen::VectorXd& mu =
            labels[static_cast<std::size_t>(r)] == Label::Success ? mu_s : mu_o;
        Eigen::VectorXd d = matrix.values.row(r).transpose() - mu;
        scatter.noalias() += d * d.transpose();
    }
    const double ridge = shrinkage * scatter.trace() / static_cast<double>(p);
    scatter.diagonal().array() += ridge;

    Eigen::VectorXd w = scatter.ldlt().solve(mu_s - mu_o);
    if (!w.allFinite()) throw AxisError("LDA solve produced non-finite direction");
    const double norm = w.norm();
    if (norm == 0.0) throw DegenerateAxisError("zero LDA direction");
    w /= norm;
    if (w.dot(mu_s - mu_o) < 0.0) w = -w;  // Success side positive

    Axis axis;
    axis.direction = std::move(w);
    axis.method = AxisMethod::LDA;
    axis.fitted_on = fit_ids(matrix, fit_rows);
    return axis;
}

ProjectionResult project(const EmbeddingMatrix& matrix, const Axis& axis,
                         const std::vector<Label>& labels) {
    if (matrix.cols() != axis.direction.size())
        throw ProjectionError("matrix/axis dimension mismatch");
    ProjectionResult result;
    result.doc_ids = matrix.doc_ids;
    result.labels = labels;
    result.method = axis.method;
    result.kind = matrix.kind;
    Eigen::VectorXd scores = matrix.values * axis.direction;
    result.scores.assign(scores.data(), scores.data() + scores.size());
    return result;
}

ProjectionResult loo_projection(const EmbeddingMatrix& matrix, const std::vector<Label>& labels,
                                AxisMethod method, double shrinkage,
                                bool standardize_per_fold) {
    const int n = static_cast<int>(matrix.rows());
    if (n < 3) throw AxisError("leave-one-out needs at least 3 rows");

    ProjectionResult result;
    result.doc_ids = matrix.doc_ids;
    result.labels = labels;
    result.method = method;
    result.kind = matrix.kind;
    result.scores.assign(static_cast<std::size_t>(n),
                         std::numeric_limits<double>::quiet_NaN());

    for (int held = 0; held < n; ++held) {
        std::vector<int> fit_rows;
        fit_rows.reserve(static_cast<std::size_t>(n - 1));
        for (int r = 0; r < n; ++r)
            if (r != held) fit_rows.push_back(r);

        try {
            const EmbeddingMatrix* view = &matrix;
            EmbeddingMatrix scaled;
            if (standardize_per_fold) {
                scaled = standardize(matrix, fit_rows);
                view = &scaled;
            }
            Axis axis = method == AxisMethod::SemAxis
                            ? semaxis_axis(*view, labels, fit_rows)
                            : lda_axis(*view, labels, fit_rows, shrinkage);
            result.scores[static_cast<std::size_t>(held)] =
                view->values.row(held).dot(axis.direction);
        } catch (const AxisError&) {
            result.skipped.push_back(held);
        }
    }
    return result;
}

DensityCurve kde(const ProjectionResult& result, int grid_points,
                 std::optional<double> forced_bandwidth) {
    if (grid_points < 2) throw KDEError("grid_points must be >= 2");

    std::vector<double> xs_success, xs_other;
    for (std::size_t i = 0; i < result.scores.size(); ++i) {
        if (std::isnan(result.scores[i])) continue;
        (result.labels[i] == Label::Success ? xs_success : xs_other)
            .push_back(result.scores[i]);
    }

    auto scott = [&](const std::vector<double>& xs) {
        if (xs.size() < 2) throw KDEError("need at least 2 points per class");
        const double n = static_cast<double>(xs.size());
        const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= n;
        if (var == 0.0) throw KDEError("zero-variance class");
        return std::sqrt(var) * std::pow(n, -0.2);
    };

    DensityCurve curve;
    curve.bandwidth_success = forced_bandwidth ? *forced_bandwidth : scott(xs_success);
    curve.bandwidth_other = forced_bandwidth ? *forced_bandwidth : scott(xs_other);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : xs_success) { lo = std::min(lo, x); hi = std::max(hi, x); }
    for (double x : xs_other) { lo = std::min(lo, x); hi = std::max(hi, x); }
    // 4 bandwidths of padding keep the truncated tail mass below 1e-4,
    // so the trapezoid integral stays within the 1e-3 normalization bound.
    const double pad = 4.0 * std::max(curve.bandwidth_success, curve.bandwidth_other);
    lo -= pad;
    hi += pad;

    curve.grid.resize(static_cast<std::size_t>(grid_points));
    for (int i = 0; i < grid_points; ++i)
        curve.grid[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);

    auto evaluate = [](const std::vector<double>& xs, double h,
                       const std::vector<double>& grid) {
        const double norm = 1.0 / (static_cast<double>(xs.size()) * h * std::sqrt(2.0 * M_PI));
        std::vector<double> density(grid.size(), 0.0);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            double sum = 0.0;
            for (double x : xs) {
                const double z = (grid[g] - x) / h;
                sum += std::exp(-0.5 * z * z);
            }
            density[g] = norm * sum;
        }
        return density;
    };
    curve.density_success = evaluate(xs_success, curve.bandwidth_success, curve.grid);
    curve.density_other = evaluate(xs_other, curve.bandwidth_other, curve.grid);
    return curve;
}

std::pair<std::vector<std::string>, std::vector<std::string>> top_axis_words(
    const Axis& axis, const Vocabulary& vocab, int k, EmbeddingKind axis_kind) {
    if (axis_kind != EmbeddingKind::BoW)
        throw WordRankError("word ranking requires a bag-of-words axis");
    if (static_cast<std::size_t>(axis.direction.size()) != vocab.size())
        throw WordRankError("axis dimension does not match vocabulary size");

    std::vector<int> order(vocab.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return axis.direction[a] > axis.direction[b]; });

    const int half = k / 2;
    std::vector<std::string> success_words, other_words;
    for (int i = 0; i < half && i < static_cast<int>(order.size()); ++i) {
        const int idx = order[static_cast<std::size_t>(i)];
        if (axis.direction[idx] <= 0.0) break;
        success_words.push_back(vocab.words[static_cast<std::size_t>(idx)]);
    }
    for (int i = 0; i < half && i < static_cast<int>(order.size()); ++i) {
        const int idx = order[order.size() - 1 - static_cast<std::size_t>(i)];
        if (axis.direction[idx] >= 0.0) break;
        other_words.push_back(vocab.words[static_cast<std::size_t>(idx)]);
    }
    return {success_words, other_words};
}

void write_projection_tsv(const ProjectionResult& result, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IOError("cannot write projection file: " + path.string());
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "doc_id\tlabel\tscore\n";
    for (std::size_t i = 0; i < result.doc_ids.size(); ++i) {
        if (std::isnan(result.scores[i])) continue;
        out << result.doc_ids[i] << '\t' << label_name(result.labels[i]) << '\t'
            << result.scores[i] << '\n';
    }
}

void write_kde_tsv(const DensityCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IOError("cannot write KDE file: " + path.string());
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "x\tdensity_success\tdensity_other\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        out << curve.grid[i] << '\t' << curve.density_success[i] << '\t'
            << curve.density_other[i] << '\n';
}

void write_kde_svg(const DensityCurve& curve, const std::filesystem::path& path,
                   const std::string& success_color, const std::string& other_color) {
    const double width = 640.0, height = 400.0, margin = 50.0;
    const double x_lo = curve.grid.front(), x_hi = curve.grid.back();
    double y_hi = 0.0;
    for (double d : curve.density_success) y_hi = std::max(y_hi, d);
    for (double d : curve.density_other) y_hi = std::max(y_hi, d);
    if (y_hi == 0.0) y_hi = 1.0;

    auto sx = [&](double x) {
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin);
    };
    auto sy = [&](double y) { return height - margin - y / y_hi * (height - 2 * margin); };

    auto polyline = [&](const std::vector<double>& density, const std::string& color) {
        std::string pts;
        for (std::size_t i = 0; i < curve.grid.size(); ++i) {
            pts += std::to_string(sx(curve.grid[i])) + "," + std::to_string(sy(density[i]));
            if (i + 1 < curve.grid.size()) pts += " ";
        }
        return "  <polyline fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    };

    std::ofstream out(path);
    if (!out) throw IOError("cannot write SVG file: " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "  <line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
        << width - margin << "\" y2=\"" << height - margin
        << "\" stroke=\"black\"/>\n"
        << "  <line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n"
        << polyline(curve.density_success, success_color)
        << polyline(curve.density_other, other_color)
        << "  <text x=\"" << width - margin - 120 << "\" y=\"" << margin
        << "\" fill=\"" << success_color << "\">success</text>\n"
        << "  <text x=\"" << width - margin - 120 << "\" y=\"" << margin + 18
        << "\" fill=\"" << other_color << "\">other</text>\n"
        << "</svg>\n";
}

}  // namespace bestseller
