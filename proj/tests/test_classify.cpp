#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "bestseller/classify.hpp"
#include "bestseller/errors.hpp"
#include "bestseller/matrix.hpp"

using namespace bestseller;

namespace {

Eigen::MatrixXd random_matrix(int n, int p, std::uint64_t seed, double shift1 = 0.0,
                              const std::vector<int>* labels = nullptr) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd X(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j)
            X(i, j) = g(rng) + (labels && (*labels)[static_cast<std::size_t>(i)] == 1 ? shift1 : 0.0);
    return X;
}

// Independent KNN oracle: full O(n^2) scan with the pinned tie rules.
int knn_oracle(const Eigen::MatrixXd& X, const std::vector<int>& y, const Eigen::RowVectorXd& q,
               int k) {
    std::vector<std::pair<double, int>> dist;
    for (int i = 0; i < X.rows(); ++i) dist.emplace_back((X.row(i) - q).norm(), i);
    std::sort(dist.begin(), dist.end());
    int votes1 = 0;
    for (int i = 0; i < k; ++i) votes1 += y[static_cast<std::size_t>(dist[i].second)];
    return votes1 * 2 > k ? 1 : 0;
}

// Independent CART oracle: exhaustive midpoint-split enumeration, weighted
// Gini, ties to lowest feature then lowest threshold, grown to purity.
struct OracleTree {
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        int left = -1, right = -1;
        double frac1 = 0.0;
    };
    std::vector<Node> nodes;

    static double gini_pair(int a, int b) {
        if (a + b == 0) return 0.0;
        double pa = double(a) / (a + b), pb = double(b) / (a + b);
        return 1.0 - pa * pa - pb * pb;
    }

    int grow(const Eigen::MatrixXd& X, const std::vector<int>& y, std::vector<int> rows) {
        int n1 = 0;
        for (int r : rows) n1 += y[static_cast<std::size_t>(r)];
        int n0 = static_cast<int>(rows.size()) - n1;
        int id = static_cast<int>(nodes.size());
        nodes.push_back({});
        nodes[static_cast<std::size_t>(id)].frac1 = double(n1) / rows.size();
        if (n0 == 0 || n1 == 0 || rows.size() < 2) return id;

        double best = std::numeric_limits<double>::infinity();
        int bf = -1;
        double bt = 0.0;
        for (int f = 0; f < X.cols(); ++f) {
            std::vector<double> vals;
            for (int r : rows) vals.push_back(X(r, f));
            std::sort(vals.begin(), vals.end());
            vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                double thr = 0.5 * (vals[i] + vals[i + 1]);
                int l0 = 0, l1 = 0, r0 = 0, r1 = 0;
                for (int r : rows)
                    (X(r, f) <= thr ? (y[static_cast<std::size_t>(r)] ? l1 : l0)
                                    : (y[static_cast<std::size_t>(r)] ? r1 : r0))++;
                double score = ((l0 + l1) * gini_pair(l0, l1) + (r0 + r1) * gini_pair(r0, r1)) /
                               rows.size();
                if (score < best - 1e-12) {
                    best = score;
                    bf = f;
                    bt = thr;
                }
            }
        }
        if (bf < 0) return id;
        std::vector<int> lrows, rrows;
        for (int r : rows) (X(r, bf) <= bt ? lrows : rrows).push_back(r);
        int l = grow(X, y, lrows), rr = grow(X, y, rrows);
        nodes[static_cast<std::size_t>(id)].feature = bf;
        nodes[static_cast<std::size_t>(id)].threshold = bt;
        nodes[static_cast<std::size_t>(id)].left = l;
        nodes[static_cast<std::size_t>(id)].right = rr;
        return id;
    }

    int predict(const Eigen::RowVectorXd& x) const {
        int node = 0;
        while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
            const auto& nd = nodes[static_cast<std::size_t>(node)];
            node = x(nd.feature) <= nd.threshold ? nd.left : nd.right;
        }
        return nodes[static_cast<std::size_t>(node)].frac1 > 0.5 ? 1 : 0;
    }
};

}  // namespace

TEST_CASE("KNN agrees with the brute-force scan on 50 points") {
    std::mt19937_64 rng(100);
    std::vector<int> y;
    for (int i = 0; i < 50; ++i) y.push_back(static_cast<int>(rng() % 2));
    auto X = random_matrix(50, 3, 8, 1.5, &y);

    ModelSpec spec;
    spec.kind = ModelKind::KNN;
    auto model = fit(spec, X, y);

    auto Q = random_matrix(30, 3, 9);
    auto got = model->predict(Q);
    for (int i = 0; i < 30; ++i) CHECK(got[static_cast<std::size_t>(i)] == knn_oracle(X, y, Q.row(i), 5));
}

TEST_CASE("KNN k=1 predicts a training point's own label") {
    Eigen::MatrixXd X(4, 1);
    X << 0, 1, 10, 11;
    std::vector<int> y = {0, 0, 1, 1};
    ModelSpec spec;
    spec.kind = ModelKind::KNN;
    spec.knn_k = 1;
    auto model = fit(spec, X, y);
    auto got = model->predict(X);
    CHECK(got == y);
}

TEST_CASE("KNN with fewer rows than k is a FitError") {
    Eigen::MatrixXd X(3, 1);
    X << 0, 1, 2;
    std::vector<int> y = {0, 1, 0};
    ModelSpec spec;
    spec.kind = ModelKind::KNN;  // k = 5 > 3 rows
    CHECK_THROWS_AS(fit(spec, X, y), FitError);
}

TEST_CASE("LR separates trivially separable data with low loss") {
    Eigen::MatrixXd X(2, 1);
    X << -1, 1;
    std::vector<int> y = {0, 1};
    ModelSpec spec;
    spec.kind = ModelKind::LR;
    auto model = fit(spec, X, y);
    CHECK(model->predict(X) == y);
    auto p = model->decision_scores(X);
    double nll = -0.5 * (std::log(1 - p[0]) + std::log(p[1]));
    CHECK(nll < std::log(2.0));
    // Midpoint of a symmetric problem sits on the boundary.
    Eigen::MatrixXd mid(1, 1);
    mid << 0;
    CHECK(model->decision_scores(mid)[0] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("LR loss gradient matches central finite differences over 100 probes") {
    std::mt19937_64 rng(55);
    std::normal_distribution<double> g(0.0, 1.0);
    const double eps = 1e-6;
    double max_rel = 0.0;
    for (int probe = 0; probe < 100; ++probe) {
        int n = 3 + static_cast<int>(rng() % 6), p = 1 + static_cast<int>(rng() % 4);
        Eigen::MatrixXd X(n, p);
        std::vector<int> y;
        for (int i = 0; i < n; ++i) {
            y.push_back(static_cast<int>(rng() % 2));
            for (int j = 0; j < p; ++j) X(i, j) = g(rng);
        }
        Eigen::VectorXd params(p + 1);
        for (int j = 0; j <= p; ++j) params(j) = g(rng);
        Eigen::VectorXd grad;
        lr_loss_and_gradient(X, y, params, 1.0, grad);
        for (int j = 0; j <= p; ++j) {
            Eigen::VectorXd pp = params, pm = params;
            pp(j) += eps;
            pm(j) -= eps;
            Eigen::VectorXd dummy;
            double numeric = (lr_loss_and_gradient(X, y, pp, 1.0, dummy) -
                              lr_loss_and_gradient(X, y, pm, 1.0, dummy)) / (2 * eps);
            max_rel = std::max(max_rel, std::abs(grad(j) - numeric) /
                                            std::max(std::abs(numeric), 1.0));
        }
    }
    CHECK(max_rel <= 1e-5);
}

TEST_CASE("NB matches hand-computed Gaussian posteriors") {
    // Class 0: {-1, 1} (mean 0, var 1); class 1: {9, 11} (mean 10, var 1).
    Eigen::MatrixXd X(4, 1);
    X << -1, 1, 9, 11;
    std::vector<int> y = {0, 0, 1, 1};
    ModelSpec spec;
    spec.kind = ModelKind::NB;
    auto model = fit(spec, X, y);

    // Equal priors/vars: score(x) = ((x-0)^2 - (x-10)^2) / (2 var_eff).
    const double var_eff = 1.0 + 1e-9 * 1.0 * 25.0;  // smoothing eps * max feature variance
    Eigen::MatrixXd q(3, 1);
    q << 4, 5, 6;
    auto s = model->decision_scores(q);
    CHECK(s[0] == doctest::Approx((16.0 - 36.0) / (2 * var_eff)).epsilon(1e-6));
    CHECK(s[1] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(s[2] == doctest::Approx((36.0 - 16.0) / (2 * var_eff)).epsilon(1e-6));
    auto labels = model->predict(q);
    CHECK(labels[0] == 0);
    CHECK(labels[2] == 1);
}

TEST_CASE("NB boundary between sampled N(0,1) and N(10,1) classes is near 5") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g0(0.0, 1.0), g1(10.0, 1.0);
    Eigen::MatrixXd X(200, 1);
    std::vector<int> y;
    for (int i = 0; i < 100; ++i) {
        X(i, 0) = g0(rng);
        y.push_back(0);
    }
    for (int i = 100; i < 200; ++i) {
        X(i, 0) = g1(rng);
        y.push_back(1);
    }
    ModelSpec spec;
    spec.kind = ModelKind::NB;
    auto model = fit(spec, X, y);
    double boundary = 0.0;
    for (double x = 0.0; x < 10.0; x += 0.01) {
        Eigen::MatrixXd q(1, 1);
        q << x;
        if (model->decision_scores(q)[0] > 0) {
            boundary = x;
            break;
        }
    }
    CHECK(boundary == doctest::Approx(5.0).epsilon(0.1));
}

TEST_CASE("DT overfits the XOR layout and matches exhaustive enumeration") {
    Eigen::MatrixXd X(4, 2);
    X << 0, 0, 0, 1, 1, 0, 1, 1;
    std::vector<int> y = {0, 1, 1, 0};
    ModelSpec spec;
    spec.kind = ModelKind::DT;
    auto model = fit(spec, X, y);
    CHECK(model->predict(X) == y);
}

TEST_CASE("DT agrees with the exhaustive-split oracle on small instances") {
    std::mt19937_64 rng(500);
    for (int trial = 0; trial < 25; ++trial) {
        int n = 4 + static_cast<int>(rng() % 5);  // 4..8 points
        int p = 1 + static_cast<int>(rng() % 3);  // 1..3 features
        Eigen::MatrixXd X(n, p);
        std::vector<int> y;
        bool has0 = false, has1 = false;
        for (int i = 0; i < n; ++i) {
            int lab = static_cast<int>(rng() % 2);
            y.push_back(lab);
            (lab ? has1 : has0) = true;
            for (int j = 0; j < p; ++j) X(i, j) = static_cast<double>(rng() % 8);
        }
        if (!has0 || !has1) continue;

        ModelSpec spec;
        spec.kind = ModelKind::DT;
        auto model = fit(spec, X, y);
        OracleTree oracle;
        oracle.grow(X, y, [&] {
            std::vector<int> r(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = i;
            return r;
        }());

        // Compare on training points and a probe grid.
        auto got = model->predict(X);
        for (int i = 0; i < n; ++i)
            CHECK(got[static_cast<std::size_t>(i)] == oracle.predict(X.row(i)));
        Eigen::MatrixXd probes = random_matrix(20, p, rng());
        probes = probes * 3.0;
        auto gp = model->predict(probes);
        for (int i = 0; i < 20; ++i)
            CHECK(gp[static_cast<std::size_t>(i)] == oracle.predict(probes.row(i)));
    }
}

TEST_CASE("RF with one tree and no bootstrap reduces to DT") {
    std::mt19937_64 rng(41);
    std::vector<int> y;
    for (int i = 0; i < 20; ++i) y.push_back(static_cast<int>(rng() % 2));
    auto X = random_matrix(20, 3, 6, 2.0, &y);

    ModelSpec dt;
    dt.kind = ModelKind::DT;
    ModelSpec rf;
    rf.kind = ModelKind::RF;
    rf.rf_trees = 1;
    rf.rf_bootstrap = false;
    rf.rf_max_features = 3;  // consider every feature, like DT
    rf.seed = 7;

    auto dt_model = fit(dt, X, y);
    auto rf_model = fit(rf, X, y);
    auto probes = random_matrix(40, 3, 12);
    CHECK(rf_model->predict(X) == dt_model->predict(X));
    CHECK(rf_model->predict(probes) == dt_model->predict(probes));
}

TEST_CASE("RF is deterministic given the seed and unanimous on separable data") {
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) y.push_back(i < 15 ? 0 : 1);
    auto X = random_matrix(30, 2, 3, 8.0, &y);
    ModelSpec spec;
    spec.kind = ModelKind::RF;
    spec.seed = 99;
    auto a = fit(spec, X, y);
    auto b = fit(spec, X, y);
    auto probes = random_matrix(10, 2, 4, 8.0, nullptr);
    CHECK(a->predict(probes) == b->predict(probes));

    Eigen::MatrixXd deep1(1, 2);
    deep1 << 8.0, 8.0;
    CHECK(a->decision_scores(deep1)[0] == 1.0);  // unanimous vote for class 1
}

TEST_CASE("SVM on a separable set satisfies the KKT conditions") {
    Eigen::MatrixXd X(4, 2);
    X << 1, 1, 2, 2, -1, -1, -2, -2;
    std::vector<int> y = {1, 1, 0, 0};
    ModelSpec spec;
    spec.kind = ModelKind::SVM;
    auto model = fit(spec, X, y);
    CHECK(model->predict(X) == y);

    auto diag = svm_diagnostics(*model);
    auto f = model->decision_scores(X);
    const double tol = spec.svm_tol + 1e-6;
    for (int i = 0; i < 4; ++i) {
        double yi = y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
        double margin = yi * f[static_cast<std::size_t>(i)];
        double a = diag.alphas(i);
        CHECK(a >= -1e-12);
        CHECK(a <= spec.svm_c + 1e-12);
        if (a < 1e-9) {
            CHECK(margin >= 1.0 - tol);
        } else if (a > spec.svm_c - 1e-9) {
            CHECK(margin <= 1.0 + tol);
        } else {
            CHECK(std::abs(margin - 1.0) <= tol);
        }
    }
}

TEST_CASE("SVM dual objective matches a grid-searched linear primal") {
    Eigen::MatrixXd X(4, 2);
    X << 1, 0, 2, 0, -1, 0, -2, 0;
    std::vector<int> y = {1, 1, 0, 0};
    ModelSpec spec;
    spec.kind = ModelKind::SVM;
    spec.svm_kernel = SVMKernel::Linear;
    auto model = fit(spec, X, y);
    auto diag = svm_diagnostics(*model);

    // Exhaustive primal search; the optimum w = (1, 0), b = 0 lies on the grid.
    double best = 1e100;
    for (double w1 = -2.0; w1 <= 2.0 + 1e-9; w1 += 0.05) {
        for (double w2 = -1.0; w2 <= 1.0 + 1e-9; w2 += 0.1) {
            for (double b = -1.0; b <= 1.0 + 1e-9; b += 0.05) {
                double obj = 0.5 * (w1 * w1 + w2 * w2);
                for (int i = 0; i < 4; ++i) {
                    double yi = y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
                    double margin = yi * (w1 * X(i, 0) + w2 * X(i, 1) + b);
                    obj += spec.svm_c * std::max(0.0, 1.0 - margin);
                }
                best = std::min(best, obj);
            }
        }
    }
    CHECK(best == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(diag.dual_objective - best) <= 1e-3);
}

TEST_CASE("classifiers reject degenerate input") {
    Eigen::MatrixXd X(4, 2);
    X << 1, 2, 3, 4, 5, 6, 7, 8;
    std::vector<int> one_class = {1, 1, 1, 1};
    for (auto kind : {ModelKind::KNN, ModelKind::LR, ModelKind::NB, ModelKind::DT,
                      ModelKind::RF, ModelKind::SVM}) {
        ModelSpec spec;
        spec.kind = kind;
        spec.knn_k = 2;
        CHECK_THROWS_AS(fit(spec, X, one_class), FitError);
    }

    Eigen::MatrixXd bad = X;
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    ModelSpec lr;
    lr.kind = ModelKind::LR;
    CHECK_THROWS_AS(fit(lr, bad, {0, 0, 1, 1}), FitError);

    auto ok = fit(lr, X, {0, 0, 1, 1});
    Eigen::MatrixXd narrow(1, 1);
    narrow << 1;
    CHECK_THROWS_AS(ok->predict(narrow), PredictError);
}

TEST_CASE("standardization makes predictions invariant to positive feature scaling") {
    std::mt19937_64 rng(9);
    std::vector<int> y;
    for (int i = 0; i < 16; ++i) y.push_back(i % 2);
    auto Xraw = random_matrix(16, 3, 14, 1.0, &y);

    Eigen::MatrixXd scaled = Xraw;
    scaled.col(0) *= 2.0;
    scaled.col(1) *= 0.5;
    scaled.col(2) *= 7.0;

    auto wrap = [](const Eigen::MatrixXd& v) {
        EmbeddingMatrix m;
        m.values = v;
        for (int i = 0; i < v.rows(); ++i) m.doc_ids.push_back("d" + std::to_string(i));
        return m;
    };
    auto z1 = standardize(wrap(Xraw)), z2 = standardize(wrap(scaled));
    CHECK((z1.values - z2.values).cwiseAbs().maxCoeff() < 1e-9);

    for (auto kind : {ModelKind::KNN, ModelKind::LR, ModelKind::SVM}) {
        ModelSpec spec;
        spec.kind = kind;
        spec.knn_k = 3;
        auto m1 = fit(spec, z1.values, y);
        auto m2 = fit(spec, z2.values, y);
        CHECK(m1->predict(z1.values) == m2->predict(z2.values));
    }
}

TEST_CASE("every model kind is deterministic for fixed data and seed") {
    std::vector<int> y;
    for (int i = 0; i < 24; ++i) y.push_back(i % 2);
    auto X = random_matrix(24, 4, 31, 1.2, &y);
    auto probes = random_matrix(12, 4, 32, 1.2, nullptr);
    for (auto kind : {ModelKind::KNN, ModelKind::LR, ModelKind::NB, ModelKind::DT,
                      ModelKind::RF, ModelKind::SVM}) {
        ModelSpec spec;
        spec.kind = kind;
        spec.seed = 1234;
        auto a = fit(spec, X, y);
        auto b = fit(spec, X, y);
        CHECK(a->predict(probes) == b->predict(probes));
        CHECK(a->decision_scores(probes) == b->decision_scores(probes));
    }
}
