#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "support.hpp"
#include "wastebench/classifiers.hpp"
#include "wastebench/errors.hpp"
#include "wastebench/metrics.hpp"
#include "wastebench/synth.hpp"

using namespace wastebench;
using namespace oracles;

namespace {

const std::vector<Family> kFamilies = {Family::Logistic, Family::Knn,     Family::Svm,
                                       Family::DTree,    Family::RForest, Family::Gbdt};

ClassifierSpec small_spec(Family f) {
    ClassifierSpec s;
    s.family = f;
    s.rforest.trees = 15;
    s.gbdt.rounds = 20;
    s.logistic.max_iter = 300;
    return s;
}

}  // namespace

TEST_CASE("focal loss analytic values") {
    CHECK(focal_loss(1.0, 2.0, 0.25) == 0.0);
    CHECK(focal_loss(1.0, 0.0, 1.0) == 0.0);
    CHECK(std::abs(focal_loss(0.5, 0.0, 1.0) - std::log(2.0)) < 1e-12);
    CHECK(std::abs(focal_loss(0.9, 2.0, 0.25) - 0.25 * 0.01 * -std::log(0.9)) < 1e-15);
    CHECK(focal_loss(0.9, 2.0, 0.25) == doctest::Approx(2.634e-4).epsilon(1e-3));
    CHECK(std::isfinite(focal_loss(0.0, 2.0, 0.25)));
}

TEST_CASE("logistic objective matches a per-sample evaluation") {
    Rng rng(4);
    for (auto loss : {LossKind::CrossEntropy, LossKind::Focal}) {
        LogisticParams p;
        p.loss = loss;
        p.gamma = 1.5;
        p.alpha = 0.7;
        p.l2 = 0.01;
        const Matrix X = random_matrix(15, 4, rng);
        const Labels y = random_labels(15, 3, rng);
        const Matrix W = random_matrix(3, 4, rng);
        Vector b(3);
        b << 0.3, -0.2, 0.1;
        CHECK(logistic_objective(p, X, y, W, b, nullptr, nullptr) ==
              doctest::Approx(reference_objective(p, X, y, W, b)).epsilon(1e-12));
    }
}

TEST_CASE("focal gradient matches central finite differences") {
    Rng rng(17);
    for (int instance = 0; instance < 20; ++instance) {
        LogisticParams p;
        p.loss = LossKind::Focal;
        p.gamma = rng.uniform(0.0, 4.0);
        p.alpha = rng.uniform(0.1, 1.0);
        p.l2 = rng.uniform(0.0, 0.1);
        const int C = 2 + static_cast<int>(rng.index(3));
        const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.index(5));
        const std::size_t n = 5 + rng.index(20);
        const Matrix X = random_matrix(static_cast<Eigen::Index>(n), d, rng) * 1.5;
        const Labels y = random_labels(n, C, rng);
        Matrix W = random_matrix(C, d, rng);
        Vector b = random_matrix(C, 1, rng).col(0);
        Matrix gW;
        Vector gb;
        logistic_objective(p, X, y, W, b, &gW, &gb);

        const double h = 1e-5;
        double err = 0.0, norm = 0.0;
        for (Eigen::Index c = 0; c < C; ++c) {
            for (Eigen::Index j = 0; j < d; ++j) {
                Matrix Wp = W, Wm = W;
                Wp(c, j) += h;
                Wm(c, j) -= h;
                const double fd = (reference_objective(p, X, y, Wp, b) - reference_objective(p, X, y, Wm, b)) / (2 * h);
                err += (fd - gW(c, j)) * (fd - gW(c, j));
                norm += gW(c, j) * gW(c, j);
            }
            Vector bp = b, bm = b;
            bp(c) += h;
            bm(c) -= h;
            const double fd = (reference_objective(p, X, y, W, bp) - reference_objective(p, X, y, W, bm)) / (2 * h);
            err += (fd - gb(c)) * (fd - gb(c));
            norm += gb(c) * gb(c);
        }
        INFO("instance " << instance << " gamma " << p.gamma);
        CHECK(std::sqrt(err) <= 1e-4 * std::sqrt(norm));
    }
}

TEST_CASE("focal training with gamma 0 and alpha 1 follows cross-entropy exactly") {
    Rng rng(3);
    const Matrix X = random_matrix(120, 6, rng);
    const Labels y = random_labels(120, 3, rng);
    ClassifierSpec ce = small_spec(Family::Logistic);
    ce.logistic.max_iter = 50;
    ce.logistic.grad_tol = 0.0;
    ClassifierSpec fl = ce;
    fl.logistic.loss = LossKind::Focal;
    fl.logistic.gamma = 0.0;
    fl.logistic.alpha = 1.0;
    const auto a = std::get<LogisticModel>(train(ce, X, y, 1).params);
    const auto b = std::get<LogisticModel>(train(fl, X, y, 1).params);
    REQUIRE(a.loss_history.size() == 50);
    REQUIRE(b.loss_history.size() == 50);
    for (std::size_t i = 0; i < 50; ++i) CHECK(std::abs(a.loss_history[i] - b.loss_history[i]) < 1e-12);
    for (std::size_t i = 1; i < 50; ++i) CHECK(a.loss_history[i] <= a.loss_history[i - 1]);
}

TEST_CASE("logistic separates blobs and is confident far inside a class") {
    Rng rng(9);
    Matrix X(200, 2);
    Labels y(200);
    for (Eigen::Index i = 0; i < 200; ++i) {
        y[i] = static_cast<int>(i % 2);
        X(i, 0) = (y[i] ? 3.0 : -3.0) + 0.5 * rng.normal();
        X(i, 1) = rng.normal() * 0.5;
    }
    const auto m = train(small_spec(Family::Logistic), X, y, 0);
    CHECK(accuracy(y, m.predict_all(X)) == 1.0);
    const std::vector<double> far{8.0, 0.0};
    CHECK(m.score(far)[1] > 0.99);
}

TEST_CASE("logistic with zero weights predicts class zero") {
    TrainedModel m;
    m.spec.family = Family::Logistic;
    m.class_count = 3;
    m.feature_dim = 2;
    LogisticModel lm;
    lm.weights = Matrix::Zero(3, 2);
    lm.bias = Vector::Zero(3);
    m.params = lm;
    const std::vector<double> x{1.5, -2.0};
    CHECK(m.predict(x) == 0);
    const auto s = m.score(x);
    CHECK(s[0] == doctest::Approx(1.0 / 3));
}

TEST_CASE("knn equals an exhaustive distance sort") {
    Rng rng(12);
    for (int trial = 0; trial < 12; ++trial) {
        const Eigen::Index n = 20 + static_cast<Eigen::Index>(rng.index(181));
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.index(6));
        const int C = 2 + static_cast<int>(rng.index(4));
        const int k = 1 + static_cast<int>(rng.index(9));
        const Matrix X = random_matrix(n, d, rng);
        const Labels y = random_labels(static_cast<std::size_t>(n), C, rng);
        ClassifierSpec spec = small_spec(Family::Knn);
        spec.knn.k = k;
        const auto model = train(spec, X, y, 0);

        // z-score with population statistics, then brute force.
        std::vector<double> mu(d, 0.0), sd(d, 0.0);
        for (Eigen::Index j = 0; j < d; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) mu[j] += X(i, j) / n;
            for (Eigen::Index i = 0; i < n; ++i) sd[j] += (X(i, j) - mu[j]) * (X(i, j) - mu[j]) / n;
            sd[j] = std::sqrt(sd[j]);
        }
        const Matrix Q = random_matrix(50, d, rng);
        for (Eigen::Index q = 0; q < Q.rows(); ++q) {
            std::vector<std::pair<double, Eigen::Index>> dist;
            for (Eigen::Index i = 0; i < n; ++i) {
                double s = 0;
                for (Eigen::Index j = 0; j < d; ++j) {
                    const double diff = (X(i, j) - mu[j]) / sd[j] - (Q(q, j) - mu[j]) / sd[j];
                    s += diff * diff;
                }
                dist.push_back({s, i});
            }
            std::sort(dist.begin(), dist.end());
            std::vector<int> votes(C, 0);
            for (int i = 0; i < k; ++i) ++votes[y[dist[i].second]];
            const int want = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
            CHECK(model.predict(row_of(Q, q)) == want);
            CHECK(model.score(row_of(Q, q))[want] == doctest::Approx(votes[want] / static_cast<double>(k)));
        }
    }
}

TEST_CASE("knn on a five point line") {
    Matrix X(5, 1);
    X << 0.0, 1.0, 2.0, 10.0, 11.0;
    const Labels y{0, 0, 1, 1, 1};
    ClassifierSpec spec = small_spec(Family::Knn);
    spec.knn.k = 3;
    const auto m = train(spec, X, y, 0);
    // Neighbours of 0.4 are 0, 1, 2 -> labels 0, 0, 1.
    CHECK(m.predict(std::vector<double>{0.4}) == 0);
    CHECK(m.score(std::vector<double>{0.4})[0] == doctest::Approx(2.0 / 3));
    CHECK(m.predict(std::vector<double>{9.0}) == 1);
    spec.knn.k = 1;
    const auto m1 = train(spec, X, y, 0);
    for (Eigen::Index i = 0; i < 5; ++i) CHECK(m1.predict(row_of(X, i)) == y[i]);
}

TEST_CASE("knn vote fraction") {
    Matrix X(6, 1);
    X << 0.0, 0.1, 0.2, 0.3, 0.4, 50.0;
    const Labels y{1, 1, 1, 0, 0, 0};
    ClassifierSpec spec = small_spec(Family::Knn);
    spec.knn.k = 5;
    const auto m = train(spec, X, y, 0);
    CHECK(m.score(std::vector<double>{0.2})[1] == doctest::Approx(0.6));
}

TEST_CASE("unbounded tree fits XOR and any consistent data") {
    Matrix X(4, 2);
    X << 0, 0, 0, 1, 1, 0, 1, 1;
    const Labels y{0, 1, 1, 0};
    ClassifierSpec spec = small_spec(Family::DTree);
    spec.dtree.max_depth = 2;
    CHECK(accuracy(y, train(spec, X, y, 0).predict_all(X)) == 1.0);

    Rng rng(5);
    spec.dtree.max_depth = kUnlimitedDepth;
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix R = random_matrix(300, 5, rng);
        const Labels ry = random_labels(300, 4, rng);
        CHECK(accuracy(ry, train(spec, R, ry, 0).predict_all(R)) == 1.0);
    }
    // Integer-valued features with duplicate rows sharing a label.
    Matrix D(200, 3);
    Labels dy(200);
    for (Eigen::Index i = 0; i < 200; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) D(i, j) = static_cast<double>(rng.index(4));
        dy[i] = static_cast<int>(D(i, 0) * 16 + D(i, 1) * 4 + D(i, 2)) % 3;
    }
    CHECK(accuracy(dy, train(spec, D, dy, 0).predict_all(D)) == 1.0);
}

TEST_CASE("cart importances sum to the root impurity decrease") {
    Rng rng(6);
    const Matrix X = random_matrix(150, 4, rng);
    const Labels y = random_labels(150, 3, rng);
    std::vector<int> rows(150);
    std::iota(rows.begin(), rows.end(), 0);
    const auto fit = fit_cart(X, y, 3, rows, kUnlimitedDepth, 1, 0, 0);
    // A pure-leaf tree removes all of the root Gini impurity.
    CHECK(std::accumulate(fit.importance.begin(), fit.importance.end(), 0.0) ==
          doctest::Approx(1.0 - 3 * (50.0 / 150) * (50.0 / 150)).epsilon(1e-9));
}

TEST_CASE("gbdt training loss never increases") {
    for (auto growth : {Growth::LevelWise, Growth::LeafWise}) {
        Rng rng(growth == Growth::LevelWise ? 1 : 2);
        const Matrix X = random_matrix(300, 6, rng);
        Labels y(300);
        for (Eigen::Index i = 0; i < 300; ++i) {
            const double s = X(i, 0) + X(i, 1) * X(i, 2) + 0.8 * rng.normal();
            y[i] = s < -0.5 ? 0 : (s < 0.5 ? 1 : 2);
        }
        ClassifierSpec spec = small_spec(Family::Gbdt);
        spec.gbdt.growth = growth;
        spec.gbdt.rounds = 200;
        spec.gbdt.learning_rate = 0.3;
        const auto model = train(spec, X, y, 0);
        const auto& hist = std::get<GbdtModel>(model.params).loss_history;
        REQUIRE(hist.size() == 200);
        for (std::size_t r = 1; r < hist.size(); ++r) CHECK(hist[r] <= hist[r - 1]);
        CHECK(hist.back() < hist.front());
        // The recorded loss is the loss of the stored model.
        Matrix raw(300, 3);
        const auto& gm = std::get<GbdtModel>(model.params);
        for (Eigen::Index i = 0; i < 300; ++i) {
            for (int c = 0; c < 3; ++c) {
                double v = gm.base_score[c];
                for (const auto& round : gm.rounds) v += round[c].leaf_for(row_of(X, i)).value[0];
                raw(i, c) = v;
            }
        }
        CHECK(softmax_loss(raw, y) == doctest::Approx(hist.back()).epsilon(1e-9));
    }
}

TEST_CASE("smo solution satisfies the KKT conditions") {
    Rng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::Index n = 80;
        Matrix X = random_matrix(n, 3, rng);
        std::vector<double> y(n);
        for (Eigen::Index i = 0; i < n; ++i) y[i] = X(i, 0) + 0.5 * X(i, 1) * X(i, 1) + 0.3 * rng.normal() > 0.4 ? 1 : -1;
        const double C = trial % 2 ? 10.0 : 1.0;
        const Matrix K = rbf_kernel(X, X, 0.5);
        const auto res = solve_smo(K, y, C, 1e-3, 1'000'000);
        double balance = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            CHECK(res.alpha[i] >= 0.0);
            CHECK(res.alpha[i] <= C);
            balance += res.alpha[i] * y[i];
        }
        CHECK(std::abs(balance) < 1e-9);
        for (Eigen::Index i = 0; i < n; ++i) {
            double f = res.bias;
            for (Eigen::Index j = 0; j < n; ++j) f += res.alpha[j] * y[j] * K(i, j);
            const double margin = y[i] * f;
            const double a = res.alpha[i];
            if (a > 1e-12 && a < C - 1e-12) {
                CHECK(std::abs(margin - 1.0) <= 1e-3);
            } else if (a <= 1e-12) {
                CHECK(margin >= 1.0 - 1e-3);
            } else {
                CHECK(margin <= 1.0 + 1e-3);
            }
        }
    }
}

TEST_CASE("scores sum to one for every family") {
    Rng rng(8);
    const Matrix X = random_matrix(90, 4, rng);
    const Labels y = random_labels(90, 3, rng);
    const Matrix Q = random_matrix(30, 4, rng);
    for (auto f : kFamilies) {
        const auto m = train(small_spec(f), X, y, 1);
        for (Eigen::Index i = 0; i < Q.rows(); ++i) {
            const auto s = m.score(row_of(Q, i));
            CHECK(std::accumulate(s.begin(), s.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
        }
        CHECK_THROWS_AS(m.score(std::vector<double>{1.0}), ValidationError);
    }
}

TEST_CASE("training is deterministic and serialization round-trips") {
    Rng rng(10);
    const auto bench = make_feature_benchmark(120, 60, 8, 3, 3, 4);
    const Matrix Q = random_matrix(100, 8, rng);
    for (auto f : kFamilies) {
        INFO(to_string(f));
        const auto a = train(small_spec(f), bench.X_train, bench.y_train, 1);
        const auto b = train(small_spec(f), bench.X_train, bench.y_train, 1);
        const std::string bytes = a.serialize();
        CHECK(bytes == b.serialize());
        const auto back = TrainedModel::deserialize(bytes);
        CHECK(back.serialize() == bytes);
        CHECK(back.predict_all(Q) == a.predict_all(Q));
        const auto ca = confusion(bench.y_test, a.predict_all(bench.X_test), 3);
        const auto cb = confusion(bench.y_test, back.predict_all(bench.X_test), 3);
        CHECK(ca.counts == cb.counts);
        CHECK_THROWS_AS(TrainedModel::deserialize(bytes.substr(0, bytes.size() / 2)), FormatError);
        CHECK_THROWS_AS(TrainedModel::deserialize("{}"), FormatError);
    }
}

TEST_CASE("tree families ignore positive rescaling of a feature") {
    const auto bench = make_feature_benchmark(150, 80, 6, 3, 3, 11);
    for (auto f : {Family::DTree, Family::RForest, Family::Gbdt}) {
        for (double c : {4.0, 0.5, 3.7}) {
            for (Eigen::Index col = 0; col < 6; col += 5) {
                Matrix Xs = bench.X_train, Ts = bench.X_test;
                Xs.col(col) *= c;
                Ts.col(col) *= c;
                const auto a = train(small_spec(f), bench.X_train, bench.y_train, 3);
                const auto b = train(small_spec(f), Xs, bench.y_train, 3);
                INFO(to_string(f) << " c=" << c);
                CHECK(a.predict_all(bench.X_test) == b.predict_all(Ts));
            }
        }
    }
}

TEST_CASE("forest records out-of-bag accuracy and importances") {
    const auto bench = make_feature_benchmark(200, 10, 10, 2, 2, 5);
    ForestParams p;
    p.trees = 40;
    const auto fm = fit_forest(p, bench.X_train, bench.y_train, 2, 1);
    CHECK(fm.trees.size() == 40);
    CHECK(fm.oob_accuracy > 0.6);
    CHECK(fm.importances.size() == 10);
    for (double v : fm.importances) CHECK(v >= 0.0);
}

TEST_CASE("train rejects single-class and non-finite data") {
    Matrix X(4, 2);
    X << 1, 2, 3, 4, 5, 6, 7, 8;
    CHECK_THROWS_AS(train(small_spec(Family::Logistic), X, {1, 1, 1, 1}, 0), TrainingError);
    X(2, 1) = std::nan("");
    CHECK_THROWS_AS(train(small_spec(Family::Logistic), X, {0, 1, 0, 1}, 0), ValidationError);
    Matrix Y(3, 1);
    Y << 1, 2, 3;
    CHECK_THROWS_AS(train(small_spec(Family::Knn), Y, {0, 1}, 0), ValidationError);
    CHECK_THROWS_AS(train(small_spec(Family::Knn), Y, {0, -1, 1}, 0), ValidationError);
}

TEST_CASE("spec json round trip and validation") {
    for (auto f : kFamilies) {
        ClassifierSpec s = small_spec(f);
        s.logistic.loss = LossKind::Focal;
        s.logistic.gamma = 1.25;
        s.gbdt.growth = Growth::LeafWise;
        s.dtree.max_depth = kUnlimitedDepth;
        const auto back = spec_from_json(spec_to_json(s));
        CHECK(spec_to_json(back) == spec_to_json(s));
        CHECK(back.family == f);
    }
    CHECK(spec_from_json(nlohmann::json("svm")).family == Family::Svm);
    ClassifierSpec bad;
    bad.family = Family::Knn;
    bad.knn.k = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_THROWS_AS(parse_family("mlp"), ConfigError);
}
