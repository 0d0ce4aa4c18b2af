#include "mcsa/classifier.hpp"
#include "mcsa/preprocess.hpp"
#include "mcsa/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace mcsa;

namespace {

struct Blobs {
    Matrix x;
    std::vector<int> y;
};

// Two well-separated 2-D Gaussian blobs (centers +-5 sigma apart).
Blobs separable_blobs(Index n_per_class, std::uint64_t seed) {
    Rng rng(seed);
    Blobs b;
    b.x.resize(2 * n_per_class, 2);
    for (Index i = 0; i < 2 * n_per_class; ++i) {
        const int label = i < n_per_class ? 0 : 1;
        const double cx = label == 0 ? -2.5 : 2.5;
        b.x(i, 0) = cx + rng.normal();
        b.x(i, 1) = rng.normal();
        b.y.push_back(label);
    }
    return b;
}

// XOR: four clusters, opposite corners share a label. Stumps cannot solve it.
Blobs xor_blobs(Index n_per_cluster, std::uint64_t seed) {
    Rng rng(seed);
    Blobs b;
    b.x.resize(4 * n_per_cluster, 2);
    Index r = 0;
    for (int cx : {-1, 1})
        for (int cy : {-1, 1}) {
            const int label = cx * cy > 0 ? 1 : 0;
            for (Index i = 0; i < n_per_cluster; ++i, ++r) {
                b.x(r, 0) = 3.0 * cx + 0.3 * rng.normal();
                b.x(r, 1) = 3.0 * cy + 0.3 * rng.normal();
                b.y.push_back(label);
            }
        }
    return b;
}

double training_accuracy(const FittedModel& m, const Blobs& b) {
    const auto preds = m.predict(b.x);
    Index hit = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) hit += preds[i] == b.y[i];
    return static_cast<double>(hit) / static_cast<double>(preds.size());
}

double log_loss(const Vector& scores, const std::vector<int>& y) {
    double acc = 0.0;
    for (Index i = 0; i < scores.size(); ++i) {
        const double p = std::clamp(scores[i], 1e-12, 1.0 - 1e-12);
        acc -= y[static_cast<std::size_t>(i)] == 1 ? std::log(p) : std::log(1.0 - p);
    }
    return acc / static_cast<double>(scores.size());
}

}  // namespace

TEST_CASE("logistic regression separates linear blobs") {
    const Blobs b = separable_blobs(100, 1);
    const auto model =
        fit_classifier(ClassifierSpec::defaults(Algorithm::LogisticRegression), b.x, b.y, 0);
    CHECK(training_accuracy(model, b) >= 0.98);
}

TEST_CASE("gradient boosting") {
    SUBCASE("solves XOR with enough leaves") {
        const Blobs b = xor_blobs(30, 2);
        auto spec = ClassifierSpec::defaults(Algorithm::GradientBoosting);
        spec.params["max_leaves"] = 4.0;
        const auto model = fit_classifier(spec, b.x, b.y, 0);
        CHECK(training_accuracy(model, b) >= 0.95);
    }
    SUBCASE("stumps cannot solve XOR") {
        const Blobs b = xor_blobs(30, 2);
        auto spec = ClassifierSpec::defaults(Algorithm::GradientBoosting);
        spec.params["max_leaves"] = 2.0;
        const auto model = fit_classifier(spec, b.x, b.y, 0);
        CHECK(training_accuracy(model, b) <= 0.8);
    }
    SUBCASE("training log-loss is non-increasing over rounds for lr <= 0.5") {
        const Blobs b = separable_blobs(60, 3);
        for (double lr : {std::exp(-2.0), 0.5}) {
            auto spec = ClassifierSpec::defaults(Algorithm::GradientBoosting);
            spec.params["learning_rate"] = lr;
            spec.params["estimators"] = 40.0;
            const auto model = fit_classifier(spec, b.x, b.y, 0);
            // replay the staged scores tree by tree
            Vector staged = Vector::Constant(b.x.rows(), model.base_score);
            double prev = log_loss(staged.unaryExpr([](double z) {
                              return 1.0 / (1.0 + std::exp(-z));
                          }),
                          b.y);
            for (const auto& tree : model.trees) {
                for (Index i = 0; i < b.x.rows(); ++i) staged[i] += tree.predict(b.x.row(i));
                const double cur = log_loss(staged.unaryExpr([](double z) {
                                       return 1.0 / (1.0 + std::exp(-z));
                                   }),
                                   b.y);
                CHECK(cur <= prev + 1e-9);
                prev = cur;
            }
        }
    }
    SUBCASE("margin 0 scores 0.5 and scores stay finite") {
        const Blobs b = separable_blobs(30, 4);
        auto spec = ClassifierSpec::defaults(Algorithm::GradientBoosting);
        spec.params["estimators"] = 0.0;  // no trees: score = sigmoid(base)
        const auto model = fit_classifier(spec, b.x, b.y, 0);
        const Vector s = model.predict_score(b.x);
        CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-9));  // balanced prior
        CHECK(s.allFinite());
    }
    SUBCASE("deep blob interiors score near 0 or 1") {
        const Blobs b = separable_blobs(100, 5);
        const auto model =
            fit_classifier(ClassifierSpec::defaults(Algorithm::GradientBoosting), b.x, b.y, 0);
        Matrix probe(2, 2);
        probe << -3.0, 0.0, 3.0, 0.0;
        const Vector s = model.predict_score(probe);
        CHECK(s[0] <= 0.05);
        CHECK(s[1] >= 0.95);
    }
    SUBCASE("min node weight blocks splits below the threshold") {
        const Blobs b = separable_blobs(10, 6);
        auto spec = ClassifierSpec::defaults(Algorithm::GradientBoosting);
        spec.params["min_node_weight"] = 20.0;  // children cannot both reach 20
        const auto model = fit_classifier(spec, b.x, b.y, 0);
        for (const auto& tree : model.trees) CHECK(tree.nodes.size() == 1);
    }
}

TEST_CASE("forests memorize consistent data with one unlimited tree") {
    const Blobs b = separable_blobs(40, 7);
    for (Algorithm a : {Algorithm::RandomForest, Algorithm::ExtraTrees}) {
        auto spec = ClassifierSpec::defaults(a);
        spec.params["n_trees"] = 1.0;
        spec.params["max_depth"] = 0.0;
        spec.params["min_samples_leaf"] = 1.0;
        const auto model = fit_classifier(spec, b.x, b.y, 99);
        CHECK(training_accuracy(model, b) == 1.0);
    }
}

TEST_CASE("forests with defaults fit the blobs") {
    const Blobs b = separable_blobs(60, 8);
    for (Algorithm a : {Algorithm::RandomForest, Algorithm::ExtraTrees}) {
        const auto model = fit_classifier(ClassifierSpec::defaults(a), b.x, b.y, 1);
        CHECK(training_accuracy(model, b) >= 0.95);
    }
}

TEST_CASE("k-NN") {
    const Blobs b = separable_blobs(25, 9);
    SUBCASE("k=1 returns the training row's own label") {
        auto spec = ClassifierSpec::defaults(Algorithm::KNearest);
        spec.params["k"] = 1.0;
        const auto model = fit_classifier(spec, b.x, b.y, 0);
        const auto preds = model.predict(b.x);
        for (std::size_t i = 0; i < preds.size(); ++i) CHECK(preds[i] == b.y[i]);
    }
    SUBCASE("even-k vote ties resolve toward the nearer class") {
        Matrix x(4, 1);
        x << 0.0, 1.0, 10.0, 11.0;
        const std::vector<int> y{0, 0, 1, 1};
        auto spec = ClassifierSpec::defaults(Algorithm::KNearest);
        spec.params["k"] = 4.0;
        const auto model = fit_classifier(spec, x, y, 0);
        Matrix probe(2, 1);
        probe << 2.0, 9.0;  // all four neighbors vote, distance breaks the tie
        const auto preds = model.predict(probe);
        CHECK(preds[0] == 0);
        CHECK(preds[1] == 1);
    }
    SUBCASE("manhattan metric is honored where L1 and L2 disagree") {
        // From the origin: L1 prefers (0, 3.5) [3.5 < 4], L2 prefers (2, 2)
        // [sqrt(8) < 3.5].
        Matrix x(2, 2);
        x << 2.0, 2.0, 0.0, 3.5;
        const std::vector<int> y{0, 1};
        auto spec = ClassifierSpec::defaults(Algorithm::KNearest);
        spec.params["k"] = 1.0;
        Matrix probe = Matrix::Zero(1, 2);

        spec.params["manhattan"] = 1.0;
        CHECK(fit_classifier(spec, x, y, 0).predict(probe)[0] == 1);
        spec.params["manhattan"] = 0.0;
        CHECK(fit_classifier(spec, x, y, 0).predict(probe)[0] == 0);
    }
}

TEST_CASE("k-NN neighbor sets survive an identity-range min-max scaler") {
    // Data already spanning [0,1] per column: the fitted min-max scaler is the
    // identity map, so scaling train and probe rows changes nothing.
    Rng rng(21);
    Matrix x(30, 3);
    std::vector<int> y;
    for (Index r = 0; r < 30; ++r) {
        for (Index c = 0; c < 3; ++c) x(r, c) = rng.uniform();
        y.push_back(static_cast<int>(rng.uniform_int(2)));
    }
    y[0] = 0;
    y[1] = 1;
    for (Index c = 0; c < 3; ++c) {  // pin the exact range
        x(0, c) = 0.0;
        x(1, c) = 1.0;
    }
    FeatureMatrix fm;
    fm.values = x;
    fm.columns = {"a", "b", "c"};
    fm.labels = y;
    fm.serials.assign(30, "S");
    fm.conditions.assign(30, {250.0, 0.0});
    fm.record_ids.assign(30, 0);
    const auto scaler = fit_scaler(fm, ScalingMethod::MinMax01);
    const Matrix scaled = scaler.transform(x);
    CHECK((scaled - x).cwiseAbs().maxCoeff() == 0.0);

    const auto model = fit_classifier(ClassifierSpec::defaults(Algorithm::KNearest), x, y, 0);
    const auto model_scaled =
        fit_classifier(ClassifierSpec::defaults(Algorithm::KNearest), scaled, y, 0);
    Matrix probe(5, 3);
    for (Index i = 0; i < probe.size(); ++i) probe(i / 3, i % 3) = rng.uniform();
    CHECK(model.predict(probe) == model_scaled.predict(scaler.transform(probe)));
}

TEST_CASE("fit rejects degenerate inputs") {
    Matrix x(4, 2);
    x.setRandom();
    CHECK_THROWS_WITH_AS(
        fit_classifier(ClassifierSpec::defaults(Algorithm::GradientBoosting), x,
                       {1, 1, 1, 1}, 0),
        doctest::Contains("single-class"), Error);
    Matrix bad = x;
    bad(0, 0) = std::nan("");
    CHECK_THROWS_WITH_AS(fit_classifier(ClassifierSpec::defaults(Algorithm::GradientBoosting),
                                        bad, {0, 1, 0, 1}, 0),
                         doctest::Contains("NaN"), Error);
}

TEST_CASE("determinism: same spec, data and seed give identical predictions") {
    const Blobs b = separable_blobs(50, 10);
    Matrix probe(20, 2);
    Rng rng(11);
    for (Index i = 0; i < probe.size(); ++i) probe(i / 2, i % 2) = 3.0 * rng.normal();
    for (Algorithm a : {Algorithm::GradientBoosting, Algorithm::RandomForest,
                        Algorithm::ExtraTrees, Algorithm::LogisticRegression,
                        Algorithm::KNearest}) {
        const auto m1 = fit_classifier(ClassifierSpec::defaults(a), b.x, b.y, 42);
        const auto m2 = fit_classifier(ClassifierSpec::defaults(a), b.x, b.y, 42);
        const Vector s1 = m1.predict_score(probe);
        const Vector s2 = m2.predict_score(probe);
        CHECK((s1 - s2).cwiseAbs().maxCoeff() == 0.0);
        CHECK(m1.to_json() == m2.to_json());
    }
}

TEST_CASE("fitted models round-trip through JSON") {
    const Blobs b = separable_blobs(30, 12);
    Matrix probe(10, 2);
    Rng rng(13);
    for (Index i = 0; i < probe.size(); ++i) probe(i / 2, i % 2) = 3.0 * rng.normal();
    for (Algorithm a : {Algorithm::GradientBoosting, Algorithm::RandomForest,
                        Algorithm::LogisticRegression, Algorithm::KNearest}) {
        const auto model = fit_classifier(ClassifierSpec::defaults(a), b.x, b.y, 7);
        const auto back = FittedModel::from_json(model.to_json());
        CHECK((model.predict_score(probe) - back.predict_score(probe)).cwiseAbs().maxCoeff() ==
              0.0);
        CHECK(model.predict(probe) == back.predict(probe));
    }
}
