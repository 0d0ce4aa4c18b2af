#include "mcsa/classifier.hpp"

#include "mcsa/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mcsa {

using nlohmann::json;

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::GradientBoosting: return "gradient_boosting";
        case Algorithm::RandomForest: return "random_forest";
        case Algorithm::ExtraTrees: return "extra_trees";
        case Algorithm::LogisticRegression: return "logistic_regression";
        case Algorithm::KNearest: return "knn";
    }
    throw Error("unknown algorithm id");
}

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "gradient_boosting") return Algorithm::GradientBoosting;
    if (s == "random_forest") return Algorithm::RandomForest;
    if (s == "extra_trees") return Algorithm::ExtraTrees;
    if (s == "logistic_regression") return Algorithm::LogisticRegression;
    if (s == "knn") return Algorithm::KNearest;
    throw Error("unknown algorithm '" + s + "'");
}

ClassifierSpec ClassifierSpec::defaults(Algorithm a) {
    ClassifierSpec s;
    s.algorithm = a;
    switch (a) {
        case Algorithm::GradientBoosting:
            s.params = {{"estimators", 100.0},
                        {"max_leaves", 8.0},
                        {"learning_rate", std::exp(-2.0)},
                        {"min_node_weight", 1.0}};
            break;
        case Algorithm::RandomForest:
        case Algorithm::ExtraTrees:
            s.params = {{"n_trees", 50.0}, {"max_depth", 0.0}, {"min_samples_leaf", 1.0}};
            break;
        case Algorithm::LogisticRegression:
            s.params = {{"l2", 1e-2}, {"max_iter", 100.0}};
            break;
        case Algorithm::KNearest:
            s.params = {{"k", 5.0}, {"manhattan", 0.0}};
            break;
    }
    return s;
}

double ClassifierSpec::param(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end())
        throw Error("classifier spec " + to_string(algorithm) + ": missing parameter '" + name +
                    "'");
    return it->second;
}

json ClassifierSpec::to_json() const {
    json j;
    j["algorithm"] = to_string(algorithm);
    j["params"] = params;
    return j;
}

ClassifierSpec ClassifierSpec::from_json(const json& j) {
    ClassifierSpec s;
    s.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    for (const auto& [k, v] : j.at("params").items()) s.params[k] = v.get<double>();
    return s;
}

double Tree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& nd = nodes[static_cast<std::size_t>(node)];
        node = row[nd.feature] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(node)].value;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Best SSE-reducing split of `rows` on continuous targets, exact greedy over
// every feature threshold. Children must each hold >= min_count rows.
SplitChoice best_sse_split(const Matrix& x, const Vector& target,
                           const std::vector<int>& rows, Index min_count) {
    SplitChoice best;
    const auto n = static_cast<Index>(rows.size());
    if (n < 2 * min_count) return best;

    double total = 0.0;
    for (int r : rows) total += target[r];
    const double parent = total * total / static_cast<double>(n);

    std::vector<int> order(rows);
    for (Index f = 0; f < x.cols(); ++f) {
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return x(a, f) < x(b, f); });
        double left_sum = 0.0;
        for (Index i = 0; i + 1 < n; ++i) {
            left_sum += target[order[static_cast<std::size_t>(i)]];
            const double lo = x(order[static_cast<std::size_t>(i)], f);
            const double hi = x(order[static_cast<std::size_t>(i + 1)], f);
            if (lo == hi) continue;
            const Index nl = i + 1, nr = n - nl;
            if (nl < min_count || nr < min_count) continue;
            const double right_sum = total - left_sum;
            const double gain = left_sum * left_sum / static_cast<double>(nl) +
                                right_sum * right_sum / static_cast<double>(nr) - parent;
            if (gain > best.gain + 1e-12) {
                best.feature = static_cast<int>(f);
                best.threshold = lo + (hi - lo) / 2.0;
                best.gain = gain;
            }
        }
    }
    return best;
}

struct GrowingLeaf {
    int node_id;
    std::vector<int> rows;
    SplitChoice split;
};

// Regression tree on gradient targets, grown leaf-wise (largest SSE gain
// first) to at most max_leaves leaves. Leaf value is the Newton step
// sum(residual)/sum(hessian), scaled by the learning rate.
Tree fit_gb_tree(const Matrix& x, const Vector& residual, const Vector& hessian,
                 int max_leaves, Index min_count, double learning_rate) {
    Tree tree;
    auto leaf_value = [&](const std::vector<int>& rows) {
        double num = 0.0, den = 0.0;
        for (int r : rows) {
            num += residual[r];
            den += hessian[r];
        }
        return den < 1e-12 ? 0.0 : learning_rate * num / den;
    };

    std::vector<int> all(static_cast<std::size_t>(x.rows()));
    std::iota(all.begin(), all.end(), 0);
    tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, leaf_value(all)});

    std::vector<GrowingLeaf> leaves;
    leaves.push_back({0, std::move(all), {}});
    leaves.back().split = best_sse_split(x, residual, leaves.back().rows, min_count);

    int n_leaves = 1;
    while (n_leaves < max_leaves) {
        int pick = -1;
        for (std::size_t i = 0; i < leaves.size(); ++i)
            if (leaves[i].split.feature >= 0 &&
                (pick < 0 || leaves[i].split.gain > leaves[static_cast<std::size_t>(pick)].split.gain))
                pick = static_cast<int>(i);
        if (pick < 0) break;

        GrowingLeaf leaf = std::move(leaves[static_cast<std::size_t>(pick)]);
        leaves.erase(leaves.begin() + pick);

        std::vector<int> left_rows, right_rows;
        for (int r : leaf.rows)
            (x(r, leaf.split.feature) <= leaf.split.threshold ? left_rows : right_rows)
                .push_back(r);

        auto& parent = tree.nodes[static_cast<std::size_t>(leaf.node_id)];
        parent.feature = leaf.split.feature;
        parent.threshold = leaf.split.threshold;
        parent.left = static_cast<int>(tree.nodes.size());
        parent.right = parent.left + 1;
        tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, leaf_value(left_rows)});
        tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, leaf_value(right_rows)});

        GrowingLeaf l{parent.left, std::move(left_rows), {}};
        GrowingLeaf r{parent.right, std::move(right_rows), {}};
        l.split = best_sse_split(x, residual, l.rows, min_count);
        r.split = best_sse_split(x, residual, r.rows, min_count);
        leaves.push_back(std::move(l));
        leaves.push_back(std::move(r));
        ++n_leaves;
    }
    return tree;
}

FittedModel fit_gradient_boosting(const ClassifierSpec& spec, const Matrix& x,
                                  const std::vector<int>& y) {
    const auto n = x.rows();
    const int rounds = static_cast<int>(spec.param("estimators"));
    const int max_leaves = static_cast<int>(spec.param("max_leaves"));
    const double lr = spec.param("learning_rate");
    const auto min_count = static_cast<Index>(spec.param("min_node_weight"));

    FittedModel m;
    m.spec = spec;
    double pos = 0.0;
    for (int v : y) pos += v;
    const double prior = std::clamp(pos / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
    m.base_score = std::log(prior / (1.0 - prior));

    Vector score = Vector::Constant(n, m.base_score);
    Vector residual(n), hessian(n);
    for (int round = 0; round < rounds; ++round) {
        for (Index i = 0; i < n; ++i) {
            const double p = sigmoid(score[i]);
            residual[i] = static_cast<double>(y[static_cast<std::size_t>(i)]) - p;
            hessian[i] = std::max(p * (1.0 - p), 1e-12);
        }
        Tree tree = fit_gb_tree(x, residual, hessian, max_leaves, min_count, lr);
        for (Index i = 0; i < n; ++i) score[i] += tree.predict(x.row(i));
        m.trees.push_back(std::move(tree));
    }
    return m;
}

// Gini impurity split for forests. RF searches every threshold of a random
// feature subset; ETC draws one random threshold per candidate feature.
SplitChoice best_gini_split(const Matrix& x, const std::vector<int>& y,
                            const std::vector<int>& rows, const std::vector<Index>& features,
                            Index min_leaf, bool random_threshold, Rng& rng) {
    SplitChoice best;
    const auto n = static_cast<Index>(rows.size());
    double pos = 0.0;
    for (int r : rows) pos += y[static_cast<std::size_t>(r)];
    const double parent_gini =
        1.0 - (pos / static_cast<double>(n)) * (pos / static_cast<double>(n)) -
        ((static_cast<double>(n) - pos) / static_cast<double>(n)) *
            ((static_cast<double>(n) - pos) / static_cast<double>(n));

    auto eval = [&](Index f, double thr) {
        Index nl = 0;
        double pl = 0.0;
        for (int r : rows) {
            if (x(r, f) <= thr) {
                ++nl;
                pl += y[static_cast<std::size_t>(r)];
            }
        }
        const Index nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) return;
        const double pr = pos - pl;
        auto gini = [](double p1, double cnt) {
            const double a = p1 / cnt, b = (cnt - p1) / cnt;
            return 1.0 - a * a - b * b;
        };
        const double weighted = (static_cast<double>(nl) * gini(pl, static_cast<double>(nl)) +
                                 static_cast<double>(nr) * gini(pr, static_cast<double>(nr))) /
                                static_cast<double>(n);
        const double gain = parent_gini - weighted;
        if (gain > best.gain + 1e-12) {
            best.feature = static_cast<int>(f);
            best.threshold = thr;
            best.gain = gain;
        }
    };

    for (Index f : features) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (int r : rows) {
            lo = std::min(lo, x(r, f));
            hi = std::max(hi, x(r, f));
        }
        if (lo == hi) continue;
        if (random_threshold) {
            eval(f, lo + rng.uniform() * (hi - lo));
        } else {
            std::vector<double> vals;
            vals.reserve(rows.size());
            for (int r : rows) vals.push_back(x(r, f));
            std::sort(vals.begin(), vals.end());
            vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
            for (std::size_t i = 0; i + 1 < vals.size(); ++i)
                eval(f, vals[i] + (vals[i + 1] - vals[i]) / 2.0);
        }
    }
    return best;
}

void grow_forest_node(Tree& tree, int node_id, const Matrix& x, const std::vector<int>& y,
                      std::vector<int>&& rows, int depth, int max_depth, Index min_leaf,
                      Index n_candidates, bool random_threshold, Rng& rng) {
    auto& node = tree.nodes[static_cast<std::size_t>(node_id)];
    double pos = 0.0;
    for (int r : rows) pos += y[static_cast<std::size_t>(r)];
    node.value = pos / static_cast<double>(rows.size());

    const bool pure = pos == 0.0 || pos == static_cast<double>(rows.size());
    if (pure || (max_depth > 0 && depth >= max_depth) ||
        static_cast<Index>(rows.size()) < 2 * min_leaf)
        return;

    // Random feature subset; falls back to all features so that a consistent
    // dataset always reaches pure leaves.
    std::vector<Index> all_features(static_cast<std::size_t>(x.cols()));
    std::iota(all_features.begin(), all_features.end(), 0);
    std::vector<Index> subset(all_features);
    rng.shuffle(subset);
    subset.resize(static_cast<std::size_t>(std::min<Index>(n_candidates, x.cols())));
    std::sort(subset.begin(), subset.end());

    SplitChoice split = best_gini_split(x, y, rows, subset, min_leaf, random_threshold, rng);
    if (split.feature < 0)
        split = best_gini_split(x, y, rows, all_features, min_leaf, false, rng);
    if (split.feature < 0) return;

    std::vector<int> left_rows, right_rows;
    for (int r : rows) (x(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);

    const int left_id = static_cast<int>(tree.nodes.size());
    {
        auto& nd = tree.nodes[static_cast<std::size_t>(node_id)];
        nd.feature = split.feature;
        nd.threshold = split.threshold;
        nd.left = left_id;
        nd.right = left_id + 1;
    }
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    grow_forest_node(tree, left_id, x, y, std::move(left_rows), depth + 1, max_depth, min_leaf,
                     n_candidates, random_threshold, rng);
    grow_forest_node(tree, left_id + 1, x, y, std::move(right_rows), depth + 1, max_depth,
                     min_leaf, n_candidates, random_threshold, rng);
}

FittedModel fit_forest(const ClassifierSpec& spec, const Matrix& x, const std::vector<int>& y,
                       std::uint64_t seed, bool random_threshold) {
    FittedModel m;
    m.spec = spec;
    const int n_trees = static_cast<int>(spec.param("n_trees"));
    const int max_depth = static_cast<int>(spec.param("max_depth"));
    const auto min_leaf = static_cast<Index>(spec.param("min_samples_leaf"));
    const auto n_candidates = static_cast<Index>(
        std::ceil(std::sqrt(static_cast<double>(x.cols()))));

    for (int t = 0; t < n_trees; ++t) {
        Rng rng(derive_seed(seed, "tree", static_cast<std::uint64_t>(t)));
        std::vector<int> rows(static_cast<std::size_t>(x.rows()));
        std::iota(rows.begin(), rows.end(), 0);
        Tree tree;
        tree.nodes.emplace_back();
        grow_forest_node(tree, 0, x, y, std::move(rows), 0, max_depth, min_leaf, n_candidates,
                         random_threshold, rng);
        m.trees.push_back(std::move(tree));
    }
    return m;
}

FittedModel fit_knn(const ClassifierSpec& spec, const Matrix& x, const std::vector<int>& y) {
    FittedModel m;
    m.spec = spec;
    m.train_x = x;
    m.train_y = y;
    return m;
}

}  // namespace

Vector fit_logistic_weights(const Matrix& x, const std::vector<int>& y, double l2,
                            int max_iter) {
    const Index n = x.rows(), d = x.cols();
    Matrix xa(n, d + 1);
    xa.leftCols(d) = x;
    xa.col(d).setOnes();

    Vector w = Vector::Zero(d + 1);
    Vector yv(n);
    for (Index i = 0; i < n; ++i) yv[i] = y[static_cast<std::size_t>(i)];

    for (int iter = 0; iter < max_iter; ++iter) {
        Vector p = (xa * w).unaryExpr([](double z) { return sigmoid(z); });
        Vector grad = xa.transpose() * (p - yv);
        grad.head(d) += l2 * w.head(d);  // intercept unpenalized
        if (grad.norm() < 1e-9) break;
        Vector wdiag = p.array() * (1.0 - p.array()) + 1e-9;
        Matrix h = xa.transpose() * wdiag.asDiagonal() * xa;
        h.topLeftCorner(d, d) += l2 * Matrix::Identity(d, d);
        w -= h.ldlt().solve(grad);
    }
    return w;
}

FittedModel fit_classifier(const ClassifierSpec& spec, const Matrix& x,
                           const std::vector<int>& y, std::uint64_t seed) {
    if (x.rows() == 0 || static_cast<std::size_t>(x.rows()) != y.size())
        throw Error("fit_classifier: feature/label row mismatch");
    if (!x.allFinite()) throw Error("fit_classifier: NaN/Inf in features");
    const bool has0 = std::find(y.begin(), y.end(), 0) != y.end();
    const bool has1 = std::find(y.begin(), y.end(), 1) != y.end();
    if (!has0 || !has1) throw Error("fit_classifier: single-class training set");

    FittedModel m;
    switch (spec.algorithm) {
        case Algorithm::GradientBoosting:
            m = fit_gradient_boosting(spec, x, y);
            break;
        case Algorithm::RandomForest:
            m = fit_forest(spec, x, y, seed, false);
            break;
        case Algorithm::ExtraTrees:
            m = fit_forest(spec, x, y, seed, true);
            break;
        case Algorithm::LogisticRegression: {
            m.spec = spec;
            m.weights = fit_logistic_weights(x, y, spec.param("l2"),
                                             static_cast<int>(spec.param("max_iter")));
            break;
        }
        case Algorithm::KNearest:
            m = fit_knn(spec, x, y);
            break;
    }
    std::uint64_t h = fnv1a(static_cast<double>(x.rows()));
    h = fnv1a(x.data(), static_cast<std::size_t>(x.size()) * sizeof(double), h);
    m.trained_on = h;
    return m;
}

Vector FittedModel::predict_score(const Matrix& x) const {
    const Index n = x.rows();
    Vector s(n);
    switch (spec.algorithm) {
        case Algorithm::GradientBoosting:
            for (Index i = 0; i < n; ++i) {
                double f = base_score;
                for (const auto& t : trees) f += t.predict(x.row(i));
                s[i] = sigmoid(f);
            }
            break;
        case Algorithm::RandomForest:
        case Algorithm::ExtraTrees:
            for (Index i = 0; i < n; ++i) {
                double acc = 0.0;
                for (const auto& t : trees) acc += t.predict(x.row(i));
                s[i] = acc / static_cast<double>(trees.size());
            }
            break;
        case Algorithm::LogisticRegression:
            for (Index i = 0; i < n; ++i) {
                double z = weights[weights.size() - 1];
                z += x.row(i).dot(weights.head(weights.size() - 1).transpose());
                s[i] = sigmoid(z);
            }
            break;
        case Algorithm::KNearest:
            for (Index i = 0; i < n; ++i) s[i] = knn_vote(x.row(i)).second;
            break;
    }
    return s;
}

std::vector<int> FittedModel::predict(const Matrix& x) const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(x.rows()));
    if (spec.algorithm == Algorithm::KNearest) {
        for (Index i = 0; i < x.rows(); ++i) out.push_back(knn_vote(x.row(i)).first);
        return out;
    }
    Vector s = predict_score(x);
    for (Index i = 0; i < s.size(); ++i) out.push_back(s[i] >= 0.5 ? 1 : 0);
    return out;
}

std::pair<int, double> FittedModel::knn_vote(
    const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    const Index n = train_x.rows();
    const auto k = std::min<Index>(static_cast<Index>(spec.param("k")), n);
    const bool manhattan = spec.param("manhattan") != 0.0;

    std::vector<std::pair<double, Index>> dist;
    dist.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const double d = manhattan ? (train_x.row(i) - row).cwiseAbs().sum()
                                   : (train_x.row(i) - row).squaredNorm();
        dist.emplace_back(d, i);
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

    Index faulty = 0;
    double mean_d0 = 0.0, mean_d1 = 0.0;
    for (Index i = 0; i < k; ++i) {
        if (train_y[static_cast<std::size_t>(dist[static_cast<std::size_t>(i)].second)] == 1) {
            ++faulty;
            mean_d1 += dist[static_cast<std::size_t>(i)].first;
        } else {
            mean_d0 += dist[static_cast<std::size_t>(i)].first;
        }
    }
    const Index healthy = k - faulty;
    int label;
    if (faulty > healthy) {
        label = 1;
    } else if (faulty < healthy) {
        label = 0;
    } else {
        label = mean_d1 / static_cast<double>(faulty) < mean_d0 / static_cast<double>(healthy)
                    ? 1
                    : 0;
    }
    return {label, static_cast<double>(faulty) / static_cast<double>(k)};
}

namespace {

json tree_to_json(const Tree& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes)
        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    return nodes;
}

Tree tree_from_json(const json& j) {
    Tree t;
    for (const auto& n : j)
        t.nodes.push_back(TreeNode{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                                   n.at(3).get<int>(), n.at(4).get<double>()});
    return t;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    const auto rows = static_cast<Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Index>(j.at(0).size()) : 0;
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c)
            m(r, c) = j.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
    return m;
}

}  // namespace

json FittedModel::to_json() const {
    json j;
    j["spec"] = spec.to_json();
    j["base_score"] = base_score;
    j["trained_on"] = trained_on;
    json trees_json = json::array();
    for (const auto& t : trees) trees_json.push_back(tree_to_json(t));
    j["trees"] = std::move(trees_json);
    json w = json::array();
    for (Index i = 0; i < weights.size(); ++i) w.push_back(weights[i]);
    j["weights"] = std::move(w);
    j["train_x"] = matrix_to_json(train_x);
    j["train_y"] = train_y;
    return j;
}

FittedModel FittedModel::from_json(const json& j) {
    FittedModel m;
    m.spec = ClassifierSpec::from_json(j.at("spec"));
    m.base_score = j.at("base_score").get<double>();
    m.trained_on = j.at("trained_on").get<std::uint64_t>();
    for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t));
    const auto& w = j.at("weights");
    m.weights.resize(static_cast<Index>(w.size()));
    for (Index i = 0; i < m.weights.size(); ++i)
        m.weights[i] = w.at(static_cast<std::size_t>(i)).get<double>();
    m.train_x = matrix_from_json(j.at("train_x"));
    m.train_y = j.at("train_y").get<std::vector<int>>();
    return m;
}

}  // namespace mcsa
