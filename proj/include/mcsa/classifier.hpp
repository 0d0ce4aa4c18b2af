#pragma once

#include "mcsa/common.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mcsa {

enum class Algorithm { GradientBoosting, RandomForest, ExtraTrees, LogisticRegression, KNearest };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

/// Algorithm id plus a name -> value hyperparameter map.
struct ClassifierSpec {
    Algorithm algorithm = Algorithm::GradientBoosting;
    std::map<std::string, double> params;

    static ClassifierSpec defaults(Algorithm a);
    double param(const std::string& name) const;

    nlohmann::json to_json() const;
    static ClassifierSpec from_json(const nlohmann::json& j);
};

/// Binary decision tree stored as a flat node array. GB trees carry a
/// regression value per leaf, forest trees the faulty-class fraction.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;
    double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
};

/// Immutable fitted classifier. predict is a pure function of (model, input);
/// scores are P(faulty) in [0, 1].
struct FittedModel {
    ClassifierSpec spec;
    double base_score = 0.0;   // GB initial log-odds
    std::vector<Tree> trees;   // GB / RF / ETC
    Vector weights;            // logistic regression, intercept last
    Matrix train_x;            // k-NN
    std::vector<int> train_y;  // k-NN
    std::uint64_t trained_on = 0;

    std::vector<int> predict(const Matrix& x) const;
    Vector predict_score(const Matrix& x) const;

    /// k-NN label and vote fraction for one row: distance ties break toward
    /// the lower training-row index, vote ties toward the class with the
    /// nearer mean distance.
    std::pair<int, double> knn_vote(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;

    nlohmann::json to_json() const;
    static FittedModel from_json(const nlohmann::json& j);
};

/// Deterministic given (spec, data, seed). Throws on single-class targets or
/// non-finite features.
FittedModel fit_classifier(const ClassifierSpec& spec, const Matrix& x,
                           const std::vector<int>& y, std::uint64_t seed);

/// L2-regularized logistic regression weights (Newton iterations), intercept
/// last. Shared by the classifier and the SFS probe.
Vector fit_logistic_weights(const Matrix& x, const std::vector<int>& y, double l2,
                            int max_iter);

}  // namespace mcsa
