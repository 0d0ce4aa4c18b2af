#include "mcsa/preprocess.hpp"

#include "mcsa/classifier.hpp"
#include "mcsa/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mcsa {

std::string to_string(ScalingMethod m) {
    switch (m) {
        case ScalingMethod::MinMax01: return "minmax01";
        case ScalingMethod::Standardize: return "standardize";
        case ScalingMethod::Robust: return "robust";
    }
    throw Error("unknown scaling method id");
}

ScalingMethod scaling_from_string(const std::string& s) {
    if (s == "minmax01") return ScalingMethod::MinMax01;
    if (s == "standardize") return ScalingMethod::Standardize;
    if (s == "robust") return ScalingMethod::Robust;
    throw Error("unknown scaling method '" + s + "'");
}

std::string to_string(ReducerMethod m) {
    switch (m) {
        case ReducerMethod::None: return "none";
        case ReducerMethod::LowVariance: return "low_variance";
        case ReducerMethod::PCA: return "pca";
        case ReducerMethod::SFS: return "sfs";
        case ReducerMethod::UFS: return "ufs";
        case ReducerMethod::MRMR: return "mrmr";
    }
    throw Error("unknown reducer method id");
}

ReducerMethod reducer_from_string(const std::string& s) {
    if (s == "none") return ReducerMethod::None;
    if (s == "low_variance") return ReducerMethod::LowVariance;
    if (s == "pca") return ReducerMethod::PCA;
    if (s == "sfs") return ReducerMethod::SFS;
    if (s == "ufs") return ReducerMethod::UFS;
    if (s == "mrmr") return ReducerMethod::MRMR;
    throw Error("unknown reducer method '" + s + "'");
}

namespace {

double column_quantile(Vector col, double p) {
    std::vector<double> v(col.data(), col.data() + col.size());
    std::sort(v.begin(), v.end());
    const double h = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

}  // namespace

Matrix FittedScaler::transform(const Matrix& x) const {
    Matrix out(x.rows(), x.cols());
    const double fill = method == ScalingMethod::MinMax01 ? 0.5 : 0.0;
    for (Index c = 0; c < x.cols(); ++c) {
        if (scale[c] == 0.0)
            out.col(c).setConstant(fill);
        else
            out.col(c) = (x.col(c).array() - offset[c]) / scale[c];
    }
    return out;
}

FittedScaler fit_scaler(const FeatureMatrix& m, ScalingMethod method) {
    if (m.rows() == 0) throw Error("fit_scaler: empty training matrix");
    FittedScaler s;
    s.method = method;
    s.offset.resize(m.cols());
    s.scale.resize(m.cols());
    for (Index c = 0; c < m.cols(); ++c) {
        const auto col = m.values.col(c);
        switch (method) {
            case ScalingMethod::MinMax01: {
                const double lo = col.minCoeff(), hi = col.maxCoeff();
                s.offset[c] = lo;
                s.scale[c] = hi - lo;
                break;
            }
            case ScalingMethod::Standardize: {
                const double mean = col.mean();
                const double sd = std::sqrt((col.array() - mean).square().mean());
                s.offset[c] = mean;
                s.scale[c] = sd;
                break;
            }
            case ScalingMethod::Robust: {
                const double med = column_quantile(col, 0.5);
                const double iqr = column_quantile(col, 0.75) - column_quantile(col, 0.25);
                s.offset[c] = med;
                s.scale[c] = iqr;
                break;
            }
        }
    }
    s.fitted_on = m.fingerprint();
    return s;
}

Matrix FittedReducer::transform(const Matrix& x) const {
    switch (method) {
        case ReducerMethod::None: return x;
        case ReducerMethod::PCA: return (x.rowwise() - center.transpose()) * projection;
        default: {
            Matrix out(x.rows(), static_cast<Index>(columns.size()));
            for (std::size_t i = 0; i < columns.size(); ++i)
                out.col(static_cast<Index>(i)) = x.col(columns[i]);
            return out;
        }
    }
}

std::vector<std::string> FittedReducer::transformed_columns(
    const std::vector<std::string>& in) const {
    switch (method) {
        case ReducerMethod::None: return in;
        case ReducerMethod::PCA: {
            std::vector<std::string> out;
            for (Index i = 0; i < projection.cols(); ++i)
                out.push_back("pc" + std::to_string(i + 1));
            return out;
        }
        default: {
            std::vector<std::string> out;
            for (int c : columns) out.push_back(in[static_cast<std::size_t>(c)]);
            return out;
        }
    }
}

Index FittedReducer::out_cols(Index in_cols) const {
    if (method == ReducerMethod::None) return in_cols;
    if (method == ReducerMethod::PCA) return projection.cols();
    return static_cast<Index>(columns.size());
}

FittedReducer drop_low_variance(const FeatureMatrix& m, double threshold) {
    if (m.rows() == 0) throw Error("drop_low_variance: empty training matrix");
    FittedReducer r;
    r.method = ReducerMethod::LowVariance;
    Vector var(m.cols());
    for (Index c = 0; c < m.cols(); ++c) {
        const double mean = m.values.col(c).mean();
        var[c] = (m.values.col(c).array() - mean).square().mean();
    }
    for (Index c = 0; c < m.cols(); ++c)
        if (var[c] > threshold) r.columns.push_back(static_cast<int>(c));
    if (r.columns.empty()) {
        Index best = 0;
        var.maxCoeff(&best);
        r.columns.push_back(static_cast<int>(best));
        r.all_constant = true;
    }
    r.fitted_on = m.fingerprint();
    return r;
}

namespace {

// Equal-frequency discretization into n_bins by rank; ties share the bin of
// their first occurrence in value order.
std::vector<int> discretize(const Vector& col, int n_bins) {
    const Index n = col.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return col[a] < col[b]; });
    std::vector<int> bins(static_cast<std::size_t>(n));
    for (Index rank = 0; rank < n; ++rank) {
        int b = static_cast<int>(rank * static_cast<Index>(n_bins) / n);
        // keep equal values in one bin
        if (rank > 0 && col[order[static_cast<std::size_t>(rank)]] ==
                            col[order[static_cast<std::size_t>(rank - 1)]])
            b = bins[static_cast<std::size_t>(order[static_cast<std::size_t>(rank - 1)])];
        bins[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])] = b;
    }
    return bins;
}

double mutual_information(const std::vector<int>& a, int a_card, const std::vector<int>& b,
                          int b_card) {
    const auto n = static_cast<double>(a.size());
    std::vector<double> joint(static_cast<std::size_t>(a_card * b_card), 0.0);
    std::vector<double> pa(static_cast<std::size_t>(a_card), 0.0);
    std::vector<double> pb(static_cast<std::size_t>(b_card), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[static_cast<std::size_t>(a[i] * b_card + b[i])] += 1.0;
        pa[static_cast<std::size_t>(a[i])] += 1.0;
        pb[static_cast<std::size_t>(b[i])] += 1.0;
    }
    double mi = 0.0;
    for (int i = 0; i < a_card; ++i)
        for (int j = 0; j < b_card; ++j) {
            const double pj = joint[static_cast<std::size_t>(i * b_card + j)] / n;
            if (pj > 0.0)
                mi += pj * std::log(pj * n * n /
                                    (pa[static_cast<std::size_t>(i)] *
                                     pb[static_cast<std::size_t>(j)]));
        }
    return mi;
}

std::vector<int> ufs_path(const FeatureMatrix& m, int k_max) {
    // ANOVA F-score per column, two classes.
    const Index n = m.rows();
    std::vector<std::pair<double, int>> scored;
    for (Index c = 0; c < m.cols(); ++c) {
        double sum0 = 0.0, sum1 = 0.0;
        Index n0 = 0, n1 = 0;
        for (Index r = 0; r < n; ++r) {
            if (m.labels[static_cast<std::size_t>(r)] == 1) {
                sum1 += m.values(r, c);
                ++n1;
            } else {
                sum0 += m.values(r, c);
                ++n0;
            }
        }
        if (n0 == 0 || n1 == 0) {
            scored.emplace_back(0.0, static_cast<int>(c));
            continue;
        }
        const double mu0 = sum0 / static_cast<double>(n0);
        const double mu1 = sum1 / static_cast<double>(n1);
        const double mu = (sum0 + sum1) / static_cast<double>(n);
        double within = 0.0;
        for (Index r = 0; r < n; ++r) {
            const double g = m.labels[static_cast<std::size_t>(r)] == 1 ? mu1 : mu0;
            within += (m.values(r, c) - g) * (m.values(r, c) - g);
        }
        const double between = static_cast<double>(n0) * (mu0 - mu) * (mu0 - mu) +
                               static_cast<double>(n1) * (mu1 - mu) * (mu1 - mu);
        const double f =
            within > 0.0 ? between * static_cast<double>(n - 2) / within
                         : (between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        scored.emplace_back(f, static_cast<int>(c));
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<int> out;
    for (int i = 0; i < k_max && i < static_cast<int>(scored.size()); ++i)
        out.push_back(scored[static_cast<std::size_t>(i)].second);
    return out;
}

std::vector<int> mrmr_path(const FeatureMatrix& m, int k_max) {
    constexpr int kBins = 8;
    const auto d = static_cast<int>(m.cols());
    std::vector<std::vector<int>> disc;
    disc.reserve(static_cast<std::size_t>(d));
    for (Index c = 0; c < m.cols(); ++c) disc.push_back(discretize(m.values.col(c), kBins));

    std::vector<double> relevance(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c)
        relevance[static_cast<std::size_t>(c)] =
            mutual_information(disc[static_cast<std::size_t>(c)], kBins, m.labels, 2);

    std::vector<int> selected;
    std::vector<bool> used(static_cast<std::size_t>(d), false);
    std::vector<double> redundancy(static_cast<std::size_t>(d), 0.0);
    while (static_cast<int>(selected.size()) < k_max) {
        int best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < d; ++c) {
            if (used[static_cast<std::size_t>(c)]) continue;
            const double red = selected.empty()
                                   ? 0.0
                                   : redundancy[static_cast<std::size_t>(c)] /
                                         static_cast<double>(selected.size());
            const double score = relevance[static_cast<std::size_t>(c)] - red;
            if (score > best_score + 1e-15) {
                best_score = score;
                best = c;
            }
        }
        if (best < 0) break;
        used[static_cast<std::size_t>(best)] = true;
        selected.push_back(best);
        for (int c = 0; c < d; ++c)
            if (!used[static_cast<std::size_t>(c)])
                redundancy[static_cast<std::size_t>(c)] += mutual_information(
                    disc[static_cast<std::size_t>(c)], kBins, disc[static_cast<std::size_t>(best)],
                    kBins);
    }
    return selected;
}

// Grouped 3-fold accuracy of a logistic probe on the given column subset.
double sfs_probe_accuracy(const FeatureMatrix& m, const std::vector<int>& cols,
                          const std::vector<std::vector<Index>>& fold_rows) {
    Index correct = 0, total = 0;
    for (std::size_t f = 0; f < fold_rows.size(); ++f) {
        std::vector<Index> train_rows;
        for (std::size_t g = 0; g < fold_rows.size(); ++g)
            if (g != f) train_rows.insert(train_rows.end(), fold_rows[g].begin(), fold_rows[g].end());
        if (train_rows.empty() || fold_rows[f].empty()) continue;

        auto gather = [&](const std::vector<Index>& rows, std::vector<int>& y) {
            Matrix x(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
            y.clear();
            for (std::size_t r = 0; r < rows.size(); ++r) {
                for (std::size_t c = 0; c < cols.size(); ++c)
                    x(static_cast<Index>(r), static_cast<Index>(c)) =
                        m.values(rows[r], cols[c]);
                y.push_back(m.labels[static_cast<std::size_t>(rows[r])]);
            }
            return x;
        };
        std::vector<int> y_train, y_test;
        Matrix x_train = gather(train_rows, y_train);
        Matrix x_test = gather(fold_rows[f], y_test);
        const bool has0 = std::find(y_train.begin(), y_train.end(), 0) != y_train.end();
        const bool has1 = std::find(y_train.begin(), y_train.end(), 1) != y_train.end();
        if (!has0 || !has1) continue;

        Vector w = fit_logistic_weights(x_train, y_train, 1e-3, 15);
        for (Index r = 0; r < x_test.rows(); ++r) {
            double z = w[w.size() - 1] + x_test.row(r).dot(w.head(w.size() - 1).transpose());
            const int pred = z >= 0.0 ? 1 : 0;
            correct += pred == y_test[static_cast<std::size_t>(r)];
            ++total;
        }
    }
    return total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

std::vector<int> sfs_path(const FeatureMatrix& m, int k_max, std::uint64_t seed) {
    // Serial-grouped folds for the probe, so selection respects the same
    // leakage rules as the outer evaluation.
    std::vector<std::string> serials;
    {
        std::set<std::string> seen;
        for (const auto& s : m.serials)
            if (seen.insert(s).second) serials.push_back(s);
    }
    std::sort(serials.begin(), serials.end());
    Rng rng(derive_seed(seed, "sfs_folds"));
    rng.shuffle(serials);
    const int n_folds = std::min<int>(3, static_cast<int>(serials.size()));
    std::map<std::string, int> serial_fold;
    for (std::size_t i = 0; i < serials.size(); ++i)
        serial_fold[serials[i]] = static_cast<int>(i) % n_folds;
    std::vector<std::vector<Index>> fold_rows(static_cast<std::size_t>(n_folds));
    for (Index r = 0; r < m.rows(); ++r)
        fold_rows[static_cast<std::size_t>(serial_fold[m.serials[static_cast<std::size_t>(r)]])]
            .push_back(r);

    std::vector<int> selected;
    std::vector<bool> used(static_cast<std::size_t>(m.cols()), false);
    while (static_cast<int>(selected.size()) < k_max) {
        int best = -1;
        double best_acc = -1.0;
        for (int c = 0; c < static_cast<int>(m.cols()); ++c) {
            if (used[static_cast<std::size_t>(c)]) continue;
            auto candidate = selected;
            candidate.push_back(c);
            const double acc = sfs_probe_accuracy(m, candidate, fold_rows);
            if (acc > best_acc + 1e-12) {
                best_acc = acc;
                best = c;
            }
        }
        if (best < 0) break;
        used[static_cast<std::size_t>(best)] = true;
        selected.push_back(best);
    }
    return selected;
}

}  // namespace

std::vector<int> selection_path(const FeatureMatrix& m, ReducerMethod method, int k_max,
                                std::uint64_t seed) {
    k_max = std::min<int>(k_max, static_cast<int>(m.cols()));
    switch (method) {
        case ReducerMethod::UFS: return ufs_path(m, k_max);
        case ReducerMethod::MRMR: return mrmr_path(m, k_max);
        case ReducerMethod::SFS: return sfs_path(m, k_max, seed);
        default: throw Error("selection_path: not a selection-based reducer");
    }
}

FittedReducer fit_reducer(const FeatureMatrix& m, ReducerMethod method, int k,
                          std::uint64_t seed) {
    if (k < 1 || k > static_cast<int>(m.cols()))
        throw Error("fit_reducer: k=" + std::to_string(k) + " out of range for " +
                    std::to_string(m.cols()) + " columns");
    FittedReducer r;
    r.method = method;
    r.fitted_on = m.fingerprint();
    switch (method) {
        case ReducerMethod::None:
            return r;
        case ReducerMethod::LowVariance:
            throw Error("fit_reducer: use drop_low_variance for the cleaning stage");
        case ReducerMethod::PCA: {
            r.center = m.values.colwise().mean();
            Matrix centered = m.values.rowwise() - r.center.transpose();
            Matrix cov = centered.transpose() * centered /
                         std::max(1.0, static_cast<double>(m.rows() - 1));
            Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
            if (solver.info() != Eigen::Success) throw Error("fit_reducer: PCA eigensolver failed");
            // eigenvalues ascending; take the top k, pin signs for determinism
            r.projection.resize(m.cols(), k);
            for (int i = 0; i < k; ++i) {
                Vector v = solver.eigenvectors().col(m.cols() - 1 - i);
                Index argmax = 0;
                v.cwiseAbs().maxCoeff(&argmax);
                if (v[argmax] < 0.0) v = -v;
                r.projection.col(i) = v;
            }
            return r;
        }
        case ReducerMethod::UFS:
        case ReducerMethod::MRMR:
        case ReducerMethod::SFS: {
            r.columns = selection_path(m, method, k, seed);
            if (static_cast<int>(r.columns.size()) != k)
                throw Error("fit_reducer: selection path shorter than k");
            return r;
        }
    }
    throw Error("fit_reducer: unknown method");
}

}  // namespace mcsa
