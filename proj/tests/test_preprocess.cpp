#include "mcsa/preprocess.hpp"
#include "mcsa/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace mcsa;

namespace {

FeatureMatrix make_matrix(const Matrix& values, const std::vector<int>& labels) {
    FeatureMatrix m;
    m.values = values;
    for (Index c = 0; c < values.cols(); ++c) m.columns.push_back("f" + std::to_string(c));
    m.labels = labels;
    for (Index r = 0; r < values.rows(); ++r) {
        m.serials.push_back("S" + std::to_string(r % 6));
        m.conditions.push_back({250.0, 0.0});
        m.record_ids.push_back(static_cast<int>(r));
    }
    return m;
}

FeatureMatrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix v(rows, cols);
    std::vector<int> y;
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) v(r, c) = rng.normal();
        y.push_back(static_cast<int>(rng.uniform_int(2)));
    }
    if (std::find(y.begin(), y.end(), 0) == y.end()) y[0] = 0;
    if (std::find(y.begin(), y.end(), 1) == y.end()) y[1] = 1;
    return make_matrix(v, y);
}

}  // namespace

TEST_CASE("min-max scaler maps training columns onto [0,1]") {
    auto m = random_matrix(40, 5, 1);
    const auto scaler = fit_scaler(m, ScalingMethod::MinMax01);
    const Matrix t = scaler.transform(m.values);
    for (Index c = 0; c < t.cols(); ++c) {
        CHECK(t.col(c).minCoeff() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(t.col(c).maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("standardizing scaler yields mean 0, std 1 on training rows") {
    auto m = random_matrix(60, 4, 2);
    const auto scaler = fit_scaler(m, ScalingMethod::Standardize);
    const Matrix t = scaler.transform(m.values);
    for (Index c = 0; c < t.cols(); ++c) {
        CHECK(std::abs(t.col(c).mean()) <= 1e-12);
        const double sd = std::sqrt((t.col(c).array() - t.col(c).mean()).square().mean());
        CHECK(sd == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("robust scaler centers the training median at zero") {
    auto m = random_matrix(61, 3, 3);
    const auto scaler = fit_scaler(m, ScalingMethod::Robust);
    const Matrix t = scaler.transform(m.values);
    for (Index c = 0; c < t.cols(); ++c) {
        std::vector<double> col(t.col(c).data(), t.col(c).data() + t.rows());
        std::sort(col.begin(), col.end());
        CHECK(std::abs(col[col.size() / 2]) <= 1e-12);  // odd row count: exact median
    }
}

TEST_CASE("constant column degeneracies") {
    Matrix v(10, 2);
    v.col(0).setConstant(7.0);
    Rng rng(4);
    for (Index r = 0; r < 10; ++r) v(r, 1) = rng.normal();
    auto m = make_matrix(v, {0, 1, 0, 1, 0, 1, 0, 1, 0, 1});

    const auto mm = fit_scaler(m, ScalingMethod::MinMax01);
    CHECK((mm.transform(v).col(0).array() == 0.5).all());
    const auto st = fit_scaler(m, ScalingMethod::Standardize);
    CHECK((st.transform(v).col(0).array() == 0.0).all());
}

TEST_CASE("scaler parameters depend on training rows only") {
    auto m = random_matrix(30, 4, 5);
    const auto scaler = fit_scaler(m, ScalingMethod::MinMax01);
    const auto refit = fit_scaler(m, ScalingMethod::MinMax01);
    CHECK(scaler.offset == refit.offset);
    CHECK(scaler.scale == refit.scale);
    CHECK(scaler.fitted_on == refit.fitted_on);
    // unseen rows may leave the declared range, by contract
    Matrix shifted = m.values;
    shifted.array() += 100.0;
    CHECK(scaler.transform(shifted).maxCoeff() > 1.0);
}

TEST_CASE("drop_low_variance") {
    SUBCASE("removes a constant column") {
        Matrix v(12, 3);
        Rng rng(6);
        for (Index r = 0; r < 12; ++r) {
            v(r, 0) = rng.normal();
            v(r, 1) = 42.0;
            v(r, 2) = rng.normal();
        }
        auto m = make_matrix(v, std::vector<int>(12, 0));
        const auto red = drop_low_variance(m);
        CHECK(red.columns == std::vector<int>{0, 2});
        CHECK(red.transform(v).cols() == 2);
    }
    SUBCASE("all-constant matrix keeps a single flagged column") {
        Matrix v = Matrix::Constant(8, 4, 1.0);
        auto m = make_matrix(v, std::vector<int>(8, 0));
        const auto red = drop_low_variance(m);
        CHECK(red.columns.size() == 1);
        CHECK(red.all_constant);
    }
    SUBCASE("no removable column gives the identity selection") {
        auto m = random_matrix(20, 5, 7);
        const auto red = drop_low_variance(m);
        CHECK(red.columns == std::vector<int>{0, 1, 2, 3, 4});
    }
}

TEST_CASE("PCA") {
    SUBCASE("captures a planted 1-D subspace") {
        Rng rng(8);
        Matrix v(200, 4);
        for (Index r = 0; r < 200; ++r) {
            const double t = rng.normal();
            v(r, 0) = t + 1e-4 * rng.normal();
            v(r, 1) = 2.0 * t + 1e-4 * rng.normal();
            v(r, 2) = -t + 1e-4 * rng.normal();
            v(r, 3) = 0.5 * t + 1e-4 * rng.normal();
        }
        auto m = make_matrix(v, std::vector<int>(200, 0));
        const auto red = fit_reducer(m, ReducerMethod::PCA, 1, 0);
        const Matrix projected = red.transform(v);
        const Matrix back = projected * red.projection.transpose();
        const Matrix centered = v.rowwise() - red.center.transpose();
        const double explained = back.squaredNorm() / centered.squaredNorm();
        CHECK(explained >= 0.999);
    }
    SUBCASE("projection columns are orthonormal") {
        auto m = random_matrix(50, 8, 9);
        const auto red = fit_reducer(m, ReducerMethod::PCA, 5, 0);
        const Matrix gram = red.projection.transpose() * red.projection;
        CHECK((gram - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("UFS selects the planted label-aligned column") {
    Rng rng(10);
    Matrix v(120, 6);
    std::vector<int> y;
    for (Index r = 0; r < 120; ++r) {
        const int label = static_cast<int>(rng.uniform_int(2));
        y.push_back(label);
        for (Index c = 0; c < 6; ++c) v(r, c) = rng.normal();
        v(r, 3) = static_cast<double>(label) * 4.0 + 0.1 * rng.normal();  // planted
    }
    auto m = make_matrix(v, y);
    const auto red = fit_reducer(m, ReducerMethod::UFS, 1, 0);
    CHECK(red.columns == std::vector<int>{3});
}

TEST_CASE("mRMR prefers a complementary column over a duplicate") {
    Rng rng(12);
    const Index n = 300;
    Matrix v(n, 4);
    std::vector<int> y;
    for (Index r = 0; r < n; ++r) {
        const int label = static_cast<int>(rng.uniform_int(2));
        y.push_back(label);
        v(r, 0) = static_cast<double>(label) + 0.3 * rng.normal();  // strongest solo
        v(r, 1) = v(r, 0);                                          // exact duplicate
        v(r, 2) = static_cast<double>(label) + 0.8 * rng.normal();  // weaker but fresh
        v(r, 3) = rng.normal();                                     // noise
    }
    auto m = make_matrix(v, y);
    const auto path = selection_path(m, ReducerMethod::MRMR, 3, 0);
    REQUIRE(path.size() == 3);
    CHECK(path[0] == 0);  // max relevance, ties toward the lower index
    // after the first informative copy, the duplicate is maximally redundant
    CHECK(path[1] != 1);
}

TEST_CASE("SFS picks the informative column first and respects k") {
    Rng rng(14);
    const Index n = 120;
    Matrix v(n, 5);
    std::vector<int> y;
    for (Index r = 0; r < n; ++r) {
        const int label = static_cast<int>(rng.uniform_int(2));
        y.push_back(label);
        for (Index c = 0; c < 5; ++c) v(r, c) = rng.normal();
        v(r, 2) += 3.0 * static_cast<double>(label);
    }
    auto m = make_matrix(v, y);
    const auto red = fit_reducer(m, ReducerMethod::SFS, 2, 77);
    CHECK(red.columns.size() == 2);
    CHECK(red.columns[0] == 2);
}

TEST_CASE("reducer refits are bit-stable (training rows fully determine them)") {
    auto m = random_matrix(80, 6, 16);
    for (ReducerMethod method : {ReducerMethod::PCA, ReducerMethod::UFS, ReducerMethod::MRMR,
                                 ReducerMethod::SFS}) {
        const auto a = fit_reducer(m, method, 3, 5);
        const auto b = fit_reducer(m, method, 3, 5);
        CHECK(a.columns == b.columns);
        if (method == ReducerMethod::PCA)
            CHECK((a.projection - b.projection).cwiseAbs().maxCoeff() == 0.0);
        CHECK(a.fitted_on == b.fitted_on);
    }
}

TEST_CASE("transform output width equals k") {
    auto m = random_matrix(50, 10, 18);
    for (ReducerMethod method :
         {ReducerMethod::PCA, ReducerMethod::UFS, ReducerMethod::MRMR, ReducerMethod::SFS}) {
        const auto red = fit_reducer(m, method, 4, 3);
        CHECK(red.transform(m.values).cols() == 4);
        CHECK(red.transformed_columns(m.columns).size() == 4);
    }
    CHECK_THROWS_AS(fit_reducer(m, ReducerMethod::PCA, 11, 0), Error);
    CHECK_THROWS_AS(fit_reducer(m, ReducerMethod::UFS, 0, 0), Error);
}
