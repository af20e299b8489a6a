#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "srs/error.hpp"
#include "srs/models.hpp"
#include "srs/trainer.hpp"

using namespace srs;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

Dataset random_regression(std::size_t n, std::size_t d, std::uint64_t seed, bool binary) {
    Xoshiro256 rng(seed);
    std::vector<Sample> s;
    for (std::size_t i = 0; i < n; ++i) {
        Vector x(static_cast<Eigen::Index>(d));
        for (auto& v : x) v = rng.normal();
        const double y = binary ? static_cast<double>(rng.uniform_below(2)) : rng.normal();
        s.push_back({x, y});
    }
    return Dataset(std::move(s));
}

}  // namespace

TEST_CASE("least squares by hand") {
    LinearLeastSquares model(2);
    const Sample s{vec({1, 2}), 3};
    const Vector w = vec({0.5, 0.5});
    CHECK(model.loss(w, s) == doctest::Approx(1.125));
    const Vector g = model.gradient(w, s);
    CHECK(g[0] == doctest::Approx(-1.5));
    CHECK(g[1] == doctest::Approx(-3.0));
}

TEST_CASE("logistic by hand") {
    LogisticRegression model(2);
    const Sample s{vec({1, -1}), 1};
    const Vector w = Vector::Zero(2);
    CHECK(model.loss(w, s) == doctest::Approx(std::log(2.0)));
    const Vector g = model.gradient(w, s);
    CHECK(g[0] == doctest::Approx(-0.5));
    CHECK(g[1] == doctest::Approx(0.5));
    // Large margins stay finite.
    CHECK(std::isfinite(model.loss(vec({1000, 0}), {vec({1, 0}), 0})));
    CHECK(model.loss(vec({1000, 0}), {vec({1, 0}), 0}) == doctest::Approx(1000.0));
    CHECK(model.loss(vec({1000, 0}), {vec({1, 0}), 1}) < 1e-300);
}

TEST_CASE("matrix quadratic packs A and b") {
    Matrix A(2, 2);
    A << 1, 2, 3, 4;
    const Vector b = vec({1, -1});
    MatrixQuadratic model(2);
    const Sample s{MatrixQuadratic::pack(A, b), 0};
    CHECK(model.design(s) == A);
    CHECK(model.target(s) == b);
    const Vector w = vec({1, 1});
    // A w - b = (2, 8)
    CHECK(model.loss(w, s) == doctest::Approx(34.0));
    const Vector g = model.gradient(w, s);
    CHECK(g[0] == doctest::Approx(1 * 2 + 3 * 8));
    CHECK(g[1] == doctest::Approx(2 * 2 + 4 * 8));
}

TEST_CASE("finite-difference gradient checks") {
    const auto reg = random_regression(30, 4, 1, false);
    const auto cls = random_regression(30, 4, 2, true);
    CHECK(gradient_check(LinearLeastSquares(4), reg, 1e-5, 5, 3) <= 1e-5);
    CHECK(gradient_check(LogisticRegression(4), cls, 1e-5, 5, 4) <= 1e-5);

    Xoshiro256 rng(9);
    std::vector<Sample> quad;
    for (int i = 0; i < 10; ++i) {
        Matrix A(3, 3);
        Vector b(3);
        for (auto& v : A.reshaped()) v = rng.normal();
        for (auto& v : b) v = rng.normal();
        quad.push_back({MatrixQuadratic::pack(A, b), 0});
    }
    CHECK(gradient_check(MatrixQuadratic(3), Dataset(quad), 1e-5, 5, 5) <= 1e-5);
    CHECK(gradient_check(TwoLayerNet(4, 6), cls, 1e-5, 5, 6, 0.5) <= 1e-4);
}

TEST_CASE("gradient check catches a wrong gradient") {
    struct Wrong final : Model {
        std::string name() const override { return "wrong"; }
        std::size_t dim() const override { return 1; }
        double loss(const Vector& w, const Sample&) const override { return w[0] * w[0]; }
        void add_gradient(const Vector& w, const Sample&, double scale, Vector& g) const override {
            g[0] += scale * 3.0 * w[0];
        }
    };
    const Dataset d({{vec({0}), 0}});
    CHECK(gradient_check(Wrong{}, d, 1e-5, 3, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("dataset validation and CSV loading") {
    CHECK_THROWS_AS(Dataset(std::vector<Sample>{}), InvalidArgument);
    CHECK_THROWS_AS(Dataset({{vec({1, 2}), 0}, {vec({1}), 0}}), InvalidArgument);
    const std::string path = "srs_test_dataset.csv";
    {
        std::ofstream f(path);
        f << "a,b,label\n1,2,0\n3,4.5,1\n";
    }
    const auto d = Dataset::from_csv(path);
    CHECK(d.size() == 2);
    CHECK(d.feature_dim() == 2);
    CHECK(d[1].x[1] == 4.5);
    CHECK(d[1].y == 1.0);
    std::remove(path.c_str());
    CHECK_THROWS_AS(Dataset::from_csv("does/not/exist.csv"), InvalidArgument);
}

TEST_CASE("model factory") {
    CHECK(make_model("least-squares", 3)->dim() == 3);
    CHECK(make_model("logistic", 2)->name() == "logistic");
    CHECK(make_model("constant", 2)->loss(Vector::Zero(2), {Vector::Zero(2), 1}) == 0.0);
    CHECK_THROWS_AS(make_model("svm", 2), InvalidArgument);
}
