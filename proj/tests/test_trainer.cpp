#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "srs/benchmark.hpp"
#include "srs/convergence.hpp"
#include "srs/error.hpp"
#include "srs/trainer.hpp"

using namespace srs;

namespace {

Dataset regression(std::size_t n, std::size_t d, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    std::vector<Sample> s;
    for (std::size_t i = 0; i < n; ++i) {
        Vector x(static_cast<Eigen::Index>(d));
        for (auto& v : x) v = rng.normal();
        s.push_back({x, rng.normal()});
    }
    return Dataset(std::move(s));
}

Matrix design_matrix(const Dataset& data) {
    Matrix X(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(data.feature_dim()));
    for (std::size_t i = 0; i < data.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = data[i].x.transpose();
    return X;
}

Vector labels(const Dataset& data) {
    Vector y(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) y[static_cast<Eigen::Index>(i)] = data[i].y;
    return y;
}

// Mean Hessian, minimizer and gradient variance of a quadratic benchmark,
// recomputed from the packed samples with a dense solve.
struct QuadraticOracle {
    Matrix H;
    Vector w_star;
    double loss_star = 0.0;
    double sigma2 = 0.0;
};

QuadraticOracle quadratic_oracle(const PlQuadraticBenchmark& b) {
    const auto d = static_cast<Eigen::Index>(b.d);
    const double n = static_cast<double>(b.data.size());
    Matrix H = Matrix::Zero(d, d);
    Vector rhs = Vector::Zero(d);
    for (const auto& s : b.data.samples()) {
        const Matrix A = b.model->design(s);
        H += A.transpose() * A / n;
        rhs += A.transpose() * b.model->target(s) / n;
    }
    QuadraticOracle o;
    o.H = H;
    o.w_star = H.ldlt().solve(rhs);
    Vector mean = Vector::Zero(d);
    std::vector<Vector> g;
    for (const auto& s : b.data.samples()) {
        const Matrix A = b.model->design(s);
        const Vector r = A * o.w_star - b.model->target(s);
        o.loss_star += 0.5 * r.squaredNorm() / n;
        g.push_back(A.transpose() * r);
        mean += g.back() / n;
    }
    for (const auto& gi : g) o.sigma2 += (gi - mean).squaredNorm() / n;
    return o;
}

// Plain SGD replaying a recorded sample order.
Vector replay_sgd(const Model& model, const Dataset& data, const std::vector<std::uint32_t>& order,
                  double alpha, Vector w) {
    for (auto i : order) w -= alpha * model.gradient(w, data[i]);
    return w;
}

double mean_final_gap(const PlQuadraticBenchmark& b, double alpha, std::uint64_t m, std::uint64_t K,
                      std::uint64_t runs) {
    OptimizerConfig opt;
    opt.step_size = alpha;
    const auto traces = train_seeds(*b.model, b.data, {m, 1, 0}, K, opt, Vector::Zero(5), runs, 77);
    double gap = 0.0;
    for (const auto& t : traces) gap += (t.records.back().objective - b.constants.optimum_loss) / runs;
    return gap;
}

}  // namespace

TEST_CASE("objective and gradient match dense formulas") {
    const auto data = regression(40, 3, 1);
    const LinearLeastSquares model(3);
    const Matrix X = design_matrix(data);
    const Vector y = labels(data);
    Vector w(3);
    w << 0.3, -1.0, 2.0;
    const Vector r = X * w - y;
    CHECK(full_objective(model, data, w) == doctest::Approx(0.5 * r.squaredNorm() / 40.0).epsilon(1e-12));
    CHECK((full_gradient(model, data, w) - X.transpose() * r / 40.0).norm() < 1e-12);

    const std::vector<std::uint32_t> subset{2, 5, 11};
    double sub = 0.0;
    for (auto i : subset) sub += 0.5 * r[i] * r[i] / 3.0;
    CHECK(subset_objective(model, data, w, subset) == doctest::Approx(sub).epsilon(1e-12));

    // Per-sample gradients x_i r_i; their spread about the mean.
    const Vector mean = X.transpose() * r / 40.0;
    double var = 0.0;
    for (Eigen::Index i = 0; i < 40; ++i) var += (X.row(i).transpose() * r[i] - mean).squaredNorm() / 40.0;
    CHECK(gradient_variance(model, data, w) == doctest::Approx(var).epsilon(1e-12));
}

TEST_CASE("subset gradient is unbiased over uniform subsets") {
    // Averaging over every 3-subset of 7 samples gives back the full gradient.
    const auto data = regression(7, 2, 3);
    const LinearLeastSquares model(2);
    Vector w(2);
    w << 1.0, -0.5;
    Vector avg = Vector::Zero(2);
    int count = 0;
    for (std::uint32_t a = 0; a < 7; ++a)
        for (std::uint32_t b = a + 1; b < 7; ++b)
            for (std::uint32_t c = b + 1; c < 7; ++c) {
                const std::vector<std::uint32_t> s{a, b, c};
                avg += subset_gradient(model, data, w, s);
                ++count;
            }
    avg /= count;
    CHECK((avg - full_gradient(model, data, w)).norm() < 1e-12);
}

TEST_CASE("non-finite losses are reported with the sample") {
    auto samples = regression(5, 2, 4).samples();
    samples[3].y = std::numeric_limits<double>::quiet_NaN();
    const Dataset data(samples);
    try {
        full_objective(LinearLeastSquares(2), data, Vector::Zero(2));
        FAIL("expected NonFiniteLoss");
    } catch (const NonFiniteLoss& e) {
        CHECK(e.sample_index() == 3);
    }
}

TEST_CASE("benchmark constants agree with an eigensolver") {
    const auto b = pl_quadratic_benchmark({});
    const auto o = quadratic_oracle(b);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(o.H);
    CHECK(b.constants.L == doctest::Approx(eig.eigenvalues().maxCoeff()).epsilon(1e-10));
    CHECK(b.constants.mu == doctest::Approx(eig.eigenvalues().minCoeff()).epsilon(1e-10));
    CHECK(b.constants.L == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(b.constants.mu == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((b.constants.w_star - o.w_star).norm() < 1e-10);
    CHECK(b.constants.optimum_loss == doctest::Approx(o.loss_star).epsilon(1e-10));
    CHECK(b.constants.sigma2 == doctest::Approx(o.sigma2).epsilon(1e-8));
    CHECK(b.constants.sigma2 > 0.0);
    CHECK(!b.constants.estimated);
    CHECK(full_gradient(*b.model, b.data, b.constants.w_star).norm() < 1e-10);

    PlQuadraticOptions clean;
    clean.noise = 0.0;
    const auto c = pl_quadratic_benchmark(clean);
    CHECK(c.constants.sigma2 < 1e-20);
    CHECK(c.constants.optimum_loss < 1e-20);

    PlQuadraticOptions flat;
    flat.eigenvalues = {0, 1, 2, 3, 4};
    CHECK_THROWS_AS(pl_quadratic_benchmark(flat), InvalidArgument);
    flat.allow_degenerate = true;
    CHECK(pl_quadratic_benchmark(flat).constants.mu == doctest::Approx(0.0));
}

TEST_CASE("smoothness estimate on a quadratic") {
    const auto b = pl_quadratic_benchmark({});
    const double L = estimate_smoothness(*b.model, b.data, Vector::Zero(5), 1);
    CHECK(L == doctest::Approx(4.0).epsilon(1e-4));
}

TEST_CASE("noise-free training contracts linearly") {
    PlQuadraticOptions o;
    o.noise = 0.0;
    const auto b = pl_quadratic_benchmark(o);
    OptimizerConfig opt;
    opt.step_size = 0.5 / b.constants.L;
    const auto traces = train_seeds(*b.model, b.data, {10, 1, 0}, 30, opt, Vector::Zero(5), 5, 1);
    for (const auto& t : traces) {
        const double gap0 = t.records.front().objective;
        CHECK(t.records.back().objective <= 1e-6 * gap0);
    }
}

TEST_CASE("m = n, R = 1 is plain SGD on the recorded order") {
    const auto b = pl_quadratic_benchmark({});
    for (auto sampling : {WithinEpochSampling::reshuffle, WithinEpochSampling::iid_with_replacement}) {
        OptimizerConfig opt;
        opt.step_size = 0.1;
        opt.sampling = sampling;
        opt.record_visits = true;
        const auto schedule = build_schedule(b.data.size(), {b.data.size(), 1, 3}, 4);
        Xoshiro256 rng(8);
        const auto t = train_srs(*b.model, b.data, schedule, opt, Vector::Zero(5), rng);
        REQUIRE(t.visits.size() == 4 * b.data.size());
        CHECK(replay_sgd(*b.model, b.data, t.visits, 0.1, Vector::Zero(5)) == t.final_w);
        if (sampling == WithinEpochSampling::reshuffle) {
            // Each epoch visits every sample exactly once.
            for (std::size_t e = 0; e < 4; ++e) {
                std::vector<int> seen(b.data.size(), 0);
                for (std::size_t i = 0; i < b.data.size(); ++i) ++seen[t.visits[e * b.data.size() + i]];
                CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
            }
        }
    }
}

TEST_CASE("visits stay inside the epoch subset") {
    const auto b = pl_quadratic_benchmark({});
    OptimizerConfig opt;
    opt.step_size = 0.1;
    opt.record_visits = true;
    opt.batch_size = 2;
    const auto schedule = build_schedule(b.data.size(), {6, 2, 5}, 6);
    Xoshiro256 rng(3);
    const auto t = train_srs(*b.model, b.data, schedule, opt, Vector::Zero(5), rng);
    REQUIRE(t.visits.size() == 6 * 6 * 2);
    for (std::size_t k = 0; k < 6; ++k) {
        const auto& subset = schedule.epochs[k];
        for (std::size_t i = 0; i < 12; ++i) {
            CHECK(std::binary_search(subset.begin(), subset.end(), t.visits[k * 12 + i]));
        }
        CHECK(t.records[k + 1].subset_hash == subset_fingerprint(subset));
        CHECK(t.records[k + 1].sample_visits == (k + 1) * 12);
    }
}

TEST_CASE("stationary noise ball shrinks with the step size") {
    const auto b = pl_quadratic_benchmark({});
    const double big = mean_final_gap(b, 0.1, 10, 300, 20);
    const double small = mean_final_gap(b, 0.025, 10, 300, 20);
    CHECK(small < big);
    CHECK(small < 0.5 * big);
}

TEST_CASE("divergence is detected") {
    const auto b = pl_quadratic_benchmark({});
    OptimizerConfig opt;
    opt.step_size = 100.0;
    try {
        train_seeds(*b.model, b.data, {5, 1, 0}, 20, opt, Vector::Zero(5), 1, 1);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.epoch() >= 1);
        CHECK(e.epoch() <= 20);
    }
}

TEST_CASE("training is reproducible and worker independent") {
    const auto b = pl_quadratic_benchmark({});
    OptimizerConfig opt;
    opt.step_size = 0.1;
    const auto a = train_seeds(*b.model, b.data, {5, 2, 0}, 20, opt, Vector::Zero(5), 6, 42, 1);
    const auto c = train_seeds(*b.model, b.data, {5, 2, 0}, 20, opt, Vector::Zero(5), 6, 42, 3);
    REQUIRE(a.size() == 6);
    for (std::size_t r = 0; r < 6; ++r) CHECK(to_csv(a[r]) == to_csv(c[r]));
    CHECK(to_csv(a[0]) != to_csv(a[1]));
    const auto csv = to_csv(a[0]);
    CHECK(csv.rfind("epoch,objective,grad_norm_sq,subset_hash,wall_seconds\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);
    CHECK(to_json(a[0]).at("records").size() == 21);
}

TEST_CASE("optimizer validation") {
    OptimizerConfig opt;
    opt.step_size = 0.0;
    CHECK_THROWS_AS(opt.validate(), InvalidArgument);
    opt.step_size = 0.1;
    opt.batch_size = 0;
    CHECK_THROWS_AS(opt.validate(), InvalidArgument);
}

TEST_CASE("convergence bounds on the quadratic benchmark") {
    const auto b = pl_quadratic_benchmark({});
    OptimizerConfig opt;
    opt.step_size = 0.5 / b.constants.L;
    const auto traces = train_seeds(*b.model, b.data, {5, 1, 0}, 50, opt, Vector::Zero(5), 20, 9);
    for (auto mode : {BoundMode::pl, BoundMode::nonconvex}) {
        const auto r = verify_convergence_bound(traces, b.constants, opt, 5, 50, mode);
        CHECK(r.in_scope);
        CHECK(r.passed);
        CHECK(r.checkpoints.size() == 50);
        CHECK(r.sigma2 >= b.constants.sigma2);
        CHECK(r.gap0 == doctest::Approx(traces[0].records[0].objective - b.constants.optimum_loss));
    }
    OptimizerConfig wild = opt;
    wild.step_size = 1.5 / b.constants.L;
    const auto r = verify_convergence_bound(traces, b.constants, wild, 5, 50, BoundMode::pl);
    CHECK(!r.in_scope);
    CHECK(!r.passed);
    OptimizerConfig annealed = opt;
    annealed.step_decay = 0.1;
    CHECK_THROWS_AS(verify_convergence_bound(traces, b.constants, annealed, 5, 50, BoundMode::pl), InvalidArgument);
}

TEST_CASE("annealed step size") {
    OptimizerConfig opt;
    opt.step_size = 0.2;
    opt.step_decay = 0.5;
    CHECK(opt.epoch_step(1) == 0.2);
    CHECK(opt.epoch_step(3) == doctest::Approx(0.1));
    // One sample, one step per epoch: w_k = w_{k-1} - alpha_k (w_{k-1} - y) on f = (w - y)^2 / 2.
    const Dataset data({{Vector::Ones(1), 2.0}});
    LinearLeastSquares model(1);
    const auto schedule = build_schedule(1, {1, 1, 0}, 3);
    Xoshiro256 rng(1);
    const auto t = train_srs(model, data, schedule, opt, Vector::Zero(1), rng);
    double w = 0.0;
    for (int k = 1; k <= 3; ++k) w -= opt.epoch_step(k) * (w - 2.0);
    CHECK(t.final_w[0] == doctest::Approx(w).epsilon(1e-15));
}

TEST_CASE("two-layer benchmark") {
    const auto nb = two_layer_benchmark(60, 5, 2);
    CHECK(nb.constants.estimated);
    CHECK(nb.constants.L > 0.0);
    CHECK(nb.w0.size() == static_cast<Eigen::Index>(nb.model->dim()));
    CHECK(gradient_check(*nb.model, nb.data, 1e-5, 3, 4, 0.5) <= 1e-4);
}
