#include "srs/benchmark.hpp"

#include <cmath>
#include <numbers>

#include "srs/error.hpp"
#include "srs/random.hpp"
#include "srs/trainer.hpp"

namespace srs {

namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Xoshiro256& rng) {
    Matrix M(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = rng.normal();
    }
    return M;
}

Vector gaussian_vector(Eigen::Index size, Xoshiro256& rng) {
    Vector v(size);
    for (Eigen::Index i = 0; i < size; ++i) v[i] = rng.normal();
    return v;
}

}  // namespace

PlQuadraticBenchmark pl_quadratic_benchmark(const PlQuadraticOptions& options) {
    const auto d = static_cast<Eigen::Index>(options.d);
    const auto n = options.n;
    if (options.d < 1) throw InvalidArgument("pl benchmark: d must be >= 1");
    if (n < options.d) throw InvalidArgument("pl benchmark: need n >= d");
    if (options.noise < 0.0) throw InvalidArgument("pl benchmark: noise must be >= 0");
    if (options.heterogeneity < 0.0) throw InvalidArgument("pl benchmark: heterogeneity must be >= 0");

    std::vector<double> spectrum = options.eigenvalues;
    if (spectrum.empty()) {
        for (Eigen::Index i = 0; i < d; ++i) {
            spectrum.push_back(d == 1 ? 1.0 : 1.0 + 3.0 * static_cast<double>(i) / static_cast<double>(d - 1));
        }
    }
    if (static_cast<Eigen::Index>(spectrum.size()) != d) {
        throw InvalidArgument("pl benchmark: need exactly d eigenvalues");
    }
    for (double lambda : spectrum) {
        if (lambda < 0.0) throw InvalidArgument("pl benchmark: eigenvalues must be >= 0");
        if (lambda == 0.0 && !options.allow_degenerate) {
            throw InvalidArgument("pl benchmark: zero eigenvalue gives mu = 0 (degenerate spectrum)");
        }
    }

    Xoshiro256 rng(options.seed);
    const Matrix Q = Eigen::HouseholderQR<Matrix>(gaussian_matrix(d, d, rng)).householderQ();
    Vector sqrt_lambda(d);
    for (Eigen::Index i = 0; i < d; ++i) sqrt_lambda[i] = std::sqrt(spectrum[static_cast<std::size_t>(i)]);
    const Matrix root = Q * sqrt_lambda.asDiagonal() * Q.transpose();  // H^{1/2}

    // B_i = I + (h / sqrt d) G_i, whitened so that (1/n) sum B_i^T B_i = I exactly.
    std::vector<Matrix> B(n);
    Matrix second_moment = Matrix::Zero(d, d);
    const double spread = options.heterogeneity / std::sqrt(static_cast<double>(d));
    for (auto& Bi : B) {
        Bi = Matrix::Identity(d, d) + spread * gaussian_matrix(d, d, rng);
        second_moment.noalias() += Bi.transpose() * Bi;
    }
    second_moment /= static_cast<double>(n);
    const Eigen::LLT<Matrix> chol(second_moment);
    if (chol.info() != Eigen::Success) throw InvalidArgument("pl benchmark: singular design");
    const Matrix whiten = chol.matrixU().solve(Matrix::Identity(d, d));  // U^{-1}, M = U^T U

    const Vector w_true = gaussian_vector(d, rng);
    std::vector<Sample> samples(n);
    std::vector<Matrix> designs(n);
    std::vector<Vector> targets(n);
    for (std::size_t i = 0; i < n; ++i) {
        designs[i] = B[i] * whiten * root;
        targets[i] = designs[i] * w_true + options.noise * gaussian_vector(d, rng);
        samples[i].x = MatrixQuadratic::pack(designs[i], targets[i]);
        samples[i].y = 0.0;
    }

    PlQuadraticBenchmark bench;
    bench.d = options.d;
    bench.model = std::make_shared<MatrixQuadratic>(options.d);
    bench.data = Dataset(std::move(samples));

    // Minimiser of the mean objective: (sum A^T A) w = sum A^T b.
    Matrix hessian = Matrix::Zero(d, d);
    Vector rhs = Vector::Zero(d);
    for (std::size_t i = 0; i < n; ++i) {
        hessian.noalias() += designs[i].transpose() * designs[i];
        rhs.noalias() += designs[i].transpose() * targets[i];
    }
    hessian /= static_cast<double>(n);
    rhs /= static_cast<double>(n);

    auto& c = bench.constants;
    c.L = *std::max_element(spectrum.begin(), spectrum.end());
    c.mu = *std::min_element(spectrum.begin(), spectrum.end());
    c.w_star = hessian.completeOrthogonalDecomposition().solve(rhs);
    c.optimum_loss = full_objective(*bench.model, bench.data, c.w_star);
    c.sigma2 = gradient_variance(*bench.model, bench.data, c.w_star);
    return bench;
}

double estimate_smoothness(const Model& model, const Dataset& data, const Vector& w,
                           std::uint64_t seed, int iterations, double h) {
    Xoshiro256 rng(seed);
    Vector v = gaussian_vector(w.size(), rng);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        const Vector hv = (full_gradient(model, data, w + h * v) - full_gradient(model, data, w - h * v)) / (2.0 * h);
        const double norm = hv.norm();
        if (norm == 0.0) return 0.0;
        lambda = norm;
        v = hv / norm;
    }
    return lambda;
}

NonConvexBenchmark two_layer_benchmark(std::size_t n, std::size_t hidden, std::uint64_t seed) {
    if (n < 2 || hidden < 1) throw InvalidArgument("two-layer benchmark: need n >= 2, hidden >= 1");
    Xoshiro256 rng(seed);
    std::vector<Sample> samples(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool upper = i % 2 == 0;
        const double t = std::numbers::pi * rng.uniform01();
        Vector x(2);
        if (upper) {
            x << std::cos(t), std::sin(t);
        } else {
            x << 1.0 - std::cos(t), 0.5 - std::sin(t);
        }
        x[0] += 0.1 * rng.normal();
        x[1] += 0.1 * rng.normal();
        samples[i] = Sample{x, upper ? 1.0 : 0.0};
    }
    NonConvexBenchmark bench;
    bench.model = std::make_shared<TwoLayerNet>(2, hidden);
    bench.data = Dataset(std::move(samples));
    bench.w0 = 0.5 * gaussian_vector(static_cast<Eigen::Index>(bench.model->dim()), rng);

    auto& c = bench.constants;
    c.estimated = true;
    c.optimum_loss = 0.0;
    // Curvature is largest near the origin for tanh units; take the max over
    // the start point and the origin.
    const Vector origin = Vector::Zero(bench.w0.size());
    c.L = std::max(estimate_smoothness(*bench.model, bench.data, bench.w0, derive_seed(seed, 1)),
                   estimate_smoothness(*bench.model, bench.data, origin, derive_seed(seed, 2)));
    c.mu = 0.0;
    c.sigma2 = gradient_variance(*bench.model, bench.data, bench.w0);
    return bench;
}

}  // namespace srs
