#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "srs/models.hpp"

namespace srs {

/// Constants entering the convergence bounds for a benchmark instance.
struct BenchmarkConstants {
    double L = 0.0;                // smoothness of L_G
    double mu = 0.0;               // PL / strong convexity constant
    double sigma2 = 0.0;           // gradient variance across samples at w*
    double optimum_loss = 0.0;     // L_G(w*); a lower bound when estimated
    Vector w_star;                 // empty when unknown
    bool estimated = false;        // L, mu or the optimum were estimated

    double kappa() const { return L / mu; }
};

struct PlQuadraticOptions {
    std::size_t d = 5;
    std::size_t n = 50;
    std::uint64_t seed = 0;
    double noise = 0.1;
    /// Spectrum of the mean Hessian. Empty means d values evenly spaced in [1, 4].
    std::vector<double> eigenvalues;
    /// Spread of the per-sample Hessians around the mean (0 gives identical designs).
    double heterogeneity = 0.2;
    bool allow_degenerate = false;
};

/// f_i(w) = 0.5 ||A_i w - b_i||^2 with (1/n) sum A_i^T A_i = Q diag(eigenvalues) Q^T
/// for a random rotation Q, and b_i = A_i w_true + noise * e_i.
struct PlQuadraticBenchmark {
    std::size_t d = 0;
    std::shared_ptr<const MatrixQuadratic> model;
    Dataset data;
    BenchmarkConstants constants;
};

PlQuadraticBenchmark pl_quadratic_benchmark(const PlQuadraticOptions& options);

/// Largest Hessian eigenvalue of L_G near `w`, by power iteration on
/// central-difference Hessian-vector products of the full gradient.
double estimate_smoothness(const Model& model, const Dataset& data, const Vector& w,
                           std::uint64_t seed, int iterations = 100, double h = 1e-5);

/// Two-moons style 2-D binary classification set and a small tanh network.
struct NonConvexBenchmark {
    std::shared_ptr<const TwoLayerNet> model;
    Dataset data;
    Vector w0;
    BenchmarkConstants constants;  // estimated = true, optimum_loss = 0 (loss is >= 0)
};

NonConvexBenchmark two_layer_benchmark(std::size_t n, std::size_t hidden, std::uint64_t seed);

}  // namespace srs
