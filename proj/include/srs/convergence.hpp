#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "srs/benchmark.hpp"
#include "srs/trainer.hpp"

namespace srs {

enum class BoundMode { nonconvex, pl };
std::string to_string(BoundMode mode);

struct BoundCheckpoint {
    std::uint64_t epoch = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool passed = false;
};

/// Left- and right-hand sides of the SRS convergence bounds, evaluated from
/// seed-averaged traces.
///
///  nonconvex: (1/k) sum_{j<k} mean ||grad L_G(w_j)||^2
///               <= 2 m gap0 / (alpha k) + alpha m L (1 + m/n) sigma^2
///  pl:        mean L_G(w_k) - L_G(w*)
///               <= (1 - mu alpha)^k gap0 + 2 alpha kappa m L (1 + m/n) sigma^2
///
/// w_j is the iterate entering epoch j + 1 (records[j]); gap0 = L_G(w_0) - L_G(w*).
/// sigma^2 is the largest per-sample gradient variance seen at any recorded
/// iterate of any run, or the benchmark value if that is larger.
struct ConvergenceReport {
    BoundMode mode = BoundMode::pl;
    double alpha = 0.0;
    double L = 0.0;
    double mu = 0.0;
    double sigma2 = 0.0;
    double gap0 = 0.0;
    std::uint64_t m = 0;
    std::uint64_t n = 0;
    std::uint64_t runs = 0;
    bool in_scope = false;             // alpha < 1/L
    bool estimated_constants = false;
    std::vector<BoundCheckpoint> checkpoints;  // one per epoch 1..K
    bool passed = false;                       // in scope and every checkpoint holds

    const BoundCheckpoint& final_checkpoint() const { return checkpoints.back(); }
};

ConvergenceReport verify_convergence_bound(std::span<const TrainingTrace> traces,
                                           const BenchmarkConstants& constants,
                                           const OptimizerConfig& opt, std::uint64_t m,
                                           std::uint64_t n, BoundMode mode);

nlohmann::json to_json(const ConvergenceReport& report);

}  // namespace srs
