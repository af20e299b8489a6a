#include "srs/convergence.hpp"

#include <cmath>

#include "srs/error.hpp"

namespace srs {

std::string to_string(BoundMode mode) { return mode == BoundMode::pl ? "pl" : "nonconvex"; }

ConvergenceReport verify_convergence_bound(std::span<const TrainingTrace> traces,
                                           const BenchmarkConstants& constants,
                                           const OptimizerConfig& opt, std::uint64_t m,
                                           std::uint64_t n, BoundMode mode) {
    if (traces.empty()) throw InvalidArgument("verify_convergence_bound: no traces");
    const std::uint64_t K = traces.front().K();
    if (K == 0) throw InvalidArgument("verify_convergence_bound: traces have no epochs");
    for (const auto& t : traces) {
        if (t.K() != K) throw InvalidArgument("verify_convergence_bound: traces differ in length");
    }
    if (!(constants.L > 0.0)) throw InvalidArgument("verify_convergence_bound: L must be > 0");
    if (mode == BoundMode::pl && !(constants.mu > 0.0)) {
        throw InvalidArgument("verify_convergence_bound: PL mode needs mu > 0");
    }
    if (m < 1 || m > n) throw InvalidArgument("verify_convergence_bound: need 1 <= m <= n");
    if (opt.step_decay != 0.0) {
        throw InvalidArgument("verify_convergence_bound: the bounds assume a constant step size");
    }

    ConvergenceReport report;
    report.mode = mode;
    report.alpha = opt.step_size;
    report.L = constants.L;
    report.mu = constants.mu;
    report.m = m;
    report.n = n;
    report.runs = traces.size();
    report.estimated_constants = constants.estimated;
    report.in_scope = opt.step_size < 1.0 / constants.L;

    const double runs = static_cast<double>(traces.size());
    std::vector<double> mean_objective(K + 1, 0.0);
    std::vector<double> mean_grad_sq(K + 1, 0.0);
    double sigma2 = constants.sigma2;
    for (const auto& t : traces) {
        for (std::uint64_t k = 0; k <= K; ++k) {
            mean_objective[k] += t.records[k].objective / runs;
            mean_grad_sq[k] += t.records[k].grad_norm_sq / runs;
            sigma2 = std::max(sigma2, t.records[k].grad_variance);
        }
    }
    report.sigma2 = sigma2;
    report.gap0 = mean_objective[0] - constants.optimum_loss;

    const double alpha = opt.step_size;
    const double md = static_cast<double>(m);
    const double ratio = 1.0 + md / static_cast<double>(n);

    double grad_sum = 0.0;
    bool all = true;
    for (std::uint64_t k = 1; k <= K; ++k) {
        const double kd = static_cast<double>(k);
        BoundCheckpoint cp;
        cp.epoch = k;
        if (mode == BoundMode::pl) {
            cp.lhs = mean_objective[k] - constants.optimum_loss;
            cp.rhs = std::pow(1.0 - constants.mu * alpha, kd) * report.gap0 +
                     2.0 * alpha * constants.kappa() * md * constants.L * ratio * sigma2;
        } else {
            grad_sum += mean_grad_sq[k - 1];
            cp.lhs = grad_sum / kd;
            cp.rhs = 2.0 * md * report.gap0 / (alpha * kd) + alpha * md * constants.L * ratio * sigma2;
        }
        cp.passed = cp.lhs <= cp.rhs;
        all = all && cp.passed;
        report.checkpoints.push_back(cp);
    }
    report.passed = report.in_scope && all;
    return report;
}

nlohmann::json to_json(const ConvergenceReport& report) {
    nlohmann::json cps = nlohmann::json::array();
    for (const auto& cp : report.checkpoints) {
        cps.push_back({{"epoch", cp.epoch}, {"lhs", cp.lhs}, {"rhs", cp.rhs}, {"passed", cp.passed}});
    }
    return {{"mode", to_string(report.mode)},
            {"alpha", report.alpha},
            {"L", report.L},
            {"mu", report.mu},
            {"sigma2", report.sigma2},
            {"gap0", report.gap0},
            {"m", report.m},
            {"n", report.n},
            {"runs", report.runs},
            {"in_scope", report.in_scope},
            {"constants", report.estimated_constants ? "estimated" : "exact"},
            {"lhs", report.final_checkpoint().lhs},
            {"rhs", report.final_checkpoint().rhs},
            {"passed", report.passed},
            {"checkpoints", cps}};
}

}  // namespace srs
