#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "srs/dynamics.hpp"

namespace srs {

/// sqrt(log(1/delta) * (1 + n (1 - m/n)^K) / n). The bracket is evaluated
/// exactly and converted to double at the end. Throws unless 0 < delta < 1.
double tail_term(std::uint64_t n, std::uint64_t m, std::uint64_t K, double delta);

/// Coverage-dependent pieces of the generalization bound for one config.
///
///   inv_sqrt_mean  = E[1 / sqrt|S|]               (exact pmf weights)
///   jensen_term    = E[sqrt((n + 1 - |S|) / n)]   (exact pmf weights)
///   mid_term       = sqrt((n + 1 - E|S|) / n)
///   final_bound    = sqrt((1 + n (1 - m/n)^K) / n)
///
/// The Rademacher complexity term is not evaluated; `rademacher_term` says so.
struct GeneralizationReport {
    SamplingConfig config;
    double delta = 0.05;
    double prob_empty = 0.0;  // P(|S| = 0), always 0
    std::optional<double> inv_sqrt_mean;
    std::optional<double> jensen_term;
    double mid_term = 0.0;
    double final_bound = 0.0;
    double tail_term = 0.0;
    std::string rademacher_term = "not computed";
    bool chain_holds = false;  // inv_sqrt_mean <= jensen <= mid <= final (rel. tol 1e-12)
};

/// Throws ExactModeRejected beyond the exact-mode bound.
GeneralizationReport inv_sqrt_coverage_chain(const SamplingConfig& config, double delta = 0.05,
                                             ExactLimits limits = {});

nlohmann::json to_json(const GeneralizationReport& report);

}  // namespace srs
