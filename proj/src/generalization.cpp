#include "srs/generalization.hpp"

#include <cmath>

#include "srs/error.hpp"

namespace srs {

namespace {

// Shared bracket 1 + n ((n - m) / n)^K.
BigRational coverage_deficit(const SamplingConfig& c) {
    const BigRational miss = make_rational(BigInteger(c.n - c.m), BigInteger(c.n));
    return BigRational(1) + BigRational(c.n) * rational_pow(miss, c.K);
}

bool leq(double a, double b) { return a <= b + 1e-12 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

double tail_term(std::uint64_t n, std::uint64_t m, std::uint64_t K, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("tail_term: delta must lie in (0, 1)");
    const SamplingConfig config{n, m, K};
    config.validate();
    const double inner = to_double(coverage_deficit(config) / BigRational(n));
    return std::sqrt(std::log(1.0 / delta) * inner);
}

GeneralizationReport inv_sqrt_coverage_chain(const SamplingConfig& config, double delta,
                                             ExactLimits limits) {
    config.validate();
    GeneralizationReport report;
    report.config = config;
    report.delta = delta;
    report.tail_term = tail_term(config.n, config.m, config.K, delta);

    const CoverageDistribution dist = coverage_pmf(config, limits);
    if (dist.pmf[0] != 0) throw std::logic_error("coverage pmf puts mass on |S| = 0");
    report.prob_empty = to_double(dist.pmf[0]);

    const double n = static_cast<double>(config.n);
    double inv_sqrt = 0.0;
    double jensen = 0.0;
    for (std::size_t l = 1; l < dist.pmf.size(); ++l) {
        if (dist.pmf[l] == 0) continue;
        const double weight = to_double(dist.pmf[l]);
        inv_sqrt += weight / std::sqrt(static_cast<double>(l));
        jensen += weight * std::sqrt((n + 1.0 - static_cast<double>(l)) / n);
    }
    report.inv_sqrt_mean = inv_sqrt;
    report.jensen_term = jensen;

    const BigRational mid_inner =
        (BigRational(config.n + 1) - expected_coverage(config)) / BigRational(config.n);
    report.mid_term = std::sqrt(to_double(mid_inner));
    report.final_bound = std::sqrt(to_double(coverage_deficit(config) / BigRational(config.n)));

    report.chain_holds = leq(inv_sqrt, jensen) && leq(jensen, report.mid_term) &&
                         leq(report.mid_term, report.final_bound);
    return report;
}

nlohmann::json to_json(const GeneralizationReport& report) {
    nlohmann::json j;
    j["config"] = {{"n", report.config.n}, {"m", report.config.m}, {"K", report.config.K}};
    j["delta"] = report.delta;
    j["prob_empty"] = report.prob_empty;
    j["exact_E_inv_sqrt"] = report.inv_sqrt_mean ? nlohmann::json(*report.inv_sqrt_mean) : nlohmann::json();
    j["jensen_term"] = report.jensen_term ? nlohmann::json(*report.jensen_term) : nlohmann::json();
    j["mid_term"] = report.mid_term;
    j["final_bound"] = report.final_bound;
    j["tail_term"] = report.tail_term;
    j["rademacher_term"] = report.rademacher_term;
    j["chain_holds"] = report.chain_holds;
    return j;
}

}  // namespace srs
