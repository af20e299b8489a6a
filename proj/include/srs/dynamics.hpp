#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srs/combinatorics.hpp"

namespace srs {

/// Ground-set size n, per-epoch subset size m, epoch count K.
struct SamplingConfig {
    std::uint64_t n = 1;
    std::uint64_t m = 1;
    std::uint64_t K = 1;

    /// Throws InvalidArgument unless 1 <= m <= n and K >= 1.
    void validate() const;
    bool operator==(const SamplingConfig&) const = default;
};

enum class DistributionSource { exact, enumerated, monte_carlo };
std::string to_string(DistributionSource source);

/// Distribution of |S|, the number of distinct samples seen after K epochs.
/// pmf[l] = P(|S| = l) for l = 0..n.
struct CoverageDistribution {
    SamplingConfig config;
    std::vector<BigRational> pmf;
    DistributionSource source = DistributionSource::exact;

    BigRational mean() const;
    BigRational total() const;
};

/// Upper bound on n for alternating-sum computations in exact arithmetic.
struct ExactLimits {
    std::uint64_t max_n = 200;
};

CoverageDistribution coverage_pmf(const SamplingConfig& config, ExactLimits limits = {});
BigRational full_coverage_prob(const SamplingConfig& config, ExactLimits limits = {});

/// n * (1 - ((n - m) / n)^K), exact. No size limit.
BigRational expected_coverage(const SamplingConfig& config);

struct CoverageCell {
    BigRational ratio;      // requested m/n
    std::uint64_t n = 0;
    std::uint64_t m = 0;    // m actually used after rounding ratio * n
    std::uint64_t K = 0;
    BigRational expected;   // E|S|
    double percent = 0.0;   // 100 * E|S| / n
};

/// Expected coverage percentage for each (ratio, K) pair, ratio-major order.
/// m = round(ratio * n), half away from zero, clamped to [1, n].
std::vector<CoverageCell> coverage_table(const std::vector<BigRational>& ratios,
                                         const std::vector<std::uint64_t>& epochs,
                                         std::uint64_t n);

/// Distribution of the number of epochs needed to see s distinct samples,
/// truncated at k_max. pmf[k - 1] = P(epochs = k).
struct OccupancyDistribution {
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    std::uint64_t s = 0;
    std::uint64_t k_max = 0;
    std::vector<BigRational> pmf;
    RealApprox tail_mass;     // exact 1 - sum(pmf), rounded
    double tail_bound = 0.0;  // n * ((n - m) / n)^k_max

    BigRational cdf(std::uint64_t k) const;
};

/// P(epochs = k) for a single k >= 1, exact.
BigRational occupancy_probability(std::uint64_t n, std::uint64_t m, std::uint64_t s,
                                  std::uint64_t k, ExactLimits limits = {});

/// k_max is the smallest k with n * ((n - m) / n)^k <= epsilon_tail (and at
/// least ceil(s / m)). That bound dominates P(epochs > k) by a union bound over
/// the samples still unseen.
OccupancyDistribution occupancy_pmf(std::uint64_t n, std::uint64_t m, std::uint64_t s,
                                    double epsilon_tail = 1e-9, ExactLimits limits = {});

BigRational expected_occupancy(std::uint64_t n, std::uint64_t m, std::uint64_t s,
                               ExactLimits limits = {});

/// n * H_n.
BigRational classical_coupon_expectation(std::uint64_t n);

}  // namespace srs
