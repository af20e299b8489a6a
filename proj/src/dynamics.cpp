#include "srs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srs/error.hpp"

namespace srs {

namespace mp = boost::multiprecision;

namespace {

void require_exact(std::uint64_t n, const ExactLimits& limits) {
    if (n > limits.max_n) {
        throw ExactModeRejected("n = " + std::to_string(n) + " exceeds the exact-mode bound of " +
                                std::to_string(limits.max_n) +
                                "; use the Monte Carlo simulator for this size");
    }
}

void validate_occupancy(std::uint64_t n, std::uint64_t m, std::uint64_t s) {
    if (m < 1 || m > n) throw InvalidArgument("occupancy: need 1 <= m <= n");
    if (s < 1 || s > n) throw InvalidArgument("occupancy: need 1 <= s <= n");
}

// (-1)^(s-i+1) C(n,i) C(n-i-1, n-s): the i-th coefficient of the occupancy sums.
BigInteger occupancy_coefficient(std::uint64_t n, std::uint64_t s, std::uint64_t i) {
    BigInteger c = binomial(n, i) * binomial(n - i - 1, n - s);
    return ((s - i + 1) % 2 == 0) ? c : BigInteger(-c);
}

}  // namespace

void SamplingConfig::validate() const {
    if (n < 1) throw InvalidArgument("n must be >= 1");
    if (m < 1 || m > n) {
        throw InvalidArgument("m must satisfy 1 <= m <= n (got m = " + std::to_string(m) +
                              ", n = " + std::to_string(n) + ")");
    }
    if (K < 1) throw InvalidArgument("K must be >= 1");
}

std::string to_string(DistributionSource source) {
    switch (source) {
        case DistributionSource::exact: return "exact";
        case DistributionSource::enumerated: return "enumerated";
        case DistributionSource::monte_carlo: return "monte-carlo";
    }
    return "unknown";
}

BigRational CoverageDistribution::mean() const {
    BigRational acc = 0;
    for (std::size_t l = 0; l < pmf.size(); ++l) acc += pmf[l] * BigRational(l);
    return acc;
}

BigRational CoverageDistribution::total() const {
    BigRational acc = 0;
    for (const auto& p : pmf) acc += p;
    return acc;
}

CoverageDistribution coverage_pmf(const SamplingConfig& config, ExactLimits limits) {
    config.validate();
    require_exact(config.n, limits);
    const auto [n, m, K] = config;

    // Every term shares the denominator C(n,m)^K; work with integer numerators.
    const BigInteger denom = integer_pow(binomial(n, m), K);
    std::vector<BigInteger> powered(n + 1);
    for (std::uint64_t j = 0; j <= n; ++j) powered[j] = integer_pow(binomial(j, m), K);

    CoverageDistribution dist{config, std::vector<BigRational>(n + 1), DistributionSource::exact};
    for (std::uint64_t l = 0; l <= n; ++l) {
        BigInteger inner = 0;
        BigInteger choose = 1;  // C(l, i)
        for (std::uint64_t i = 0; i <= l; ++i) {
            if (i % 2 == 0) {
                inner += choose * powered[l - i];
            } else {
                inner -= choose * powered[l - i];
            }
            choose = choose * (l - i) / (i + 1);
        }
        dist.pmf[l] = make_rational(binomial(n, l) * inner, denom);
        if (l < m && dist.pmf[l] != 0) {
            throw std::logic_error("coverage_pmf: nonzero mass below m at l = " + std::to_string(l));
        }
    }
    return dist;
}

BigRational full_coverage_prob(const SamplingConfig& config, ExactLimits limits) {
    config.validate();
    require_exact(config.n, limits);
    const auto [n, m, K] = config;
    BigInteger inner = 0;
    for (std::uint64_t i = 0; i <= n; ++i) {
        BigInteger term = binomial(n, i) * integer_pow(binomial(n - i, m), K);
        if (i % 2 == 0) {
            inner += term;
        } else {
            inner -= term;
        }
    }
    return make_rational(inner, integer_pow(binomial(n, m), K));
}

BigRational expected_coverage(const SamplingConfig& config) {
    config.validate();
    const BigRational miss = make_rational(BigInteger(config.n - config.m), BigInteger(config.n));
    return BigRational(config.n) * (BigRational(1) - rational_pow(miss, config.K));
}

std::vector<CoverageCell> coverage_table(const std::vector<BigRational>& ratios,
                                         const std::vector<std::uint64_t>& epochs,
                                         std::uint64_t n) {
    if (n < 1) throw InvalidArgument("coverage_table: n must be >= 1");
    std::vector<CoverageCell> cells;
    cells.reserve(ratios.size() * epochs.size());
    for (const auto& ratio : ratios) {
        if (ratio <= 0 || ratio > 1) throw InvalidArgument("coverage_table: ratio must be in (0, 1]");
        const BigRational scaled = ratio * BigRational(n) + BigRational(1, 2);
        BigInteger rounded = mp::numerator(scaled) / mp::denominator(scaled);
        auto m = rounded.convert_to<std::uint64_t>();
        m = std::clamp<std::uint64_t>(m, 1, n);
        for (std::uint64_t K : epochs) {
            const SamplingConfig config{n, m, K};
            BigRational expected = expected_coverage(config);
            const double percent = 100.0 * to_double(expected / BigRational(n));
            cells.push_back(CoverageCell{ratio, n, m, K, std::move(expected), percent});
        }
    }
    return cells;
}

BigRational OccupancyDistribution::cdf(std::uint64_t k) const {
    BigRational acc = 0;
    for (std::uint64_t j = 0; j < std::min<std::uint64_t>(k, pmf.size()); ++j) acc += pmf[j];
    return acc;
}

BigRational occupancy_probability(std::uint64_t n, std::uint64_t m, std::uint64_t s,
                                  std::uint64_t k, ExactLimits limits) {
    validate_occupancy(n, m, s);
    require_exact(n, limits);
    if (k < 1) throw InvalidArgument("occupancy: epoch count k must be >= 1");
    const BigInteger total = binomial(n, m);
    BigInteger numerator = 0;
    for (std::uint64_t i = 0; i < s; ++i) {
        const BigInteger stuck = binomial(i, m);
        numerator += occupancy_coefficient(n, s, i) * (total - stuck) * integer_pow(stuck, k - 1);
    }
    return make_rational(numerator, integer_pow(total, k));
}

OccupancyDistribution occupancy_pmf(std::uint64_t n, std::uint64_t m, std::uint64_t s,
                                    double epsilon_tail, ExactLimits limits) {
    validate_occupancy(n, m, s);
    require_exact(n, limits);
    if (!(epsilon_tail > 0.0)) throw InvalidArgument("occupancy: epsilon_tail must be > 0");

    OccupancyDistribution dist;
    dist.n = n;
    dist.m = m;
    dist.s = s;

    const std::uint64_t k_min = (s + m - 1) / m;
    if (m >= s) {
        dist.k_max = 1;
        dist.tail_bound = 0.0;
    } else {
        const double miss = static_cast<double>(n - m) / static_cast<double>(n);
        const double nd = static_cast<double>(n);
        std::uint64_t k = k_min;
        if (nd > epsilon_tail) {
            const double estimate = std::ceil(std::log(epsilon_tail / nd) / std::log(miss));
            k = std::max<std::uint64_t>(k, static_cast<std::uint64_t>(std::max(1.0, estimate)));
        }
        while (nd * std::pow(miss, static_cast<double>(k)) > epsilon_tail) ++k;
        constexpr std::uint64_t kMaxSupport = 1'000'000;
        if (k > kMaxSupport) {
            throw ExactModeRejected("occupancy: truncation point " + std::to_string(k) +
                                    " is too large for exact evaluation; raise epsilon_tail");
        }
        dist.k_max = k;
        dist.tail_bound = nd * std::pow(miss, static_cast<double>(k));
    }

    // P(k) = sum_i coef_i (T - c_i) c_i^(k-1) / T^k, advanced one k at a time.
    const BigInteger total = binomial(n, m);
    std::vector<BigInteger> weight(s);
    std::vector<BigInteger> stuck(s);
    std::vector<BigInteger> power(s, BigInteger(1));
    for (std::uint64_t i = 0; i < s; ++i) {
        stuck[i] = binomial(i, m);
        weight[i] = occupancy_coefficient(n, s, i) * (total - stuck[i]);
    }
    BigInteger denom = total;
    BigRational mass = 0;
    dist.pmf.reserve(dist.k_max);
    for (std::uint64_t k = 1; k <= dist.k_max; ++k) {
        BigInteger numerator = 0;
        for (std::uint64_t i = 0; i < s; ++i) {
            numerator += weight[i] * power[i];
            power[i] *= stuck[i];
        }
        dist.pmf.push_back(make_rational(numerator, denom));
        mass += dist.pmf.back();
        denom *= total;
        if (k < k_min && dist.pmf.back() != 0) {
            throw std::logic_error("occupancy_pmf: nonzero mass below ceil(s/m)");
        }
    }
    dist.tail_mass = to_real(BigRational(1) - mass);
    return dist;
}

BigRational expected_occupancy(std::uint64_t n, std::uint64_t m, std::uint64_t s,
                               ExactLimits limits) {
    validate_occupancy(n, m, s);
    require_exact(n, limits);
    const BigInteger total = binomial(n, m);
    BigRational acc = 0;
    for (std::uint64_t i = 0; i < s; ++i) {
        acc += BigRational(occupancy_coefficient(n, s, i)) *
               make_rational(total, total - binomial(i, m));
    }
    return acc;
}

BigRational classical_coupon_expectation(std::uint64_t n) {
    return BigRational(n) * harmonic(n);
}

}  // namespace srs
