#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <json.hpp>

#include "srs/dynamics.hpp"
#include "srs/sampler.hpp"

namespace srs {

/// Outcome -> probability.
using Pmf = std::map<std::int64_t, double>;

enum class SimulationKind { coverage, occupancy };

struct SimulationResult {
    SimulationKind kind = SimulationKind::coverage;
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    std::uint64_t K = 0;  // coverage only
    std::uint64_t s = 0;  // occupancy only
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::map<std::uint64_t, std::uint64_t> counts;

    Pmf empirical_pmf() const;
    double mean() const;
    double variance() const;
    bool operator==(const SimulationResult&) const = default;
};

/// How trials are spread over threads. Trials are cut into batches of
/// `batch_size`; batch b uses stream b of the seeded generator, so counts are
/// identical for any worker count. workers = 0 reads SRS_WORKERS from the
/// environment and falls back to the hardware concurrency.
struct ParallelOptions {
    unsigned workers = 0;
    std::uint64_t batch_size = 1 << 14;
};

SimulationResult simulate_coverage(const SamplingConfig& config, std::uint64_t trials,
                                   std::uint64_t seed, ParallelOptions parallel = {});

/// Draw counts until at least s distinct samples have been seen.
SimulationResult simulate_occupancy(std::uint64_t n, std::uint64_t m, std::uint64_t s,
                                    std::uint64_t trials, std::uint64_t seed,
                                    ParallelOptions parallel = {});

/// Lexicographic rank of a sorted m-subset of [0, n) among all C(n, m).
std::uint64_t rank_subset(std::uint64_t n, const IndexSet& subset);
IndexSet unrank_subset(std::uint64_t n, std::uint64_t m, std::uint64_t rank);

/// Exact pmf of |S| by visiting every one of the C(n,m)^K equally likely
/// subset sequences. Throws EnumerationTooLarge when that count exceeds
/// `max_sequences`.
CoverageDistribution enumerate_coverage(const SamplingConfig& config,
                                        std::uint64_t max_sequences = 10'000'000);

double tv_distance(const Pmf& p, const Pmf& q);
Pmf to_pmf(const CoverageDistribution& dist);

nlohmann::json to_json(const SimulationResult& result);

}  // namespace srs
