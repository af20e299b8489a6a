#include "srs/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "srs/error.hpp"

namespace srs {

namespace {

unsigned resolve_workers(unsigned requested) {
    if (requested != 0) return requested;
    if (const char* env = std::getenv("SRS_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

using Counts = std::map<std::uint64_t, std::uint64_t>;

// Runs `trial(rng, drawer, scratch)` for every trial and tallies its outcome.
template <typename Trial>
Counts run_batches(std::uint64_t n, std::uint64_t trials, std::uint64_t seed,
                   const ParallelOptions& parallel, Trial trial) {
    if (trials == 0) throw InvalidArgument("simulation: trials must be >= 1");
    if (parallel.batch_size == 0) throw InvalidArgument("simulation: batch_size must be >= 1");
    const std::uint64_t batches = (trials + parallel.batch_size - 1) / parallel.batch_size;

    std::vector<Xoshiro256> streams;
    streams.reserve(batches);
    Xoshiro256 base(seed);
    for (std::uint64_t b = 0; b < batches; ++b) {
        streams.push_back(base);
        base.jump();
    }

    std::vector<Counts> per_batch(batches);
    auto work = [&](std::uint64_t first, std::uint64_t stride) {
        SubsetDrawer drawer(n);
        IndexSet scratch;
        for (std::uint64_t b = first; b < batches; b += stride) {
            Xoshiro256 rng = streams[b];
            // Fresh arrangement per batch so each batch depends only on its stream.
            drawer = SubsetDrawer(n);
            const std::uint64_t begin = b * parallel.batch_size;
            const std::uint64_t end = std::min(trials, begin + parallel.batch_size);
            for (std::uint64_t t = begin; t < end; ++t) ++per_batch[b][trial(rng, drawer, scratch)];
        }
    };

    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(resolve_workers(parallel.workers), batches));
    if (workers <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
        for (auto& t : pool) t.join();
    }

    Counts merged;
    for (const auto& c : per_batch) {
        for (const auto& [outcome, count] : c) merged[outcome] += count;
    }
    return merged;
}

}  // namespace

Pmf SimulationResult::empirical_pmf() const {
    Pmf pmf;
    for (const auto& [outcome, count] : counts) {
        pmf[static_cast<std::int64_t>(outcome)] =
            static_cast<double>(count) / static_cast<double>(trials);
    }
    return pmf;
}

double SimulationResult::mean() const {
    long double acc = 0;
    for (const auto& [outcome, count] : counts) acc += static_cast<long double>(outcome) * count;
    return static_cast<double>(acc / trials);
}

double SimulationResult::variance() const {
    const long double mu = mean();
    long double acc = 0;
    for (const auto& [outcome, count] : counts) {
        const long double d = static_cast<long double>(outcome) - mu;
        acc += d * d * count;
    }
    return static_cast<double>(acc / trials);
}

SimulationResult simulate_coverage(const SamplingConfig& config, std::uint64_t trials,
                                   std::uint64_t seed, ParallelOptions parallel) {
    config.validate();
    const auto [n, m, K] = config;
    auto trial = [n = n, m = m, K = K](Xoshiro256& rng, SubsetDrawer& drawer, IndexSet& subset) {
        std::vector<bool> seen(n, false);
        std::uint64_t distinct = 0;
        for (std::uint64_t k = 0; k < K; ++k) {
            drawer.draw(m, rng, subset);
            for (auto idx : subset) {
                if (!seen[idx]) {
                    seen[idx] = true;
                    ++distinct;
                }
            }
        }
        return distinct;
    };
    SimulationResult result{SimulationKind::coverage, n, m, K, 0, trials, seed, {}};
    result.counts = run_batches(n, trials, seed, parallel, trial);
    return result;
}

SimulationResult simulate_occupancy(std::uint64_t n, std::uint64_t m, std::uint64_t s,
                                    std::uint64_t trials, std::uint64_t seed,
                                    ParallelOptions parallel) {
    if (m < 1 || m > n) throw InvalidArgument("simulate_occupancy: need 1 <= m <= n");
    if (s < 1 || s > n) throw InvalidArgument("simulate_occupancy: need 1 <= s <= n");
    auto trial = [n, m, s](Xoshiro256& rng, SubsetDrawer& drawer, IndexSet& subset) {
        std::vector<bool> seen(n, false);
        std::uint64_t distinct = 0;
        std::uint64_t draws = 0;
        while (distinct < s) {
            drawer.draw(m, rng, subset);
            ++draws;
            for (auto idx : subset) {
                if (!seen[idx]) {
                    seen[idx] = true;
                    ++distinct;
                }
            }
        }
        return draws;
    };
    SimulationResult result{SimulationKind::occupancy, n, m, 0, s, trials, seed, {}};
    result.counts = run_batches(n, trials, seed, parallel, trial);
    return result;
}

std::uint64_t rank_subset(std::uint64_t n, const IndexSet& subset) {
    // Subsets that start with a smaller element at position i precede this one.
    const std::uint64_t m = subset.size();
    std::uint64_t rank = 0;
    std::uint64_t next = 0;
    for (std::uint64_t i = 0; i < m; ++i) {
        if (subset[i] >= n || subset[i] < next) throw InvalidArgument("rank_subset: not a sorted subset of [0, n)");
        for (std::uint64_t v = next; v < subset[i]; ++v) {
            rank += binomial(n - v - 1, m - i - 1).convert_to<std::uint64_t>();
        }
        next = subset[i] + 1;
    }
    return rank;
}

IndexSet unrank_subset(std::uint64_t n, std::uint64_t m, std::uint64_t rank) {
    if (m > n) throw InvalidArgument("unrank_subset: m > n");
    IndexSet subset;
    subset.reserve(m);
    std::uint64_t v = 0;
    for (std::uint64_t i = 0; i < m; ++i) {
        while (true) {
            const auto block = binomial(n - v - 1, m - i - 1).convert_to<std::uint64_t>();
            if (rank < block) break;
            rank -= block;
            ++v;
        }
        subset.push_back(static_cast<std::uint32_t>(v));
        ++v;
    }
    if (rank != 0) throw InvalidArgument("unrank_subset: rank out of range");
    return subset;
}

CoverageDistribution enumerate_coverage(const SamplingConfig& config,
                                        std::uint64_t max_sequences) {
    config.validate();
    const auto [n, m, K] = config;
    if (n > 64) throw EnumerationTooLarge("enumerate_coverage: n > 64 is not supported");
    const BigInteger per_epoch = binomial(n, m);
    const BigInteger sequences = integer_pow(per_epoch, K);
    if (sequences > max_sequences) {
        throw EnumerationTooLarge("enumerate_coverage: C(n,m)^K = " + sequences.str() +
                                  " sequences exceeds the guard of " +
                                  std::to_string(max_sequences));
    }
    const auto subsets = per_epoch.convert_to<std::uint64_t>();

    auto mask_of = [n = n, m = m](std::uint64_t rank) {
        std::uint64_t mask = 0;
        for (auto idx : unrank_subset(n, m, rank)) mask |= std::uint64_t{1} << idx;
        return mask;
    };

    // Odometer over K digits in [0, C(n,m)); prefix[k] is the union of digits 0..k.
    std::vector<std::uint64_t> digit(K, 0);
    std::vector<std::uint64_t> prefix(K);
    const std::uint64_t first = mask_of(0);
    for (std::uint64_t k = 0; k < K; ++k) prefix[k] = first;

    std::vector<std::uint64_t> counts(n + 1, 0);
    while (true) {
        ++counts[std::popcount(prefix[K - 1])];
        std::uint64_t pos = K;
        while (pos > 0 && digit[pos - 1] + 1 == subsets) --pos;
        if (pos == 0) break;
        --pos;
        ++digit[pos];
        for (std::uint64_t k = pos + 1; k < K; ++k) digit[k] = 0;
        const std::uint64_t base = pos == 0 ? 0 : prefix[pos - 1];
        prefix[pos] = base | mask_of(digit[pos]);
        for (std::uint64_t k = pos + 1; k < K; ++k) prefix[k] = prefix[k - 1] | first;
    }

    CoverageDistribution dist{config, std::vector<BigRational>(n + 1),
                              DistributionSource::enumerated};
    for (std::uint64_t l = 0; l <= n; ++l) dist.pmf[l] = make_rational(counts[l], sequences);
    return dist;
}

double tv_distance(const Pmf& p, const Pmf& q) {
    double acc = 0.0;
    auto pi = p.begin();
    auto qi = q.begin();
    while (pi != p.end() || qi != q.end()) {
        if (qi == q.end() || (pi != p.end() && pi->first < qi->first)) {
            acc += std::abs(pi->second);
            ++pi;
        } else if (pi == p.end() || qi->first < pi->first) {
            acc += std::abs(qi->second);
            ++qi;
        } else {
            acc += std::abs(pi->second - qi->second);
            ++pi;
            ++qi;
        }
    }
    return 0.5 * acc;
}

Pmf to_pmf(const CoverageDistribution& dist) {
    Pmf pmf;
    for (std::size_t l = 0; l < dist.pmf.size(); ++l) {
        if (dist.pmf[l] != 0) pmf[static_cast<std::int64_t>(l)] = to_double(dist.pmf[l]);
    }
    return pmf;
}

nlohmann::json to_json(const SimulationResult& result) {
    nlohmann::json j;
    nlohmann::json config;
    config["n"] = result.n;
    config["m"] = result.m;
    if (result.kind == SimulationKind::coverage) {
        j["kind"] = "coverage";
        config["K"] = result.K;
    } else {
        j["kind"] = "occupancy";
        config["s"] = result.s;
    }
    j["config"] = config;
    j["trials"] = result.trials;
    j["seed"] = result.seed;
    nlohmann::json pmf = nlohmann::json::object();
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [outcome, p] : result.empirical_pmf()) pmf[std::to_string(outcome)] = p;
    for (const auto& [outcome, c] : result.counts) counts[std::to_string(outcome)] = c;
    j["pmf"] = pmf;
    j["counts"] = counts;
    j["mean"] = result.mean();
    j["variance"] = result.variance();
    return j;
}

}  // namespace srs
