#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "srs/random.hpp"

namespace srs {

/// Sorted, distinct sample indices.
using IndexSet = std::vector<std::uint32_t>;

/// Uniform m-subsets of [0, n) by partial Fisher-Yates shuffle.
///
/// The drawer keeps its permutation between draws. A partial shuffle of any
/// fixed arrangement yields a uniform m-subset, so reuse costs O(m) per draw
/// without changing the distribution.
class SubsetDrawer {
public:
    explicit SubsetDrawer(std::uint64_t n);

    /// Writes a sorted uniform m-subset into `out`. Throws if m > n or m = 0.
    void draw(std::uint64_t m, Xoshiro256& rng, IndexSet& out);
    IndexSet draw(std::uint64_t m, Xoshiro256& rng);

    std::uint64_t n() const { return pool_.size(); }

private:
    std::vector<std::uint32_t> pool_;
};

/// One-shot draw from a fresh [0, n) arrangement.
IndexSet draw_subset(std::uint64_t n, std::uint64_t m, Xoshiro256& rng);

/// Subset size, refresh interval R (epochs per draw) and schedule seed.
/// R = 1 draws a new subset every epoch; R = K keeps one subset throughout.
struct SelectionPolicy {
    std::uint64_t m = 1;
    std::uint64_t interval = 1;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const SelectionPolicy&) const = default;
};

struct SubsetSchedule {
    std::uint64_t n = 0;
    SelectionPolicy policy;
    std::vector<IndexSet> epochs;  // epochs[k - 1] is V_k

    std::uint64_t K() const { return epochs.size(); }
    bool operator==(const SubsetSchedule&) const = default;
};

/// Epoch k (1-based) takes a fresh draw iff (k - 1) % R == 0; otherwise it
/// repeats the previous subset. Deterministic in (n, policy, K).
SubsetSchedule build_schedule(std::uint64_t n, const SelectionPolicy& policy, std::uint64_t K);

/// (epoch, distinct samples seen in epochs 1..epoch) for every epoch.
std::vector<std::pair<std::uint64_t, std::uint64_t>> coverage_of_schedule(
    const SubsetSchedule& schedule);

/// Mean prefix-coverage curve over `runs` schedules whose seeds derive from
/// `base_seed`. Entry k - 1 is the mean distinct count after epoch k.
std::vector<double> mean_coverage_curve(std::uint64_t n, std::uint64_t m, std::uint64_t interval,
                                        std::uint64_t K, std::uint64_t runs,
                                        std::uint64_t base_seed);

/// FNV-1a over the indices; used as a subset fingerprint in traces.
std::uint64_t subset_fingerprint(const IndexSet& subset);

nlohmann::json to_json(const SubsetSchedule& schedule);
SubsetSchedule schedule_from_json(const nlohmann::json& j);

}  // namespace srs
