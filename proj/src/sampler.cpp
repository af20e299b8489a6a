#include "srs/sampler.hpp"

#include <algorithm>
#include <numeric>

#include "srs/error.hpp"

namespace srs {

SubsetDrawer::SubsetDrawer(std::uint64_t n) : pool_(n) {
    if (n == 0) throw InvalidArgument("draw_subset: n must be >= 1");
    if (n > std::uint64_t{1} << 32) throw InvalidArgument("draw_subset: n exceeds 2^32");
    std::iota(pool_.begin(), pool_.end(), std::uint32_t{0});
}

void SubsetDrawer::draw(std::uint64_t m, Xoshiro256& rng, IndexSet& out) {
    const std::uint64_t n = pool_.size();
    if (m == 0 || m > n) {
        throw InvalidArgument("draw_subset: need 1 <= m <= n (m = " + std::to_string(m) +
                              ", n = " + std::to_string(n) + ")");
    }
    for (std::uint64_t i = 0; i < m; ++i) {
        const std::uint64_t j = i + rng.uniform_below(n - i);
        std::swap(pool_[i], pool_[j]);
    }
    out.assign(pool_.begin(), pool_.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(out.begin(), out.end());
}

IndexSet SubsetDrawer::draw(std::uint64_t m, Xoshiro256& rng) {
    IndexSet out;
    draw(m, rng, out);
    return out;
}

IndexSet draw_subset(std::uint64_t n, std::uint64_t m, Xoshiro256& rng) {
    SubsetDrawer drawer(n);
    return drawer.draw(m, rng);
}

void SelectionPolicy::validate() const {
    if (m < 1) throw InvalidArgument("selection policy: m must be >= 1");
    if (interval < 1) throw InvalidArgument("selection policy: interval R must be >= 1");
}

SubsetSchedule build_schedule(std::uint64_t n, const SelectionPolicy& policy, std::uint64_t K) {
    policy.validate();
    if (K < 1) throw InvalidArgument("build_schedule: K must be >= 1");
    if (policy.m > n) throw InvalidArgument("build_schedule: m must not exceed n");

    SubsetSchedule schedule{n, policy, {}};
    schedule.epochs.reserve(K);
    Xoshiro256 rng(policy.seed);
    SubsetDrawer drawer(n);
    for (std::uint64_t k = 1; k <= K; ++k) {
        if ((k - 1) % policy.interval == 0) {
            schedule.epochs.push_back(drawer.draw(policy.m, rng));
        } else {
            schedule.epochs.push_back(schedule.epochs.back());
        }
    }
    return schedule;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> coverage_of_schedule(
    const SubsetSchedule& schedule) {
    std::vector<bool> seen(schedule.n, false);
    std::uint64_t distinct = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> curve;
    curve.reserve(schedule.epochs.size());
    for (std::size_t k = 0; k < schedule.epochs.size(); ++k) {
        for (auto idx : schedule.epochs[k]) {
            if (!seen[idx]) {
                seen[idx] = true;
                ++distinct;
            }
        }
        curve.emplace_back(k + 1, distinct);
    }
    return curve;
}

std::vector<double> mean_coverage_curve(std::uint64_t n, std::uint64_t m, std::uint64_t interval,
                                        std::uint64_t K, std::uint64_t runs,
                                        std::uint64_t base_seed) {
    if (runs == 0) throw InvalidArgument("mean_coverage_curve: runs must be >= 1");
    std::vector<std::uint64_t> sums(K, 0);
    for (std::uint64_t r = 0; r < runs; ++r) {
        const SelectionPolicy policy{m, interval, derive_seed(base_seed, r)};
        const auto curve = coverage_of_schedule(build_schedule(n, policy, K));
        for (std::size_t k = 0; k < curve.size(); ++k) sums[k] += curve[k].second;
    }
    std::vector<double> mean(K);
    for (std::size_t k = 0; k < K; ++k) {
        mean[k] = static_cast<double>(sums[k]) / static_cast<double>(runs);
    }
    return mean;
}

std::uint64_t subset_fingerprint(const IndexSet& subset) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint32_t idx : subset) {
        for (int b = 0; b < 4; ++b) {
            h ^= (idx >> (8 * b)) & 0xffu;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

nlohmann::json to_json(const SubsetSchedule& schedule) {
    nlohmann::json j;
    j["n"] = schedule.n;
    j["m"] = schedule.policy.m;
    j["R"] = schedule.policy.interval;
    j["K"] = schedule.K();
    j["seed"] = schedule.policy.seed;
    j["epochs"] = schedule.epochs;
    return j;
}

SubsetSchedule schedule_from_json(const nlohmann::json& j) {
    SubsetSchedule schedule;
    schedule.n = j.at("n").get<std::uint64_t>();
    schedule.policy.m = j.at("m").get<std::uint64_t>();
    schedule.policy.interval = j.at("R").get<std::uint64_t>();
    schedule.policy.seed = j.at("seed").get<std::uint64_t>();
    schedule.epochs = j.at("epochs").get<std::vector<IndexSet>>();
    if (schedule.epochs.size() != j.at("K").get<std::uint64_t>()) {
        throw InvalidArgument("schedule JSON: K does not match the number of epochs");
    }
    for (const auto& epoch : schedule.epochs) {
        if (epoch.size() != schedule.policy.m ||
            !std::is_sorted(epoch.begin(), epoch.end()) ||
            std::adjacent_find(epoch.begin(), epoch.end()) != epoch.end() ||
            (!epoch.empty() && epoch.back() >= schedule.n)) {
            throw InvalidArgument("schedule JSON: epoch is not a sorted m-subset of [0, n)");
        }
    }
    return schedule;
}

}  // namespace srs
