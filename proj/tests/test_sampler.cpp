#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "srs/error.hpp"
#include "srs/sampler.hpp"
#include "srs/simulator.hpp"

using namespace srs;

TEST_CASE("subsets are sorted, distinct and in range") {
    Xoshiro256 rng(1);
    SubsetDrawer drawer(30);
    for (int i = 0; i < 1000; ++i) {
        const auto s = drawer.draw(1 + i % 30, rng);
        CHECK(s.size() == static_cast<std::size_t>(1 + i % 30));
        CHECK(std::is_sorted(s.begin(), s.end()));
        CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
        CHECK(s.back() < 30);
    }
    CHECK_THROWS_AS(drawer.draw(31, rng), InvalidArgument);
    CHECK_THROWS_AS(drawer.draw(0, rng), InvalidArgument);
}

TEST_CASE("reused drawer yields uniform subsets") {
    // All C(6,3) = 20 subsets equally likely: chi-square with 19 dof.
    Xoshiro256 rng(2024);
    SubsetDrawer drawer(6);
    std::vector<std::uint64_t> counts(20, 0);
    const std::uint64_t draws = 200000;
    for (std::uint64_t i = 0; i < draws; ++i) ++counts[rank_subset(6, drawer.draw(3, rng))];
    double chi2 = 0.0;
    const double e = static_cast<double>(draws) / 20.0;
    for (auto c : counts) chi2 += (c - e) * (c - e) / e;
    CHECK(chi2 < 43.82);  // upper 0.1% point

    // One-shot draws too.
    std::vector<std::uint64_t> single(10, 0);
    for (std::uint64_t i = 0; i < 100000; ++i) ++single[rank_subset(5, draw_subset(5, 2, rng))];
    chi2 = 0.0;
    for (auto c : single) chi2 += (c - 10000.0) * (c - 10000.0) / 10000.0;
    CHECK(chi2 < 27.88);  // 9 dof
}

TEST_CASE("schedule refresh interval") {
    const auto s1 = build_schedule(20, {4, 1, 7}, 6);
    CHECK(s1.K() == 6);
    const auto s3 = build_schedule(20, {4, 3, 7}, 7);
    CHECK(s3.epochs[0] == s3.epochs[1]);
    CHECK(s3.epochs[1] == s3.epochs[2]);
    CHECK(s3.epochs[3] == s3.epochs[4]);
    CHECK(s3.epochs[4] == s3.epochs[5]);
    CHECK(s3.epochs[6].size() == 4);
    const auto fixed = build_schedule(20, {4, 5, 7}, 5);
    for (const auto& e : fixed.epochs) CHECK(e == fixed.epochs[0]);
    CHECK(build_schedule(20, {4, 1, 7}, 6) == s1);
    CHECK(!(build_schedule(20, {4, 1, 8}, 6) == s1));
    CHECK_THROWS_AS(build_schedule(20, {4, 0, 7}, 5), InvalidArgument);
    CHECK_THROWS_AS(build_schedule(20, {21, 1, 7}, 5), InvalidArgument);

    const auto cov = coverage_of_schedule(s3);
    CHECK(cov[0] == std::pair<std::uint64_t, std::uint64_t>{1, 4});
    CHECK(cov[2].second == 4);
    for (std::size_t i = 1; i < cov.size(); ++i) CHECK(cov[i].second >= cov[i - 1].second);
}

TEST_CASE("full-set schedule covers everything at once") {
    const auto s = build_schedule(9, {9, 1, 3}, 4);
    for (const auto& e : s.epochs) CHECK(e.size() == 9);
    for (const auto& [k, c] : coverage_of_schedule(s)) CHECK(c == 9);
}

TEST_CASE("mean coverage curve tracks the closed form for R = 1") {
    const auto curve = mean_coverage_curve(20, 2, 1, 20, 4000, 5);
    for (std::uint64_t k = 1; k <= 20; ++k) {
        CHECK(curve[k - 1] == doctest::Approx(to_double(expected_coverage({20, 2, k}))).epsilon(0.02));
    }
    const auto slow = mean_coverage_curve(20, 2, 10, 20, 4000, 5);
    CHECK(slow[9] == doctest::Approx(2.0));
    CHECK(slow[10] == doctest::Approx(to_double(expected_coverage({20, 2, 2}))).epsilon(0.02));
    CHECK(mean_coverage_curve(20, 2, 1, 20, 100, 5) == mean_coverage_curve(20, 2, 1, 20, 100, 5));
}

TEST_CASE("schedule json round-trip") {
    const auto s = build_schedule(15, {3, 2, 42}, 5);
    const auto j = to_json(s);
    CHECK(j.at("R") == 2);
    CHECK(schedule_from_json(j) == s);
    auto bad = j;
    bad["epochs"][0] = {1, 1, 2};
    CHECK_THROWS_AS(schedule_from_json(bad), InvalidArgument);
    bad = j;
    bad["epochs"][0] = {1, 2, 15};
    CHECK_THROWS_AS(schedule_from_json(bad), InvalidArgument);
}

TEST_CASE("subset fingerprint") {
    CHECK(subset_fingerprint({1, 2, 3}) == subset_fingerprint({1, 2, 3}));
    CHECK(subset_fingerprint({1, 2, 3}) != subset_fingerprint({1, 2, 4}));
}
