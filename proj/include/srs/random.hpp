#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace srs {

/// One SplitMix64 step; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives an independent 64-bit seed from (seed, salt).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

/// FNV-1a of a string, used to salt seeds with a subcommand name.
std::uint64_t name_salt(std::string_view name);

/// xoshiro256** 1.0.
///
/// Streams: `stream(k)` is the generator advanced by k jumps of 2^128 steps.
/// Parallel work is cut into fixed-size batches and batch k always draws from
/// stream k, so results do not depend on how many workers run the batches.
///
/// Bounded integers and doubles are produced by the members below rather than
/// <random> distributions, whose output differs between standard libraries.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    void jump();
    Xoshiro256 stream(std::uint64_t k) const;

    /// Uniform on [0, bound); bound > 0. Lemire's multiply-shift with rejection.
    std::uint64_t uniform_below(std::uint64_t bound);
    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();
    /// Standard normal (Marsaglia polar method).
    double normal();

    bool operator==(const Xoshiro256&) const = default;

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace srs
