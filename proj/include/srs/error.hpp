#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace srs {

/// Bad parameters: m > n, s > n, delta outside (0,1), empty subsets, ...
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An exact (rational) computation was asked for a size beyond the configured
/// bound. Callers are expected to fall back to Monte Carlo.
class ExactModeRejected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Enumeration would visit more sequences than the guard allows.
class EnumerationTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training objective blew past the divergence guard.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::size_t epoch)
        : std::runtime_error(what), epoch_(epoch) {}
    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

/// A per-sample loss evaluated to NaN or infinity.
class NonFiniteLoss : public std::runtime_error {
public:
    NonFiniteLoss(const std::string& what, std::size_t sample)
        : std::runtime_error(what), sample_(sample) {}
    std::size_t sample_index() const noexcept { return sample_; }

private:
    std::size_t sample_;
};

}  // namespace srs
