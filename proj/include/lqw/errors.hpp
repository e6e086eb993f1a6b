#pragma once

#include <stdexcept>
#include <string>

namespace lqw {

/// Argument outside the mathematical domain of an operation (bad coordinate,
/// malformed target, degenerate fit input, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A probability trace ended without a qualifying first peak.
class NoPeakError : public std::runtime_error {
public:
    NoPeakError(const std::string& what, double max_probability, long long max_step)
        : std::runtime_error(what), max_probability_(max_probability), max_step_(max_step) {}

    double max_probability() const noexcept { return max_probability_; }
    long long max_step() const noexcept { return max_step_; }

private:
    double max_probability_;
    long long max_step_;
};

/// Requested instance does not fit the memory or index limits of the engine.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lqw
