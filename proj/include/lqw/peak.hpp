#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace lqw {

/// Thresholds of the first-peak rule. With w = window, a step t qualifies when
///   P(t) >  P(s) for every s in [t-w, t)   (clipped at 0),
///   P(t) >= P(s) for every s in (t, t+w),
///   P(t+w) < P(t),
///   P(t) >= min(min_ratio * P(0), P(0) + ceiling_fraction * (1 - P(0))).
/// Taking the maximum over a window instead of demanding a monotone decline
/// tolerates the period-2 ripple the walk superimposes on its envelope. The
/// strict left comparison resolves plateaus to their earliest step. The
/// ceiling term only binds at high target densities, where min_ratio * P(0)
/// is out of reach.
struct PeakRule {
    double min_ratio = 5.0;
    double ceiling_fraction = 0.25;
    int window = 5;

    double threshold(double p0) const;

    /// Default rule with the window shortened to clamp(floor(sqrt(N/M)), 1, 5).
    /// Dense target sets oscillate with a period of a few steps; for N/M >= 25
    /// this is the default rule.
    static PeakRule for_ratio(std::int64_t n_elements, std::int64_t m);
};

struct PeakResult {
    std::int64_t step = 0;
    double probability = 0.0;
    PeakRule rule;
};

/// Earliest qualifying step of a complete trace. Throws NoPeakError carrying
/// the largest observed probability when none qualifies, and DomainError for
/// traces shorter than 3 samples.
PeakResult detect_first_peak(std::span<const double> trace, const PeakRule& rule = {});

/// Online form of detect_first_peak: push P(0), P(1), ... and stop at the
/// first returned result. Yields the same step as the offline scan of the same
/// prefix.
class PeakDetector {
public:
    explicit PeakDetector(PeakRule rule = {}) : rule_(rule) {}

    std::optional<PeakResult> push(double p);

    const std::vector<double>& trace() const noexcept { return trace_; }
    const PeakRule& rule() const noexcept { return rule_; }

    /// NoPeakError describing the trace so far.
    [[noreturn]] void fail() const;

private:
    PeakRule rule_;
    std::vector<double> trace_;
    std::int64_t next_candidate_ = 1;
};

}  // namespace lqw
