#include "lqw/peak.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lqw/errors.hpp"

namespace lqw {

namespace {

bool qualifies(std::span<const double> p, std::int64_t t, const PeakRule& rule, double threshold) {
    const auto i = static_cast<std::size_t>(t);
    const auto w = static_cast<std::size_t>(rule.window);
    const double peak = p[i];
    if (peak < threshold || !(p[i + w] < peak)) return false;
    for (std::size_t s = i > w ? i - w : 0; s < i; ++s) {
        if (!(p[s] < peak)) return false;
    }
    for (std::size_t s = i + 1; s < i + w; ++s) {
        if (p[s] > peak) return false;
    }
    return true;
}

[[noreturn]] void throw_no_peak(std::span<const double> trace) {
    const auto it = std::max_element(trace.begin(), trace.end());
    const double best = it == trace.end() ? 0.0 : *it;
    const auto at = it == trace.end() ? 0 : it - trace.begin();
    throw NoPeakError("no qualifying first peak within " + std::to_string(trace.size()) +
                          " samples (max P = " + std::to_string(best) + " at step " +
                          std::to_string(at) + ")",
                      best, at);
}

}  // namespace

double PeakRule::threshold(double p0) const {
    return std::min(min_ratio * p0, p0 + ceiling_fraction * (1.0 - p0));
}

PeakRule PeakRule::for_ratio(std::int64_t n_elements, std::int64_t m) {
    if (m < 1 || n_elements < m) throw DomainError("peak rule needs N >= M >= 1");
    PeakRule rule;
    const auto window = static_cast<int>(
        std::floor(std::sqrt(static_cast<double>(n_elements) / static_cast<double>(m))));
    rule.window = std::clamp(window, 1, 5);
    return rule;
}

PeakResult detect_first_peak(std::span<const double> trace, const PeakRule& rule) {
    if (trace.size() < 3) throw DomainError("peak detection needs at least 3 samples");
    if (rule.window < 1) throw DomainError("peak window must be at least 1");
    const double threshold = rule.threshold(trace[0]);
    const auto last = static_cast<std::int64_t>(trace.size()) - 1 - rule.window;
    for (std::int64_t t = 1; t <= last; ++t) {
        if (qualifies(trace, t, rule, threshold)) {
            return {t, trace[static_cast<std::size_t>(t)], rule};
        }
    }
    throw_no_peak(trace);
}

std::optional<PeakResult> PeakDetector::push(double p) {
    trace_.push_back(p);
    const auto last = static_cast<std::int64_t>(trace_.size()) - 1 - rule_.window;
    if (next_candidate_ > last) return std::nullopt;
    // Only one new candidate becomes decidable per sample.
    const std::int64_t t = next_candidate_++;
    if (qualifies(trace_, t, rule_, rule_.threshold(trace_.front()))) {
        return PeakResult{t, trace_[static_cast<std::size_t>(t)], rule_};
    }
    return std::nullopt;
}

void PeakDetector::fail() const { throw_no_peak(trace_); }

}  // namespace lqw
