#pragma once

// Experiment protocols on top of the walk engine: self-loop sweeps, random
// target ensembles, scaling runs over lattice size and target count, and
// fixed-density runs. Independent runs go to a bounded worker pool; results
// are always ordered by (configuration, trial), never by completion.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lqw/hn4.hpp"
#include "lqw/peak.hpp"
#include "lqw/walk.hpp"

namespace lqw {

/// Default horizon for a first-peak search:
///   hn4:       ceil(6 sqrt(N/M))
///   grid-only: ceil(4 sqrt((N/M) ln(N/M))) + 16
std::int64_t default_step_budget(std::int64_t n_elements, std::int64_t m, EdgeMode mode);

/// Evolves until the first peak is confirmed or t_max steps have run. Throws
/// NoPeakError in the latter case.
PeakResult run_to_first_peak(const WalkConfig& config, std::int64_t t_max,
                             const PeakRule& rule = {}, int workers = 1);

/// Total self-loop weight either fixed or proportional to the target count.
class NaRule {
public:
    static NaRule fixed(double na) { return NaRule(na, false); }
    static NaRule per_target(double factor) { return NaRule(factor, true); }
    /// "8.5" or "8.5M".
    static NaRule parse(const std::string& text);

    double na_for(std::int64_t m) const { return proportional_ ? value_ * static_cast<double>(m) : value_; }
    std::string to_string() const;

private:
    NaRule(double value, bool proportional);
    double value_;
    bool proportional_;
};

struct SweepRow {
    double na = 0.0;
    std::int64_t peak_step = 0;
    double peak_probability = 0.0;
    bool optimal = false;
};

struct SweepOptions {
    double na_min = 1.0;
    double na_max = 30.0;
    double na_step = 0.5;
    std::optional<std::int64_t> t_max;  ///< default_step_budget when empty
    /// PeakRule::for_ratio(N, M) when empty.
    std::optional<PeakRule> rule;
    int workers = 1;
};

/// Grid of Na values na_min, na_min + step, ... <= na_max (within 1e-9).
std::vector<double> na_grid(double na_min, double na_max, double na_step);

/// One first-peak run per Na value; the row with the largest peak probability
/// (earliest on ties) is flagged optimal.
std::vector<SweepRow> sweep_self_loop(const TopologyParams& topology,
                                      const std::vector<GridVertex>& targets, EdgeMode mode,
                                      const SweepOptions& options);

/// Vertices that may be drawn as targets, in linear-index order.
std::vector<GridVertex> admissible_vertices(const TopologyParams& topology,
                                            std::optional<ExceptionalRule> exclude);

/// Uniform sample of m distinct admissible vertices (partial Fisher-Yates over
/// admissible_vertices with Rng(seed)). Throws DomainError when m exceeds the
/// admissible count or is not positive.
std::vector<GridVertex> random_target_set(std::int64_t m, const TopologyParams& topology,
                                          std::uint64_t seed,
                                          std::optional<ExceptionalRule> exclude);

/// Maps targets given on a from_side lattice onto to_side by scaling both
/// coordinates by to_side / from_side.
std::vector<GridVertex> scale_targets(const std::vector<GridVertex>& targets,
                                      std::int64_t from_side, std::int64_t to_side);

struct ScalingRecord {
    std::int64_t side = 0;
    std::int64_t n_elements = 0;
    std::int64_t m = 0;
    double na = 0.0;
    EdgeMode mode = EdgeMode::Hn4;
    std::uint64_t seed = 0;
    int trial = 0;
    std::int64_t peak_step = 0;
    double peak_probability = 0.0;
    double amplified_cost = 0.0;
};

struct ScalingPlan {
    std::vector<std::int64_t> sides;
    std::vector<std::int64_t> m_values{1};
    NaRule na_rule = NaRule::fixed(8.5);
    int trials = 10;
    std::uint64_t seed = 1;
    EdgeMode mode = EdgeMode::Hn4;
    std::optional<ExceptionalRule> exclude = ExceptionalRule::Line;
    /// When set, every run uses these targets (given on fixed_reference_side)
    /// scaled to the lattice instead of a random draw.
    std::optional<std::vector<GridVertex>> fixed_targets;
    std::int64_t fixed_reference_side = 16;
    /// PeakRule::for_ratio(N, M) when empty.
    std::optional<PeakRule> rule;
    std::optional<std::int64_t> t_max;
    int workers = 1;
    /// Called after each finished run with (done, total); may be empty.
    std::function<void(std::size_t, std::size_t)> progress;
};

/// One record per (side, m, trial), in that nesting order.
std::vector<ScalingRecord> scaling_experiment(const ScalingPlan& plan);

struct DensityPlan {
    std::vector<std::int64_t> sides;
    double fraction = 0.1;
    int trials = 10;
    std::uint64_t seed = 1;
    NaRule na_rule = NaRule::per_target(8.5);
    EdgeMode mode = EdgeMode::Hn4;
    std::optional<ExceptionalRule> exclude = ExceptionalRule::Line;
    /// Fixed evaluation time round(coefficient * sqrt(N/M)).
    double time_coefficient = 1.75;
    /// PeakRule::for_ratio(N, M) when empty.
    std::optional<PeakRule> rule;
    std::optional<std::int64_t> t_max;
    int workers = 1;
    std::function<void(std::size_t, std::size_t)> progress;
};

struct DensityRecord {
    ScalingRecord record;
    std::int64_t fixed_step = 0;
    double fixed_step_probability = 0.0;
};

/// M = round(fraction * N) random targets per trial; records the first peak
/// and the probability at the fixed evaluation time.
std::vector<DensityRecord> density_experiment(const DensityPlan& plan);

struct DensitySummary {
    std::int64_t side = 0;
    std::int64_t m = 0;
    int trials = 0;
    std::int64_t fixed_step = 0;
    double mean_fixed_step_probability = 0.0;
    double mean_peak_probability = 0.0;
    double mean_peak_step = 0.0;
};

std::vector<DensitySummary> summarize_density(const std::vector<DensityRecord>& records);

}  // namespace lqw
