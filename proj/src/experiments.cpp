#include "lqw/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "lqw/errors.hpp"
#include "lqw/parallel.hpp"
#include "lqw/rng.hpp"

namespace lqw {

std::int64_t default_step_budget(std::int64_t n_elements, std::int64_t m, EdgeMode mode) {
    if (m < 1 || m >= n_elements) {
        throw DomainError("step budget needs 1 <= M < N, got M = " + std::to_string(m));
    }
    const double ratio = static_cast<double>(n_elements) / static_cast<double>(m);
    if (mode == EdgeMode::Hn4) return static_cast<std::int64_t>(std::ceil(6.0 * std::sqrt(ratio)));
    return static_cast<std::int64_t>(std::ceil(4.0 * std::sqrt(ratio * std::log(ratio)))) + 16;
}

PeakResult run_to_first_peak(const WalkConfig& config, std::int64_t t_max, const PeakRule& rule,
                             int workers) {
    Walk walk(config, workers);
    PeakDetector detector(rule);
    for (std::int64_t t = 0;; ++t) {
        if (auto peak = detector.push(walk.success_probability())) return *peak;
        if (t >= t_max) break;
        walk.step();
    }
    detector.fail();
}

NaRule::NaRule(double value, bool proportional) : value_(value), proportional_(proportional) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw DomainError("self-loop weight must be finite and nonnegative");
    }
}

NaRule NaRule::parse(const std::string& text) {
    std::string body = text;
    bool proportional = false;
    if (!body.empty() && (body.back() == 'M' || body.back() == 'm')) {
        proportional = true;
        body.pop_back();
    }
    char* end = nullptr;
    const double value = std::strtod(body.c_str(), &end);
    if (body.empty() || end != body.c_str() + body.size()) {
        throw DomainError("cannot parse Na rule '" + text + "' (expected e.g. 8.5 or 8.5M)");
    }
    return NaRule(value, proportional);
}

std::string NaRule::to_string() const {
    std::ostringstream out;
    out << value_ << (proportional_ ? "M" : "");
    return out.str();
}

std::vector<double> na_grid(double na_min, double na_max, double na_step) {
    if (!(na_step > 0.0)) throw DomainError("Na step must be positive");
    if (!(na_min >= 0.0) || !(na_max >= na_min)) throw DomainError("empty or negative Na range");
    std::vector<double> grid;
    for (std::int64_t k = 0;; ++k) {
        const double na = na_min + static_cast<double>(k) * na_step;
        if (na > na_max + 1e-9) break;
        grid.push_back(na);
    }
    return grid;
}

std::vector<SweepRow> sweep_self_loop(const TopologyParams& topology,
                                      const std::vector<GridVertex>& targets, EdgeMode mode,
                                      const SweepOptions& options) {
    if (targets.empty()) throw DomainError("sweep needs at least one target");
    const auto grid = na_grid(options.na_min, options.na_max, options.na_step);
    const WalkConfig base = normalized({topology, 0.0, targets, mode});
    const auto m = static_cast<std::int64_t>(base.targets.size());
    const std::int64_t t_max =
        options.t_max.value_or(default_step_budget(topology.vertex_count(), m, mode));
    const PeakRule rule = options.rule.value_or(PeakRule::for_ratio(topology.vertex_count(), m));
    std::vector<SweepRow> rows(grid.size());
    const WarningHandler previous = set_warning_handler({});
    try {
        run_jobs(grid.size(), options.workers, [&](std::size_t i) {
            WalkConfig config = base;
            config.na = grid[i];
            const auto peak = run_to_first_peak(config, t_max, rule);
            rows[i] = {grid[i], peak.step, peak.probability, false};
        });
    } catch (...) {
        set_warning_handler(previous);
        throw;
    }
    set_warning_handler(previous);
    auto best = std::max_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.peak_probability < b.peak_probability;
    });
    if (best != rows.end()) best->optimal = true;
    return rows;
}

std::vector<GridVertex> admissible_vertices(const TopologyParams& topology,
                                            std::optional<ExceptionalRule> exclude) {
    const std::int64_t side = topology.side();
    std::vector<GridVertex> out;
    out.reserve(static_cast<std::size_t>(topology.vertex_count()));
    for (std::int64_t idx = 0; idx < topology.vertex_count(); ++idx) {
        const GridVertex v = vertex_at(idx, side);
        if (exclude && is_exceptional(v, topology.line_exponent(), *exclude)) continue;
        out.push_back(v);
    }
    return out;
}

std::vector<GridVertex> random_target_set(std::int64_t m, const TopologyParams& topology,
                                          std::uint64_t seed,
                                          std::optional<ExceptionalRule> exclude) {
    auto pool = admissible_vertices(topology, exclude);
    if (m < 1 || m > static_cast<std::int64_t>(pool.size())) {
        throw DomainError("cannot draw " + std::to_string(m) + " targets from " +
                          std::to_string(pool.size()) + " admissible vertices");
    }
    Rng rng(seed);
    const auto count = static_cast<std::size_t>(m);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

std::vector<GridVertex> scale_targets(const std::vector<GridVertex>& targets,
                                      std::int64_t from_side, std::int64_t to_side) {
    if (from_side <= 0 || to_side <= 0 || to_side % from_side != 0) {
        throw DomainError("target scaling needs to_side to be a multiple of from_side");
    }
    const std::int64_t k = to_side / from_side;
    std::vector<GridVertex> out;
    out.reserve(targets.size());
    for (const auto& t : targets) {
        if (t.x < 0 || t.x >= from_side || t.y < 0 || t.y >= from_side) {
            throw DomainError("reference target outside the reference lattice");
        }
        out.push_back({t.x * k, t.y * k});
    }
    return out;
}

namespace {

struct Job {
    std::int64_t side;
    std::int64_t m;
    int trial;
};

std::vector<Job> expand_jobs(const std::vector<std::int64_t>& sides,
                             const std::vector<std::int64_t>& ms, int trials) {
    if (sides.empty()) throw DomainError("no lattice sides given");
    if (ms.empty()) throw DomainError("no target counts given");
    if (trials < 1) throw DomainError("trials must be at least 1");
    std::vector<Job> jobs;
    for (const auto side : sides) {
        TopologyParams::from_side(side);
        for (const auto m : ms) {
            for (int trial = 0; trial < trials; ++trial) jobs.push_back({side, m, trial});
        }
    }
    return jobs;
}

template <class Fn>
void run_quiet_jobs(std::size_t count, int workers,
                    const std::function<void(std::size_t, std::size_t)>& progress, Fn&& fn) {
    std::mutex mu;
    std::size_t done = 0;
    run_jobs(count, workers, [&](std::size_t i) {
        fn(i);
        if (progress) {
            std::lock_guard lock(mu);
            progress(++done, count);
        }
    });
}

}  // namespace

std::vector<ScalingRecord> scaling_experiment(const ScalingPlan& plan) {
    const auto jobs = expand_jobs(plan.sides, plan.m_values, plan.trials);
    std::vector<ScalingRecord> records(jobs.size());
    run_quiet_jobs(jobs.size(), plan.workers, plan.progress, [&](std::size_t i) {
        const Job& job = jobs[i];
        const TopologyParams topology = TopologyParams::from_side(job.side);
        const std::uint64_t seed = derive_seed(plan.seed, static_cast<std::uint64_t>(job.side),
                                               static_cast<std::uint64_t>(job.m),
                                               static_cast<std::uint64_t>(job.trial));
        WalkConfig config{topology, plan.na_rule.na_for(job.m), {}, plan.mode};
        if (plan.fixed_targets) {
            config.targets = scale_targets(*plan.fixed_targets, plan.fixed_reference_side, job.side);
        } else {
            config.targets = random_target_set(job.m, topology, seed, plan.exclude);
        }
        const auto m = static_cast<std::int64_t>(config.targets.size());
        const std::int64_t t_max =
            plan.t_max.value_or(default_step_budget(topology.vertex_count(), m, plan.mode));
        const auto peak = run_to_first_peak(
            config, t_max, plan.rule.value_or(PeakRule::for_ratio(topology.vertex_count(), m)));
        records[i] = {job.side,
                      topology.vertex_count(),
                      m,
                      config.na,
                      plan.mode,
                      seed,
                      job.trial,
                      peak.step,
                      peak.probability,
                      amplified_cost(peak.step, peak.probability)};
    });
    return records;
}

std::vector<DensityRecord> density_experiment(const DensityPlan& plan) {
    if (!(plan.fraction > 0.0 && plan.fraction < 1.0)) {
        throw DomainError("target fraction must lie in (0, 1)");
    }
    std::vector<std::int64_t> ms;
    for (const auto side : plan.sides) {
        const auto n = TopologyParams::from_side(side).vertex_count();
        ms.push_back(std::llround(plan.fraction * static_cast<double>(n)));
    }
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < plan.sides.size(); ++s) {
        for (const auto& job : expand_jobs({plan.sides[s]}, {ms[s]}, plan.trials)) jobs.push_back(job);
    }
    std::vector<DensityRecord> records(jobs.size());
    run_quiet_jobs(jobs.size(), plan.workers, plan.progress, [&](std::size_t i) {
        const Job& job = jobs[i];
        const TopologyParams topology = TopologyParams::from_side(job.side);
        const std::int64_t n = topology.vertex_count();
        const std::uint64_t seed = derive_seed(plan.seed, static_cast<std::uint64_t>(job.side),
                                               static_cast<std::uint64_t>(job.m),
                                               static_cast<std::uint64_t>(job.trial));
        WalkConfig config{topology, plan.na_rule.na_for(job.m),
                          random_target_set(job.m, topology, seed, plan.exclude), plan.mode};
        const auto fixed_step = static_cast<std::int64_t>(std::llround(
            plan.time_coefficient * std::sqrt(static_cast<double>(n) / static_cast<double>(job.m))));
        const std::int64_t t_max = std::max(
            fixed_step, plan.t_max.value_or(default_step_budget(n, job.m, plan.mode)));

        Walk walk(config);
        PeakDetector detector(plan.rule.value_or(PeakRule::for_ratio(n, job.m)));
        std::optional<PeakResult> peak;
        double fixed_p = 0.0;
        for (std::int64_t t = 0;; ++t) {
            const double p = walk.success_probability();
            if (t == fixed_step) fixed_p = p;
            if (!peak) peak = detector.push(p);
            if (peak && t >= fixed_step) break;
            if (t >= t_max) detector.fail();
            walk.step();
        }
        records[i].record = {job.side,   n,         job.m,         config.na,
                             plan.mode,  seed,      job.trial,     peak->step,
                             peak->probability, amplified_cost(peak->step, peak->probability)};
        records[i].fixed_step = fixed_step;
        records[i].fixed_step_probability = fixed_p;
    });
    return records;
}

std::vector<DensitySummary> summarize_density(const std::vector<DensityRecord>& records) {
    std::vector<DensitySummary> out;
    std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> slot;
    for (const auto& r : records) {
        const auto key = std::make_pair(r.record.side, r.record.m);
        auto [it, inserted] = slot.try_emplace(key, out.size());
        if (inserted) out.push_back({r.record.side, r.record.m, 0, r.fixed_step, 0.0, 0.0, 0.0});
        auto& s = out[it->second];
        ++s.trials;
        s.mean_fixed_step_probability += r.fixed_step_probability;
        s.mean_peak_probability += r.record.peak_probability;
        s.mean_peak_step += static_cast<double>(r.record.peak_step);
    }
    for (auto& s : out) {
        s.mean_fixed_step_probability /= s.trials;
        s.mean_peak_probability /= s.trials;
        s.mean_peak_step /= s.trials;
    }
    return out;
}

}  // namespace lqw
