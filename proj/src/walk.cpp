#include "lqw/walk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

#include <unistd.h>

#include "lqw/errors.hpp"
#include "lqw/parallel.hpp"

namespace lqw {

namespace {

// Neumaier summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

std::mutex g_warning_mu;
WarningHandler g_warning_handler = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
};

std::uint64_t physical_memory() {
    const long pages = sysconf(_SC_PHYS_PAGES);
    const long page = sysconf(_SC_PAGE_SIZE);
    if (pages <= 0 || page <= 0) return 0;
    return static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page);
}

const TopologyParams& checked_topology(const WalkConfig& config) {
    check_memory(config.topology, config.mode);
    return config.topology;
}

}  // namespace

std::string_view to_string(EdgeMode mode) { return mode == EdgeMode::Hn4 ? "hn4" : "grid"; }

EdgeMode parse_edge_mode(std::string_view text) {
    if (text == "hn4") return EdgeMode::Hn4;
    if (text == "grid" || text == "grid_only") return EdgeMode::GridOnly;
    throw DomainError("unknown edge mode '" + std::string(text) + "' (expected hn4|grid)");
}

int coin_dimension(EdgeMode mode) { return mode == EdgeMode::Hn4 ? 9 : 5; }

int coin_slot(CoinDirection dir, EdgeMode mode) {
    if (mode == EdgeMode::Hn4) return static_cast<int>(dir);
    switch (dir) {
        case CoinDirection::XPlus:
        case CoinDirection::XMinus:
        case CoinDirection::YPlus:
        case CoinDirection::YMinus:
            return static_cast<int>(dir);
        case CoinDirection::Hold:
            return 4;
        default:
            throw DomainError("long-range coin direction in grid-only mode");
    }
}

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(g_warning_mu);
    std::swap(handler, g_warning_handler);
    return handler;
}

void emit_warning(std::string_view message) {
    std::lock_guard lock(g_warning_mu);
    if (g_warning_handler) g_warning_handler(message);
}

WalkConfig normalized(WalkConfig config) {
    if (!(config.na >= 0.0) || !std::isfinite(config.na)) {
        throw DomainError("self-loop weight must be finite and nonnegative");
    }
    const std::int64_t side = config.topology.side();
    for (const auto& t : config.targets) {
        if (t.x < 0 || t.x >= side || t.y < 0 || t.y >= side) {
            throw DomainError("target (" + std::to_string(t.x) + "," + std::to_string(t.y) +
                              ") outside " + std::to_string(side) + "x" + std::to_string(side) +
                              " grid");
        }
    }
    std::sort(config.targets.begin(), config.targets.end(), [side](auto a, auto b) {
        return vertex_index(a, side) < vertex_index(b, side);
    });
    config.targets.erase(std::unique(config.targets.begin(), config.targets.end()),
                         config.targets.end());
    if (config.mode == EdgeMode::Hn4) {
        const int n = config.topology.line_exponent();
        for (const auto& t : config.targets) {
            if (is_exceptional(t, n, ExceptionalRule::Line)) {
                emit_warning("target (" + std::to_string(t.x) + "," + std::to_string(t.y) +
                             ") lies on an exceptional line");
            }
        }
    }
    return config;
}

StateVector::StateVector(int coin_dim, std::int64_t vertices)
    : coin_dim_(coin_dim),
      vertices_(vertices),
      amps_(static_cast<std::size_t>(coin_dim) * static_cast<std::size_t>(vertices)) {}

double StateVector::norm_squared() const {
    // Compensated sum: a naive loop over 2M terms drifts by ~1e-11.
    CompensatedSum sum;
    for (const auto& a : amps_) sum.add(std::norm(a));
    return sum.value();
}

void StateVector::swap(StateVector& other) noexcept {
    std::swap(coin_dim_, other.coin_dim_);
    std::swap(vertices_, other.vertices_);
    amps_.swap(other.amps_);
}

std::vector<double> coin_state(EdgeMode mode, double self_loop_weight) {
    const int dim = coin_dimension(mode);
    const double edges = dim - 1;
    const double norm = 1.0 / std::sqrt(edges + self_loop_weight);
    std::vector<double> coin(static_cast<std::size_t>(dim), norm);
    coin.back() = std::sqrt(self_loop_weight) * norm;
    return coin;
}

StateVector build_initial_state(const WalkConfig& config) {
    const auto coin = coin_state(config.mode, config.self_loop_weight());
    const std::int64_t vertices = config.topology.vertex_count();
    const double vertex_amp = 1.0 / std::sqrt(static_cast<double>(vertices));
    StateVector state(static_cast<int>(coin.size()), vertices);
    for (std::int64_t v = 0; v < vertices; ++v) {
        for (std::size_t c = 0; c < coin.size(); ++c) {
            state.at(static_cast<int>(c), v) = coin[c] * vertex_amp;
        }
    }
    return state;
}

ShiftTable::ShiftTable(const TopologyParams& topology, EdgeMode mode)
    : coin_dim_(coin_dimension(mode)) {
    const int n = topology.line_exponent();
    const std::int64_t side = topology.side();
    const std::int64_t vertices = topology.vertex_count();
    sources_.resize(static_cast<std::size_t>(coin_dim_ * vertices));

    // Long-range partners of each 0-based line coordinate, per direction.
    std::vector<std::int64_t> lr_plus(static_cast<std::size_t>(side));
    std::vector<std::int64_t> lr_minus(static_cast<std::size_t>(side));
    for (std::int64_t c = 0; c < side; ++c) {
        lr_plus[c] = long_range_neighbor(c + 1, +1, n) - 1;
        lr_minus[c] = long_range_neighbor(c + 1, -1, n) - 1;
    }

    auto slot = [side, vertices](int coin, std::int64_t x, std::int64_t y) {
        return static_cast<std::size_t>(coin * vertices + x + side * y);
    };
    auto set = [&](int dst_coin, std::int64_t dx, std::int64_t dy, int src_coin, std::int64_t sx,
                   std::int64_t sy) {
        sources_[slot(dst_coin, dx, dy)] = static_cast<std::uint32_t>(slot(src_coin, sx, sy));
    };

    const int hold = coin_slot(CoinDirection::Hold, mode);
    for (std::int64_t y = 0; y < side; ++y) {
        for (std::int64_t x = 0; x < side; ++x) {
            const std::int64_t xp = grid_neighbor(x, +1, side);
            const std::int64_t xm = grid_neighbor(x, -1, side);
            const std::int64_t yp = grid_neighbor(y, +1, side);
            const std::int64_t ym = grid_neighbor(y, -1, side);
            // Forward map: amplitude moves along its edge and the coin flips.
            set(1, xp, y, 0, x, y);
            set(0, xm, y, 1, x, y);
            set(3, x, yp, 2, x, y);
            set(2, x, ym, 3, x, y);
            if (mode == EdgeMode::Hn4) {
                set(5, lr_plus[x], y, 4, x, y);
                set(4, lr_minus[x], y, 5, x, y);
                set(7, x, lr_plus[y], 6, x, y);
                set(6, x, lr_minus[y], 7, x, y);
            }
            set(hold, x, y, hold, x, y);
        }
    }

    destinations_.resize(sources_.size());
    for (std::size_t k = 0; k < sources_.size(); ++k) {
        destinations_[sources_[k]] = static_cast<std::uint32_t>(k);
    }
}

bool ShiftTable::is_bijection() const {
    std::vector<bool> seen(sources_.size(), false);
    for (const auto s : sources_) {
        if (s >= seen.size() || seen[s]) return false;
        seen[s] = true;
    }
    return true;
}

std::uint64_t memory_estimate(const TopologyParams& topology, EdgeMode mode) {
    const auto slots = static_cast<std::uint64_t>(coin_dimension(mode)) *
                       static_cast<std::uint64_t>(topology.vertex_count());
    return 2 * slots * sizeof(Amplitude) + 2 * slots * sizeof(std::uint32_t);
}

void check_memory(const TopologyParams& topology, EdgeMode mode, std::uint64_t limit_bytes) {
    if (limit_bytes == 0) {
        if (const char* env = std::getenv("LQW_MEMORY_LIMIT")) {
            limit_bytes = std::strtoull(env, nullptr, 10);
        }
    }
    if (limit_bytes == 0) limit_bytes = physical_memory();
    const auto need = memory_estimate(topology, mode);
    if (limit_bytes != 0 && need > limit_bytes) {
        throw ResourceError("a " + std::to_string(topology.side()) + "x" +
                            std::to_string(topology.side()) + " walk needs " +
                            std::to_string(need) + " bytes, limit is " +
                            std::to_string(limit_bytes));
    }
}

void apply_oracle(StateVector& state, std::span<const std::int64_t> targets) {
    for (const auto t : targets) {
        for (int c = 0; c < state.coin_dim(); ++c) state.at(c, t) = -state.at(c, t);
    }
}

void apply_coin(StateVector& state, std::span<const double> coin, int workers) {
    const std::size_t dim = coin.size();
    const auto stride = static_cast<std::size_t>(state.vertices());
    Amplitude* amps = state.amplitudes().data();
    parallel_for(state.vertices(), workers, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t v = begin; v < end; ++v) {
            Amplitude* block = amps + v;
            Amplitude overlap{};
            for (std::size_t c = 0; c < dim; ++c) overlap += coin[c] * block[c * stride];
            overlap *= 2.0;
            for (std::size_t c = 0; c < dim; ++c) {
                block[c * stride] = overlap * coin[c] - block[c * stride];
            }
        }
    });
}

void apply_shift(StateVector& state, const ShiftTable& table, StateVector& scratch, int workers) {
    if (scratch.size() != state.size()) scratch = StateVector(state.coin_dim(), state.vertices());
    const auto sources = table.sources();
    const Amplitude* src = state.amplitudes().data();
    Amplitude* dst = scratch.amplitudes().data();
    parallel_for(static_cast<std::int64_t>(sources.size()), workers,
                 [&](std::int64_t begin, std::int64_t end) {
                     for (std::int64_t k = begin; k < end; ++k) dst[k] = src[sources[k]];
                 });
    state.swap(scratch);
}

void apply_shift(StateVector& state, const ShiftTable& table) {
    StateVector scratch(state.coin_dim(), state.vertices());
    apply_shift(state, table, scratch);
}

void apply_coin_and_shift(StateVector& state, std::span<const double> coin,
                          const ShiftTable& table, StateVector& scratch, int workers) {
    if (scratch.size() != state.size()) scratch = StateVector(state.coin_dim(), state.vertices());
    const std::size_t dim = coin.size();
    const auto stride = static_cast<std::size_t>(state.vertices());
    const Amplitude* src = state.amplitudes().data();
    Amplitude* dst = scratch.amplitudes().data();
    const std::uint32_t* dest = table.destinations().data();
    // Destinations of distinct slots are distinct, so chunks never collide.
    parallel_for(state.vertices(), workers, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t v = begin; v < end; ++v) {
            Amplitude overlap{};
            for (std::size_t c = 0; c < dim; ++c) overlap += coin[c] * src[c * stride + v];
            overlap *= 2.0;
            for (std::size_t c = 0; c < dim; ++c) {
                const std::size_t k = c * stride + static_cast<std::size_t>(v);
                dst[dest[k]] = overlap * coin[c] - src[k];
            }
        }
    });
    state.swap(scratch);
}

double success_probability(const StateVector& state, std::span<const std::int64_t> targets) {
    CompensatedSum p;
    for (const auto t : targets) {
        for (int c = 0; c < state.coin_dim(); ++c) p.add(std::norm(state.at(c, t)));
    }
    return p.value();
}

Walk::Walk(WalkConfig config, int workers)
    : config_(normalized(std::move(config))),
      workers_(std::max(workers, 1)),
      coin_(coin_state(config_.mode, config_.self_loop_weight())),
      shift_(checked_topology(config_), config_.mode) {
    const std::int64_t side = config_.topology.side();
    targets_.reserve(config_.targets.size());
    for (const auto& t : config_.targets) targets_.push_back(vertex_index(t, side));
    reset();
}

void Walk::reset() {
    state_ = build_initial_state(config_);
    scratch_ = StateVector(state_.coin_dim(), state_.vertices());
    steps_ = 0;
}

void Walk::step() {
    apply_oracle(state_, targets_);
    apply_coin_and_shift(state_, coin_, shift_, scratch_, workers_);
    ++steps_;
}

double Walk::success_probability() const { return lqw::success_probability(state_, targets_); }

ProbabilityTrace run(const WalkConfig& config, std::int64_t t_max, int workers,
                     const TraceSink& sink) {
    if (t_max < 0) throw DomainError("t_max must be nonnegative");
    Walk walk(config, workers);
    ProbabilityTrace trace;
    trace.reserve(static_cast<std::size_t>(t_max) + 1);
    for (std::int64_t t = 0;; ++t) {
        const double p = walk.success_probability();
        trace.push_back(p);
        if (sink) sink(t, p);
        if (t == t_max) break;
        walk.step();
    }
    return trace;
}

double amplified_cost(std::int64_t t_peak, double p_peak) {
    if (!(p_peak > 0.0) || p_peak > 1.0 + 1e-12) {
        throw DomainError("peak probability must lie in (0, 1], got " + std::to_string(p_peak));
    }
    return static_cast<double>(t_peak) / std::sqrt(p_peak);
}

}  // namespace lqw
