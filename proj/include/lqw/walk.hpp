#pragma once

// Lackadaisical coined quantum walk on the periodic grid, with or without the
// HN4 long-range edges. One step applies the target phase flip, the weighted
// Grover coin and the flip-flop shift, in that order.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "lqw/hn4.hpp"

namespace lqw {

using Amplitude = std::complex<double>;

enum class EdgeMode { Hn4, GridOnly };

std::string_view to_string(EdgeMode mode);
EdgeMode parse_edge_mode(std::string_view text);

/// Coin basis. In grid-only mode the coin is {XPlus, XMinus, YPlus, YMinus,
/// Hold} and Hold takes slot 4; in HN4 mode Hold is slot 8.
enum class CoinDirection : std::uint8_t {
    XPlus,
    XMinus,
    YPlus,
    YMinus,
    LXPlus,
    LXMinus,
    LYPlus,
    LYMinus,
    Hold,
};

int coin_dimension(EdgeMode mode);

/// Slot of a direction in the coin block; throws DomainError for long-range
/// directions in grid-only mode.
int coin_slot(CoinDirection dir, EdgeMode mode);

struct WalkConfig {
    TopologyParams topology{4};
    /// N*a, the total self-loop weight; the per-vertex weight is na / N.
    double na = 0.0;
    std::vector<GridVertex> targets;
    EdgeMode mode = EdgeMode::Hn4;

    double self_loop_weight() const { return na / static_cast<double>(topology.vertex_count()); }
};

/// Checks ranges and returns the config with targets sorted and deduplicated.
/// Warns (see set_warning_handler) for HN4-mode targets on exceptional lines.
WalkConfig normalized(WalkConfig config);

/// Receives engine warnings; the default writes to stderr. Returns the
/// previous handler.
using WarningHandler = std::function<void(std::string_view)>;
WarningHandler set_warning_handler(WarningHandler handler);
void emit_warning(std::string_view message);

/// Amplitudes stored coin-major: slot (c, v) lives at c * vertices + v, so each
/// coin direction is a contiguous plane over the grid.
class StateVector {
public:
    StateVector() = default;
    StateVector(int coin_dim, std::int64_t vertices);

    int coin_dim() const noexcept { return coin_dim_; }
    std::int64_t vertices() const noexcept { return vertices_; }
    std::size_t size() const noexcept { return amps_.size(); }

    Amplitude& at(int coin, std::int64_t vertex) { return amps_[index(coin, vertex)]; }
    const Amplitude& at(int coin, std::int64_t vertex) const { return amps_[index(coin, vertex)]; }

    std::span<Amplitude> amplitudes() noexcept { return amps_; }
    std::span<const Amplitude> amplitudes() const noexcept { return amps_; }

    double norm_squared() const;

    void swap(StateVector& other) noexcept;

private:
    std::size_t index(int coin, std::int64_t vertex) const {
        return static_cast<std::size_t>(coin) * static_cast<std::size_t>(vertices_) +
               static_cast<std::size_t>(vertex);
    }

    int coin_dim_ = 0;
    std::int64_t vertices_ = 0;
    std::vector<Amplitude> amps_;
};

/// Real coin-space vector: 1/sqrt(D+a) per edge direction, sqrt(a)/sqrt(D+a)
/// on Hold, where D is 8 (HN4) or 4 (grid-only).
std::vector<double> coin_state(EdgeMode mode, double self_loop_weight);

StateVector build_initial_state(const WalkConfig& config);

/// Flip-flop shift as a gather table: after the shift, slot k holds the
/// amplitude previously at source(k).
class ShiftTable {
public:
    ShiftTable(const TopologyParams& topology, EdgeMode mode);

    std::span<const std::uint32_t> sources() const noexcept { return sources_; }
    /// Inverse of sources(): the amplitude at slot k moves to destination(k).
    std::span<const std::uint32_t> destinations() const noexcept { return destinations_; }
    int coin_dim() const noexcept { return coin_dim_; }

    /// Every slot appears exactly once as a source.
    bool is_bijection() const;

private:
    int coin_dim_;
    std::vector<std::uint32_t> sources_;
    std::vector<std::uint32_t> destinations_;
};

/// Bytes for two state buffers plus both shift tables.
std::uint64_t memory_estimate(const TopologyParams& topology, EdgeMode mode);

/// Throws ResourceError when the estimate exceeds `limit_bytes` (0 = use the
/// LQW_MEMORY_LIMIT environment variable, else physical memory).
void check_memory(const TopologyParams& topology, EdgeMode mode, std::uint64_t limit_bytes = 0);

// Operators on a bare state. Target lists are linear vertex indices.
void apply_oracle(StateVector& state, std::span<const std::int64_t> targets);
void apply_coin(StateVector& state, std::span<const double> coin, int workers = 1);
void apply_shift(StateVector& state, const ShiftTable& table, StateVector& scratch,
                 int workers = 1);
void apply_shift(StateVector& state, const ShiftTable& table);
double success_probability(const StateVector& state, std::span<const std::int64_t> targets);

/// Coin followed by shift in a single pass: each vertex block is reflected
/// and scattered straight into `scratch`, which is then swapped in. Equal to
/// apply_coin + apply_shift.
void apply_coin_and_shift(StateVector& state, std::span<const double> coin,
                          const ShiftTable& table, StateVector& scratch, int workers = 1);

/// Owns the state, scratch buffer and shift table of one evolving walk. Not
/// shared between threads; may be moved between threads between steps.
class Walk {
public:
    explicit Walk(WalkConfig config, int workers = 1);

    const WalkConfig& config() const noexcept { return config_; }
    const StateVector& state() const noexcept { return state_; }
    StateVector& state() noexcept { return state_; }
    std::span<const double> coin() const noexcept { return coin_; }
    std::span<const std::int64_t> target_indices() const noexcept { return targets_; }
    const ShiftTable& shift_table() const noexcept { return shift_; }
    std::int64_t steps_taken() const noexcept { return steps_; }

    void reset();
    void step();
    double success_probability() const;

private:
    WalkConfig config_;
    int workers_;
    std::vector<double> coin_;
    std::vector<std::int64_t> targets_;
    ShiftTable shift_;
    StateVector state_;
    StateVector scratch_;
    std::int64_t steps_ = 0;
};

/// P(t) for t = 0..size-1.
using ProbabilityTrace = std::vector<double>;

/// Optional per-step callback, called with (t, P(t)) for every sample.
using TraceSink = std::function<void(std::int64_t, double)>;

ProbabilityTrace run(const WalkConfig& config, std::int64_t t_max, int workers = 1,
                     const TraceSink& sink = {});

/// t / sqrt(P): steps including amplitude amplification of the final state.
double amplified_cost(std::int64_t t_peak, double p_peak);

}  // namespace lqw
