#pragma once

// Integer geometry of the periodic 2-D grid with Hanoi-network (HN4)
// long-range edges on every row and column.
//
// Storage coordinates are 0-based, x in [0, L-1]. The hierarchy is defined on
// the 1-based line coordinate x + 1 in [1, 2^n], where every site is written
// uniquely as 2^i (2j + 1): i is the level (2-adic valuation) and j the rank.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lqw {

/// Smallest and largest supported line exponent. n >= 2 keeps the set of
/// levels carrying long-range edges (0..n-2) non-empty; n <= 14 keeps every
/// (coin, vertex) slot addressable with 32-bit indices.
inline constexpr int kMinLineExponent = 2;
inline constexpr int kMaxLineExponent = 14;

class TopologyParams {
public:
    /// Throws DomainError outside [kMinLineExponent, kMaxLineExponent].
    explicit TopologyParams(int line_exponent);

    /// Side must be a power of two; throws DomainError otherwise.
    static TopologyParams from_side(std::int64_t side);

    int line_exponent() const noexcept { return n_; }
    std::int64_t side() const noexcept { return std::int64_t{1} << n_; }
    std::int64_t vertex_count() const noexcept { return side() * side(); }

    friend bool operator==(const TopologyParams&, const TopologyParams&) = default;

private:
    int n_;
};

struct HierCoord {
    int level = 0;
    std::int64_t rank = 0;

    friend bool operator==(const HierCoord&, const HierCoord&) = default;
};

struct GridVertex {
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend auto operator<=>(const GridVertex&, const GridVertex&) = default;
};

/// Largest rank on a level: 2^(n-i-1) - 1 for i < n, and 0 for i = n.
std::int64_t max_rank(int level, int n);

/// Number of sites sharing a level.
inline std::int64_t level_size(int level, int n) { return max_rank(level, n) + 1; }

/// x (1-based, 1 <= x <= 2^n) -> (i, j) with x = 2^i (2j + 1).
HierCoord decompose(std::int64_t x, int n);

/// (i, j) -> 2^i (2j + 1). Throws DomainError when j is outside [0, max_rank].
std::int64_t compose(HierCoord h, int n);

/// Long-range partner of x along its level. Ranks close cyclically within a
/// level; levels n-1 and n carry a self-loop, so x maps to itself.
std::int64_t long_range_neighbor(std::int64_t x, int step, int n);

/// Nearest neighbour on a periodic line of `side` sites (0-based).
std::int64_t grid_neighbor(std::int64_t c, int step, std::int64_t side);

/// True when the 1-based coordinate sits at level n-1 or n.
bool is_exceptional_coordinate(std::int64_t x, int n);

enum class ExceptionalRule {
    Line,          ///< either coordinate on an exceptional line
    Intersection,  ///< both coordinates exceptional
};

bool is_exceptional(GridVertex v, int n, ExceptionalRule rule = ExceptionalRule::Line);

std::string_view to_string(ExceptionalRule rule);
ExceptionalRule parse_exceptional_rule(std::string_view text);

/// Linear vertex index x + L*y.
inline std::int64_t vertex_index(GridVertex v, std::int64_t side) { return v.x + side * v.y; }
inline GridVertex vertex_at(std::int64_t index, std::int64_t side) {
    return {index % side, index / side};
}

}  // namespace lqw
