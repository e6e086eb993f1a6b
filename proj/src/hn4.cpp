#include "lqw/hn4.hpp"

#include <bit>

#include "lqw/errors.hpp"

namespace lqw {

TopologyParams::TopologyParams(int line_exponent) : n_(line_exponent) {
    if (line_exponent < kMinLineExponent || line_exponent > kMaxLineExponent) {
        throw DomainError("line exponent must lie in [" + std::to_string(kMinLineExponent) + ", " +
                          std::to_string(kMaxLineExponent) + "], got " +
                          std::to_string(line_exponent));
    }
}

TopologyParams TopologyParams::from_side(std::int64_t side) {
    if (side <= 0 || !std::has_single_bit(static_cast<std::uint64_t>(side))) {
        throw DomainError("grid side must be a power of two, got " + std::to_string(side));
    }
    return TopologyParams(std::countr_zero(static_cast<std::uint64_t>(side)));
}

std::int64_t max_rank(int level, int n) {
    if (level < 0 || level > n) {
        throw DomainError("level " + std::to_string(level) + " outside [0, " + std::to_string(n) +
                          "]");
    }
    if (level == n) return 0;
    return (std::int64_t{1} << (n - level - 1)) - 1;
}

HierCoord decompose(std::int64_t x, int n) {
    if (x < 1 || x > (std::int64_t{1} << n)) {
        throw DomainError("line coordinate " + std::to_string(x) + " outside [1, 2^" +
                          std::to_string(n) + "]");
    }
    const int level = std::countr_zero(static_cast<std::uint64_t>(x));
    return {level, ((x >> level) - 1) / 2};
}

std::int64_t compose(HierCoord h, int n) {
    if (h.rank < 0 || h.rank > max_rank(h.level, n)) {
        throw DomainError("rank " + std::to_string(h.rank) + " outside level " +
                          std::to_string(h.level));
    }
    return (std::int64_t{1} << h.level) * (2 * h.rank + 1);
}

std::int64_t long_range_neighbor(std::int64_t x, int step, int n) {
    const HierCoord h = decompose(x, n);
    if (h.level >= n - 1) return x;
    const std::int64_t size = level_size(h.level, n);
    const std::int64_t rank = ((h.rank + step) % size + size) % size;
    return compose({h.level, rank}, n);
}

std::int64_t grid_neighbor(std::int64_t c, int step, std::int64_t side) {
    return ((c + step) % side + side) % side;
}

bool is_exceptional_coordinate(std::int64_t x, int n) { return decompose(x, n).level >= n - 1; }

bool is_exceptional(GridVertex v, int n, ExceptionalRule rule) {
    const bool ex = is_exceptional_coordinate(v.x + 1, n);
    const bool ey = is_exceptional_coordinate(v.y + 1, n);
    return rule == ExceptionalRule::Line ? (ex || ey) : (ex && ey);
}

std::string_view to_string(ExceptionalRule rule) {
    return rule == ExceptionalRule::Line ? "line" : "intersection";
}

ExceptionalRule parse_exceptional_rule(std::string_view text) {
    if (text == "line") return ExceptionalRule::Line;
    if (text == "intersection") return ExceptionalRule::Intersection;
    throw DomainError("unknown exceptional rule '" + std::string(text) + "'");
}

}  // namespace lqw
