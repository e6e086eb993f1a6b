#include "lqw/parallel.hpp"

#include <cstdlib>
#include <string>

namespace lqw {

int workers_from_env(int fallback) {
    const char* raw = std::getenv("LQW_WORKERS");
    if (raw == nullptr || *raw == '\0') return fallback;
    try {
        std::size_t used = 0;
        const int value = std::stoi(raw, &used);
        if (used == std::string(raw).size() && value > 0) return value;
    } catch (const std::exception&) {
    }
    return fallback;
}

}  // namespace lqw
