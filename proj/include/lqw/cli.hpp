#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lqw/hn4.hpp"

namespace lqw {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,
    kExitNoPeak = 3,
    kExitResource = 4,
};

/// "x1,y1;x2,y2;..." in 0-based grid coordinates. Throws DomainError on
/// malformed or empty input.
std::vector<GridVertex> parse_targets(const std::string& text);

/// Runs one `lqw` command line (args excludes the program name). Data goes to
/// `out` when no --out path is given; warnings, progress and errors go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lqw
