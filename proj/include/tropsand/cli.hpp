#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tropsand/grid.hpp"
#include "tropsand/rational.hpp"

namespace tropsand::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitGuard = 3;

/// Parses "a/b", an integer, or a plain decimal such as "0.125" exactly.
/// Throws std::invalid_argument on anything else.
Rational parse_rational(std::string_view text);

/// Comma-separated list of parse_rational values.
std::vector<Rational> parse_rational_list(std::string_view text);

/// Grid for exact inputs: the lcm of their denominators when it fits,
/// otherwise 2^62.
Grid grid_for(const std::vector<Rational>& unit_points);

/// Runs one command line (without the program name). All normal output goes
/// to out, diagnostics to err; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace tropsand::cli
