#pragma once

#include <cstdint>
#include <stdexcept>

#include "tropsand/rational.hpp"
#include "tropsand/sandpile.hpp"

namespace tropsand {

/// Interval where the limit state changes when one more point is added.
struct AvalancheInterval {
  Coord lo;
  Coord hi;
  Rational length;
  /// The prior limit was already integral (q_n = 0); the interval is (0, 1).
  bool q_zero = false;
};

/// Raised when the new point coincides with q_n.
class DegenerateConfiguration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Minimal N with (G_{p_n} ... G_{p_1})^N applied to zero equal to the limit.
std::int64_t length_of_relaxation(
    const PointConfig& cfg,
    std::int64_t max_sweeps = RelaxOptions::kDefaultMaxSweeps);

/// Exact measure of {(p, q) in (0,1)^2 : L(p, q) = N}.
/// Throws std::invalid_argument for N < 1.
Rational n2_locus_area(std::int64_t n);

/// (1 - p_1, ..., 1 - p_n), same order.
PointConfig mirror(const PointConfig& cfg);

AvalancheInterval avalanche_interval(const PointConfig& cfg, Coord p_new);

}  // namespace tropsand
