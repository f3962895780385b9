#pragma once

#include <compare>
#include <cstdint>

#include "tropsand/rational.hpp"

namespace tropsand {

/// A point of [0, 1] stored as an integer numerator over the grid denominator.
struct Coord {
  std::int64_t num = 0;

  friend auto operator<=>(const Coord&, const Coord&) = default;
};

/// The shared denominator D of all coordinates in a run. Every coordinate is
/// num / D with 0 <= num <= D. The dynamics only add, subtract and compare
/// numerators, so any D is closed under them; the default is 2^62.
class Grid {
 public:
  static constexpr int kDefaultLog2 = 62;
  static constexpr std::int64_t kMaxDenominator = std::int64_t{1} << 62;

  constexpr Grid() = default;
  explicit Grid(std::int64_t denominator);

  static Grid power_of_two(int log2);

  std::int64_t denominator() const { return denom_; }

  bool is_interior(Coord c) const { return c.num > 0 && c.num < denom_; }
  bool contains(Coord c) const { return c.num >= 0 && c.num <= denom_; }

  Coord one() const { return Coord{denom_}; }
  Coord reflect(Coord c) const { return Coord{denom_ - c.num}; }

  Rational value(Coord c) const { return Rational(c.num, denom_); }

  /// Nearest grid point to r (ties round up). r must lie in [0, 1].
  Coord snap(const Rational& r) const;
  /// True when r is exactly a grid point.
  bool represents(const Rational& r) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::int64_t denom_ = kMaxDenominator;
};

}  // namespace tropsand
