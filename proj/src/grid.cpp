#include "tropsand/grid.hpp"

#include <stdexcept>
#include <string>

namespace tropsand {

Grid::Grid(std::int64_t denominator) : denom_(denominator) {
  if (denominator < 2 || denominator > kMaxDenominator) {
    throw std::invalid_argument("grid denominator must lie in [2, 2^62], got " +
                                std::to_string(denominator));
  }
}

Grid Grid::power_of_two(int log2) {
  if (log2 < 1 || log2 > kDefaultLog2) {
    throw std::invalid_argument("denominator exponent must lie in [1, 62], got " +
                                std::to_string(log2));
  }
  return Grid(std::int64_t{1} << log2);
}

Coord Grid::snap(const Rational& r) const {
  if (r < Rational(0) || r > Rational(1)) {
    throw std::invalid_argument("coordinate " + r.str() + " outside [0, 1]");
  }
  // floor((2 * r * D + 1) / 2) computed on exact integers
  int128 twice = 2 * r.num() * denom_ + r.den();
  int128 num = twice / (2 * r.den());
  return Coord{static_cast<std::int64_t>(num)};
}

bool Grid::represents(const Rational& r) const {
  return (int128{denom_} % r.den()) == 0;
}

}  // namespace tropsand
