#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "tropsand/grid.hpp"
#include "tropsand/rational.hpp"
#include "tropsand/sandpile.hpp"

namespace tropsand {

/// L(p, q) sampled at cell centers ((i + 1/2) / R, (j + 1/2) / R).
/// Row j holds q_j, column i holds p_i; relaxation order is p then q.
class RasterGrid {
 public:
  RasterGrid(int resolution, std::vector<std::int64_t> values,
             std::int64_t guard_trips);

  int resolution() const { return resolution_; }
  std::int64_t at(int i, int j) const {
    return values_[static_cast<std::size_t>(j) * resolution_ + i];
  }
  const std::vector<std::int64_t>& values() const { return values_; }
  /// Cells whose relaxation hit the sweep guard; they hold 0.
  std::int64_t guard_trips() const { return guard_trips_; }

  /// True when the grid equals its point reflection through (1/2, 1/2).
  bool is_point_symmetric() const;

  friend bool operator==(const RasterGrid&, const RasterGrid&) = default;

 private:
  int resolution_;
  std::vector<std::int64_t> values_;
  std::int64_t guard_trips_;
};

struct ScanOptions {
  Grid grid{};
  std::int64_t max_sweeps = RelaxOptions::kDefaultMaxSweeps;
  unsigned workers = 0;
};

/// Numerator of the cell center (2i + 1) / (2R), rounded to the grid.
Coord cell_center(const Grid& grid, int resolution, int i);

/// Cells on the diagonal (p == q) relax the single point p and get L = 1.
/// Throws std::invalid_argument for R < 2.
RasterGrid scan(int resolution, const ScanOptions& opts = {});

/// Fraction of cells with value n.
Rational area_estimate(const RasterGrid& g, std::int64_t n);

/// Binary PGM (P5, maxval 255), values saturated at 255, top row = largest q.
void write_pgm(const RasterGrid& g, std::ostream& os);
/// R lines of R comma-separated values, row j = q index j (ascending q).
void write_csv(const RasterGrid& g, std::ostream& os);

}  // namespace tropsand
