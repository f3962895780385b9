#include "tropsand/raster.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tropsand/parallel.hpp"

namespace tropsand {

RasterGrid::RasterGrid(int resolution, std::vector<std::int64_t> values,
                       std::int64_t guard_trips)
    : resolution_(resolution),
      values_(std::move(values)),
      guard_trips_(guard_trips) {
  const auto r = static_cast<std::size_t>(resolution);
  if (values_.size() != r * r) {
    throw std::invalid_argument("RasterGrid: expected " + std::to_string(r * r) +
                                " values, got " +
                                std::to_string(values_.size()));
  }
}

bool RasterGrid::is_point_symmetric() const {
  const std::size_t n = values_.size();
  for (std::size_t k = 0; k < n / 2; ++k) {
    if (values_[k] != values_[n - 1 - k]) return false;
  }
  return true;
}

Coord cell_center(const Grid& grid, int resolution, int i) {
  return grid.snap(Rational(2 * i + 1, 2 * static_cast<int128>(resolution)));
}

RasterGrid scan(int resolution, const ScanOptions& opts) {
  if (resolution < 2) {
    throw std::invalid_argument("scan: resolution must be >= 2, got " +
                                std::to_string(resolution));
  }
  const auto r = static_cast<std::int64_t>(resolution);
  std::vector<Coord> centers(static_cast<std::size_t>(r));
  for (int i = 0; i < resolution; ++i) {
    centers[static_cast<std::size_t>(i)] = cell_center(opts.grid, resolution, i);
  }

  std::vector<std::int64_t> values(static_cast<std::size_t>(r * r), 0);
  const unsigned workers = resolve_workers(opts.workers);
  std::vector<std::int64_t> trips(workers, 0);
  std::vector<SandpileState> scratch(workers, SandpileState(opts.grid));

  // One block per row.
  for_each_block(r * r, r, workers,
                 [&](unsigned w, std::int64_t begin, std::int64_t end) {
                   for (std::int64_t cell = begin; cell < end; ++cell) {
                     const auto i = static_cast<std::size_t>(cell % r);
                     const auto j = static_cast<std::size_t>(cell / r);
                     const std::array<Coord, 2> pts{centers[i], centers[j]};
                     try {
                       values[static_cast<std::size_t>(cell)] = relax_into(
                           opts.grid, pts, opts.max_sweeps, scratch[w]);
                     } catch (const GuardTripped&) {
                       ++trips[w];
                     }
                   }
                   return true;
                 });

  return RasterGrid(resolution, std::move(values),
                    std::accumulate(trips.begin(), trips.end(), std::int64_t{0}));
}

Rational area_estimate(const RasterGrid& g, std::int64_t n) {
  const auto hits = std::count(g.values().begin(), g.values().end(), n);
  const int128 cells = static_cast<int128>(g.resolution()) * g.resolution();
  return Rational(hits, cells);
}

void write_pgm(const RasterGrid& g, std::ostream& os) {
  const int r = g.resolution();
  os << "P5\n" << r << ' ' << r << "\n255\n";
  std::vector<char> row(static_cast<std::size_t>(r));
  for (int j = r - 1; j >= 0; --j) {
    for (int i = 0; i < r; ++i) {
      const std::int64_t v = std::min<std::int64_t>(g.at(i, j), 255);
      row[static_cast<std::size_t>(i)] = static_cast<char>(static_cast<unsigned char>(v));
    }
    os.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void write_csv(const RasterGrid& g, std::ostream& os) {
  const int r = g.resolution();
  for (int j = 0; j < r; ++j) {
    for (int i = 0; i < r; ++i) {
      if (i) os << ',';
      os << g.at(i, j);
    }
    os << '\n';
  }
}

}  // namespace tropsand
