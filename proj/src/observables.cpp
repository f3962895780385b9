#include "tropsand/observables.hpp"

#include <string>
#include <vector>

namespace tropsand {

std::int64_t length_of_relaxation(const PointConfig& cfg,
                                  std::int64_t max_sweeps) {
  SandpileState scratch(cfg.grid());
  return relax_into(cfg.grid(), cfg.points(), max_sweeps, scratch);
}

Rational n2_locus_area(std::int64_t n) {
  if (n < 1) {
    throw std::invalid_argument("n2_locus_area: N must be >= 1, got " +
                                std::to_string(n));
  }
  if (n == 1) return Rational(1, 4);
  const int128 k = n;
  const int128 num = 3 * (9 * k * k - 18 * k + 7);
  const int128 den = (3 * k - 1) * (3 * k - 2) * (3 * k - 4) * (3 * k - 5);
  return Rational(num, den);
}

PointConfig mirror(const PointConfig& cfg) {
  std::vector<Coord> pts;
  pts.reserve(cfg.size());
  for (Coord p : cfg.points()) pts.push_back(cfg.grid().reflect(p));
  return PointConfig(cfg.grid(), std::move(pts));
}

AvalancheInterval avalanche_interval(const PointConfig& cfg, Coord p_new) {
  const Grid& g = cfg.grid();
  if (!g.is_interior(p_new)) {
    throw std::invalid_argument("avalanche_interval: new point " +
                                g.value(p_new).str() + " is not inside (0, 1)");
  }
  const Coord q = fractional_q(cfg);
  if (p_new == q) {
    throw DegenerateConfiguration("avalanche_interval: new point " +
                                  g.value(p_new).str() + " coincides with q_n");
  }
  AvalancheInterval out;
  out.q_zero = q.num == 0;
  if (p_new < q) {
    out.lo = Coord{0};
    out.hi = q;
  } else {
    out.lo = q;
    out.hi = g.one();
  }
  out.length = Rational(out.hi.num - out.lo.num, g.denominator());
  return out;
}

}  // namespace tropsand
