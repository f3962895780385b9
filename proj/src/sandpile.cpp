#include "tropsand/sandpile.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace tropsand {

namespace {

// Index of the first break point at or right of p.
std::size_t lower_bound_pos(std::span<const Break> pts, Coord p) {
  auto it = std::lower_bound(pts.begin(), pts.end(), p,
                             [](const Break& b, Coord c) { return b.pos < c; });
  return static_cast<std::size_t>(it - pts.begin());
}

// (sum of multiplicity * numerator) mod D, in [0, D).
std::int64_t weighted_sum_mod(std::span<const Break> pts, std::int64_t denom) {
  int128 acc = 0;
  for (const Break& b : pts) acc += int128{b.mult} * b.pos.num;
  return static_cast<std::int64_t>(acc % denom);
}

}  // namespace

PointConfig::PointConfig(Grid grid, std::vector<Coord> points)
    : grid_(grid), points_(std::move(points)) {
  for (Coord c : points_) {
    if (!grid_.is_interior(c)) {
      throw std::invalid_argument("point " + grid_.value(c).str() +
                                  " is not inside (0, 1)");
    }
  }
  std::vector<Coord> sorted = points_;
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw std::invalid_argument("duplicate point " + grid_.value(*dup).str());
  }
}

std::int64_t SandpileState::total_multiplicity() const {
  std::int64_t total = 0;
  for (const Break& b : points_) total += b.mult;
  return total;
}

int SandpileState::multiplicity_at(Coord c) const {
  const std::size_t i = lower_bound_pos(points_, c);
  return (i < points_.size() && points_[i].pos == c) ? points_[i].mult : 0;
}

bool SandpileState::apply_topple(Coord p) {
  const std::size_t i = lower_bound_pos(points_, p);
  if (i < points_.size() && points_[i].pos == p) return false;

  const bool left_interior = i > 0;
  const bool right_interior = i < points_.size();
  const std::int64_t a = left_interior ? points_[i - 1].pos.num : 0;
  const std::int64_t b =
      right_interior ? points_[i].pos.num : grid_.denominator();
  const std::int64_t c = std::min(p.num - a, b - p.num);
  const Coord lo{a + c};
  const Coord hi{b - c};

  // Rewrite the window [first, last) holding the component's interior ends.
  const std::size_t first = left_interior ? i - 1 : i;
  const std::size_t last = right_interior ? i + 1 : i;
  std::array<Break, 4> repl;
  std::size_t k = 0;
  if (left_interior && points_[i - 1].mult > 1) {
    repl[k++] = Break{points_[i - 1].pos, points_[i - 1].mult - 1};
  }
  if (lo == hi) {
    repl[k++] = Break{lo, 2};
  } else {
    repl[k++] = Break{lo, 1};
    repl[k++] = Break{hi, 1};
  }
  if (right_interior && points_[i].mult > 1) {
    repl[k++] = Break{points_[i].pos, points_[i].mult - 1};
  }

  const std::size_t old_len = last - first;
  auto at = points_.begin() + static_cast<std::ptrdiff_t>(first);
  if (k > old_len) {
    points_.insert(at + static_cast<std::ptrdiff_t>(old_len), k - old_len,
                   Break{});
  } else if (k < old_len) {
    points_.erase(at + static_cast<std::ptrdiff_t>(k),
                  at + static_cast<std::ptrdiff_t>(old_len));
  }
  std::copy(repl.begin(), repl.begin() + static_cast<std::ptrdiff_t>(k),
            points_.begin() + static_cast<std::ptrdiff_t>(first));
  return true;
}

std::string SandpileState::str() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i) os << ", ";
    os << grid_.value(points_[i].pos);
    if (points_[i].mult != 1) os << " x" << points_[i].mult;
  }
  os << '}';
  return os.str();
}

GuardTripped::GuardTripped(SandpileState state, std::int64_t sweeps)
    : std::runtime_error("relaxation did not stabilize within " +
                         std::to_string(sweeps) + " sweeps; state " +
                         state.str()),
      state_(std::move(state)),
      sweeps_(sweeps) {}

SandpileState initial_state(Grid grid) { return SandpileState(grid); }

ComponentOrOn find_component(const SandpileState& s, Coord p) {
  if (!s.grid().is_interior(p)) {
    throw std::invalid_argument("find_component: point " +
                                s.grid().value(p).str() +
                                " is not inside (0, 1)");
  }
  auto pts = s.points();
  const std::size_t i = lower_bound_pos(pts, p);
  if (i < pts.size() && pts[i].pos == p) return std::nullopt;
  Coord lo = i == 0 ? Coord{0} : pts[i - 1].pos;
  Coord hi = i == pts.size() ? s.grid().one() : pts[i].pos;
  return Component{lo, hi};
}

SandpileState topple(const SandpileState& s, Coord p) {
  if (!s.grid().is_interior(p)) {
    throw std::invalid_argument("topple: point " + s.grid().value(p).str() +
                                " is not inside (0, 1)");
  }
  SandpileState out = s;
  out.apply_topple(p);
  return out;
}

std::pair<SandpileState, bool> sweep(const SandpileState& s,
                                     const PointConfig& cfg) {
  SandpileState out = s;
  bool changed = false;
  for (Coord p : cfg.points()) changed |= out.apply_topple(p);
  return {std::move(out), changed};
}

std::int64_t relax_into(Grid grid, std::span<const Coord> points,
                        std::int64_t max_sweeps, SandpileState& scratch) {
  scratch.reset(grid);
  std::int64_t sweeps = 0;
  for (;;) {
    bool changed = false;
    for (Coord p : points) changed |= scratch.apply_topple(p);
    if (!changed) return sweeps;
    if (++sweeps > max_sweeps) throw GuardTripped(scratch, sweeps);
  }
}

RelaxResult relax(const PointConfig& cfg, const RelaxOptions& opts) {
  RelaxResult result;
  if (!opts.trace) {
    result.sweeps = relax_into(cfg.grid(), cfg.points(), opts.max_sweeps,
                               result.final_state);
    return result;
  }

  SandpileState state(cfg.grid());
  std::vector<TraceStep> pending;
  for (;;) {
    bool changed = false;
    pending.clear();
    for (std::size_t i = 0; i < cfg.size(); ++i) {
      changed |= state.apply_topple(cfg[i]);
      pending.push_back(TraceStep{i, state});
    }
    if (!changed) break;
    if (++result.sweeps > opts.max_sweeps) {
      throw GuardTripped(state, result.sweeps);
    }
    std::move(pending.begin(), pending.end(), std::back_inserter(result.trace));
  }
  result.final_state = std::move(state);
  return result;
}

Coord fractional_q(const PointConfig& cfg) {
  const std::int64_t d = cfg.grid().denominator();
  int128 acc = 0;
  for (Coord p : cfg.points()) acc += p.num;
  const auto rem = static_cast<std::int64_t>(acc % d);
  return Coord{rem == 0 ? 0 : d - rem};
}

LimitCase limit_case(const PointConfig& cfg) {
  const Coord q = fractional_q(cfg);
  if (q.num == 0) return LimitCase::kIntegral;
  for (Coord p : cfg.points()) {
    if (p == q) return LimitCase::kCoincident;
  }
  return LimitCase::kGeneric;
}

SandpileState limit_state(const PointConfig& cfg) {
  const Coord q = fractional_q(cfg);
  std::vector<Break> pts;
  pts.reserve(cfg.size() + 1);
  bool doubled = false;
  for (Coord p : cfg.points()) {
    if (q.num != 0 && p == q) {
      pts.push_back(Break{p, 2});
      doubled = true;
    } else {
      pts.push_back(Break{p, 1});
    }
  }
  if (q.num != 0 && !doubled) pts.push_back(Break{q, 1});
  std::sort(pts.begin(), pts.end(),
            [](const Break& x, const Break& y) { return x.pos < y.pos; });
  return SandpileState(cfg.grid(), std::move(pts));
}

Rational evaluate(const SandpileState& s, Coord x) {
  const std::int64_t d = s.grid().denominator();
  int128 alpha_num = 0;  // alpha * D
  int128 kinks = 0;      // D * sum mu(h) min(0, h - x)
  for (const Break& b : s.points()) {
    alpha_num += int128{b.mult} * (d - b.pos.num);
    if (b.pos.num < x.num) kinks += int128{b.mult} * (b.pos.num - x.num);
  }
  return Rational(alpha_num, d) * Rational(x.num, d) + Rational(kinks, d);
}

bool is_valid(const SandpileState& s) {
  const Grid& g = s.grid();
  auto pts = s.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!g.is_interior(pts[i].pos)) return false;
    if (pts[i].mult < 1 || pts[i].mult > 2) return false;
    if (i > 0 && !(pts[i - 1].pos < pts[i].pos)) return false;
  }
  return weighted_sum_mod(pts, g.denominator()) == 0;
}

std::pair<std::int64_t, std::int64_t> boundary_slopes(const SandpileState& s) {
  const std::int64_t d = s.grid().denominator();
  int128 alpha_num = 0;
  std::int64_t total = 0;
  for (const Break& b : s.points()) {
    alpha_num += int128{b.mult} * (d - b.pos.num);
    total += b.mult;
  }
  if (alpha_num % d != 0) {
    throw std::domain_error("boundary_slopes: state " + s.str() +
                            " fails the integrality criterion");
  }
  const auto alpha = static_cast<std::int64_t>(alpha_num / d);
  return {alpha, alpha - total};
}

}  // namespace tropsand
