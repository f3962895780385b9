#pragma once

// Exact one-dimensional tropical sandpile on [0, 1].
//
// A tropical polynomial F on [0, 1] that vanishes at both endpoints is encoded
// by its finite break-point set H with multiplicities (the slope drop of F at
// each break point). Toppling at a point p in a smooth component (a, b) moves
// both ends of that component a distance c = min(p - a, b - p) toward p.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tropsand/grid.hpp"
#include "tropsand/rational.hpp"

namespace tropsand {

struct Break {
  Coord pos;
  int mult = 1;

  friend bool operator==(const Break&, const Break&) = default;
};

/// Ordered tuple of distinct interior points; the input of a relaxation.
class PointConfig {
 public:
  /// Throws std::invalid_argument on boundary or repeated points.
  PointConfig(Grid grid, std::vector<Coord> points);

  const Grid& grid() const { return grid_; }
  std::span<const Coord> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  Coord operator[](std::size_t i) const { return points_[i]; }

  friend bool operator==(const PointConfig&, const PointConfig&) = default;

 private:
  Grid grid_;
  std::vector<Coord> points_;
};

/// Break points of an Omega-tropical polynomial, strictly increasing in
/// position. The endpoints 0 and 1 are implicit and never stored.
class SandpileState {
 public:
  explicit SandpileState(Grid grid = Grid{}) : grid_(grid) {}
  /// No validation; use is_valid() on states that come from outside.
  SandpileState(Grid grid, std::vector<Break> points)
      : grid_(grid), points_(std::move(points)) {}

  const Grid& grid() const { return grid_; }
  std::span<const Break> points() const { return points_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  std::int64_t total_multiplicity() const;

  /// Multiplicity at c, or 0 when c is not a break point.
  int multiplicity_at(Coord c) const;

  /// In-place toppling at p; returns false when p already lies on a break
  /// point (the operator is then the identity).
  bool apply_topple(Coord p);

  /// Back to the zero series on grid, keeping the allocated storage.
  void reset(Grid grid) {
    grid_ = grid;
    points_.clear();
  }

  std::string str() const;  // "{1/9, 4/9 x2}"

  friend bool operator==(const SandpileState&, const SandpileState&) = default;

 private:
  Grid grid_;
  std::vector<Break> points_;
};

/// Smooth component (lo, hi) of the complement of H; lo/hi may be 0 or 1.
struct Component {
  Coord lo;
  Coord hi;
};

/// nullopt means p lies on the hypersurface (p is a break point).
using ComponentOrOn = std::optional<Component>;

struct TraceStep {
  std::size_t point_index = 0;
  SandpileState state;
};

struct RelaxResult {
  SandpileState final_state;
  std::int64_t sweeps = 0;
  std::vector<TraceStep> trace;
};

struct RelaxOptions {
  static constexpr std::int64_t kDefaultMaxSweeps = 10'000'000;

  std::int64_t max_sweeps = kDefaultMaxSweeps;
  bool trace = false;
};

/// Raised when a relaxation does not stabilize within the sweep budget.
class GuardTripped : public std::runtime_error {
 public:
  GuardTripped(SandpileState state, std::int64_t sweeps);

  const SandpileState& state() const { return state_; }
  std::int64_t sweeps() const { return sweeps_; }

 private:
  SandpileState state_;
  std::int64_t sweeps_;
};

/// Which of the three limit-state shapes applies, keyed on q = frac(-sum p).
enum class LimitCase {
  kIntegral = 1,    // q == 0: H = {p_i}, all simple
  kCoincident = 2,  // q == p_j: H = {p_i}, p_j doubled
  kGeneric = 3,     // H = {q} + {p_i}, all simple
};

SandpileState initial_state(Grid grid = Grid{});

/// Throws std::invalid_argument when p is not interior.
ComponentOrOn find_component(const SandpileState& s, Coord p);

SandpileState topple(const SandpileState& s, Coord p);

/// One pass of topples at p_1, ..., p_n in order.
std::pair<SandpileState, bool> sweep(const SandpileState& s,
                                     const PointConfig& cfg);

/// Sweeps from the zero series until a sweep leaves the state unchanged.
/// sweeps counts the sweeps that changed the state; the trace (if requested)
/// holds one entry per topple of those sweeps.
RelaxResult relax(const PointConfig& cfg, const RelaxOptions& opts = {});

/// Allocation-free variant used by the samplers: relaxes into scratch and
/// returns the sweep count. Points must be interior; repeats are harmless
/// since each topple is idempotent.
std::int64_t relax_into(Grid grid, std::span<const Coord> points,
                        std::int64_t max_sweeps, SandpileState& scratch);

Coord fractional_q(const PointConfig& cfg);
LimitCase limit_case(const PointConfig& cfg);
SandpileState limit_state(const PointConfig& cfg);

/// F(x) = alpha * x + sum mu(h) * min(0, h - x), alpha = sum mu(h) (1 - h).
Rational evaluate(const SandpileState& s, Coord x);

bool is_valid(const SandpileState& s);

/// (slope at 0, slope at 1); throws std::domain_error for an invalid state.
std::pair<std::int64_t, std::int64_t> boundary_slopes(const SandpileState& s);

}  // namespace tropsand
