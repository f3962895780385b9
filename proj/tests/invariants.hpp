#pragma once

// Randomized invariant checks shared by the unit and acceptance suites. Each
// returns the number of violations over `cases` random inputs.

#include <cstdint>
#include <random>

#include "test_support.hpp"
#include "tropsand/observables.hpp"
#include "tropsand/sandpile.hpp"

namespace tropsand::testing {

struct ToppleCase {
  SandpileState before;
  Coord p;
  SandpileState after;
};

inline ToppleCase random_topple(std::mt19937_64& rng) {
  const Grid g = random_grid(rng);
  SandpileState s = random_reachable_state(rng, g);
  std::uniform_int_distribution<std::int64_t> coord(1, g.denominator() - 1);
  // Hit an existing break point now and then.
  Coord p{coord(rng)};
  if (!s.empty() && rng() % 4 == 0) p = s.points()[rng() % s.size()].pos;
  SandpileState after = topple(s, p);
  return {std::move(s), p, std::move(after)};
}

inline bool multiplicities_at_most_two(const SandpileState& s) {
  for (const Break& b : s.points()) {
    if (b.mult < 1 || b.mult > 2) return false;
  }
  return true;
}

inline bool integral(const SandpileState& s) {
  int128 acc = 0;
  for (const Break& b : s.points()) acc += int128{b.mult} * b.pos.num;
  return acc % s.grid().denominator() == 0;
}

inline std::int64_t count_validity_violations(std::mt19937_64& rng, int cases) {
  std::int64_t bad = 0;
  for (int t = 0; t < cases; ++t) {
    if (!is_valid(random_topple(rng).after)) ++bad;
  }
  return bad;
}

inline std::int64_t count_idempotence_violations(std::mt19937_64& rng, int cases) {
  std::int64_t bad = 0;
  for (int t = 0; t < cases; ++t) {
    const ToppleCase c = random_topple(rng);
    if (topple(c.after, c.p) != c.after) ++bad;
  }
  return bad;
}

/// Toppling only raises the function: evaluate(after) >= evaluate(before) on
/// a 65-point grid plus the break points, strictly at p when p was not a
/// break point (the coefficient b_w exceeds a_w there).
inline std::int64_t count_monotonicity_violations(std::mt19937_64& rng, int cases) {
  std::int64_t bad = 0;
  for (int t = 0; t < cases; ++t) {
    const ToppleCase c = random_topple(rng);
    const std::int64_t d = c.before.grid().denominator();
    bool ok = true;
    for (int k = 0; k <= 64 && ok; ++k) {
      const Coord x{static_cast<std::int64_t>(int128{d} * k / 64)};
      ok = evaluate(c.after, x) >= evaluate(c.before, x);
    }
    for (const Break& b : c.before.points()) {
      ok = ok && evaluate(c.after, b.pos) >= evaluate(c.before, b.pos);
    }
    if (c.before.multiplicity_at(c.p) == 0) {
      ok = ok && evaluate(c.after, c.p) > evaluate(c.before, c.p);
    } else {
      ok = ok && c.after == c.before;
    }
    if (!ok) ++bad;
  }
  return bad;
}

/// Multiplicity bound and integrality checked after every topple of a
/// relaxation, not just at the end.
inline std::int64_t count_stepwise_violations(std::mt19937_64& rng, int cases,
                                              bool check_mult, bool check_int) {
  std::int64_t bad = 0;
  for (int t = 0; t < cases; ++t) {
    const Grid g = random_grid(rng);
    std::uniform_int_distribution<int> size(1, 6);
    const PointConfig cfg = random_config(rng, g, size(rng));
    SandpileState s(g);
    bool ok = true;
    for (int sweep_no = 0; sweep_no < 200 && ok; ++sweep_no) {
      bool changed = false;
      for (Coord p : cfg.points()) {
        changed |= s.apply_topple(p);
        if (check_mult) ok = ok && multiplicities_at_most_two(s);
        if (check_int) ok = ok && integral(s);
      }
      if (!changed) break;
    }
    if (!ok) ++bad;
  }
  return bad;
}

inline std::int64_t count_mirror_violations(std::mt19937_64& rng, int cases,
                                            int max_n = 8) {
  std::int64_t bad = 0;
  for (int t = 0; t < cases; ++t) {
    const Grid g = random_grid(rng);
    std::uniform_int_distribution<int> size(1, max_n);
    const int n = std::min<int>(size(rng), static_cast<int>(g.denominator() - 1));
    const PointConfig cfg = random_config(rng, g, n);
    if (length_of_relaxation(cfg) != length_of_relaxation(mirror(cfg))) ++bad;
  }
  return bad;
}

}  // namespace tropsand::testing
