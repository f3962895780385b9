#pragma once

// Seeded sampling of random point configurations and the statistics built on
// top: histograms of the relaxation length, CCDF tables, log-log tail fits and
// the avalanche-length distribution.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tropsand/philox.hpp"
#include "tropsand/rational.hpp"
#include "tropsand/sandpile.hpp"

namespace tropsand {

struct TrialConfig {
  int n = 2;
  std::int64_t trials = 1;
  std::uint64_t master_seed = 0;
  int denominator_log2 = Grid::kDefaultLog2;
  std::int64_t max_sweeps = RelaxOptions::kDefaultMaxSweeps;
  unsigned workers = 0;  // 0: hardware concurrency

  Grid grid() const { return Grid::power_of_two(denominator_log2); }
  void validate() const;  // throws std::invalid_argument
};

class LHistogram {
 public:
  void add(std::int64_t length, std::int64_t count = 1);
  void merge(const LHistogram& other);

  const std::map<std::int64_t, std::int64_t>& counts() const { return counts_; }
  std::int64_t total() const { return total_; }
  std::int64_t count(std::int64_t length) const;
  bool empty() const { return total_ == 0; }

  friend bool operator==(const LHistogram&, const LHistogram&) = default;

 private:
  std::map<std::int64_t, std::int64_t> counts_;
  std::int64_t total_ = 0;
};

struct CcdfRow {
  std::int64_t length;
  Rational ccdf;  // P(L >= length)
};

struct CcdfTable {
  std::vector<CcdfRow> rows;
};

struct TailFit {
  double slope = 0;          // of log P(L >= N) against log N
  double pmf_exponent = 0;   // slope - 1
  double intercept = 0;      // natural log scale
  std::int64_t n_min = 0;
  std::int64_t n_max = 0;
  std::size_t points = 0;
  double residual = 0;       // RMS of the log-log residuals
};

/// A guard trip inside a batch, tagged with the lowest failing trial index.
class TrialFailure : public std::runtime_error {
 public:
  TrialFailure(std::int64_t trial_index, const GuardTripped& cause);
  std::int64_t trial_index() const { return trial_index_; }
  const SandpileState& state() const { return state_; }

 private:
  std::int64_t trial_index_;
  SandpileState state_;
};

struct AvalancheStats {
  std::vector<double> lengths;  // one per trial, in trial order
  std::vector<double> density;  // normalized histogram over [0, 1]
  double mean = 0;
  double variance = 0;
  std::int64_t degenerate_resamples = 0;
  std::int64_t q_zero_trials = 0;
};

/// n distinct interior numerators drawn uniformly from {1, ..., D - 1}.
void draw_points(TrialStream& stream, const Grid& grid, int n,
                 std::vector<Coord>& out);

PointConfig sample_config(int n, std::uint64_t trial_index,
                          std::uint64_t master_seed, Grid grid = Grid{});

/// Histogram of relaxation lengths; bit-identical for any worker count.
LHistogram run_trials(const TrialConfig& cfg);

/// Throws std::invalid_argument for an empty histogram.
CcdfTable ccdf(const LHistogram& h);

/// Least squares on (log N, log P(L >= N)) over the support in [n_min, n_max].
/// Throws std::invalid_argument with fewer than three usable rows.
TailFit fit_tail(const CcdfTable& c, std::int64_t n_min, std::int64_t n_max);

AvalancheStats avalanche_trials(const TrialConfig& cfg, int bins = 100);

/// sup |F_n(x) - cdf(x)| of the empirical CDF of samples.
double ks_statistic(std::span<const double> samples,
                    const std::function<double(double)>& cdf);
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Asymptotic Kolmogorov critical values at level alpha (0.01 or 0.05).
double ks_critical(std::size_t n, double alpha = 0.01);
double ks_critical_two_sample(std::size_t n, std::size_t m,
                              double alpha = 0.01);

}  // namespace tropsand
