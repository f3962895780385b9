#include "tropsand/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tropsand/observables.hpp"
#include "tropsand/parallel.hpp"

namespace tropsand {

namespace {

constexpr std::int64_t kBlock = 4096;
// Lengths below this go to a dense per-worker table before the sparse merge.
constexpr std::int64_t kDenseLimit = 4096;

}  // namespace

void TrialConfig::validate() const {
  if (n < 1) throw std::invalid_argument("point count n must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be >= 1");
  if (grid().denominator() - 1 < n) {
    throw std::invalid_argument("grid has fewer interior points than n");
  }
}

void LHistogram::add(std::int64_t length, std::int64_t count) {
  if (count == 0) return;
  counts_[length] += count;
  total_ += count;
}

void LHistogram::merge(const LHistogram& other) {
  for (const auto& [length, count] : other.counts_) add(length, count);
}

std::int64_t LHistogram::count(std::int64_t length) const {
  auto it = counts_.find(length);
  return it == counts_.end() ? 0 : it->second;
}

TrialFailure::TrialFailure(std::int64_t trial_index, const GuardTripped& cause)
    : std::runtime_error("trial " + std::to_string(trial_index) + ": " +
                         cause.what()),
      trial_index_(trial_index),
      state_(cause.state()) {}

void draw_points(TrialStream& stream, const Grid& grid, int n,
                 std::vector<Coord>& out) {
  out.clear();
  const auto top = static_cast<std::uint64_t>(grid.denominator() - 1);
  while (static_cast<int>(out.size()) < n) {
    const Coord c{static_cast<std::int64_t>(stream.uniform(1, top))};
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
}

PointConfig sample_config(int n, std::uint64_t trial_index,
                          std::uint64_t master_seed, Grid grid) {
  TrialStream stream(master_seed, trial_index);
  std::vector<Coord> pts;
  draw_points(stream, grid, n, pts);
  return PointConfig(grid, std::move(pts));
}

LHistogram run_trials(const TrialConfig& cfg) {
  cfg.validate();
  const Grid grid = cfg.grid();
  const unsigned workers = resolve_workers(cfg.workers);

  struct WorkerState {
    std::vector<std::int64_t> dense = std::vector<std::int64_t>(kDenseLimit);
    LHistogram sparse;
    std::vector<Coord> pts;
    SandpileState scratch;
    std::optional<std::int64_t> failed_trial;
    std::optional<GuardTripped> failure;
  };
  std::vector<WorkerState> local(workers);

  for_each_block(cfg.trials, kBlock, workers,
                 [&](unsigned w, std::int64_t begin, std::int64_t end) {
                   WorkerState& ws = local[w];
                   for (std::int64_t t = begin; t < end; ++t) {
                     TrialStream stream(cfg.master_seed,
                                        static_cast<std::uint64_t>(t));
                     draw_points(stream, grid, cfg.n, ws.pts);
                     try {
                       const std::int64_t len = relax_into(
                           grid, ws.pts, cfg.max_sweeps, ws.scratch);
                       if (len < kDenseLimit) {
                         ++ws.dense[static_cast<std::size_t>(len)];
                       } else {
                         ws.sparse.add(len);
                       }
                     } catch (const GuardTripped& e) {
                       if (!ws.failed_trial || t < *ws.failed_trial) {
                         ws.failed_trial = t;
                         ws.failure.emplace(e);
                       }
                       return false;
                     }
                   }
                   return true;
                 });

  const WorkerState* worst = nullptr;
  for (const WorkerState& ws : local) {
    if (ws.failed_trial && (!worst || *ws.failed_trial < *worst->failed_trial)) {
      worst = &ws;
    }
  }
  if (worst) throw TrialFailure(*worst->failed_trial, *worst->failure);

  LHistogram out;
  for (const WorkerState& ws : local) {
    for (std::int64_t len = 0; len < kDenseLimit; ++len) {
      out.add(len, ws.dense[static_cast<std::size_t>(len)]);
    }
    out.merge(ws.sparse);
  }
  return out;
}

CcdfTable ccdf(const LHistogram& h) {
  if (h.empty()) throw std::invalid_argument("ccdf: empty histogram");
  CcdfTable table;
  table.rows.reserve(h.counts().size());
  std::int64_t at_least = h.total();
  for (const auto& [length, count] : h.counts()) {
    table.rows.push_back(CcdfRow{length, Rational(at_least, h.total())});
    at_least -= count;
  }
  return table;
}

TailFit fit_tail(const CcdfTable& c, std::int64_t n_min, std::int64_t n_max) {
  std::vector<double> xs;
  std::vector<double> ys;
  TailFit fit;
  fit.n_min = n_min;
  fit.n_max = n_max;
  for (const CcdfRow& row : c.rows) {
    if (row.length < n_min || row.length > n_max || row.length < 1) continue;
    xs.push_back(std::log(static_cast<double>(row.length)));
    ys.push_back(std::log(row.ccdf.to_double()));
  }
  if (xs.size() < 3) {
    throw std::invalid_argument("fit_tail: need at least 3 support points in [" +
                                std::to_string(n_min) + ", " +
                                std::to_string(n_max) + "], have " +
                                std::to_string(xs.size()));
  }
  const double k = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
  double sxx = 0;
  double sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit_tail: degenerate range");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.pmf_exponent = fit.slope - 1.0;
  fit.points = xs.size();
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / k);
  return fit;
}

AvalancheStats avalanche_trials(const TrialConfig& cfg, int bins) {
  cfg.validate();
  if (bins < 1) throw std::invalid_argument("avalanche_trials: bins must be >= 1");
  const Grid grid = cfg.grid();
  if (grid.denominator() - 1 < cfg.n + 2) {
    throw std::invalid_argument("avalanche_trials: grid too small for n + 1 points");
  }
  const unsigned workers = resolve_workers(cfg.workers);
  const auto trials = static_cast<std::size_t>(cfg.trials);

  AvalancheStats stats;
  stats.lengths.assign(trials, 0.0);
  std::vector<std::int64_t> degenerate(workers, 0);
  std::vector<std::int64_t> q_zero(workers, 0);

  for_each_block(
      cfg.trials, kBlock, workers,
      [&](unsigned w, std::int64_t begin, std::int64_t end) {
        std::vector<Coord> pts;
        for (std::int64_t t = begin; t < end; ++t) {
          TrialStream stream(cfg.master_seed, static_cast<std::uint64_t>(t));
          draw_points(stream, grid, cfg.n + 1, pts);
          const Coord fresh = pts.back();
          pts.pop_back();
          const PointConfig prior(grid, pts);
          const Coord q = fractional_q(prior);
          Coord p_new = fresh;
          const auto top = static_cast<std::uint64_t>(grid.denominator() - 1);
          while (p_new == q ||
                 std::find(pts.begin(), pts.end(), p_new) != pts.end()) {
            ++degenerate[w];
            p_new = Coord{static_cast<std::int64_t>(stream.uniform(1, top))};
          }
          const AvalancheInterval iv = avalanche_interval(prior, p_new);
          if (iv.q_zero) ++q_zero[w];
          stats.lengths[static_cast<std::size_t>(t)] = iv.length.to_double();
        }
        return true;
      });

  stats.degenerate_resamples =
      std::accumulate(degenerate.begin(), degenerate.end(), std::int64_t{0});
  stats.q_zero_trials =
      std::accumulate(q_zero.begin(), q_zero.end(), std::int64_t{0});

  stats.density.assign(static_cast<std::size_t>(bins), 0.0);
  double sum = 0;
  for (double x : stats.lengths) {
    sum += x;
    auto bin = static_cast<std::size_t>(x * bins);
    if (bin >= static_cast<std::size_t>(bins)) bin = static_cast<std::size_t>(bins - 1);
    stats.density[bin] += 1.0;
  }
  const double total = static_cast<double>(trials);
  for (double& d : stats.density) d = d * bins / total;
  stats.mean = sum / total;
  double ss = 0;
  for (double x : stats.lengths) ss += (x - stats.mean) * (x - stats.mean);
  stats.variance = trials > 1 ? ss / (total - 1) : 0.0;
  return stats;
}

double ks_statistic(std::span<const double> samples,
                    const std::function<double(double)>& cdf) {
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  std::vector<double> xs(a.begin(), a.end());
  std::vector<double> ys(b.begin(), b.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double n = static_cast<double>(xs.size());
  const double m = static_cast<double>(ys.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0;
  while (i < xs.size() && j < ys.size()) {
    const double v = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] == v) ++i;
    while (j < ys.size() && ys[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n -
                             static_cast<double>(j) / m));
  }
  return d;
}

double ks_critical(std::size_t n, double alpha) {
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  return c / std::sqrt(static_cast<double>(n));
}

double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha) {
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

}  // namespace tropsand
