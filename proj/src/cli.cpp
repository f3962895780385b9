#include "tropsand/cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"
#include "tropsand/montecarlo.hpp"
#include "tropsand/observables.hpp"
#include "tropsand/raster.hpp"
#include "tropsand/sandpile.hpp"

#ifndef TROPSAND_VERSION
#define TROPSAND_VERSION "0.0.0"
#endif

namespace tropsand::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::size_t kMaxDigits = 18;

int128 parse_digits(std::string_view s, std::string_view whole) {
  if (s.empty() || s.size() > kMaxDigits ||
      !std::all_of(s.begin(), s.end(),
                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw std::invalid_argument("cannot parse number '" + std::string(whole) + "'");
  }
  int128 v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

// 17 significant digits, the statistical output format.
std::string decimal(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

/// Affine map between a user segment [lo, hi] and the unit interval.
struct Domain {
  Rational lo{0};
  Rational hi{1};

  Rational to_unit(const Rational& x) const { return (x - lo) / (hi - lo); }
  Rational from_unit(const Rational& u) const { return lo + u * (hi - lo); }
};

Domain parse_domain(const std::string& text) {
  if (text.empty()) return {};
  auto ends = parse_rational_list(text);
  if (ends.size() != 2 || !(ends[0] < ends[1])) {
    throw std::invalid_argument("--domain expects 'lo,hi' with lo < hi");
  }
  return Domain{ends[0], ends[1]};
}

std::string show_state(const SandpileState& s, const Domain& dom) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const Break& b : s.points()) {
    if (!first) os << ", ";
    first = false;
    os << dom.from_unit(s.grid().value(b.pos));
    if (b.mult != 1) os << " x" << b.mult;
  }
  os << '}';
  return os.str();
}

struct PointInput {
  PointConfig config;
  Domain domain;
};

/// Maps the --points list onto the grid, echoing every snapped value.
PointInput read_points(const std::string& points_text,
                       const std::string& domain_text,
                       std::optional<int> denom_log2, std::ostream& err) {
  const Domain dom = parse_domain(domain_text);
  std::vector<Rational> unit;
  for (const Rational& x : parse_rational_list(points_text)) {
    if (!(dom.lo < x && x < dom.hi)) {
      throw std::invalid_argument("point " + x.str() +
                                  " is not inside the open domain (" +
                                  dom.lo.str() + ", " + dom.hi.str() + ")");
    }
    unit.push_back(dom.to_unit(x));
  }
  if (unit.empty()) throw std::invalid_argument("--points is empty");

  const Grid grid = denom_log2 ? Grid::power_of_two(*denom_log2) : grid_for(unit);
  std::vector<Coord> coords;
  for (const Rational& u : unit) {
    const Coord c = grid.snap(u);
    if (!grid.represents(u)) {
      err << "note: " << dom.from_unit(u) << " snapped to "
          << dom.from_unit(grid.value(c)) << '\n';
    }
    coords.push_back(c);
  }
  return PointInput{PointConfig(grid, std::move(coords)), dom};
}

/// Writes every (name, content) pair into dir, all-or-nothing.
void write_outputs(const fs::path& dir,
                   const std::vector<std::pair<std::string, std::string>>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  auto cleanup = [&] {
    for (const auto& p : written) fs::remove(p, ec);
  };
  for (const auto& [name, content] : files) {
    const fs::path tmp = dir / (name + ".tmp");
    std::ofstream os(tmp, std::ios::binary);
    os << content;
    os.close();
    written.push_back(tmp);
    if (!os) {
      cleanup();
      throw IoError("cannot write " + tmp.string());
    }
  }
  for (const auto& [name, content] : files) {
    fs::rename(dir / (name + ".tmp"), dir / name, ec);
    if (ec) {
      for (const auto& [n, c] : files) fs::remove(dir / n, ec);
      cleanup();
      throw IoError("cannot finalize " + (dir / name).string());
    }
  }
}

json manifest(const std::string& subcommand, const std::vector<std::string>& args,
              json flags, std::optional<std::uint64_t> seed, int denom_log2) {
  json m;
  m["tool"] = "tropsand";
  m["version"] = TROPSAND_VERSION;
  m["subcommand"] = subcommand;
  m["argv"] = args;
  m["flags"] = std::move(flags);
  if (seed) m["master_seed"] = *seed;
  m["denominator_log2"] = denom_log2;
  return m;
}

const char* case_label(LimitCase c) {
  switch (c) {
    case LimitCase::kIntegral: return "1 (q = 0: the points alone, all simple)";
    case LimitCase::kCoincident: return "2 (q = p_j: that point doubled)";
    case LimitCase::kGeneric: return "3 (q joins the points, all simple)";
  }
  return "?";
}

struct Options {
  std::string points;
  std::string domain;
  bool trace = false;
  int n = 2;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  int grid = 256;
  std::int64_t locus = 1;
  std::string out;
  unsigned workers = 0;
  std::optional<int> denom_log2;
  std::int64_t max_sweeps = RelaxOptions::kDefaultMaxSweeps;
  std::vector<std::int64_t> fit_range{10, 300};
  int bins = 100;
};

int cmd_relax(const Options& o, std::ostream& out, std::ostream& err) {
  const PointInput in = read_points(o.points, o.domain, o.denom_log2, err);
  RelaxOptions ro;
  ro.max_sweeps = o.max_sweeps;
  ro.trace = o.trace;
  const RelaxResult r = relax(in.config, ro);
  if (o.trace) {
    const std::size_t n = in.config.size();
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
      const TraceStep& step = r.trace[k];
      out << "sweep " << k / n + 1 << " step " << k + 1 << ": topple at "
          << in.domain.from_unit(in.config.grid().value(in.config[step.point_index]))
          << " -> " << show_state(step.state, in.domain) << '\n';
    }
  }
  out << "final: " << show_state(r.final_state, in.domain) << '\n';
  out << "L=" << r.sweeps << '\n';
  return kExitOk;
}

int cmd_limit(const Options& o, std::ostream& out, std::ostream& err) {
  const PointInput in = read_points(o.points, o.domain, o.denom_log2, err);
  const Coord q = fractional_q(in.config);
  out << "q: " << in.domain.from_unit(in.config.grid().value(q)) << '\n';
  out << "case: " << case_label(limit_case(in.config)) << '\n';
  out << "limit: " << show_state(limit_state(in.config), in.domain) << '\n';
  return kExitOk;
}

TrialConfig trial_config(const Options& o) {
  TrialConfig tc;
  tc.n = o.n;
  tc.trials = o.trials;
  tc.master_seed = o.seed;
  tc.denominator_log2 = o.denom_log2.value_or(Grid::kDefaultLog2);
  tc.max_sweeps = o.max_sweeps;
  tc.workers = o.workers;
  tc.validate();
  return tc;
}

int cmd_mc(const Options& o, const std::vector<std::string>& args,
           std::ostream& out, std::ostream& err) {
  const TrialConfig tc = trial_config(o);
  if (o.fit_range.size() != 2 || o.fit_range[0] > o.fit_range[1]) {
    throw std::invalid_argument("--fit-range expects 'min,max' with min <= max");
  }
  const LHistogram h = run_trials(tc);
  const CcdfTable table = ccdf(h);

  std::ostringstream hist;
  hist << "L,count\n";
  for (const auto& [len, count] : h.counts()) hist << len << ',' << count << '\n';
  std::ostringstream cc;
  cc << "N,ccdf\n";
  for (const CcdfRow& row : table.rows) {
    cc << row.length << ',' << decimal(row.ccdf.to_double()) << '\n';
  }

  json fit;
  fit["fit_range"] = o.fit_range;
  try {
    const TailFit f = fit_tail(table, o.fit_range[0], o.fit_range[1]);
    fit["ccdf_slope"] = f.slope;
    fit["pmf_exponent"] = f.pmf_exponent;
    fit["intercept"] = f.intercept;
    fit["points"] = f.points;
    fit["residual"] = f.residual;
  } catch (const std::invalid_argument& e) {
    fit["skipped"] = e.what();
  }
  fit["trials"] = h.total();

  if (o.out.empty()) {
    out << hist.str();
    err << "fit: " << fit.dump() << '\n';
    return kExitOk;
  }
  json flags = {{"n", o.n},           {"trials", o.trials},
                {"seed", o.seed},     {"workers", o.workers},
                {"max_sweeps", o.max_sweeps}, {"fit_range", o.fit_range}};
  const json m = manifest("mc", args, flags, o.seed, tc.denominator_log2);
  write_outputs(o.out, {{"histogram.csv", hist.str()},
                        {"ccdf.csv", cc.str()},
                        {"fit.json", fit.dump(2) + "\n"},
                        {"manifest.json", m.dump(2) + "\n"}});
  out << "trials: " << h.total() << '\n';
  for (std::int64_t len = 1; len <= 3; ++len) {
    out << "freq(L=" << len << "): "
        << decimal(static_cast<double>(h.count(len)) / static_cast<double>(h.total()))
        << '\n';
  }
  out << "fit: " << fit.dump() << '\n';
  out << "wrote " << o.out << '\n';
  return kExitOk;
}

int cmd_scan(const Options& o, const std::vector<std::string>& args,
             std::ostream& out, std::ostream& /*err*/) {
  ScanOptions so;
  const int log2 = o.denom_log2.value_or(Grid::kDefaultLog2);
  so.grid = Grid::power_of_two(log2);
  so.max_sweeps = o.max_sweeps;
  so.workers = o.workers;
  const RasterGrid g = scan(o.grid, so);

  out << "resolution: " << g.resolution() << '\n';
  out << "point_symmetric: " << (g.is_point_symmetric() ? "yes" : "no") << '\n';
  out << "N,pixel_area,exact_area\n";
  for (std::int64_t n = 1; n <= 6; ++n) {
    out << n << ',' << decimal(area_estimate(g, n).to_double()) << ','
        << decimal(n2_locus_area(n).to_double()) << '\n';
  }
  out << "guard_trips: " << g.guard_trips() << '\n';

  if (!o.out.empty()) {
    std::ostringstream pgm;
    write_pgm(g, pgm);
    std::ostringstream csv;
    write_csv(g, csv);
    json flags = {{"grid", o.grid}, {"workers", o.workers},
                  {"max_sweeps", o.max_sweeps}};
    const json m = manifest("scan", args, flags, std::nullopt, log2);
    write_outputs(o.out, {{"scan.pgm", pgm.str()},
                          {"scan.csv", csv.str()},
                          {"manifest.json", m.dump(2) + "\n"}});
    out << "wrote " << o.out << '\n';
  }
  return g.guard_trips() > 0 ? kExitGuard : kExitOk;
}

int cmd_area(const Options& o, std::ostream& out) {
  out << n2_locus_area(o.locus) << '\n';
  return kExitOk;
}

int cmd_avalanche(const Options& o, const std::vector<std::string>& args,
                  std::ostream& out, std::ostream& /*err*/) {
  const TrialConfig tc = trial_config(o);
  const AvalancheStats s = avalanche_trials(tc, o.bins);
  const double ks = ks_statistic(s.lengths, [](double x) { return x * x; });
  const double crit = ks_critical(s.lengths.size());

  out << "trials: " << s.lengths.size() << '\n';
  out << "mean: " << decimal(s.mean) << '\n';
  out << "variance: " << decimal(s.variance) << '\n';
  out << "ks_vs_x2: " << decimal(ks) << " (1% critical " << decimal(crit) << ")\n";
  out << "degenerate_resamples: " << s.degenerate_resamples << '\n';
  out << "q_zero_trials: " << s.q_zero_trials << '\n';

  if (!o.out.empty()) {
    std::ostringstream dens;
    dens << "bin_lo,bin_hi,density\n";
    const auto bins = s.density.size();
    for (std::size_t b = 0; b < bins; ++b) {
      dens << decimal(static_cast<double>(b) / static_cast<double>(bins)) << ','
           << decimal(static_cast<double>(b + 1) / static_cast<double>(bins)) << ','
           << decimal(s.density[b]) << '\n';
    }
    std::ostringstream lengths;
    lengths << "trial,length\n";
    for (std::size_t t = 0; t < s.lengths.size(); ++t) {
      lengths << t << ',' << decimal(s.lengths[t]) << '\n';
    }
    json summary = {{"mean", s.mean},
                    {"variance", s.variance},
                    {"ks_vs_x2", ks},
                    {"ks_critical_1pct", crit},
                    {"degenerate_resamples", s.degenerate_resamples},
                    {"q_zero_trials", s.q_zero_trials}};
    json flags = {{"n", o.n},       {"trials", o.trials}, {"seed", o.seed},
                  {"workers", o.workers}, {"bins", o.bins}};
    const json m = manifest("avalanche", args, flags, o.seed, tc.denominator_log2);
    write_outputs(o.out, {{"density.csv", dens.str()},
                          {"lengths.csv", lengths.str()},
                          {"summary.json", summary.dump(2) + "\n"},
                          {"manifest.json", m.dump(2) + "\n"}});
    out << "wrote " << o.out << '\n';
  }
  return kExitOk;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s = trim(text);
  if (!s.empty() && s.front() == '-') return -parse_rational(s.substr(1));
  if (auto slash = s.find('/'); slash != std::string::npos) {
    const int128 num = parse_digits(std::string_view(s).substr(0, slash), s);
    const int128 den = parse_digits(std::string_view(s).substr(slash + 1), s);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    return Rational(num, den);
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    const std::string_view sv(s);
    const std::string_view whole = sv.substr(0, dot);
    const std::string_view frac = sv.substr(dot + 1);
    if (frac.empty()) throw std::invalid_argument("cannot parse number '" + s + "'");
    const int128 w = whole.empty() ? 0 : parse_digits(whole, s);
    const int128 f = parse_digits(frac, s);
    int128 scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    return Rational(w * scale + f, scale);
  }
  return Rational(parse_digits(s, s));
}

std::vector<Rational> parse_rational_list(std::string_view text) {
  std::vector<Rational> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t stop = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(parse_rational(text.substr(start, stop - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Grid grid_for(const std::vector<Rational>& unit_points) {
  int128 l = 1;
  for (const Rational& r : unit_points) {
    l = l / gcd128(l, r.den()) * r.den();
    if (l > Grid::kMaxDenominator) return Grid{};
  }
  if (l < 2) return Grid{};
  return Grid(static_cast<std::int64_t>(l));
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Exact one-dimensional tropical sandpile simulator", "tropsand"};
  app.set_version_flag("--version", TROPSAND_VERSION);
  app.require_subcommand(1);
  Options o;

  auto add_points = [&](CLI::App* sub) {
    sub->add_option("--points", o.points,
                    "comma-separated points, exact 'a/b' or decimals")
        ->required();
    sub->add_option("--domain", o.domain,
                    "segment 'lo,hi' the points live in (default 0,1)");
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--denom-log2", o.denom_log2,
                    "grid denominator exponent (D = 2^k, 1..62)");
  };
  auto add_guard = [&](CLI::App* sub) {
    sub->add_option("--max-sweeps", o.max_sweeps, "sweep guard per relaxation")
        ->capture_default_str();
  };
  auto add_sampling = [&](CLI::App* sub) {
    sub->add_option("--n", o.n, "number of random points")->capture_default_str();
    sub->add_option("--trials", o.trials, "number of trials")->required();
    sub->add_option("--seed", o.seed, "master seed")->capture_default_str();
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--workers", o.workers, "worker threads (0 = all cores)")
        ->capture_default_str();
  };

  auto* relax_cmd = app.add_subcommand("relax", "relax a configuration by sweeps");
  add_points(relax_cmd);
  relax_cmd->add_flag("--trace", o.trace, "print every topple");
  add_grid(relax_cmd);
  add_guard(relax_cmd);

  auto* limit_cmd = app.add_subcommand("limit", "closed-form limit state");
  add_points(limit_cmd);
  add_grid(limit_cmd);

  auto* mc_cmd = app.add_subcommand("mc", "relaxation-length statistics");
  add_sampling(mc_cmd);
  add_grid(mc_cmd);
  add_guard(mc_cmd);
  mc_cmd->add_option("--fit-range", o.fit_range, "tail fit range 'min,max'")
      ->delimiter(',')
      ->expected(2)
      ->capture_default_str();

  auto* scan_cmd = app.add_subcommand("scan", "raster of L(p, q) over (0,1)^2");
  scan_cmd->add_option("--grid", o.grid, "resolution R")->capture_default_str();
  scan_cmd->add_option("--out", o.out, "output directory");
  scan_cmd->add_option("--workers", o.workers, "worker threads (0 = all cores)");
  add_grid(scan_cmd);
  add_guard(scan_cmd);

  auto* area_cmd = app.add_subcommand("area", "exact area of {L(p, q) = N}");
  area_cmd->add_option("--N", o.locus, "relaxation length N >= 1")->required();

  auto* aval_cmd = app.add_subcommand("avalanche", "avalanche-length statistics");
  add_sampling(aval_cmd);
  add_grid(aval_cmd);
  aval_cmd->add_option("--bins", o.bins, "density bins")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*relax_cmd) return cmd_relax(o, out, err);
    if (*limit_cmd) return cmd_limit(o, out, err);
    if (*mc_cmd) return cmd_mc(o, args, out, err);
    if (*scan_cmd) return cmd_scan(o, args, out, err);
    if (*area_cmd) return cmd_area(o, out);
    if (*aval_cmd) return cmd_avalanche(o, args, out, err);
  } catch (const GuardTripped& e) {
    err << "error: " << e.what() << '\n';
    return kExitGuard;
  } catch (const TrialFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitGuard;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace tropsand::cli
