#ifndef HARVESTLAB_SWEEP_HPP
#define HARVESTLAB_SWEEP_HPP

/* Grid sweeps of (c1, c2, c3) parameter space: grid construction, one CSV
 * record per grid point, a dynamic thread-pool runner, and crash-safe
 * resume keyed on the decimal-rendered parameter triple.
 *
 * Record values are pure functions of (point, config); the runner only
 * affects ordering, so any worker count produces the identical record set
 * (timing metadata aside).
 */

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <vector>

#include "harvestlab/physics.hpp"

namespace harvestlab::sweep {

using physics::HarvestParams;
using quadrature::QuadConfig;
using quadrature::Strategy;

struct EmptyGrid : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SpecMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SinkWriteFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MalformedCsv : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inclusive arithmetic progressions per axis.  Defaults are the full
// production grid: 240 x 120 x 40 = 1,152,000 points.
struct GridSpec {
  double c1_start = 0.025, c1_stop = 6.000, c1_step = 0.025;
  double c2_start = 0.025, c2_stop = 3.000, c2_step = 0.025;
  double c3_start = 0.125, c3_stop = 5.000, c3_step = 0.125;

  static GridSpec default_grid() { return {}; }

  // Divides each axis point count by n (steps grow by n, starts stay).
  GridSpec coarsened(unsigned n) const;

  // Restrict to a single c3 slice.
  GridSpec with_c3_only(double c3) const {
    GridSpec s = *this;
    s.c3_start = c3;
    s.c3_stop = c3;
    return s;
  }
};

struct GridPoint {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

namespace detail {

inline void validate_axis(double start, double stop, double step, const char* name) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step) ||
      !(step > 0.0) || !(start > 0.0) || start > stop) {
    throw EmptyGrid(std::string("invalid ") + name +
                    " axis: need 0 < start <= stop and step > 0");
  }
}

}  // namespace detail

// Point count of one axis, tolerating half a step of floating slack at the
// stop value.  Values themselves are generated as start + k * step.
inline std::size_t axis_count(double start, double stop, double step) {
  return static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
}

inline std::vector<double> axis_values(double start, double stop, double step) {
  const std::size_t n = axis_count(start, stop, step);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = start + static_cast<double>(k) * step;
  return out;
}

inline GridSpec GridSpec::coarsened(unsigned n) const {
  if (n < 1) throw EmptyGrid("coarsening factor must be >= 1");
  detail::validate_axis(c1_start, c1_stop, c1_step, "c1");
  detail::validate_axis(c2_start, c2_stop, c2_step, "c2");
  detail::validate_axis(c3_start, c3_stop, c3_step, "c3");
  auto shrink = [n](double start, double stop, double step, double& out_stop,
                    double& out_step) {
    const std::size_t count = axis_count(start, stop, step);
    const std::size_t coarse = std::max<std::size_t>(1, count / n);
    out_step = step * n;
    out_stop = start + static_cast<double>(coarse - 1) * out_step;
  };
  GridSpec s = *this;
  shrink(c1_start, c1_stop, c1_step, s.c1_stop, s.c1_step);
  shrink(c2_start, c2_stop, c2_step, s.c2_stop, s.c2_step);
  shrink(c3_start, c3_stop, c3_step, s.c3_stop, s.c3_step);
  return s;
}

// Cartesian product ordered lexicographically by (c3, c2, c1), c1 fastest.
inline std::vector<GridPoint> build_grid(const GridSpec& spec) {
  detail::validate_axis(spec.c1_start, spec.c1_stop, spec.c1_step, "c1");
  detail::validate_axis(spec.c2_start, spec.c2_stop, spec.c2_step, "c2");
  detail::validate_axis(spec.c3_start, spec.c3_stop, spec.c3_step, "c3");
  const auto c1s = axis_values(spec.c1_start, spec.c1_stop, spec.c1_step);
  const auto c2s = axis_values(spec.c2_start, spec.c2_stop, spec.c2_step);
  const auto c3s = axis_values(spec.c3_start, spec.c3_stop, spec.c3_step);

  std::vector<GridPoint> pts;
  pts.reserve(c1s.size() * c2s.size() * c3s.size());
  for (double c3 : c3s)
    for (double c2 : c2s)
      for (double c1 : c1s) pts.push_back(GridPoint{c1, c2, c3});
  if (pts.empty()) throw EmptyGrid("grid has no points");
  return pts;
}

struct SweepRecord {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double E = 0.0;
  double X_re = 0.0, X_im = 0.0;
  double N = 0.0;
  double err_E = 0.0, err_X = 0.0;
  Strategy strategy = Strategy::GlobalAdaptive;
  bool converged = false;
  std::uint64_t n_evals = 0;
  std::uint64_t wall_ns = 0;
};

inline constexpr std::string_view kSweepCsvHeader =
    "c1,c2,c3,E,X_re,X_im,N,err_E,err_X,strategy,converged,n_evals,wall_ns";

inline const char* strategy_name(Strategy s) {
  return s == Strategy::LocalAdaptive ? "local" : "global";
}

inline Strategy parse_strategy(std::string_view name) {
  if (name == "global") return Strategy::GlobalAdaptive;
  if (name == "local") return Strategy::LocalAdaptive;
  throw MalformedCsv("unknown strategy tag: " + std::string(name));
}

namespace detail {

// 17 significant digits: enough for exact double round-trips.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw MalformedCsv("bad float field: " + s);
  return v;
}

inline std::uint64_t parse_u64(const std::string& s) {
  char* end = nullptr;
  const std::uint64_t v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') throw MalformedCsv("bad count field: " + s);
  return v;
}

}  // namespace detail

// Resume key: the parameter triple at fixed decimal precision, immune to
// floating-point step accumulation.
inline std::string grid_key(double c1, double c2, double c3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f|%.6f|%.6f", c1, c2, c3);
  return buf;
}

inline std::string grid_key(const GridPoint& p) { return grid_key(p.c1, p.c2, p.c3); }
inline std::string grid_key(const SweepRecord& r) { return grid_key(r.c1, r.c2, r.c3); }

inline std::string to_csv_line(const SweepRecord& r) {
  using detail::format_double;
  std::string line;
  line.reserve(256);
  line += format_double(r.c1);
  line += ',';
  line += format_double(r.c2);
  line += ',';
  line += format_double(r.c3);
  line += ',';
  line += format_double(r.E);
  line += ',';
  line += format_double(r.X_re);
  line += ',';
  line += format_double(r.X_im);
  line += ',';
  line += format_double(r.N);
  line += ',';
  line += format_double(r.err_E);
  line += ',';
  line += format_double(r.err_X);
  line += ',';
  line += strategy_name(r.strategy);
  line += ',';
  line += r.converged ? '1' : '0';
  line += ',';
  line += std::to_string(r.n_evals);
  line += ',';
  line += std::to_string(r.wall_ns);
  return line;
}

inline SweepRecord parse_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  if (fields.size() != 13)
    throw MalformedCsv("expected 13 fields, got " + std::to_string(fields.size()) +
                       ": " + line);
  using detail::parse_double;
  SweepRecord r;
  r.c1 = parse_double(fields[0]);
  r.c2 = parse_double(fields[1]);
  r.c3 = parse_double(fields[2]);
  r.E = parse_double(fields[3]);
  r.X_re = parse_double(fields[4]);
  r.X_im = parse_double(fields[5]);
  r.N = parse_double(fields[6]);
  r.err_E = parse_double(fields[7]);
  r.err_X = parse_double(fields[8]);
  r.strategy = parse_strategy(fields[9]);
  if (fields[10] != "0" && fields[10] != "1")
    throw MalformedCsv("bad converged flag: " + fields[10]);
  r.converged = fields[10] == "1";
  r.n_evals = detail::parse_u64(fields[11]);
  r.wall_ns = detail::parse_u64(fields[12]);
  return r;
}

inline std::vector<SweepRecord> load_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepCsvHeader)
    throw MalformedCsv("unexpected CSV header: " + line);
  std::vector<SweepRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(parse_csv_line(line));
  }
  return out;
}

inline std::vector<SweepRecord> load_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SinkWriteFailure("cannot open records file: " + path.string());
  return load_records_csv(in);
}

// Append-only CSV sink; every record is written and flushed as one line.
class CsvFileSink {
 public:
  explicit CsvFileSink(const std::filesystem::path& path) : path_(path) {
    const bool fresh =
        !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    out_.open(path, std::ios::app);
    if (!out_) throw SinkWriteFailure("cannot open sink file: " + path.string());
    if (fresh) {
      out_ << kSweepCsvHeader << '\n';
      out_.flush();
      if (!out_) throw SinkWriteFailure("cannot write header: " + path.string());
    }
  }

  void operator()(const SweepRecord& rec) {
    out_ << to_csv_line(rec) << '\n';
    out_.flush();
    if (!out_) throw SinkWriteFailure("write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

// Evaluate both observables at one grid point.
inline SweepRecord evaluate_grid_point(const GridPoint& pt, const QuadConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const HarvestParams p(pt.c1, pt.c2, pt.c3);
  const auto e = physics::eval_E(p, cfg);
  const auto x = physics::eval_X(p, cfg);
  const auto t1 = std::chrono::steady_clock::now();

  SweepRecord r;
  r.c1 = pt.c1;
  r.c2 = pt.c2;
  r.c3 = pt.c3;
  r.E = e.value;
  r.X_re = x.value.real();
  r.X_im = x.value.imag();
  r.N = physics::negativity(e.value, x.value);
  r.err_E = e.err;
  r.err_X = x.err;
  r.strategy = cfg.strategy;
  r.converged = e.quad.converged && x.quad.converged;
  r.n_evals = e.quad.n_evals + x.quad.n_evals;
  r.wall_ns = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
  return r;
}

struct SweepSummary {
  std::size_t points_done = 0;
  std::size_t points_failed = 0;  // recorded but not converged
  std::size_t points_skipped = 0;
  double elapsed_s = 0.0;
};

using RecordSink = std::function<void(const SweepRecord&)>;

// Dynamic scheduling: one shared queue of points, workers pull as they
// finish.  The sink is serialized and fed in grid order (a small reorder
// buffer holds early completions), so identical inputs produce
// byte-identical output streams under any worker count.
inline SweepSummary run_points(const std::vector<GridPoint>& points,
                               const QuadConfig& cfg, unsigned workers,
                               const RecordSink& sink) {
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failed{0};
  std::atomic<bool> abort{false};
  std::mutex sink_mutex;
  std::map<std::size_t, SweepRecord> completed;  // guarded by sink_mutex
  std::size_t next_to_write = 0;
  std::exception_ptr first_error;

  auto work = [&]() {
    while (!abort.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= points.size()) return;
      try {
        SweepRecord rec = evaluate_grid_point(points[i], cfg);
        if (!rec.converged) failed.fetch_add(1, std::memory_order_relaxed);
        std::lock_guard<std::mutex> lock(sink_mutex);
        completed.emplace(i, std::move(rec));
        while (!completed.empty() && completed.begin()->first == next_to_write) {
          sink(completed.begin()->second);
          completed.erase(completed.begin());
          ++next_to_write;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(sink_mutex);
        if (!first_error) first_error = std::current_exception();
        abort.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  const auto t1 = std::chrono::steady_clock::now();
  SweepSummary s;
  s.points_done = points.size();
  s.points_failed = failed.load();
  s.elapsed_s = std::chrono::duration<double>(t1 - t0).count();
  return s;
}

inline SweepSummary run_sweep(const GridSpec& spec, const QuadConfig& cfg,
                              unsigned workers, const RecordSink& sink) {
  return run_points(build_grid(spec), cfg, workers, sink);
}

// Compute only the grid points absent from `existing`.  Existing keys must
// form a subset of the current grid.
inline SweepSummary resume_sweep(const GridSpec& spec, const QuadConfig& cfg,
                                 unsigned workers, const RecordSink& sink,
                                 const std::vector<SweepRecord>& existing) {
  const auto grid = build_grid(spec);
  std::unordered_set<std::string> grid_keys;
  grid_keys.reserve(grid.size());
  for (const auto& p : grid) grid_keys.insert(grid_key(p));

  std::unordered_set<std::string> have;
  have.reserve(existing.size());
  for (const auto& r : existing) {
    const std::string key = grid_key(r);
    if (!grid_keys.count(key))
      throw SpecMismatch("existing record " + key + " is not on the current grid");
    have.insert(key);
  }

  std::vector<GridPoint> missing;
  missing.reserve(grid.size() - have.size());
  for (const auto& p : grid)
    if (!have.count(grid_key(p))) missing.push_back(p);

  SweepSummary s = run_points(missing, cfg, workers, sink);
  s.points_skipped = have.size();
  return s;
}

}  // namespace harvestlab::sweep

#endif  // HARVESTLAB_SWEEP_HPP
