// harvestlab command-line interface: point evaluation, grid sweeps,
// entanglement-region extraction (CSV + SVG), and strategy comparison.
//
// Exit codes: 0 success, 2 usage/parameter error, 3 non-convergence
// warning (point only; values are still printed), 4 I/O failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "harvestlab/harvestlab.hpp"

namespace {

namespace fs = std::filesystem;
using namespace harvestlab;
using nlohmann::json;
using quadrature::QuadConfig;
using quadrature::Strategy;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitIo = 4;

std::string fmt17(double v) { return sweep::detail::format_double(v); }

std::string fmt_err(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

struct ToleranceFlags {
  double rel_tol = 1e-6;
  double abs_tol = 1e-12;
  std::size_t max_regions = 100000;
  std::string strategy = "global";

  void attach(CLI::App* cmd) {
    cmd->add_option("--rel-tol", rel_tol, "Relative tolerance")
        ->capture_default_str();
    cmd->add_option("--abs-tol", abs_tol, "Absolute tolerance")
        ->capture_default_str();
    cmd->add_option("--max-regions", max_regions, "Subdivision budget per integral")
        ->capture_default_str();
    cmd->add_option("--strategy", strategy, "Refinement strategy: global or local")
        ->check(CLI::IsMember({"global", "local"}))
        ->capture_default_str();
  }

  QuadConfig config() const {
    QuadConfig cfg;
    cfg.rel_tol = rel_tol;
    cfg.abs_tol = abs_tol;
    cfg.max_regions = max_regions;
    cfg.strategy = sweep::parse_strategy(strategy);
    return cfg;
  }
};

unsigned default_workers() {
  if (const char* env = std::getenv("HARVESTLAB_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// ---------------------------------------------------------------- point --

struct PointArgs {
  std::optional<double> c1, c2, c3;
  double eta0 = 1.0;
  std::optional<double> kappa, L, omega, sigma;
  bool as_json = false;
  ToleranceFlags tol;
};

int cmd_point(const PointArgs& args) {
  const bool physical = args.kappa || args.L || args.omega || args.sigma;
  if (physical && (!args.kappa || !args.L || !args.omega || !args.sigma)) {
    std::cerr << "point: physical input needs all of --kappa --L --omega --sigma\n";
    return kExitUsage;
  }
  if (physical && (args.c1 || args.c2 || args.c3)) {
    std::cerr << "point: give either --c1/--c2/--c3 or the physical set, not both\n";
    return kExitUsage;
  }
  if (!physical && (!args.c1 || !args.c2 || !args.c3)) {
    std::cerr << "point: need --c1 --c2 --c3 (or the physical parameter set)\n";
    return kExitUsage;
  }

  std::optional<physics::HarvestParams> params;
  try {
    if (physical) {
      params = physics::to_dimensionless(
          {*args.kappa, *args.L, *args.omega, *args.sigma}, args.eta0);
    } else {
      params = physics::HarvestParams(*args.c1, *args.c2, *args.c3, args.eta0);
    }
  } catch (const physics::InvalidParams& e) {
    std::cerr << "point: " << e.what() << '\n';
    return kExitUsage;
  }
  const physics::HarvestParams& p = *params;

  const QuadConfig cfg = args.tol.config();
  const auto e = physics::eval_E(p, cfg);
  const auto x = physics::eval_X(p, cfg);
  const double abs_x = std::abs(x.value);
  const double n = physics::negativity(e.value, x.value);
  const double e_sp = physics::eval_E_sp(p);
  const double x_sp = physics::eval_X_sp(p);
  const bool converged = e.quad.converged && x.quad.converged;

  if (args.as_json) {
    json out;
    out["c1"] = p.c1;
    out["c2"] = p.c2;
    out["c3"] = p.c3;
    out["eta0"] = p.eta0;
    out["strategy"] = args.tol.strategy;
    out["E"] = e.value;
    out["err_E"] = e.err;
    out["E_converged"] = e.quad.converged;
    out["X_re"] = x.value.real();
    out["X_im"] = x.value.imag();
    out["abs_X"] = abs_x;
    out["err_X"] = x.err;
    out["X_converged"] = x.quad.converged;
    out["N"] = n;
    out["E_sp"] = e_sp;
    out["X_sp"] = x_sp;
    out["n_evals"] = e.quad.n_evals + x.quad.n_evals;
    std::cout << out.dump() << '\n';
  } else {
    if (physical) {
      std::cout << "converted: kappa=" << fmt17(*args.kappa) << " L=" << fmt17(*args.L)
                << " Omega=" << fmt17(*args.omega) << " sigma=" << fmt17(*args.sigma)
                << " -> ";
    }
    std::cout << "c1=" << fmt17(p.c1) << " c2=" << fmt17(p.c2) << " c3=" << fmt17(p.c3)
              << " eta0=" << fmt17(p.eta0) << '\n';
    std::cout << "strategy=" << args.tol.strategy << " rel_tol=" << args.tol.rel_tol
              << " abs_tol=" << args.tol.abs_tol << '\n';
    std::cout << "E    = " << fmt17(e.value) << "  (err " << fmt_err(e.err)
              << (e.quad.converged ? "" : ", NOT CONVERGED") << ")\n";
    std::cout << "X    = " << fmt17(x.value.real()) << " + " << fmt17(x.value.imag())
              << " i  (err " << fmt_err(x.err)
              << (x.quad.converged ? "" : ", NOT CONVERGED") << ")\n";
    std::cout << "|X|  = " << fmt17(abs_x) << '\n';
    std::cout << "N    = " << fmt17(n) << "  (|X| - E = " << fmt17(abs_x - e.value)
              << ")\n";
    std::cout << "E_sp = " << fmt17(e_sp) << "  E/E_sp = " << fmt17(e.value / e_sp)
              << '\n';
    std::cout << "X_sp = " << fmt17(x_sp) << "  |X|/X_sp = " << fmt17(abs_x / x_sp)
              << '\n';
  }
  return converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------- sweep --

struct SweepArgs {
  sweep::GridSpec spec;
  unsigned coarse = 1;
  std::optional<double> c3_only;
  unsigned workers = 0;
  std::string out;
  bool resume = false;
  bool retry_failed = false;
  ToleranceFlags tol;
};

int cmd_sweep(const SweepArgs& args) {
  sweep::GridSpec spec = args.spec;
  if (args.c3_only) spec = spec.with_c3_only(*args.c3_only);
  if (args.coarse > 1) spec = spec.coarsened(args.coarse);
  const QuadConfig cfg = args.tol.config();
  const unsigned workers = args.workers > 0 ? args.workers : default_workers();

  try {
    const auto grid_size = sweep::build_grid(spec).size();
    std::vector<sweep::SweepRecord> existing;
    if (args.resume && fs::exists(args.out) && fs::file_size(args.out) > 0) {
      existing = sweep::load_records_csv(args.out);
    } else if (!args.resume) {
      std::ofstream truncate(args.out, std::ios::trunc);
      if (!truncate) {
        std::cerr << "sweep: cannot open output file " << args.out << '\n';
        return kExitIo;
      }
    }

    sweep::CsvFileSink sink(args.out);
    const sweep::SweepSummary summary =
        args.resume
            ? sweep::resume_sweep(spec, cfg, workers, std::ref(sink), existing)
            : sweep::run_sweep(spec, cfg, workers, std::ref(sink));

    std::cout << "grid points : " << grid_size << '\n'
              << "computed    : " << summary.points_done << '\n'
              << "skipped     : " << summary.points_skipped << '\n'
              << "unconverged : " << summary.points_failed << '\n'
              << "workers     : " << workers << '\n'
              << "elapsed     : " << summary.elapsed_s << " s\n"
              << "output      : " << args.out << '\n';

    if (args.retry_failed) {
      // One retry pass for unconverged points with a 4x subdivision budget.
      auto records = sweep::load_records_csv(args.out);
      QuadConfig retry_cfg = cfg;
      retry_cfg.max_regions = cfg.max_regions * 4;
      std::size_t retried = 0, recovered = 0;
      for (auto& r : records) {
        if (r.converged) continue;
        ++retried;
        const sweep::SweepRecord redo =
            sweep::evaluate_grid_point({r.c1, r.c2, r.c3}, retry_cfg);
        if (redo.converged) ++recovered;
        r = redo;
      }
      if (retried > 0) {
        const fs::path tmp = fs::path(args.out).concat(".tmp");
        {
          std::ofstream out(tmp, std::ios::trunc);
          if (!out) throw sweep::SinkWriteFailure("cannot write " + tmp.string());
          out << sweep::kSweepCsvHeader << '\n';
          for (const auto& r : records) out << sweep::to_csv_line(r) << '\n';
          if (!out) throw sweep::SinkWriteFailure("write failed: " + tmp.string());
        }
        fs::rename(tmp, args.out);
      }
      std::cout << "retried     : " << retried << " (recovered " << recovered << ")\n";
    }
    return kExitOk;
  } catch (const sweep::EmptyGrid& e) {
    std::cerr << "sweep: " << e.what() << '\n';
    return kExitUsage;
  } catch (const sweep::SpecMismatch& e) {
    std::cerr << "sweep: " << e.what() << '\n';
    return kExitUsage;
  } catch (const sweep::MalformedCsv& e) {
    std::cerr << "sweep: " << e.what() << '\n';
    return kExitIo;
  } catch (const sweep::SinkWriteFailure& e) {
    std::cerr << "sweep: " << e.what() << '\n';
    return kExitIo;
  }
}

// --------------------------------------------------------------- region --

struct RegionArgs {
  std::string records;
  std::optional<double> c3;
  std::string out_csv;
  std::string out_svg;
  plot::PlotStyle style;
};

fs::path with_c3_suffix(const fs::path& base, double c3) {
  fs::path out = base;
  const std::string stem = out.stem().string();
  const std::string ext = out.extension().string();
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", c3);
  out.replace_filename(stem + "_c3_" + buf + ext);
  return out;
}

int emit_region(const std::vector<sweep::SweepRecord>& slice, double c3,
                const fs::path& csv_path, const fs::path& svg_path,
                const plot::PlotStyle& style) {
  // Axes are recovered from the slice records themselves.
  std::map<std::string, double> c1s, c2s;
  for (const auto& r : slice) {
    char key[32];
    std::snprintf(key, sizeof(key), "%.6f", r.c1);
    c1s.emplace(key, r.c1);
    std::snprintf(key, sizeof(key), "%.6f", r.c2);
    c2s.emplace(key, r.c2);
  }
  std::vector<double> c1_axis, c2_axis;
  for (const auto& [_, v] : c1s) c1_axis.push_back(v);
  for (const auto& [_, v] : c2s) c2_axis.push_back(v);
  std::sort(c1_axis.begin(), c1_axis.end());
  std::sort(c2_axis.begin(), c2_axis.end());

  const analysis::RegionGrid grid = analysis::extract_region(slice, c1_axis, c2_axis, c3);

  {
    std::ofstream out(csv_path, std::ios::trunc);
    if (!out) throw sweep::SinkWriteFailure("cannot write " + csv_path.string());
    analysis::write_region_csv(grid, out);
    if (!out) throw sweep::SinkWriteFailure("write failed: " + csv_path.string());
  }
  {
    std::ofstream out(svg_path, std::ios::trunc | std::ios::binary);
    if (!out) throw sweep::SinkWriteFailure("cannot write " + svg_path.string());
    out << plot::render_region_svg(grid, style);
    if (!out) throw sweep::SinkWriteFailure("write failed: " + svg_path.string());
  }
  std::cout << "c3 = " << fmt17(c3) << ": " << c1_axis.size() << " x "
            << c2_axis.size() << " cells, numeric area "
            << analysis::region_area(grid, analysis::MaskKind::Numeric)
            << ", sp area "
            << analysis::region_area(grid, analysis::MaskKind::StationaryPhase)
            << " -> " << csv_path.string() << ", " << svg_path.string() << '\n';
  return kExitOk;
}

int cmd_region(const RegionArgs& args) {
  if (!args.style.valid()) {
    std::cerr << "region: need --cell-px >= 1 and --overlay-alpha in (0, 1]\n";
    return kExitUsage;
  }
  std::vector<sweep::SweepRecord> records;
  try {
    records = sweep::load_records_csv(args.records);
  } catch (const std::exception& e) {
    std::cerr << "region: " << e.what() << '\n';
    return kExitIo;
  }

  // Group records by c3 rendered at key precision.
  std::map<std::string, std::pair<double, std::vector<sweep::SweepRecord>>> slices;
  for (const auto& r : records) {
    char key[32];
    std::snprintf(key, sizeof(key), "%.6f", r.c3);
    auto& slot = slices[key];
    slot.first = r.c3;
    slot.second.push_back(r);
  }

  const fs::path csv_base = args.out_csv.empty() ? "region.csv" : args.out_csv;
  const fs::path svg_base = args.out_svg.empty() ? "region.svg" : args.out_svg;

  try {
    if (args.c3) {
      char key[32];
      std::snprintf(key, sizeof(key), "%.6f", *args.c3);
      const auto it = slices.find(key);
      if (it == slices.end()) {
        std::cerr << "region: records contain no c3 = " << *args.c3 << " slice\n";
        return kExitUsage;
      }
      return emit_region(it->second.second, it->second.first, csv_base, svg_base,
                         args.style);
    }
    // Default batch: the standard slice set, as far as present in the file.
    int emitted = 0;
    for (double c3 : {0.5, 1.5, 2.5, 3.5, 4.5}) {
      char key[32];
      std::snprintf(key, sizeof(key), "%.6f", c3);
      const auto it = slices.find(key);
      if (it == slices.end()) continue;
      emit_region(it->second.second, it->second.first, with_c3_suffix(csv_base, c3),
                  with_c3_suffix(svg_base, c3), args.style);
      ++emitted;
    }
    if (emitted == 0) {
      std::cerr << "region: no default slices (c3 in {0.5,1.5,2.5,3.5,4.5}) found; "
                   "use --c3\n";
      return kExitUsage;
    }
    return kExitOk;
  } catch (const analysis::IncompleteSlice& e) {
    std::cerr << "region: " << e.what() << '\n';
    return kExitUsage;
  } catch (const sweep::SinkWriteFailure& e) {
    std::cerr << "region: " << e.what() << '\n';
    return kExitIo;
  }
}

// -------------------------------------------------------------- compare --

int cmd_compare(const std::string& path_a, const std::string& path_b) {
  try {
    const auto a = sweep::load_records_csv(path_a);
    const auto b = sweep::load_records_csv(path_b);
    const analysis::StrategyDiff d = analysis::compare_strategies(a, b);
    std::cout << "compared points   : " << d.n_compared << '\n';
    std::cout << "max |X| rel diff  : " << fmt17(d.max_rel_diff_X) << "  ("
              << d.max_rel_diff_X * 100.0 << "%)\n";
    std::cout << "  at (c1, c2, c3) = (" << fmt17(d.worst_point.c1) << ", "
              << fmt17(d.worst_point.c2) << ", " << fmt17(d.worst_point.c3) << ")\n";
    std::cout << "max N rel diff    : " << fmt17(d.max_rel_diff_N) << "  ("
              << d.max_rel_diff_N * 100.0 << "%)\n";
    std::cout << "normalization     : |a - b| / max(|a|, |b|, 1e-300) on |X| and "
                 "on the signed |X| - E\n";
    return kExitOk;
  } catch (const analysis::KeyMismatch& e) {
    std::cerr << "compare: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "compare: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"harvestlab: entanglement-harvesting observables for two "
               "parallel accelerated detectors"};
  app.require_subcommand(1);

  // point
  PointArgs point_args;
  CLI::App* point = app.add_subcommand("point", "Evaluate E, X and N at one point");
  point->add_option("--c1", point_args.c1, "kappa * L");
  point->add_option("--c2", point_args.c2, "kappa * Omega * sigma^2");
  point->add_option("--c3", point_args.c3, "sigma * Omega");
  point->add_option("--eta0", point_args.eta0, "Coupling amplitude")
      ->capture_default_str();
  point->add_option("--kappa", point_args.kappa, "Proper acceleration");
  point->add_option("--L", point_args.L, "Detector separation");
  point->add_option("--omega", point_args.omega, "Energy gap");
  point->add_option("--sigma", point_args.sigma, "Window half-width");
  point->add_flag("--json", point_args.as_json, "Single-line JSON output");
  point_args.tol.attach(point);

  // sweep
  SweepArgs sweep_args;
  CLI::App* sw = app.add_subcommand("sweep", "Run a (c1, c2, c3) grid sweep to CSV");
  sw->add_option("--c1-start", sweep_args.spec.c1_start)->capture_default_str();
  sw->add_option("--c1-stop", sweep_args.spec.c1_stop)->capture_default_str();
  sw->add_option("--c1-step", sweep_args.spec.c1_step)->capture_default_str();
  sw->add_option("--c2-start", sweep_args.spec.c2_start)->capture_default_str();
  sw->add_option("--c2-stop", sweep_args.spec.c2_stop)->capture_default_str();
  sw->add_option("--c2-step", sweep_args.spec.c2_step)->capture_default_str();
  sw->add_option("--c3-start", sweep_args.spec.c3_start)->capture_default_str();
  sw->add_option("--c3-stop", sweep_args.spec.c3_stop)->capture_default_str();
  sw->add_option("--c3-step", sweep_args.spec.c3_step)->capture_default_str();
  sw->add_option("--coarse", sweep_args.coarse,
                 "Divide each axis point count by this factor")
      ->capture_default_str();
  sw->add_option("--c3-only", sweep_args.c3_only, "Sweep a single c3 slice");
  sw->add_option("--workers", sweep_args.workers,
                 "Parallel workers (default: HARVESTLAB_WORKERS or hardware)");
  sw->add_option("--out", sweep_args.out, "Output CSV path")->required();
  sw->add_flag("--resume", sweep_args.resume,
               "Keep existing records, compute only missing points");
  sw->add_flag("--retry-failed", sweep_args.retry_failed,
               "Retry unconverged points once with 4x max_regions");
  sweep_args.tol.attach(sw);

  // region
  RegionArgs region_args;
  CLI::App* region = app.add_subcommand(
      "region", "Extract entanglement region (CSV + SVG) from sweep records");
  region->add_option("--records", region_args.records, "Sweep CSV file")->required();
  region->add_option("--c3", region_args.c3,
                     "Slice to extract (default: batch over 0.5,1.5,2.5,3.5,4.5)");
  region->add_option("--out-csv", region_args.out_csv, "Region CSV path");
  region->add_option("--out-svg", region_args.out_svg, "Region SVG path");
  region->add_option("--cell-px", region_args.style.cell_px, "Pixels per grid cell")
      ->capture_default_str();
  region->add_option("--sp-color", region_args.style.sp_color)->capture_default_str();
  region->add_option("--numeric-color", region_args.style.numeric_color)
      ->capture_default_str();
  region->add_option("--overlay-alpha", region_args.style.overlay_alpha)
      ->capture_default_str();

  // compare
  std::string cmp_a, cmp_b;
  CLI::App* compare =
      app.add_subcommand("compare", "Report differences between two sweep CSVs");
  compare->add_option("file_a", cmp_a, "First records file")->required();
  compare->add_option("file_b", cmp_b, "Second records file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (point->parsed()) return cmd_point(point_args);
    if (sw->parsed()) return cmd_sweep(sweep_args);
    if (region->parsed()) return cmd_region(region_args);
    if (compare->parsed()) return cmd_compare(cmp_a, cmp_b);
  } catch (const physics::InvalidParams& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
