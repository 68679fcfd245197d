#ifndef HARVESTLAB_ANALYSIS_HPP
#define HARVESTLAB_ANALYSIS_HPP

/* Entanglement-region analysis over sweep records: per-c3-slice boolean
 * masks (numerical sign of |X| - E vs the stationary-phase criterion
 * c1 < 2 |sin c2|), region areas, Jaccard similarity, and the
 * global-vs-local strategy discrepancy report.
 */

#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "harvestlab/sweep.hpp"

namespace harvestlab::analysis {

using sweep::GridPoint;
using sweep::SweepRecord;

struct IncompleteSlice : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct KeyMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Mask = std::vector<std::uint8_t>;

// One (c1, c2) slice at fixed c3.  Matrices are row-major with c1 fastest:
// index (i1, i2) -> i2 * c1_axis.size() + i1.
struct RegionGrid {
  double c3 = 0.0;
  std::vector<double> c1_axis;
  std::vector<double> c2_axis;
  Mask numeric_mask;          // |X| - E > 0, from the records
  Mask sp_mask;               // c1 < 2 |sin c2|, c3-independent
  Mask boundary_uncertain;    // ||X| - E| <= err_E + err_X
  std::vector<double> signed_n;  // |X| - E, unclamped

  std::size_t idx(std::size_t i1, std::size_t i2) const {
    return i2 * c1_axis.size() + i1;
  }
  std::size_t size() const { return c1_axis.size() * c2_axis.size(); }
};

enum class MaskKind { Numeric, StationaryPhase };

// Build the region grid for one c3 slice; records must cover the full
// (c1_axis x c2_axis) product.  Matching uses the fixed-precision grid key.
inline RegionGrid extract_region(std::span<const SweepRecord> records,
                                 const std::vector<double>& c1_axis,
                                 const std::vector<double>& c2_axis, double c3) {
  RegionGrid grid;
  grid.c3 = c3;
  grid.c1_axis = c1_axis;
  grid.c2_axis = c2_axis;
  grid.numeric_mask.assign(grid.size(), 0);
  grid.sp_mask.assign(grid.size(), 0);
  grid.boundary_uncertain.assign(grid.size(), 0);
  grid.signed_n.assign(grid.size(), 0.0);

  std::unordered_map<std::string, const SweepRecord*> by_key;
  by_key.reserve(records.size());
  for (const auto& r : records) by_key.emplace(sweep::grid_key(r), &r);

  for (std::size_t i2 = 0; i2 < c2_axis.size(); ++i2) {
    for (std::size_t i1 = 0; i1 < c1_axis.size(); ++i1) {
      const std::string key = sweep::grid_key(c1_axis[i1], c2_axis[i2], c3);
      const auto it = by_key.find(key);
      if (it == by_key.end())
        throw IncompleteSlice("missing record for grid point " + key);
      const SweepRecord& r = *it->second;
      const double signed_n =
          physics::signed_negativity(r.E, {r.X_re, r.X_im});
      const std::size_t k = grid.idx(i1, i2);
      grid.signed_n[k] = signed_n;
      grid.numeric_mask[k] = signed_n > 0.0 ? 1 : 0;
      grid.sp_mask[k] = physics::sp_entangled(c1_axis[i1], c2_axis[i2]) ? 1 : 0;
      grid.boundary_uncertain[k] =
          std::abs(signed_n) <= r.err_E + r.err_X ? 1 : 0;
    }
  }
  return grid;
}

inline const Mask& select_mask(const RegionGrid& grid, MaskKind kind) {
  return kind == MaskKind::Numeric ? grid.numeric_mask : grid.sp_mask;
}

// True-cell count times the grid cell area.  Degenerate (single-value) axes
// have no well-defined cell size and contribute zero area.
inline double region_area(const RegionGrid& grid, MaskKind kind) {
  const auto& mask = select_mask(grid, kind);
  std::size_t count = 0;
  for (auto v : mask) count += v != 0;
  const double step1 =
      grid.c1_axis.size() >= 2 ? grid.c1_axis[1] - grid.c1_axis[0] : 0.0;
  const double step2 =
      grid.c2_axis.size() >= 2 ? grid.c2_axis[1] - grid.c2_axis[0] : 0.0;
  return static_cast<double>(count) * step1 * step2;
}

// Jaccard index |a AND b| / |a OR b|; two empty masks count as identical.
inline double region_similarity(const Mask& a, const Mask& b) {
  if (a.size() != b.size())
    throw DimensionMismatch("mask sizes differ: " + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()));
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool av = a[i] != 0, bv = b[i] != 0;
    inter += av && bv;
    uni += av || bv;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

struct StrategyDiff {
  double max_rel_diff_X = 0.0;
  double max_rel_diff_N = 0.0;
  GridPoint worst_point;  // argmax of the |X| relative difference
  std::size_t n_compared = 0;
};

// Per-key relative differences between two record sets (typically the
// global- and local-strategy runs of one grid).  |X| uses
// | |X_a| - |X_b| | / max(|X_a|, |X_b|, tiny); the negativity comparison
// applies the same normalization to the signed |X| - E values, which pass
// through zero at the region boundary.
inline StrategyDiff compare_strategies(std::span<const SweepRecord> a,
                                       std::span<const SweepRecord> b) {
  constexpr double kTiny = 1e-300;
  std::unordered_map<std::string, const SweepRecord*> b_by_key;
  b_by_key.reserve(b.size());
  for (const auto& r : b) b_by_key.emplace(sweep::grid_key(r), &r);
  if (a.size() != b_by_key.size())
    throw KeyMismatch("record sets differ in size: " + std::to_string(a.size()) +
                      " vs " + std::to_string(b_by_key.size()));

  StrategyDiff diff;
  for (const auto& ra : a) {
    const auto it = b_by_key.find(sweep::grid_key(ra));
    if (it == b_by_key.end())
      throw KeyMismatch("no matching record for " + sweep::grid_key(ra));
    const SweepRecord& rb = *it->second;

    const double abs_xa = std::abs(physics::Complex{ra.X_re, ra.X_im});
    const double abs_xb = std::abs(physics::Complex{rb.X_re, rb.X_im});
    const double dx = std::abs(abs_xa - abs_xb) / std::max({abs_xa, abs_xb, kTiny});
    if (dx > diff.max_rel_diff_X) {
      diff.max_rel_diff_X = dx;
      diff.worst_point = GridPoint{ra.c1, ra.c2, ra.c3};
    }

    const double sa = abs_xa - ra.E;
    const double sb = abs_xb - rb.E;
    const double dn =
        std::abs(sa - sb) / std::max({std::abs(sa), std::abs(sb), kTiny});
    if (dn > diff.max_rel_diff_N) diff.max_rel_diff_N = dn;

    ++diff.n_compared;
  }
  return diff;
}

// Region CSV: one line per cell, booleans as 0/1, c1 fastest.
inline void write_region_csv(const RegionGrid& grid, std::ostream& out) {
  out << "c1,c2,c3,signed_N,numeric,sp,boundary_uncertain\n";
  for (std::size_t i2 = 0; i2 < grid.c2_axis.size(); ++i2) {
    for (std::size_t i1 = 0; i1 < grid.c1_axis.size(); ++i1) {
      const std::size_t k = grid.idx(i1, i2);
      out << sweep::detail::format_double(grid.c1_axis[i1]) << ','
          << sweep::detail::format_double(grid.c2_axis[i2]) << ','
          << sweep::detail::format_double(grid.c3) << ','
          << sweep::detail::format_double(grid.signed_n[k]) << ','
          << int(grid.numeric_mask[k]) << ',' << int(grid.sp_mask[k]) << ','
          << int(grid.boundary_uncertain[k]) << '\n';
    }
  }
}

}  // namespace harvestlab::analysis

#endif  // HARVESTLAB_ANALYSIS_HPP
