#ifndef HARVESTLAB_QUADRATURE_HPP
#define HARVESTLAB_QUADRATURE_HPP

/* Adaptive Gauss-Kronrod integration of complex-valued integrands over
 * finite 1D intervals and 2D rectangles.
 *
 * The rule pair is the classic 7-point Gauss / 15-point Kronrod rule
 * (tensor product of the same pair in 2D).  The difference between the
 * Kronrod and the embedded Gauss estimate, taken per real/imaginary
 * component, is the per-region error estimate.  Two refinement
 * strategies are available:
 *
 *   GlobalAdaptive  keeps every leaf region in a priority queue and
 *                   repeatedly bisects the region with the largest
 *                   error estimate until the summed error meets the
 *                   global tolerance.
 *
 *   LocalAdaptive   recursively bisects a region whenever its own
 *                   error exceeds its tolerance share; each child
 *                   inherits a share of the parent's budget
 *                   proportional to its measure.  No global view is
 *                   consulted once the root budget is fixed.
 *
 * Both strategies are deterministic: identical inputs give bit-identical
 * results.  Real and imaginary parts share one subdivision tree.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace harvestlab::quadrature {

using Complex = std::complex<double>;

struct Interval1D {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool valid() const { return std::isfinite(lo) && std::isfinite(hi) && lo < hi; }
};

struct Rect2D {
  Interval1D x;
  Interval1D y;

  double area() const { return x.length() * y.length(); }
  bool valid() const { return x.valid() && y.valid(); }
};

enum class Strategy { GlobalAdaptive, LocalAdaptive };

inline std::ostream& operator<<(std::ostream& os, Strategy s) {
  return os << (s == Strategy::LocalAdaptive ? "LocalAdaptive" : "GlobalAdaptive");
}

struct QuadConfig {
  double rel_tol = 1e-6;
  double abs_tol = 1e-12;
  std::size_t max_regions = 100000;
  Strategy strategy = Strategy::GlobalAdaptive;
};

struct QuadResult {
  Complex value{0.0, 0.0};
  double err_est = 0.0;
  std::size_t n_evals = 0;
  std::size_t n_regions = 0;
  bool converged = false;
};

// Thrown when the integrand produces NaN/Inf at an abscissa.
struct NonFiniteIntegrand : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// 15-point Kronrod abscissae (positive half, descending; last entry is the
// center).  Entries 1, 3, 5 and the center are the 7-point Gauss nodes.
inline constexpr double kXgk[8] = {
    0.99145537112081263920685469752633,
    0.94910791234275852452618968404785,
    0.86486442335976907278971278864093,
    0.74153118559939443986386477328079,
    0.58608723546769113029414483825873,
    0.40584515137739716690660641207696,
    0.20778495500789846760068940377324,
    0.0};

inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kWg[4] = {
    0.12948496616886969327061143267908,
    0.27970539148927666790146777142378,
    0.38183005050511894495036977548898,
    0.41795918367346938775510204081633};

}  // namespace detail

// One Gauss-Kronrod rule application: Kronrod and embedded Gauss estimates
// plus the per-component |K - G| discrepancy.
struct RuleOutcome {
  Complex kronrod{0.0, 0.0};
  Complex gauss{0.0, 0.0};
  double err_re = 0.0;
  double err_im = 0.0;

  double err() const { return std::max(err_re, err_im); }
};

namespace detail {

inline void check_finite(const Complex& v, double x) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw NonFiniteIntegrand("integrand returned a non-finite value at x = " +
                             std::to_string(x));
  }
}

inline void check_finite(const Complex& v, double x, double y) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw NonFiniteIntegrand("integrand returned a non-finite value at (x, y) = (" +
                             std::to_string(x) + ", " + std::to_string(y) + ")");
  }
}

}  // namespace detail

template <typename F>
RuleOutcome apply_gk15(F&& f, const Interval1D& iv, std::size_t* n_evals = nullptr) {
  const double center = 0.5 * (iv.lo + iv.hi);
  const double half = 0.5 * (iv.hi - iv.lo);

  const Complex fc = f(center);
  detail::check_finite(fc, center);

  Complex kron = detail::kWgk[7] * fc;
  Complex gauss = detail::kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * detail::kXgk[j];
    const Complex below = f(center - dx);
    detail::check_finite(below, center - dx);
    const Complex above = f(center + dx);
    detail::check_finite(above, center + dx);
    const Complex pair = below + above;
    kron += detail::kWgk[j] * pair;
    if (j % 2 == 1) gauss += detail::kWg[j / 2] * pair;
  }
  kron *= half;
  gauss *= half;

  if (n_evals) *n_evals += 15;
  return RuleOutcome{kron, gauss,
                     std::abs(kron.real() - gauss.real()),
                     std::abs(kron.imag() - gauss.imag())};
}

template <typename F>
RuleOutcome apply_gk15_2d(F&& f, const Rect2D& r, std::size_t* n_evals = nullptr) {
  // Per-axis node offsets and weights laid out left to right; Gauss weights
  // are zero on Kronrod-only nodes so one pass yields both estimates.
  double off[15];
  double wk[15];
  double wg[15];
  for (int i = 0; i < 15; ++i) {
    const int j = 7 - std::abs(i - 7);
    off[i] = (i < 7) ? -detail::kXgk[j] : detail::kXgk[j];
    wk[i] = detail::kWgk[j];
    wg[i] = (j == 7) ? detail::kWg[3] : ((j % 2 == 1) ? detail::kWg[j / 2] : 0.0);
  }

  const double cx = 0.5 * (r.x.lo + r.x.hi);
  const double hx = 0.5 * (r.x.hi - r.x.lo);
  const double cy = 0.5 * (r.y.lo + r.y.hi);
  const double hy = 0.5 * (r.y.hi - r.y.lo);

  Complex kron{0.0, 0.0};
  Complex gauss{0.0, 0.0};
  for (int jy = 0; jy < 15; ++jy) {
    const double y = cy + hy * off[jy];
    Complex row_k{0.0, 0.0};
    Complex row_g{0.0, 0.0};
    for (int jx = 0; jx < 15; ++jx) {
      const double x = cx + hx * off[jx];
      const Complex v = f(x, y);
      detail::check_finite(v, x, y);
      row_k += wk[jx] * v;
      row_g += wg[jx] * v;
    }
    kron += wk[jy] * row_k;
    gauss += wg[jy] * row_g;
  }
  const double scale = hx * hy;
  kron *= scale;
  gauss *= scale;

  if (n_evals) *n_evals += 225;
  return RuleOutcome{kron, gauss,
                     std::abs(kron.real() - gauss.real()),
                     std::abs(kron.imag() - gauss.imag())};
}

namespace detail {

inline bool bisect(const Interval1D& iv, Interval1D& a, Interval1D& b) {
  const double mid = 0.5 * (iv.lo + iv.hi);
  if (!(mid > iv.lo) || !(mid < iv.hi)) return false;
  a = Interval1D{iv.lo, mid};
  b = Interval1D{mid, iv.hi};
  return true;
}

// Bisect along the longer side; ties split x first.
inline bool bisect(const Rect2D& r, Rect2D& a, Rect2D& b) {
  Interval1D lo_part, hi_part;
  if (r.x.length() >= r.y.length()) {
    if (!bisect(r.x, lo_part, hi_part)) {
      if (!bisect(r.y, lo_part, hi_part)) return false;
      a = Rect2D{r.x, lo_part};
      b = Rect2D{r.x, hi_part};
      return true;
    }
    a = Rect2D{lo_part, r.y};
    b = Rect2D{hi_part, r.y};
    return true;
  }
  if (!bisect(r.y, lo_part, hi_part)) {
    if (!bisect(r.x, lo_part, hi_part)) return false;
    a = Rect2D{lo_part, r.y};
    b = Rect2D{hi_part, r.y};
    return true;
  }
  a = Rect2D{r.x, lo_part};
  b = Rect2D{r.x, hi_part};
  return true;
}

inline double measure(const Interval1D& iv) { return iv.length(); }
inline double measure(const Rect2D& r) { return r.area(); }

inline bool spatially_before(const Interval1D& a, const Interval1D& b) {
  return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
}

inline bool spatially_before(const Rect2D& a, const Rect2D& b) {
  if (a.y.lo != b.y.lo) return a.y.lo < b.y.lo;
  if (a.x.lo != b.x.lo) return a.x.lo < b.x.lo;
  if (a.y.hi != b.y.hi) return a.y.hi < b.y.hi;
  return a.x.hi < b.x.hi;
}

template <typename F>
RuleOutcome apply_rule(F& f, const Interval1D& iv, std::size_t* n_evals) {
  return apply_gk15(f, iv, n_evals);
}

template <typename F>
RuleOutcome apply_rule(F& f, const Rect2D& r, std::size_t* n_evals) {
  return apply_gk15_2d(f, r, n_evals);
}

inline void validate(const QuadConfig& cfg) {
  if (!(cfg.rel_tol > 0.0) || !std::isfinite(cfg.rel_tol))
    throw std::invalid_argument("QuadConfig: rel_tol must be positive");
  if (!(cfg.abs_tol >= 0.0) || !std::isfinite(cfg.abs_tol))
    throw std::invalid_argument("QuadConfig: abs_tol must be non-negative");
  if (cfg.max_regions < 1)
    throw std::invalid_argument("QuadConfig: max_regions must be at least 1");
}

}  // namespace detail

template <typename Geom>
struct Region {
  Geom geom{};
  Complex value{0.0, 0.0};  // Kronrod estimate
  double err_re = 0.0;
  double err_im = 0.0;
  double budget = 0.0;  // LocalAdaptive tolerance share; unused for global
  bool splittable = true;

  double err() const { return std::max(err_re, err_im); }
};

/* Strategy-driven refinement over a collection of regions.  step() performs
 * one refinement action and returns false once the collection is final.
 * Exposed (rather than buried in integrate_*) so the refinement semantics
 * can be exercised directly. */
template <typename Geom, typename F>
class AdaptiveEngine {
 public:
  using RegionT = Region<Geom>;

  AdaptiveEngine(F f, const Geom& root, const QuadConfig& cfg)
      : f_(std::move(f)), cfg_(cfg) {
    detail::validate(cfg_);
    RegionT r;
    r.geom = root;
    evaluate(r);
    if (cfg_.strategy == Strategy::LocalAdaptive) {
      r.budget = tolerance_for(r.value);
      pending_.push_back(r);
    } else {
      add_active(r);
    }
  }

  bool step() {
    return cfg_.strategy == Strategy::LocalAdaptive ? local_step() : global_step();
  }

  void run() {
    while (step()) {
    }
  }

  // Deterministic final result: leaves re-summed in spatial order.
  QuadResult result() const {
    std::vector<const RegionT*> leaves;
    leaves.reserve(active_.size() + frozen_.size() + pending_.size());
    for (const auto& r : active_) leaves.push_back(&r);
    for (const auto& r : frozen_) leaves.push_back(&r);
    for (const auto& r : pending_) leaves.push_back(&r);
    std::sort(leaves.begin(), leaves.end(), [](const RegionT* a, const RegionT* b) {
      return detail::spatially_before(a->geom, b->geom);
    });

    double sum_re = 0.0, sum_im = 0.0, err_re = 0.0, err_im = 0.0;
    for (const RegionT* r : leaves) {
      sum_re += r->value.real();
      sum_im += r->value.imag();
      err_re += r->err_re;
      err_im += r->err_im;
    }

    QuadResult out;
    out.value = Complex{sum_re, sum_im};
    out.err_est = std::max(err_re, err_im);
    out.n_evals = n_evals_;
    out.n_regions = leaves.size();
    out.converged = out.err_est <= tolerance_for(out.value);
    return out;
  }

  // Leaf inspection for step-level tests.
  std::vector<RegionT> regions() const {
    std::vector<RegionT> out;
    out.insert(out.end(), active_.begin(), active_.end());
    out.insert(out.end(), frozen_.begin(), frozen_.end());
    out.insert(out.end(), pending_.begin(), pending_.end());
    std::sort(out.begin(), out.end(), [](const RegionT& a, const RegionT& b) {
      return detail::spatially_before(a.geom, b.geom);
    });
    return out;
  }

  std::size_t n_regions() const {
    return active_.size() + frozen_.size() + pending_.size();
  }

 private:
  double tolerance_for(const Complex& v) const {
    return std::max(cfg_.abs_tol, cfg_.rel_tol * std::abs(v));
  }

  void evaluate(RegionT& r) {
    const RuleOutcome o = detail::apply_rule(f_, r.geom, &n_evals_);
    r.value = o.kronrod;
    r.err_re = o.err_re;
    r.err_im = o.err_im;
  }

  static bool heap_less(const RegionT& a, const RegionT& b) {
    return a.err() < b.err();
  }

  void add_active(const RegionT& r) {
    total_value_ += r.value;
    total_err_re_ += r.err_re;
    total_err_im_ += r.err_im;
    active_.push_back(r);
    std::push_heap(active_.begin(), active_.end(), heap_less);
  }

  RegionT pop_active() {
    std::pop_heap(active_.begin(), active_.end(), heap_less);
    RegionT r = active_.back();
    active_.pop_back();
    total_value_ -= r.value;
    total_err_re_ = std::max(0.0, total_err_re_ - r.err_re);
    total_err_im_ = std::max(0.0, total_err_im_ - r.err_im);
    return r;
  }

  bool global_step() {
    if (done_) return false;
    const double total_err = std::max(total_err_re_, total_err_im_);
    if (total_err <= tolerance_for(total_value_)) {
      done_ = true;
      return false;
    }
    while (!active_.empty()) {
      if (n_regions() >= cfg_.max_regions) {
        done_ = true;
        return false;
      }
      RegionT worst = pop_active();
      Geom a, b;
      if (!detail::bisect(worst.geom, a, b)) {
        worst.splittable = false;
        total_value_ += worst.value;  // still counted, just no longer refinable
        total_err_re_ += worst.err_re;
        total_err_im_ += worst.err_im;
        frozen_.push_back(worst);
        continue;
      }
      RegionT ra, rb;
      ra.geom = a;
      rb.geom = b;
      evaluate(ra);
      evaluate(rb);
      add_active(ra);
      add_active(rb);
      return true;
    }
    done_ = true;
    return false;
  }

  bool local_step() {
    if (pending_.empty()) {
      done_ = true;
      return false;
    }
    RegionT r = pending_.back();
    pending_.pop_back();
    if (r.err() <= r.budget || n_regions() + 1 >= cfg_.max_regions) {
      frozen_.push_back(r);
      return true;
    }
    Geom a, b;
    if (!detail::bisect(r.geom, a, b)) {
      r.splittable = false;
      frozen_.push_back(r);
      return true;
    }
    RegionT ra, rb;
    ra.geom = a;
    rb.geom = b;
    evaluate(ra);
    evaluate(rb);
    const double m = detail::measure(r.geom);
    ra.budget = r.budget * (detail::measure(a) / m);
    rb.budget = r.budget * (detail::measure(b) / m);
    pending_.push_back(rb);  // depth-first, low side first
    pending_.push_back(ra);
    return true;
  }

  F f_;
  QuadConfig cfg_;
  std::vector<RegionT> active_;   // global strategy: heap ordered by err()
  std::vector<RegionT> frozen_;   // accepted / unsplittable leaves
  std::vector<RegionT> pending_;  // local strategy: work stack
  Complex total_value_{0.0, 0.0};
  double total_err_re_ = 0.0;
  double total_err_im_ = 0.0;
  std::size_t n_evals_ = 0;
  bool done_ = false;
};

template <typename F>
QuadResult integrate_1d(F&& f, const Interval1D& domain, const QuadConfig& cfg = {}) {
  if (!domain.valid())
    throw std::invalid_argument("integrate_1d: domain must be finite with lo < hi");
  AdaptiveEngine<Interval1D, std::decay_t<F>> engine(std::forward<F>(f), domain, cfg);
  engine.run();
  return engine.result();
}

template <typename F>
QuadResult integrate_2d(F&& f, const Rect2D& domain, const QuadConfig& cfg = {}) {
  if (!domain.valid())
    throw std::invalid_argument("integrate_2d: domain must be finite with lo < hi on both axes");
  AdaptiveEngine<Rect2D, std::decay_t<F>> engine(std::forward<F>(f), domain, cfg);
  engine.run();
  return engine.result();
}

}  // namespace harvestlab::quadrature

#endif  // HARVESTLAB_QUADRATURE_HPP
