#ifndef HARVESTLAB_PHYSICS_HPP
#define HARVESTLAB_PHYSICS_HPP

/* Observables for two parallel uniformly accelerated two-level detectors
 * coupled to a massless scalar field through a Gaussian switching window.
 *
 * Everything is expressed in the dimensionless combinations
 *
 *     c1 = kappa * L        (acceleration x separation)
 *     c2 = kappa * Omega * sigma^2
 *     c3 = sigma * Omega    (window width x energy gap)
 *
 * E is the single-detector transition probability, X the complex
 * entangling amplitude, and the negativity N = max(|X| - E, 0) decides
 * whether the detector pair ends up entangled.  The integral
 * representations used here are the contour-shifted ones: the shift into
 * the complex plane removes both the rapid oscillation and the poles on
 * the real axis, so the integrands below are smooth and the i*epsilon
 * prescription is moot.  E reduces to a single integral; X stays a double
 * integral over the half-plane y >= 0.
 */

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "harvestlab/quadrature.hpp"

namespace harvestlab::physics {

using quadrature::Complex;
using quadrature::QuadConfig;
using quadrature::QuadResult;

struct InvalidParams : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raw worldline/detector parameters (kappa: proper acceleration, L:
// detector separation, Omega: energy gap, sigma: Gaussian window half-width).
struct PhysicalParams {
  double kappa = 1.0;
  double L = 1.0;
  double Omega = 1.0;
  double sigma = 1.0;
};

namespace detail {

inline void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw InvalidParams(std::string(name) + " must be positive and finite (got " +
                        std::to_string(v) + ")");
  }
}

// Distance from v to the nearest integer multiple of pi (including 0).
inline double distance_to_pi_multiple(double v) {
  const double k = std::round(v / std::numbers::pi);
  return std::abs(v - k * std::numbers::pi);
}

}  // namespace detail

// Width of the guard band around multiples of pi in c2.  The integrands
// become singular exactly on those lines (csch^2(c1 y/2 - i c2) at y = 0,
// and the X denominators), so such parameter points are rejected up front.
inline constexpr double kC2GuardWidth = 1e-6;

struct HarvestParams {
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double eta0 = 1.0;  // coupling amplitude; enters all observables as eta0^2

  HarvestParams(double c1_, double c2_, double c3_, double eta0_ = 1.0)
      : c1(c1_), c2(c2_), c3(c3_), eta0(eta0_) {
    detail::require_positive(c1, "c1");
    detail::require_positive(c2, "c2");
    detail::require_positive(c3, "c3");
    detail::require_positive(eta0, "eta0");
    if (detail::distance_to_pi_multiple(c2) < kC2GuardWidth) {
      throw InvalidParams("c2 = " + std::to_string(c2) +
                          " is within " + std::to_string(kC2GuardWidth) +
                          " of an integer multiple of pi (singular line)");
    }
  }
};

inline HarvestParams to_dimensionless(const PhysicalParams& p, double eta0 = 1.0) {
  detail::require_positive(p.kappa, "kappa");
  detail::require_positive(p.L, "L");
  detail::require_positive(p.Omega, "Omega");
  detail::require_positive(p.sigma, "sigma");
  return HarvestParams(p.kappa * p.L, p.kappa * p.Omega * p.sigma * p.sigma,
                       p.sigma * p.Omega, eta0);
}

// Gaussian decay rate of the shifted integrands: (c1 c3 / 2 c2)^2.
inline double gaussian_alpha(const HarvestParams& p) {
  const double a = p.c1 * p.c3 / (2.0 * p.c2);
  return a * a;
}

// Truncation radius for the (formally infinite) integration domains:
// 8 Gaussian widths, where exp(-64) ~ 1.6e-28 is far below any tolerance
// in use.  Doubling it must not change results beyond the error estimate.
inline double truncation_radius(const HarvestParams& p) {
  return 16.0 * p.c2 / (p.c1 * p.c3);
}

namespace detail {

// csch^2(z), stable for large |Re z|.  csch is odd, so csch^2 is even and
// the large-argument branch can always work with Re z > 0, where
// csch^2(z) = 4 e^{-2z} / (1 - e^{-2z})^2 involves only decaying
// exponentials.
inline Complex csch_squared(Complex z) {
  if (std::abs(z.real()) > 20.0) {
    if (z.real() < 0.0) z = -z;
    const Complex w = std::exp(-2.0 * z);
    const Complex den = 1.0 - w;
    return 4.0 * w / (den * den);
  }
  const Complex s = std::sinh(z);
  return 1.0 / (s * s);
}

// log(sinh(u)) for u > 0 without overflow.
inline double log_sinh(double u) {
  if (u > 0.5) return u + std::log1p(-std::exp(-2.0 * u)) - std::numbers::ln2;
  return std::log(std::sinh(u));
}

// 1 / (c1/2 + sign * t * phase) with t = exp(log_t) >= 0 and |phase| = 1,
// stable when t overflows double range: there 1/d = sign * conj(phase) / t
// to well below double precision.
inline Complex inv_denominator(double c1_half, double log_t, double sign,
                               const Complex& phase) {
  if (log_t < 690.0) {
    const Complex d = c1_half + sign * std::exp(log_t) * phase;
    return 1.0 / d;
  }
  return sign * std::conj(phase) * std::exp(-log_t);
}

}  // namespace detail

// Integrand of the reduced 1D representation of E:
//   exp(-alpha y^2) * csch^2(c1 y / 2 - i c2).
inline Complex integrand_E(double y, const HarvestParams& p) {
  const double g = std::exp(-gaussian_alpha(p) * y * y);
  return g * detail::csch_squared(Complex(0.5 * p.c1 * y, -p.c2));
}

// Integrand of the contour-shifted X double integral (y >= 0):
//   exp(-alpha (x^2 + y^2)) / (D1 * D2)
//   D1 = c1/2 - e^{-c1 x/2} e^{-i c2} sinh(c1 y/2)
//   D2 = c1/2 + e^{ c1 x/2} e^{ i c2} sinh(c1 y/2)
// The denominators cannot vanish while c2 stays off the multiples of pi.
inline Complex integrand_X(double x, double y, const HarvestParams& p) {
  const double g = std::exp(-gaussian_alpha(p) * (x * x + y * y));
  const double c1_half = 0.5 * p.c1;
  const double u = c1_half * y;
  const double s = c1_half * x;
  const Complex phase(std::cos(p.c2), std::sin(p.c2));  // e^{i c2}

  Complex inv_d1, inv_d2;
  if (u < 300.0 && std::abs(s) < 300.0) {
    const double sh = std::sinh(u);
    const Complex d1 = c1_half - std::exp(-s) * sh * std::conj(phase);
    const Complex d2 = c1_half + std::exp(s) * sh * phase;
    inv_d1 = 1.0 / d1;
    inv_d2 = 1.0 / d2;
  } else {
    const double log_sh = detail::log_sinh(u);
    inv_d1 = detail::inv_denominator(c1_half, -s + log_sh, -1.0, std::conj(phase));
    inv_d2 = detail::inv_denominator(c1_half, s + log_sh, +1.0, phase);
  }
  return g * inv_d1 * inv_d2;
}

// Evaluation result for one observable: the (prefactor-scaled) value, its
// error estimate, and the raw quadrature diagnostics.
struct EvalReal {
  double value = 0.0;
  double err = 0.0;
  QuadResult quad;
};

struct EvalComplex {
  Complex value{0.0, 0.0};
  double err = 0.0;
  QuadResult quad;
};

namespace detail {

// Prefactor of the reduced E integral, without the eta0^2 factor:
//   -(c1 / 16 pi^{3/2}) (c2 / c3) e^{-c3^2}
inline double e_prefactor_base(const HarvestParams& p) {
  const double pi32 = std::numbers::pi * std::sqrt(std::numbers::pi);
  return -(p.c1 / (16.0 * pi32)) * (p.c2 / p.c3) * std::exp(-p.c3 * p.c3);
}

// Prefactor of the X double integral, without eta0^2:
//   (c1^2 / 32 pi^2) e^{-c3^2}
inline double x_prefactor_base(const HarvestParams& p) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return (p.c1 * p.c1 / (32.0 * pi2)) * std::exp(-p.c3 * p.c3);
}

}  // namespace detail

// Transition probability E via the reduced 1D integral on [-R, R].
// The integral is real up to quadrature noise; the residual imaginary part
// is folded into the error estimate and the real part returned.
// radius = 0 selects the default truncation_radius(p).
inline EvalReal eval_E(const HarvestParams& p, const QuadConfig& cfg = {},
                       double radius = 0.0) {
  const double R = radius > 0.0 ? radius : truncation_radius(p);
  const auto q = quadrature::integrate_1d(
      [&p](double y) { return integrand_E(y, p); }, {-R, R}, cfg);

  const double pref = detail::e_prefactor_base(p);
  const double base_value = pref * q.value.real();
  const double base_err =
      std::abs(pref) * std::max(q.err_est, std::abs(q.value.imag()));

  const double eta_sq = p.eta0 * p.eta0;  // applied last so values scale exactly
  EvalReal out;
  out.value = eta_sq * base_value;
  out.err = eta_sq * base_err;
  out.quad = q;
  return out;
}

// Entangling amplitude X via the 2D integral on [-R, R] x [0, R].
//
// The y-integration runs in the variable w = log(sinh(c1 y / 2)).  The raw
// integrand carries a boundary layer along y = 0 whose width shrinks like
// exp(-c1 |x| / 2): at small c1 it becomes far too thin for rectangle
// subdivision to resolve (the region budget explodes while the estimate
// stays wrong).  The log-sinh substitution is exact and unrolls that layer
// into a diagonal band of uniform width in the (x, w) plane, which the
// adaptive engine handles routinely.  y = R maps to w_hi exactly; the lower
// cutoff discards only y < (2/c1) exp(kLayerCutoff), relatively ~1e-19 of
// the integral.
inline EvalComplex eval_X(const HarvestParams& p, const QuadConfig& cfg = {},
                          double radius = 0.0) {
  constexpr double kLayerCutoff = -42.0;
  const double R = radius > 0.0 ? radius : truncation_radius(p);
  const double w_hi = detail::log_sinh(0.5 * p.c1 * R);
  const double w_lo = std::min(kLayerCutoff, w_hi - 30.0);
  const double inv_c1_half = 2.0 / p.c1;
  const auto q = quadrature::integrate_2d(
      [&p, inv_c1_half](double x, double w) {
        const double y = inv_c1_half * std::asinh(std::exp(w));
        const double jacobian = inv_c1_half / std::sqrt(1.0 + std::exp(-2.0 * w));
        return jacobian * integrand_X(x, y, p);
      },
      {{-R, R}, {w_lo, w_hi}}, cfg);

  const double pref = detail::x_prefactor_base(p);
  const Complex base_value = pref * q.value;
  const double base_err = pref * q.err_est;

  const double eta_sq = p.eta0 * p.eta0;
  EvalComplex out;
  out.value = eta_sq * base_value;
  out.err = eta_sq * base_err;
  out.quad = q;
  return out;
}

// Stationary-phase closed form for E (independent of c1):
//   eta0^2 e^{-c3^2} / (8 pi) (c2/c3)^2 csc^2(c2)
inline double eval_E_sp(const HarvestParams& p) {
  const double csc = 1.0 / std::sin(p.c2);
  const double ratio = p.c2 / p.c3;
  const double base = std::exp(-p.c3 * p.c3) / (8.0 * std::numbers::pi) *
                      (ratio * ratio) * (csc * csc);
  return (p.eta0 * p.eta0) * base;
}

// Stationary-phase closed form for X (real and positive):
//   eta0^2 e^{-c3^2} / (2 pi) (c2 / (c3 c1))^2
inline double eval_X_sp(const HarvestParams& p) {
  const double ratio = p.c2 / (p.c3 * p.c1);
  const double base =
      std::exp(-p.c3 * p.c3) / (2.0 * std::numbers::pi) * (ratio * ratio);
  return (p.eta0 * p.eta0) * base;
}

// Signed entanglement indicator |X| - E; positive iff entangled.
inline double signed_negativity(double E, const Complex& X) {
  return std::abs(X) - E;
}

inline double negativity(double E, const Complex& X) {
  return std::max(signed_negativity(E, X), 0.0);
}

// Stationary-phase entanglement region: c1 < 2 |sin c2|, independent of c3.
inline bool sp_entangled(double c1, double c2) {
  return c1 < 2.0 * std::abs(std::sin(c2));
}

struct Observables {
  double E = 0.0;
  Complex X{0.0, 0.0};
  double N = 0.0;
  double err_E = 0.0;
  double err_X = 0.0;
  bool converged = false;
};

inline Observables evaluate_point(const HarvestParams& p, const QuadConfig& cfg = {}) {
  const EvalReal e = eval_E(p, cfg);
  const EvalComplex x = eval_X(p, cfg);
  Observables obs;
  obs.E = e.value;
  obs.X = x.value;
  obs.N = negativity(e.value, x.value);
  obs.err_E = e.err;
  obs.err_X = x.err;
  obs.converged = e.quad.converged && x.quad.converged;
  return obs;
}

}  // namespace harvestlab::physics

#endif  // HARVESTLAB_PHYSICS_HPP
