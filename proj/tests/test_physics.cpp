#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "harvestlab/physics.hpp"

using namespace harvestlab::physics;
using harvestlab::quadrature::QuadConfig;
using harvestlab::quadrature::Strategy;

namespace {

constexpr double kPi = std::numbers::pi;

// Frozen high-precision reference values (30-digit complex arithmetic /
// adaptive quadrature, computed independently of this library).
constexpr double kIntegrandE_y2_re = -0.10812366430864752237;
constexpr double kIntegrandE_y2_im = 0.13898381802140490142;
constexpr double kIntegrandX_11_re = 0.29183990148204381605;
constexpr double kIntegrandX_11_im = -1.1527987620158185178;
constexpr double kEsp_c2_1 = 0.020672231866532889713;
constexpr double kEsp_c2_half_pi = 0.036116479680966303685;
constexpr double kXsp_111 = 0.05854983152431916069;
constexpr double kXsp_211 = 0.014637457881079790173;
constexpr double kE_111 = 0.012309374911707275278;
constexpr double kE_11_001 = 4.4890061764113924689;
constexpr double kX_111_re = 0.0062856886232137274;
constexpr double kX_111_im = -0.0099942111933287812;

}  // namespace

TEST_CASE("to_dimensionless", "[physics]") {
  const HarvestParams a = to_dimensionless({1.0, 1.0, 1.0, 1.0});
  CHECK(a.c1 == 1.0);
  CHECK(a.c2 == 1.0);
  CHECK(a.c3 == 1.0);
  CHECK(a.eta0 == 1.0);

  const HarvestParams b = to_dimensionless({2.0, 3.0, 0.5, 2.0});
  CHECK(b.c1 == 6.0);
  CHECK(b.c2 == 4.0);
  CHECK(b.c3 == 1.0);

  CHECK_THROWS_AS(to_dimensionless({0.0, 1.0, 1.0, 1.0}), InvalidParams);
  CHECK_THROWS_AS(to_dimensionless({1.0, -2.0, 1.0, 1.0}), InvalidParams);
}

TEST_CASE("parameter validation", "[physics]") {
  CHECK_NOTHROW(HarvestParams(1.0, 1.0, 1.0));
  CHECK_NOTHROW(HarvestParams(1.0, kPi / 2.0, 1.0));
  CHECK_THROWS_AS(HarvestParams(0.0, 1.0, 1.0), InvalidParams);
  CHECK_THROWS_AS(HarvestParams(1.0, 1.0, -1.0), InvalidParams);
  CHECK_THROWS_AS(HarvestParams(1.0, 1.0, std::nan("")), InvalidParams);
  CHECK_THROWS_AS(HarvestParams(1.0, 1.0, 1.0, 0.0), InvalidParams);
  // Singular lines c2 in pi * Z are guarded.
  CHECK_THROWS_AS(HarvestParams(1.0, kPi, 1.0), InvalidParams);
  CHECK_THROWS_AS(HarvestParams(1.0, 3.14159265, 1.0), InvalidParams);
  CHECK_THROWS_AS(HarvestParams(1.0, 2.0 * kPi + 1e-7, 1.0), InvalidParams);
  CHECK_THROWS_AS(HarvestParams(1.0, 1e-8, 1.0), InvalidParams);
  CHECK_NOTHROW(HarvestParams(1.0, kPi - 1e-3, 1.0));
}

TEST_CASE("integrand_E", "[physics]") {
  SECTION("at y = 0 it reduces to -csc^2(c2)") {
    const HarvestParams p(1.0, kPi / 2.0, 1.0);
    const Complex v = integrand_E(0.0, p);
    CHECK(v.real() == Catch::Approx(-1.0).margin(1e-14));
    CHECK(v.imag() == Catch::Approx(0.0).margin(1e-14));
  }
  SECTION("conjugate symmetry in y") {
    const HarvestParams p(1.0, 1.0, 1.0);
    for (double y : {0.7, 0.13, 2.4}) {
      const Complex a = integrand_E(y, p);
      const Complex b = integrand_E(-y, p);
      CHECK(b.real() == Catch::Approx(a.real()).margin(1e-16));
      CHECK(b.imag() == Catch::Approx(-a.imag()).margin(1e-16));
    }
  }
  SECTION("frozen reference at y = 2") {
    const HarvestParams p(1.0, 1.0, 1.0);
    const Complex v = integrand_E(2.0, p);
    CHECK(v.real() == Catch::Approx(kIntegrandE_y2_re).epsilon(1e-14));
    CHECK(v.imag() == Catch::Approx(kIntegrandE_y2_im).epsilon(1e-14));
  }
  SECTION("large-|y| tail stays finite") {
    const HarvestParams p(6.0, 0.025, 0.125);  // widest domain of the grid
    const double R = truncation_radius(p);
    const Complex v = integrand_E(R, p);
    CHECK(std::isfinite(v.real()));
    CHECK(std::isfinite(v.imag()));
  }
}

TEST_CASE("integrand_X", "[physics]") {
  SECTION("at the origin it equals 4 / c1^2") {
    const HarvestParams p(2.0, 1.0, 1.0);
    const Complex v = integrand_X(0.0, 0.0, p);
    CHECK(v.real() == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(v.imag() == Catch::Approx(0.0).margin(1e-15));
  }
  SECTION("frozen reference at (1, 1)") {
    const HarvestParams p(1.0, 1.0, 1.0);
    const Complex v = integrand_X(1.0, 1.0, p);
    CHECK(v.real() == Catch::Approx(kIntegrandX_11_re).epsilon(1e-14));
    CHECK(v.imag() == Catch::Approx(kIntegrandX_11_im).epsilon(1e-14));
  }
  SECTION("doubling c3 quadruples the Gaussian exponent") {
    const HarvestParams p1(1.0, 1.0, 1.0);
    const HarvestParams p2(1.0, 1.0, 2.0);
    const double x = 0.8, y = 0.45;
    const double r2 = x * x + y * y;
    const Complex v1 = integrand_X(x, y, p1);
    const Complex v2 = integrand_X(x, y, p2);
    const double expected_ratio = std::exp(-(gaussian_alpha(p2) - gaussian_alpha(p1)) * r2);
    CHECK(gaussian_alpha(p2) == Catch::Approx(4.0 * gaussian_alpha(p1)));
    CHECK(std::abs(v2 / v1) == Catch::Approx(expected_ratio).epsilon(1e-12));
  }
  SECTION("stable at the far corners of the widest grid domain") {
    const HarvestParams p(6.0, 2.975, 0.125);
    const double R = truncation_radius(p);
    for (double x : {-R, 0.0, R}) {
      for (double y : {0.0, R / 2, R}) {
        const Complex v = integrand_X(x, y, p);
        CHECK(std::isfinite(v.real()));
        CHECK(std::isfinite(v.imag()));
      }
    }
  }
}

TEST_CASE("stationary-phase closed forms", "[physics]") {
  CHECK(eval_E_sp(HarvestParams(1.0, 1.0, 1.0)) ==
        Catch::Approx(kEsp_c2_1).epsilon(1e-15));
  CHECK(eval_E_sp(HarvestParams(1.0, kPi / 2.0, 1.0)) ==
        Catch::Approx(kEsp_c2_half_pi).epsilon(1e-15));
  // E_sp does not depend on c1.
  CHECK(eval_E_sp(HarvestParams(5.5, 1.0, 1.0)) ==
        eval_E_sp(HarvestParams(0.1, 1.0, 1.0)));

  CHECK(eval_X_sp(HarvestParams(1.0, 1.0, 1.0)) ==
        Catch::Approx(kXsp_111).epsilon(1e-15));
  CHECK(eval_X_sp(HarvestParams(2.0, 1.0, 1.0)) ==
        Catch::Approx(kXsp_211).epsilon(1e-15));
  // X_sp scales as c2^2 at fixed c1, c3.
  const double x1 = eval_X_sp(HarvestParams(1.0, 1.0, 1.0));
  const double x2 = eval_X_sp(HarvestParams(1.0, 2.0, 1.0));
  CHECK(x2 / x1 == Catch::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("eval_E matches the frozen quadrature reference", "[physics]") {
  const HarvestParams p(1.0, 1.0, 1.0);
  const auto e = eval_E(p);
  CHECK(e.quad.converged);
  CHECK(std::abs(e.value - kE_111) <= std::max(e.err, 1e-12));
  CHECK(e.value == Catch::Approx(kE_111).epsilon(1e-8));
  // The residual imaginary part is bounded by the reported error.
  const double pref = std::abs(detail::e_prefactor_base(p));
  CHECK(pref * std::abs(e.quad.value.imag()) <= e.err + 1e-300);
}

TEST_CASE("eval_E small-c3 analytic limit", "[physics]") {
  const HarvestParams p(1.0, 1.0, 0.01);
  const auto e = eval_E(p);
  CHECK(e.quad.converged);
  CHECK(e.value == Catch::Approx(kE_11_001).epsilon(1e-5));
  const double limit = p.c2 / (4.0 * std::pow(kPi, 1.5) * p.c3);
  CHECK(std::abs(e.value - limit) / limit < 0.01);
}

TEST_CASE("eval_X matches the frozen quadrature reference", "[physics]") {
  for (Strategy s : {Strategy::GlobalAdaptive, Strategy::LocalAdaptive}) {
    QuadConfig cfg;
    cfg.strategy = s;
    const HarvestParams p(1.0, 1.0, 1.0);
    const auto x = eval_X(p, cfg);
    INFO((s == Strategy::LocalAdaptive ? "local" : "global"));
    CHECK(x.quad.converged);
    CHECK(x.value.real() == Catch::Approx(kX_111_re).epsilon(1e-5));
    CHECK(x.value.imag() == Catch::Approx(kX_111_im).epsilon(1e-5));
  }
}

TEST_CASE("negativity", "[physics]") {
  CHECK(negativity(1.0, Complex(0.5, 0.0)) == 0.0);
  CHECK(negativity(0.2, Complex(0.3, 0.4)) == Catch::Approx(0.3).epsilon(1e-15));
  CHECK(negativity(0.0, Complex(0.0, 0.0)) == 0.0);
  CHECK(signed_negativity(1.0, Complex(0.5, 0.0)) == Catch::Approx(-0.5));
}

TEST_CASE("stationary-phase entanglement region", "[physics]") {
  CHECK(sp_entangled(1.0, kPi / 2.0));
  CHECK_FALSE(sp_entangled(2.1, 0.4));
  CHECK_FALSE(sp_entangled(2.1, kPi / 2.0));
  // Boundary c1 = 2 sin(c2) = 1.6829419696157930 at c2 = 1.
  CHECK(sp_entangled(1.673, 1.0));
  CHECK_FALSE(sp_entangled(1.693, 1.0));
}

TEST_CASE("sp_entangled agrees with the closed-form sign", "[physics][property]") {
  std::mt19937_64 rng(20240817);
  std::uniform_real_distribution<double> c1_dist(0.01, 6.0);
  std::uniform_real_distribution<double> c2_dist(0.01, 3.0);
  std::uniform_real_distribution<double> eta_dist(0.2, 3.0);
  int checked = 0;
  while (checked < 1000) {
    const double c1 = c1_dist(rng);
    const double c2 = c2_dist(rng);
    if (std::abs(c2 - kPi) < 1e-5) continue;
    const double eta0 = eta_dist(rng);
    const HarvestParams p(c1, c2, 1.0, eta0);
    const bool closed_form = eval_X_sp(p) - eval_E_sp(p) > 0.0;
    if (closed_form != sp_entangled(c1, c2)) {
      INFO("c1=" << c1 << " c2=" << c2);
      CHECK(closed_form == sp_entangled(c1, c2));
    }
    ++checked;
  }
  SUCCEED();
}

TEST_CASE("eta0 enters all observables exactly as an overall square", "[physics][property]") {
  const QuadConfig cfg;
  const HarvestParams base(1.3, 0.8, 1.1, 1.0);
  const auto e1 = eval_E(base, cfg);
  const auto x1 = eval_X(base, cfg);

  for (double eta0 : {2.0, 1.7}) {
    const HarvestParams scaled(1.3, 0.8, 1.1, eta0);
    const auto e2 = eval_E(scaled, cfg);
    const auto x2 = eval_X(scaled, cfg);
    const double k = eta0 * eta0;
    // Bit-exact by construction: the eta0^2 factor is applied last.
    CHECK(e2.value == k * e1.value);
    CHECK(x2.value.real() == k * x1.value.real());
    CHECK(x2.value.imag() == k * x1.value.imag());
    CHECK(e2.err == k * e1.err);
    // |X| and N scale to within rounding of the magnitude computation.
    CHECK(std::abs(x2.value) == Catch::Approx(k * std::abs(x1.value)).epsilon(1e-15));
    CHECK(negativity(e2.value, x2.value) ==
          Catch::Approx(k * negativity(e1.value, x1.value)).epsilon(1e-15));
    // Sign of |X| - E is invariant.
    CHECK((signed_negativity(e2.value, x2.value) > 0.0) ==
          (signed_negativity(e1.value, x1.value) > 0.0));
  }
}

TEST_CASE("truncation radius is conservative", "[physics][property]") {
  for (const auto& p : {HarvestParams(1.0, 1.0, 1.0), HarvestParams(2.5, 0.7, 0.6),
                        HarvestParams(0.4, 2.2, 2.0)}) {
    const double R = truncation_radius(p);
    const auto e1 = eval_E(p, {}, R);
    const auto e2 = eval_E(p, {}, 2.0 * R);
    CHECK(std::abs(e1.value - e2.value) <= e1.err + e2.err);

    const auto x1 = eval_X(p, {}, R);
    const auto x2 = eval_X(p, {}, 2.0 * R);
    CHECK(std::abs(x1.value - x2.value) <= x1.err + x2.err);
  }
}

TEST_CASE("E is real and positive across random parameters", "[physics][property]") {
  std::mt19937_64 rng(7041776);
  std::uniform_real_distribution<double> c1_dist(0.025, 6.0);
  std::uniform_real_distribution<double> c2_dist(0.025, 3.0);
  std::uniform_real_distribution<double> c3_dist(0.125, 5.0);
  int checked = 0;
  while (checked < 50) {  // the full 200-point sample runs in the acceptance suite
    const double c2 = c2_dist(rng);
    if (std::abs(c2 - kPi) < 1e-5) continue;
    const HarvestParams p(c1_dist(rng), c2, c3_dist(rng));
    const auto e = eval_E(p);
    INFO("c1=" << p.c1 << " c2=" << p.c2 << " c3=" << p.c3);
    CHECK(e.value + e.err > 0.0);
    const double pref = std::abs(detail::e_prefactor_base(p));
    CHECK(pref * std::abs(e.quad.value.imag()) <= e.err + 1e-300);
    ++checked;
  }
}

TEST_CASE("evaluate_point bundles the observables consistently", "[physics]") {
  const HarvestParams p(1.0, 1.5, 2.0);
  const Observables obs = evaluate_point(p);
  CHECK(obs.converged);
  CHECK(obs.N == negativity(obs.E, obs.X));
  CHECK(obs.N >= 0.0);
  CHECK(obs.E > 0.0);
}
