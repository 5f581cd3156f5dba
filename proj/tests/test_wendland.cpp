#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "core/rng.hpp"
#include "core/wendland.hpp"
#include "oracles.hpp"

using namespace gwfit;

namespace {

SmoothnessConfig smooth(double nu, double kappa, int d = 2) { return {nu, kappa, d}; }

WendlandParams params(double s2, double b, double nu, double kappa, int d = 2) {
  return {s2, b, smooth(nu, kappa, d)};
}

// kappa = 1 closed form: (1-r)^(nu+1) (1 + (nu+1) r) on [0, 1)
double askey_k1(double nu, double r) {
  if (r >= 1.0) return 0.0;
  return std::pow(1.0 - r, nu + 1.0) * (1.0 + (nu + 1.0) * r);
}

}  // namespace

TEST_CASE("base function: normalization, support, kappa=1 closed form") {
  CHECK(eval_phi_base(smooth(4, 1), 0.0) == 1.0);
  CHECK(eval_phi_base(smooth(4, 1), 1.0) == 0.0);
  CHECK(eval_phi_base(smooth(4, 1), 2.5) == 0.0);
  CHECK(eval_phi_base(smooth(7.5, 2.5), 1.0) == 0.0);
  CHECK(eval_phi_base(smooth(4, 1), 0.5) == doctest::Approx(0.109375).epsilon(1e-12));
}

TEST_CASE("quadrature route matches closed forms for kappa = 1, 2, 3") {
  const QuadratureConfig quad;
  for (int kappa : {1, 2, 3}) {
    const double nu = 2.0 + kappa + 1.5;  // keeps nu >= (d+1)/2 + kappa at d = 2
    for (int i = 0; i <= 100; ++i) {
      const double r = i / 100.0;
      const double q = detail::phi_base_quadrature(nu, kappa, r, quad);
      const double c = detail::phi_base_closed_form(nu, kappa, r);
      CHECK(std::abs(q - c) <= 1e-10);
    }
  }
}

TEST_CASE("quadrature handles kappa below 1 (endpoint singularity)") {
  const QuadratureConfig quad;
  // kappa = 0.4: integrand needs the power substitution; check against a
  // high-resolution Simpson rule on the substituted integrand
  const double nu = 4.0, kappa = 0.4;
  for (double r : {0.1, 0.45, 0.8}) {
    const double got = detail::phi_base_quadrature(nu, kappa, r, quad);
    const double w_max = std::pow(1.0 - r * r, kappa);
    const double ref = oracle::simpson(
                           [&](double w) {
                             const double v = std::pow(w, 1.0 / kappa);
                             return std::pow(1.0 - std::sqrt(v + r * r), nu);
                           },
                           0.0, w_max, 20000) /
                       (2.0 * kappa) /
                       std::exp(detail::log_beta(2.0 * kappa, nu + 1.0));
    CHECK(got == doctest::Approx(ref).epsilon(1e-8));
  }
}

TEST_CASE("scaled kernel: variance at origin, compact support, closed form") {
  CHECK(eval_phi(params(2.0, 3.0, 4, 1), 0.0) == 2.0);
  CHECK(eval_phi(params(2.0, 3.0, 4, 1), 3.0) == 0.0);
  CHECK(eval_phi(params(1.5, 2.0, 4, 1), 1.0) ==
        doctest::Approx(1.5 * askey_k1(4.0, 0.5)).epsilon(1e-12));
  CHECK(eval_phi(params(1.5, 2.0, 4, 1), 1.0) == doctest::Approx(0.1640625).epsilon(1e-12));
}

TEST_CASE("compact support on random lags at and beyond the range") {
  const CounterRng rng(42);
  const WendlandParams p = params(1.7, 2.2, 9, 4.5);
  for (int i = 0; i < 200; ++i) {
    const double t = p.beta + 4.0 * rng.uniform01(i);
    CHECK(eval_phi(p, t) == 0.0);
  }
}

TEST_CASE("monotone non-increasing on the support for kappa > 1") {
  const CounterRng rng(43);
  const WendlandParams p = params(1.3, 1.9, 9, 2.5);
  for (int i = 0; i < 200; ++i) {
    double a = p.beta * rng.uniform01(2 * i);
    double b = p.beta * rng.uniform01(2 * i + 1);
    if (a > b) std::swap(a, b);
    CHECK(eval_phi(p, a) >= eval_phi(p, b) - 1e-12);
  }
}

TEST_CASE("sigma2 derivatives: value at origin, vanishing higher orders") {
  CHECK(eval_dphi(params(2.0, 3.0, 9, 4.5), 0.0, {1, 0}) == 1.0);
  CHECK(eval_dphi(params(2.0, 3.0, 9, 4.5), 0.7, {2, 0}) == 0.0);
  CHECK(eval_dphi(params(0.8, 1.1, 9, 4.5), 0.3, {3, 0}) == 0.0);
  CHECK(eval_dphi(params(0.8, 1.1, 9, 4.5), 0.3, {2, 1}) == 0.0);
}

TEST_CASE("beta derivative matches a central finite difference") {
  const WendlandParams p = params(1.0, 2.0, 9, 3);
  const double an = eval_dphi(p, 1.0, {0, 1});
  const auto f = [&](double b) { return eval_phi(params(1.0, b, 9, 3), 1.0); };
  const double fd = (f(2.0 + 1e-5) - f(2.0 - 1e-5)) / 2e-5;
  CHECK(an == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("all derivative orders match high-order finite differences") {
  // kappa = 5.5 keeps every implemented order inside its validity region
  const double nu = 9.5, kappa = 5.5;
  const CounterRng rng(7);
  int checked = 0;
  for (int i = 0; checked < 50 && i < 80; ++i) {
    const double s2 = 0.5 + 2.0 * rng.uniform01(3 * i);
    const double b = 1.0 + 2.0 * rng.uniform01(3 * i + 1);
    const double t = (0.1 + 0.8 * rng.uniform01(3 * i + 2)) * b;  // away from 0 and beta
    const WendlandParams p = params(s2, b, nu, kappa);
    const auto in_beta = [&](double bb) { return eval_phi(params(s2, bb, nu, kappa), t); };

    const double d1 = eval_dphi(p, t, {0, 1});
    CHECK(d1 == doctest::Approx(oracle::diff1(in_beta, b, 1e-3)).epsilon(1e-5));

    const double d2 = eval_dphi(p, t, {0, 2});
    CHECK(d2 == doctest::Approx(oracle::diff2(in_beta, b, 2e-3)).epsilon(1e-4));

    const double d3 = eval_dphi(p, t, {0, 3});
    CHECK(d3 == doctest::Approx(oracle::diff3(in_beta, b, 5e-3)).epsilon(1e-4));

    // mixed orders: exact difference quotient in sigma2 (linearity)
    const auto mixed = [&](double bb) {
      return (eval_phi(params(2.0, bb, nu, kappa), t) - eval_phi(params(1.0, bb, nu, kappa), t));
    };
    const double m11 = eval_dphi(p, t, {1, 1});
    CHECK(m11 == doctest::Approx(oracle::diff1(mixed, b, 1e-3)).epsilon(1e-5));
    const double m12 = eval_dphi(p, t, {1, 2});
    CHECK(m12 == doctest::Approx(oracle::diff2(mixed, b, 2e-3)).epsilon(1e-4));
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("mixed partials share one code path with the pure beta derivative") {
  const WendlandParams p = params(2.5, 1.8, 9, 4.5);
  CHECK(eval_dphi(p, 0.9, {1, 1}) == eval_dphi(p, 0.9, {0, 1}) / p.sigma2);
  CHECK(eval_dphi(p, 0.9, {1, 2}) == eval_dphi(p, 0.9, {0, 2}) / p.sigma2);
}

TEST_CASE("derivative orders reject kappa at or below the order") {
  CHECK_THROWS_AS(eval_dphi(params(1, 2, 9, 0.9), 0.5, {0, 1}), std::domain_error);
  CHECK_THROWS_AS(eval_dphi(params(1, 2, 9, 2.0), 0.5, {0, 2}), std::domain_error);
  CHECK_THROWS_AS(eval_dphi(params(1, 2, 9, 3.0), 0.5, {0, 3}), std::domain_error);
  // kappa in (1, 2]: outside the classical differentiability region but evaluable
  CHECK_NOTHROW(eval_dphi(params(1, 2, 8, 1.5), 0.5, {0, 1}));
}

TEST_CASE("spectral density at zero equals the analytic constant") {
  for (int d : {1, 2, 3}) {
    const WendlandParams p = params(9, 1.7, 9, 3.5, d);
    const double at0 = spectral_density(p, 0.0);
    // cross-check: the transform at 0 is the integral of the kernel over R^d,
    // i.e. surface(S^{d-1}) * int_0^beta t^(d-1) phi(t) dt
    const double surface = d == 1 ? 2.0
                           : d == 2 ? 2.0 * std::numbers::pi
                                    : 4.0 * std::numbers::pi;
    const double ref = surface * oracle::simpson(
                                     [&](double t) {
                                       return std::pow(t, d - 1) * eval_phi(p, t);
                                     },
                                     0.0, p.beta, 4000);
    CHECK(at0 == doctest::Approx(ref).epsilon(1e-8));
  }
}

TEST_CASE("spectral density is strictly positive") {
  const WendlandParams p = params(1.0, 1.0, 9, 4.5, 2);
  const CounterRng rng(11);
  for (int i = 0; i < 100; ++i) {
    const double s = 40.0 * rng.uniform01(i);
    CHECK(spectral_density(p, s) > 0.0);
  }
}

TEST_CASE("spectral density matches the direct Fourier transform (d = 1)") {
  const WendlandParams p = params(1.0, 1.0, 5, 1, 1);
  const double s = 2.0;
  const double got = spectral_density(p, s);
  const double ref =
      2.0 * oracle::simpson([&](double t) { return eval_phi(p, t) * std::cos(s * t); }, 0.0,
                            p.beta, 4000);
  CHECK(got == doctest::Approx(ref).epsilon(1e-4));
}

TEST_CASE("spectral density continuation route agrees with the series") {
  // pick s so that (s beta / 2)^2 straddles the series/transform switch
  const WendlandParams p = params(1.0, 1.0, 9, 4.5, 1);
  const QuadratureConfig quad;
  const double series_val = spectral_density(p, 19.9);          // series route
  const double numeric_val = detail::spectral_density_numeric(p, 19.9, quad);
  CHECK(series_val == doctest::Approx(numeric_val).epsilon(1e-5));
}

TEST_CASE("invalid constructions are rejected") {
  CHECK_THROWS_AS(smooth(2.0, 1.0, 2).validate(), std::invalid_argument);  // nu too small
  CHECK_THROWS_AS(smooth(9.0, 0.0, 2).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params(-1.0, 2.0, 9, 4.5).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params(1.0, 0.0, 9, 4.5).validate(), std::invalid_argument);
  ThetaBox bad{1.0, 0.5, 1.0, 2.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("quadrature failure reports the achieved error estimate") {
  // one panel and an unreachable tolerance on an integrand with a singular
  // derivative at the endpoint
  QuadratureConfig strict;
  strict.abs_tol = 1e-16;
  strict.rel_tol = 1e-16;
  strict.max_subdivisions = 1;
  try {
    detail::phi_base_quadrature(6.0, 0.51, 0.9, strict);
    FAIL("expected a tolerance failure");
  } catch (const ToleranceError& e) {
    CHECK(e.achieved_error() > 0.0);
    CHECK(std::string(e.what()).find("subdivisions") != std::string::npos);
  }
}
