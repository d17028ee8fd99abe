#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qdho/errors.hpp"
#include "qdho/quad.hpp"
#include "qdho/response.hpp"
#include "qdho/thermo.hpp"

using namespace qdho;
using std::numbers::pi;

TEST_CASE("polynomial integrates exactly") {
  const Estimate e = integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(e.value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(std::abs(e.value - 1.0 / 3.0) < 1e-12);
  CHECK(e.error < 1e-12);
}

TEST_CASE("reversed and empty limits") {
  const auto f = [](double x) { return std::exp(x); };
  CHECK(integrate_adaptive(f, 1.0, 0.0).value == doctest::Approx(-(std::exp(1.0) - 1.0)));
  CHECK(integrate_adaptive(f, 2.0, 2.0).value == 0.0);
}

TEST_CASE("config validation") {
  QuadratureConfig cfg;
  cfg.cutoff_factor = 5.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = {};
  cfg.rel_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = {};
  cfg.abs_tol = -1.0;
  CHECK_THROWS_AS(integrate_adaptive([](double) { return 1.0; }, 0.0, 1.0, cfg), DomainError);
}

TEST_CASE("non-finite integrand is a domain error") {
  CHECK_THROWS_AS(integrate_adaptive([](double x) { return 1.0 / (x - 0.5); }, 0.0, 1.0),
                  Error);
  CHECK_THROWS_AS(integrate_adaptive([](double) { return NAN; }, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(integrate_adaptive([](double x) { return x; }, 0.0, INFINITY), DomainError);
}

TEST_CASE("budget exhaustion carries the best estimate") {
  QuadratureConfig cfg;
  cfg.max_subdivisions = 3;
  cfg.rel_tol = 1e-14;
  try {
    integrate_adaptive([](double x) { return std::sin(200.0 * x) * std::sin(200.0 * x); }, 0.0,
                       10.0, cfg);
    FAIL("expected ToleranceError");
  } catch (const ToleranceError& e) {
    CHECK(std::isfinite(e.estimate()));
    CHECK(e.error() > 0.0);
  }
}

TEST_CASE("semi-infinite power laws") {
  const Estimate a = integrate_semi_infinite([](double x) { return 1.0 / (x * x); }, 1.0,
                                             QuadratureConfig{}.with_tail_order(2.0));
  CHECK(a.value == doctest::Approx(1.0).epsilon(1e-12));
  const Estimate b = integrate_semi_infinite([](double x) { return 1.0 / (x * x * x); }, 1.0,
                                             QuadratureConfig{}.with_tail_order(3.0));
  CHECK(b.value == doctest::Approx(0.5).epsilon(1e-12));
  const Estimate c = integrate_semi_infinite([](double x) { return 1.0 / (1.0 + x * x); }, 0.0);
  CHECK(c.value == doctest::Approx(pi / 2).epsilon(1e-12));
}

TEST_CASE("declared tail must match the integrand") {
  try {
    integrate_semi_infinite([](double x) { return 1.0 / (1.0 + x * x); }, 0.0,
                            QuadratureConfig{}.with_tail_order(4.0));
    FAIL("expected TailMismatchError");
  } catch (const TailMismatchError& e) {
    CHECK(e.declared() == 4.0);
    CHECK(e.fitted() == doctest::Approx(2.0).epsilon(0.01));
  }
}

TEST_CASE("non-integrable tail is a divergence") {
  CHECK_THROWS_AS(
      integrate_semi_infinite([](double x) { return 1.0 / (1.0 + x); }, 0.0), DivergenceError);
}

TEST_CASE("power-law fit") {
  const TailFit fit = fit_power_law_tail([](double x) { return 3.0 * std::pow(x, -2.5); }, 10.0, 100.0);
  REQUIRE(fit.valid);
  CHECK(fit.exponent == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(fit.amplitude == doctest::Approx(3.0).epsilon(1e-10));
  CHECK_FALSE(fit_power_law_tail([](double x) { return std::sin(x); }, 10.0, 100.0).valid);
}

TEST_CASE("principal values") {
  SUBCASE("odd integrand") {
    const Estimate e = integrate_principal_value([](double x) { return 1.0 / x; }, 0.0, -1.0, 1.0);
    CHECK(std::abs(e.value) < 1e-14);
  }
  SUBCASE("asymmetric window") {
    // P int_0^3 dx / (x - 1) = ln 2
    const Estimate e =
        integrate_principal_value([](double x) { return 1.0 / (x - 1.0); }, 1.0, 0.0, 3.0);
    CHECK(e.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("P int_0^inf dx / (x^2 - 1) = 0 from split intervals") {
    const auto f = [](double x) { return 1.0 / (x * x - 1.0); };
    const double head = integrate_principal_value(f, 1.0, 0.0, 2.0).value;
    const double tail =
        integrate_semi_infinite(f, 2.0, QuadratureConfig{}.with_tail_order(2.0)).value;
    CHECK(std::abs(head + tail) < 1e-12);
  }
  SUBCASE("smooth numerator") {
    // P int_0^2 e^x / (x - 1) dx = e (Ei(1) - Ei(-1))
    const double expected = std::exp(1.0) * (1.8951178163559368 - (-0.21938393439552029));
    const Estimate e =
        integrate_principal_value([](double x) { return std::exp(x) / (x - 1.0); }, 1.0, 0.0, 2.0);
    CHECK(e.value == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("pole on the boundary") {
    CHECK_THROWS_AS(integrate_principal_value([](double x) { return 1.0 / x; }, 0.0, 0.0, 1.0),
                    DomainError);
    CHECK_THROWS_AS(integrate_principal_value([](double x) { return 1.0 / x; }, 2.0, 0.0, 1.0),
                    DomainError);
  }
}

TEST_CASE("series with integral tail") {
  QuadratureConfig cfg = QuadratureConfig{}.with_tail_order(2.0);
  const Estimate zeta2 =
      sum_with_integral_tail([](double n) { return 1.0 / (n * n); }, 1, 50, cfg);
  CHECK(zeta2.value == doctest::Approx(pi * pi / 6.0).epsilon(1e-9));
  CHECK(std::abs(zeta2.value - pi * pi / 6.0) <= 10.0 * zeta2.error);
  const Estimate zeta4 = sum_with_integral_tail([](double n) { return std::pow(n, -4.0); }, 1,
                                                20, QuadratureConfig{}.with_tail_order(4.0));
  CHECK(zeta4.value == doctest::Approx(std::pow(pi, 4) / 90.0).epsilon(1e-10));
}

// A battery of integrals with known values; the reported error must bound
// the true error in at least 95% of cases.
TEST_CASE("error estimates bound the true error") {
  struct Case {
    RealFunction f;
    double a, b;
    double exact;
  };
  const std::vector<Case> finite = {
      {[](double x) { return x * x; }, 0, 1, 1.0 / 3},
      {[](double x) { return std::exp(x); }, 0, 1, std::exp(1.0) - 1},
      {[](double x) { return std::sqrt(x); }, 0, 1, 2.0 / 3},
      {[](double x) { return std::log(x); }, 0, 1, -1.0},
      {[](double x) { return 1.0 / (1 + x * x); }, -10, 10, 2 * std::atan(10.0)},
      {[](double x) { return std::sin(x); }, 0, pi, 2.0},
      {[](double x) { return std::cos(50 * x); }, 0, 1, std::sin(50.0) / 50},
      {[](double x) { return 1.0 / (1e-4 + x * x); }, -1, 1, 2 * 100 * std::atan(100.0)},
      {[](double x) { return std::abs(x - 0.3); }, 0, 1, 0.5 * (0.09 + 0.49)},
      {[](double x) { return std::pow(x, -0.5); }, 0, 1, 2.0},
      {[](double x) { return std::exp(-x * x); }, -5, 5, std::sqrt(pi) * std::erf(5.0)},
      {[](double x) { return x * std::log(x); }, 0, 1, -0.25},
      {[](double x) { return 1.0 / (1 + x); }, 0, 1, std::log(2.0)},
      {[](double x) { return std::pow(std::sin(x), 8); }, 0, pi, 35 * pi / 128},
      {[](double x) { return std::exp(-10 * x) * std::cos(x); }, 0, 3,
       0.0},  // filled below
      {[](double x) { return x < 0.5 ? 1.0 : 0.0; }, 0, 1, 0.5},
      {[](double x) { return std::tanh(20 * (x - 0.5)); }, 0, 1, 0.0},
      {[](double x) { return std::pow(x, 0.1); }, 0, 2, std::pow(2.0, 1.1) / 1.1},
  };
  std::vector<Case> cases = finite;
  {
    // int_0^3 e^{-10x} cos x = Re [(1 - e^{-(10 - i)3}) / (10 - i)]
    const std::complex<double> s(10.0, -1.0);
    cases[14].exact = ((1.0 - std::exp(-3.0 * s)) / s).real();
  }
  int bounded = 0;
  int total = 0;
  for (const Case& c : cases) {
    const Estimate e = integrate_adaptive(c.f, c.a, c.b);
    ++total;
    if (std::abs(e.value - c.exact) <= e.error + 1e-15) ++bounded;
  }
  const std::vector<std::pair<RealFunction, double>> semi = {
      {[](double x) { return std::exp(-x); }, 1.0},
      {[](double x) { return 1.0 / (1 + x * x); }, pi / 2},
      {[](double x) { return x / std::pow(1 + x * x, 2); }, 0.5},
      {[](double x) { return 1.0 / std::pow(1 + x, 3); }, 0.5},
      {[](double x) { return std::exp(-x * x); }, std::sqrt(pi) / 2},
  };
  for (const auto& [f, exact] : semi) {
    const Estimate e = integrate_semi_infinite(f, 0.0);
    ++total;
    if (std::abs(e.value - exact) <= e.error + 1e-15) ++bounded;
  }
  CHECK(static_cast<double>(bounded) / total >= 0.95);
}

TEST_CASE("determinism") {
  const auto f = [](double x) { return std::exp(-x) * std::sin(3 * x) + 1.0 / (1 + x * x); };
  const Estimate a = integrate_semi_infinite(f, 0.0);
  const Estimate b = integrate_semi_infinite(f, 0.0);
  CHECK(a.value == b.value);
  CHECK(a.error == b.error);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("finite head of Im G plus mapped tail reproduces the closed form") {
  const ModelParams p{1.0, 0.25, 0.5};
  const GreenFunction g(p);
  const double cutoff = 50.0 * std::max(p.omega0, p.pole_rate());
  const Estimate head = integrate_adaptive([&](double w) { return g.im(w); }, 0.0, cutoff);
  const Estimate tail = integrate_semi_infinite([&](double w) { return g.im(w); }, cutoff,
                                                QuadratureConfig{}.with_tail_order(5.0), 1.0);
  CHECK((head.value + tail.value) / pi ==
        doctest::Approx(zero_point_closed(p).q2).epsilon(1e-9));
  CHECK(tail.value > 0.0);
  CHECK(tail.value < 1e-5 * head.value);
}
