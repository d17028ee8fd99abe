#pragma once
// Test-only reference tools. Nothing here calls into the library's numerics,
// so agreement with it is a genuine cross-check.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

namespace ref {

using cd = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

struct Result {
  double value;
  double change;  // |I(h) - I(2h)|
};

// Double-exponential rule on [a, inf): x = a + exp(pi/2 sinh t).
inline Result exp_sinh(const std::function<double(double)>& f, double a, double h = 1.0 / 64) {
  const auto at_step = [&](double step) {
    double sum = 0.0;
    for (double t = -4.5; t <= 4.5; t += step) {
      const double e = std::exp(0.5 * pi * std::sinh(t));
      const double x = a + e;
      const double w = 0.5 * pi * std::cosh(t) * e;
      if (!std::isfinite(x) || !std::isfinite(w) || x == a) continue;
      const double fx = f(x);
      if (std::isfinite(fx)) sum += w * fx;
    }
    return sum * step;
  };
  const double fine = at_step(h);
  const double coarse = at_step(2.0 * h);
  return {fine, std::abs(fine - coarse)};
}

// Double-exponential rule on [a, b]: x = c + r tanh(pi/2 sinh t).
inline Result tanh_sinh(const std::function<double(double)>& f, double a, double b,
                        double h = 1.0 / 64) {
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const auto at_step = [&](double step) {
    double sum = 0.0;
    for (double t = -3.5; t <= 3.5; t += step) {
      const double s = 0.5 * pi * std::sinh(t);
      const double ch = std::cosh(s);
      const double x = c + r * std::tanh(s);
      const double w = r * 0.5 * pi * std::cosh(t) / (ch * ch);
      if (x <= a || x >= b) continue;
      sum += w * f(x);
    }
    return sum * step;
  };
  const double fine = at_step(h);
  const double coarse = at_step(2.0 * h);
  return {fine, std::abs(fine - coarse)};
}

// The model written out from scratch: chi = K / (a - i w).
struct Model {
  double w0, g1, g2;
  double K() const { return 2.0 * g2 * (g1 * g1 + w0 * w0) / (w0 * w0); }
  double a() const { return g1 + 2.0 * g2; }
  cd chi(cd w) const { return K() / (a() - cd(0, 1) * w); }
  cd G(cd w) const { return -1.0 / (w * w - w0 * w0 * (1.0 - chi(w))); }
  double imG(double w) const { return G(cd(w, 0)).imag(); }
  // Im{[w0^2 (w chi' - chi + 1) + w^2] G}, chi' = i chi / (a - i w)
  double energy_density(double w) const {
    const cd c = chi(cd(w, 0));
    const cd dc = cd(0, 1) * c / (a() - cd(0, 1) * w);
    const cd b = w0 * w0 * (w * dc - c + 1.0) + w * w;
    return (b * G(cd(w, 0))).imag();
  }
};

inline double coth(double x) { return 1.0 / std::tanh(x); }

// Thermal (or T = 0 when theta == 0) observables by double-exponential
// quadrature of the fluctuation-dissipation integrals.
struct Triple {
  double q2, pi2, energy;
};

inline Triple observables(const Model& m, double theta) {
  const auto weight = [&](double w) { return theta == 0.0 ? 1.0 : coth(w / (2.0 * theta)); };
  const auto q = exp_sinh([&](double w) { return weight(w) * m.imG(w); }, 0.0);
  const auto p = exp_sinh([&](double w) { return weight(w) * w * w * m.imG(w); }, 0.0);
  const auto e = exp_sinh([&](double w) { return weight(w) * m.energy_density(w); }, 0.0);
  return {q.value / pi, p.value / pi, e.value / (2.0 * pi)};
}

}  // namespace ref
