#pragma once

#include <cstddef>
#include <functional>

namespace qdho {

/// Tolerances and cutoff settings shared by every integral in the library.
struct QuadratureConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  std::size_t max_subdivisions = 4000;
  /// Finite part of a semi-infinite integral ends at cutoff_factor * scale.
  double cutoff_factor = 50.0;
  /// Declared power-law decay of the integrand; 0 means "not declared".
  double tail_order = 0.0;

  /// Throws DomainError when a field is out of range.
  void validate() const;
  QuadratureConfig with_tail_order(double order) const {
    QuadratureConfig c = *this;
    c.tail_order = order;
    return c;
  }
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

/// Power-law fit f(x) ~ amplitude * x^(-exponent).
struct TailFit {
  double exponent = 0.0;
  double amplitude = 0.0;
  bool valid = false;
};

using RealFunction = std::function<double(double)>;

/// Globally adaptive 21-point Gauss-Kronrod quadrature on [a, b]. Stops when
/// the error estimate meets max(abs_tol, rel_tol |I|) or falls to the
/// roundoff level 100 eps int|f|. Throws ToleranceError (carrying the best estimate) when the subdivision
/// budget runs out, DomainError when the integrand is not finite.
Estimate integrate_adaptive(const RealFunction& f, double a, double b,
                            const QuadratureConfig& cfg = {});

/// Integral over [a, inf).
///
/// The range is split at cutoff = max(a, 0) + cfg.cutoff_factor * scale.
/// The head is integrated adaptively; the tail is mapped onto (0, 1] with
/// x = cutoff / t and integrated the same way. A least-squares power-law
/// fit over the last decade before the cutoff is checked against
/// cfg.tail_order (20% tolerance) and against integrability (exponent > 1).
Estimate integrate_semi_infinite(const RealFunction& f, double a,
                                 const QuadratureConfig& cfg = {},
                                 double scale = 1.0);

/// Least-squares fit of log|f| against log x on a log grid in [lo, hi].
/// Invalid when f vanishes or changes sign on the grid.
TailFit fit_power_law_tail(const RealFunction& f, double lo, double hi,
                           int points = 9);

/// Cauchy principal value of the integral of f over [a, b] where f has a
/// simple pole at `pole` in (a, b).
///
/// The symmetric window [pole - d, pole + d], d = min(pole - a, b - pole),
/// is folded onto [0, d] so the odd singular part cancels exactly; the
/// remainder of the interval is integrated directly.
Estimate integrate_principal_value(const RealFunction& f, double pole,
                                   double a, double b,
                                   const QuadratureConfig& cfg = {});

/// Sum of term(n) for n = first..last plus the remainder n > last,
/// approximated by the midpoint Euler-Maclaurin formula
///   sum_{n>N} f(n) ~ int_{N+1/2}^inf f + f'(N+1/2)/24.
/// `term` must accept real arguments and decay at least like cfg.tail_order.
/// The error field holds the size of the Euler-Maclaurin correction plus the
/// quadrature error of the tail integral.
Estimate sum_with_integral_tail(const RealFunction& term, long first,
                                long last, const QuadratureConfig& cfg = {});

}  // namespace qdho
