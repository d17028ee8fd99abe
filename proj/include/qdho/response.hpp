#pragma once

#include <array>
#include <complex>
#include <memory>

#include "qdho/quad.hpp"
#include "qdho/susceptibility.hpp"

namespace qdho {

/// Oscillator response G(w) = -1 / (w^2 - w0^2 [1 - chi(w)]).
///
/// Model sources are evaluated anywhere in the complex plane. Tabulated
/// sources only on the real axis, with Re chi rebuilt by Kramers-Kronig once
/// at construction (see DispersionTable).
class GreenFunction {
 public:
  explicit GreenFunction(SusceptibilitySource src, QuadratureConfig cfg = {});

  const SusceptibilitySource& source() const { return src_; }
  const QuadratureConfig& config() const { return cfg_; }
  double omega0() const { return omega0_of(src_); }
  /// Re chi table of a tabulated source; null for the model.
  const DispersionTable* dispersion() const { return dispersion_.get(); }

  /// chi at real frequency (either sign).
  complex chi(double omega) const;
  /// chi at complex frequency; model sources only.
  complex chi(complex omega) const;
  /// d chi / d w at real frequency. Tabulated sources use a centred
  /// difference of the reconstructed chi with step `relative_step * |w|`.
  complex dchi(double omega, double relative_step = 1e-4) const;

  /// -1/G(w) = w^2 - w0^2 (1 - chi(w)).
  complex denominator(complex omega) const;

  /// Throws PoleError when omega coincides with a pole.
  complex operator()(complex omega) const;
  complex operator()(double omega) const { return (*this)(complex(omega, 0.0)); }

  /// Im G(w) = w0^2 Im chi(w) / |w^2 - w0^2 (1 - chi(w))|^2, real w.
  double im(double omega) const;

 private:
  SusceptibilitySource src_;
  QuadratureConfig cfg_;
  std::shared_ptr<const DispersionTable> dispersion_;
};

complex green(complex omega, const GreenFunction& g);

/// Poles of G for the model susceptibility.
struct PoleSet {
  /// {-i g1, -i g2 + w1, -i g2 - w1}
  std::array<complex, 3> poles;
  /// Principal root of w0^2 - g2 (2 g1 + g2); on the positive imaginary axis
  /// in the over-damped case.
  complex omega1;
  bool overdamped = false;
};

PoleSet model_poles(const ModelParams& p);

struct PoleVerification {
  std::array<complex, 3> refined;
  /// max |refined - analytic|
  double max_residual = 0.0;
  /// max |w^2 - w0^2 (1 - chi(w))| over the analytic poles that are zeros of
  /// 1/G (a pole cancelled by the pole of chi, possible only at g2 = 0, is skipped).
  double max_inverse_green = 0.0;
  int iterations = 0;
};

/// Newton refinement of the zeros of 1/G in the lower half plane, started
/// from the analytic poles shifted by 1e-3 of the frequency scale. The
/// iteration runs on (a - i w) / G(w), a cubic with exactly the three poles
/// as roots. Throws ConvergenceError when an iteration stalls.
PoleVerification verify_poles(const ModelParams& p);

}  // namespace qdho
