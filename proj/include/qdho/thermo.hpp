#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qdho/quad.hpp"
#include "qdho/response.hpp"
#include "qdho/susceptibility.hpp"

namespace qdho {

/// Temperature in frequency units (theta = k_B T / hbar). Zero temperature is
/// its own variant: the occupation weight is exactly 1 there.
class ThermalState {
 public:
  static ThermalState zero() { return ThermalState(0.0); }
  /// Throws DomainError unless theta > 0 and finite.
  static ThermalState finite(double theta);

  bool is_zero() const { return theta_ == 0.0; }
  /// Throws DomainError at zero temperature.
  double theta() const;
  /// coth(w / 2 theta) for w > 0; 1 at zero temperature.
  double weight(double omega) const;

 private:
  explicit ThermalState(double theta) : theta_(theta) {}
  double theta_;
};

enum class EvaluationPath { Quadrature, ClosedForm, Matsubara, Oracle };

std::string_view to_string(EvaluationPath path);

struct ObservableErrors {
  double q2 = 0.0;
  double pi2 = 0.0;
  double energy = 0.0;
};

/// <q^2> [hbar/omega-unit], <Pi^2> [hbar omega-unit], <H>_q [hbar omega-unit].
struct Observables {
  double q2 = 0.0;
  double pi2 = 0.0;
  double energy = 0.0;
  EvaluationPath path = EvaluationPath::Quadrature;
  ObservableErrors error;
  std::vector<std::string> warnings;

  double delta_q() const;
  double delta_p() const;
  /// Delta q * Delta p; at least 1/2 for any physical state.
  double uncertainty_product() const { return delta_q() * delta_p(); }
};

/// The factor w0^2 (w chi' - chi + 1) + w^2 that multiplies G in the energy.
complex bracket_term(double omega, complex chi, complex dchi, double omega0);

/// Undamped oscillator: (coth/2w0, w0 coth/2, w0 coth/2) with coth = coth(w0/2 theta).
Observables free_oscillator(double omega0, const ThermalState& state);

enum class Moment { Position, Momentum, Energy };

/// Real-axis quadrature of one fluctuation-dissipation integral:
///   Position: (1/pi)    int_0^inf coth(w/2T) Im G dw
///   Momentum: (1/pi)    int_0^inf coth(w/2T) w^2 Im G dw
///   Energy:   (1/2 pi)  int_0^inf coth(w/2T) Im{[w0^2 (w chi' - chi + 1) + w^2] G} dw
/// Model sources get breakpoints at the resonances so narrow peaks are
/// resolved. Throws PoleError for the undamped model (Im G is then a delta
/// function) and NotDiagonalizableError when the stability criterion fails.
Estimate spectral_integral(const SusceptibilitySource& src, Moment moment,
                           const ThermalState& state, const QuadratureConfig& cfg = {});
/// Same, reusing a Green function (and for tabulated sources its
/// Kramers-Kronig table). Tolerances come from g.config(); the stability
/// check is left to the caller.
Estimate spectral_integral(const GreenFunction& g, Moment moment, const ThermalState& state);

/// <q^2>. The undamped model returns the free-oscillator value exactly.
Estimate q2_thermal(const SusceptibilitySource& src, const ThermalState& state,
                    const QuadratureConfig& cfg = {});
/// <Pi^2>. The undamped model returns the free-oscillator value exactly.
Estimate pi2_thermal(const SusceptibilitySource& src, const ThermalState& state,
                     const QuadratureConfig& cfg = {});
/// Mean-force energy <H>_q. Tabulated sources differentiate the
/// reconstructed chi numerically.
Estimate energy_thermal(const SusceptibilitySource& src, const ThermalState& state,
                        const QuadratureConfig& cfg = {});

/// All three integrals, tagged EvaluationPath::Quadrature.
Observables thermal_observables(const SusceptibilitySource& src, const ThermalState& state,
                                const QuadratureConfig& cfg = {});
/// Same, reusing a Green function; stability is not re-checked.
Observables thermal_observables(const GreenFunction& g, const ThermalState& state);

/// Exact zero-temperature observables of the model.
///
/// Evaluates
///   <q^2>  = [(w1^2 + g1^2 - g2^2) S + g2 L] / (pi D)
///   <Pi^2> = {[(w1^2 + g2^2)^2 + g1^2 (w1^2 - g2^2)] S - g1^2 g2 L} / (pi D)
///   <H>_q  = [2 w1^2 S + g1 ln(1 + 2 g2/g1) + g2 ln((g1 + 2 g2)^2 / M)] / (2 pi)
/// with S = arctan(w1/g2)/w1, L = ln(M/g1^2), M = w0^2 - 2 g1 g2 and
/// D = w0^2 + g1^2 - 4 g1 g2. S is even in w1 and is computed from w1^2, so
/// the over-damped branch (artanh) and w1 = 0 (S = 1/g2) come out real.
/// Where this arrangement loses more than three digits to cancellation
/// (D -> 0 when two poles merge, or g2 >> w0) the equivalent pole form
/// below is used instead. Throws NotDiagonalizableError when M <= 0.
Observables zero_point_closed(const ModelParams& p);

/// The same zero-temperature values from the imaginary-axis form
///   <q^2> = (1/pi) int_0^inf (x + a) / prod_k (x + s_k) dx
/// (s_k = i * pole_k), written as divided differences of P(s) log s.
Observables zero_point_pole_form(const ModelParams& p);

/// Divided difference f[x_0, ..., x_n] of f(s) = P(s) log s, with P given by
/// ascending coefficients. Nodes must satisfy Re s > 0. Clusters of nearby
/// nodes are handled with a Taylor expansion about their centroid.
complex log_poly_divided_difference(std::span<const complex> nodes,
                                    std::span<const complex> poly);

/// <q^2> = theta [G(0) + 2 sum_{n>=1} G(i xi_n)], xi_n = 2 pi n theta, with the
/// terms beyond n_max replaced by their integral (midpoint Euler-Maclaurin).
/// The error field holds the truncation estimate.
Estimate q2_matsubara(const ModelParams& p, double theta, long n_max = 1000,
                      const QuadratureConfig& cfg = {});

/// Parameters on the infinite-damping path g1 = w0^2 / (4 g2).
ModelParams infinite_damping_params(double gamma2, double omega0 = 1.0);

/// Leading large-g2 zero-point energy on that path:
///   (w0^2 / 4 pi g2) [1 + 2 ln(2^{3/2} g2 / w0)].
double energy_asymptote(double gamma2, double omega0 = 1.0);

/// Leading large-g2 position uncertainty on that path: 2 sqrt(g2/pi) / w0.
double deltaq_asymptote(double gamma2, double omega0 = 1.0);

}  // namespace qdho
