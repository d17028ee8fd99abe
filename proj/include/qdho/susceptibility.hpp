#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

#include "qdho/quad.hpp"

namespace qdho {

using complex = std::complex<double>;

/// Parameters of the single-pole model susceptibility
///   chi(w) = 2 g2 (g1^2 + w0^2) / (w0^2 (g1 + 2 g2 - i w)).
///
/// All library code works with hbar = k_B = 1 and unit mass, so every field
/// is a frequency in one common unit. Choosing omega0 = 1 gives the
/// dimensionless units used throughout the documentation.
struct ModelParams {
  double omega0 = 1.0;
  double gamma1 = 0.25;
  double gamma2 = 0.0;

  /// Throws DomainError unless omega0 > 0, gamma1 > 0, gamma2 >= 0.
  void validate() const;
  /// K = 2 g2 (g1^2 + w0^2) / w0^2, so chi(w) = K / (a - i w).
  double coupling_strength() const;
  /// a = g1 + 2 g2, the susceptibility pole sits at w = -i a.
  double pole_rate() const;
  /// w0^2 - 2 g1 g2; positive exactly when the coupled system is stable.
  double stability_margin() const;
  bool diagonalizable() const { return stability_margin() > 0.0; }
  /// validate() plus a NotDiagonalizableError when stability_margin() <= 0.
  void require_diagonalizable() const;
};

/// Measured Im chi on a frequency grid.
///
/// Between grid points Im chi is a monotone cubic (Fritsch-Carlson) interpolant.
/// Below the first point it is continued linearly to zero at w = 0 (Im chi is
/// odd in w); above the last point it decays as c / w^tail_exponent.
class TabulatedChi {
 public:
  TabulatedChi(std::vector<double> grid, std::vector<double> im_chi,
               double tail_exponent, double omega0);

  double im_chi(double omega) const;
  double omega0() const { return omega0_; }
  double tail_exponent() const { return tail_exponent_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  double tail_exponent_;
  double omega0_;
};

using SusceptibilitySource = std::variant<ModelParams, TabulatedChi>;

double omega0_of(const SusceptibilitySource& src);
/// Largest intrinsic frequency of the source (sets quadrature cutoffs).
double frequency_scale(const SusceptibilitySource& src);
/// Power-law decay exponent of Im chi at large frequency.
double im_chi_decay(const SusceptibilitySource& src);
/// True when the source is the model with gamma2 == 0 (chi identically zero).
bool is_undamped(const SusceptibilitySource& src);

/// Model susceptibility at complex frequency. Throws PoleError at w = -i a.
complex chi_model(complex omega, const ModelParams& p);
/// d chi / d w = i chi / (a - i w) for the model.
complex dchi_model(complex omega, const ModelParams& p);

/// Im chi at real frequency omega >= 0 for either source.
double im_chi(double omega, const SusceptibilitySource& src);

/// alpha(w) = w0 sqrt(2 w Im chi(w) / pi).
/// Throws PassivityError when Im chi(w) < 0, DomainError when w < 0.
double coupling_alpha(double omega, const SusceptibilitySource& src);
/// Closed form of alpha(w) for the model source.
double coupling_alpha_model(double omega, const ModelParams& p);

struct KramersKronig {
  complex chi;
  double error = 0.0;
};

/// Full chi(w) rebuilt from Im chi alone:
///   w0^2 chi(w) = P int_0^inf alpha^2(x) / (x^2 - w^2) dx + i pi alpha^2(w) / (2 w).
/// The principal value is regularised by subtracting alpha^2(w) from the
/// numerator (P int_0^inf dx / (x^2 - w^2) = 0). omega = 0 gives Re chi(0).
/// Throws DivergenceError when Im chi does not decay (exponent <= 0).
KramersKronig kk_reconstruct(double omega, const SusceptibilitySource& src,
                             const QuadratureConfig& cfg = {});

/// Re chi of a tabulated source, rebuilt once by Kramers-Kronig on a node
/// set and then interpolated. Quadratures over a tabulated source would
/// otherwise nest one Kramers-Kronig integral inside every integrand call.
///
/// Nodes are w = 0, the table grid refined to at most 5% spacing in log w,
/// three decades below the grid, and an extension to 100x past both the grid
/// end and the integration cutoff. Between nodes Re chi is a cubic Hermite
/// curve in log w; below the first node it is quadratic in w; past the last
/// node it follows the power law through the last two nodes.
class DispersionTable {
 public:
  DispersionTable(const TabulatedChi& table, const QuadratureConfig& cfg = {});

  /// Re chi(|w|).
  double re_chi(double omega) const;
  /// Largest quadrature error estimate over the nodes.
  double max_error() const { return max_error_; }
  /// ln w at every node past w = 0.
  const std::vector<double>& log_nodes() const { return log_nodes_; }

 private:
  double re_zero_;
  std::vector<double> log_nodes_;  // ln w
  std::vector<double> values_;
  std::vector<double> slopes_;     // d Re chi / d ln w
  double tail_exponent_ = 2.0;
  double max_error_ = 0.0;
};

struct DiagonalizabilityReport {
  bool diagonalizable = false;
  /// int_0^inf alpha^2(x) / x^2 dx; +inf when divergent.
  double integral = 0.0;
  /// omega0^2 - integral.
  double margin = 0.0;
  /// omega0^2 - 2 g1 g2 for model sources; same sign as `margin`.
  std::optional<double> reduced_margin;
};

/// Sufficient condition for normal-mode diagonalisation:
///   omega0^2 > int_0^inf alpha^2(x) / x^2 dx.
/// Closed form for the model (the integral equals w0^2 chi(0)), quadrature
/// for tabulated data. A divergent integral reports "not diagonalizable".
DiagonalizabilityReport check_diagonalizable(const SusceptibilitySource& src,
                                             const QuadratureConfig& cfg = {});

/// Quadrature of int_0^inf alpha^2(x) / x^2 dx for any source.
Estimate coupling_integral(const SusceptibilitySource& src, const QuadratureConfig& cfg = {});

/// Samples the model's Im chi on `grid` (tail exponent 1).
TabulatedChi tabulate_model(const ModelParams& p, std::vector<double> grid);

/// Reads a two-column CSV `omega,im_chi` with a header line. Frequencies are
/// multiplied by `frequency_scale` on the way in.
TabulatedChi load_chi_table(const std::filesystem::path& path, double tail_exponent,
                            double omega0, double frequency_scale = 1.0);

}  // namespace qdho
