#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qdho/quad.hpp"
#include "qdho/susceptibility.hpp"
#include "qdho/thermo.hpp"

namespace qdho::cli {

enum class Units { Internal, SI };

Units parse_units(const std::string& text);
std::string to_string(Units units);

/// Physical constants (CODATA 2018, exact in the SI).
inline constexpr double kHbar = 1.054571817e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;   // J / K

/// Conversions between SI quantities and units where omega0 = hbar = k_B = 1.
struct UnitSystem {
  double omega0_si = 1.0;  // 1/s

  double frequency_to_internal(double omega_si) const { return omega_si / omega0_si; }
  double frequency_to_si(double omega) const { return omega * omega0_si; }
  /// theta = k_B T / (hbar omega0)
  double temperature_to_theta(double kelvin) const;
  double theta_to_temperature(double theta) const;
  /// <q^2> in J s^2 (unit mass), <Pi^2> and energy in J.
  Observables observables_to_si(const Observables& obs) const;
  Observables observables_to_internal(const Observables& obs) const;
};

/// `gamma2=START:STOP:N`, N >= 1 points including both ends.
struct SweepSpec {
  std::string variable = "gamma2";
  double start = 0.0;
  double stop = 0.0;
  int count = 0;

  std::vector<double> values() const;
};

SweepSpec parse_sweep(const std::string& text);

/// A self-describing CSV artifact.
struct CsvTable {
  std::string config;                 // written as the leading '#' line
  std::vector<std::string> warnings;  // written as '# warning:' lines
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column by name; throws DomainError when absent.
  std::size_t column(const std::string& name) const;
};

/// `#` config line, optional warning lines, header, then rows with 17
/// significant digits.
void write_csv(std::ostream& out, const CsvTable& table);
std::string format_number(double value);

/// Evaluates fn(i) for i in [0, n) on worker threads; results keep index order.
std::vector<Observables> parallel_map(std::size_t n,
                                      const std::function<Observables(std::size_t)>& fn);

/// Zero-point uncertainties along a gamma2 sweep: gamma2, dq, dp, dq_dp.
/// Points violating w0^2 > 2 g1 g2 are skipped with a warning.
CsvTable run_sweep_figure1(double omega0, double gamma1, const SweepSpec& sweep);

/// Oscillator energy along a gamma2 sweep: gamma2, E_T0, then one column
/// E_theta=<t> per temperature.
CsvTable run_sweep_figure2(double omega0, double gamma1, const SweepSpec& sweep,
                           const std::vector<double>& thetas,
                           const QuadratureConfig& cfg = {});

struct CheckItem {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckItem> items;
  bool passed() const;
  std::string to_text() const;
  std::string to_json() const;
};

/// Consistency report: stability margin, pole residuals, closed form against
/// quadrature, Kramers-Kronig against the model, Matsubara against
/// quadrature at `theta`, and (when `table` is given) the table's
/// reconstructed chi against the model.
CheckReport run_check(const ModelParams& p, const std::optional<TabulatedChi>& table = {},
                      double theta = 1.0, const QuadratureConfig& cfg = {});

/// Kramers-Kronig reconstruction on the given frequencies: omega, re_chi,
/// im_chi, re_error, plus re_chi_model when the source is the model.
CsvTable run_kk(const SusceptibilitySource& src, const std::vector<double>& omegas,
                const QuadratureConfig& cfg = {});

/// matplotlib script that plots a figure CSV written by the sweep command.
std::string plot_script(int figure, const std::string& csv_path);

/// Loads a chi table. When `<path>.json` exists its keys override the CLI
/// defaults: "frequency_unit" ("internal" or "si"), "tail_exponent".
TabulatedChi load_table_with_sidecar(const std::filesystem::path& path,
                                     Units default_units, double default_tail_exponent,
                                     const UnitSystem& units);

}  // namespace qdho::cli
