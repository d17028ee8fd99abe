// qdho: command-line front end for the damped-oscillator library.
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "qdho/cli.hpp"
#include "qdho/errors.hpp"
#include "qdho/oracle.hpp"
#include "qdho/response.hpp"
#include "qdho/thermo.hpp"

using namespace qdho;
using namespace qdho::cli;

namespace {

struct Options {
  std::optional<double> omega0;
  std::optional<double> gamma1;
  double gamma2 = 0.0;
  std::vector<double> theta;
  std::string sweep = "gamma2=0:2:41";
  std::string units = "internal";
  std::string out;
  std::string chi_table;
  std::string table_units;
  double tail_exponent = 2.0;
  double tol = 1e-10;
  int figure = 1;
  std::string plot_script;
  std::size_t modes = 1000;
  double omega_max = 100.0;
  std::string spacing = "uniform";
  std::string omegas = "0.1:3:30";
  bool json = false;
};

// Everything the numeric core needs, already converted to internal units.
struct Resolved {
  Units units = Units::Internal;
  UnitSystem system;
  ModelParams params;
  std::optional<TabulatedChi> table;
  QuadratureConfig cfg;

  SusceptibilitySource source() const {
    if (table) return *table;
    return params;
  }
};

Resolved resolve(const Options& o) {
  Resolved r;
  r.units = parse_units(o.units);
  r.cfg.rel_tol = o.tol;
  r.cfg.validate();
  if (r.units == Units::SI) {
    const double w0 = o.omega0.value_or(1e10);
    if (!(w0 > 0.0)) throw DomainError("--omega0 must be > 0 (1/s in SI mode)");
    r.system.omega0_si = w0;
    r.params = {1.0, o.gamma1.value_or(0.25 * w0) / w0, o.gamma2 / w0};
  } else {
    const double w0 = o.omega0.value_or(1.0);
    r.params = {w0, o.gamma1.value_or(0.25 * w0), o.gamma2};
  }
  r.params.validate();
  if (!o.chi_table.empty()) {
    const Units table_units = o.table_units.empty() ? r.units : parse_units(o.table_units);
    r.table = load_table_with_sidecar(o.chi_table, table_units, o.tail_exponent, r.system);
    if (r.units == Units::Internal && r.params.omega0 != 1.0) {
      // tables carry their own omega0; rebuild with the requested one
      r.table = TabulatedChi(r.table->grid(), r.table->values(), r.table->tail_exponent(),
                             r.params.omega0);
    }
  }
  return r;
}

// Temperatures in internal units; SI temperatures are kelvin.
std::vector<double> thetas(const Options& o, const Resolved& r) {
  std::vector<double> out;
  for (double t : o.theta) {
    out.push_back(r.units == Units::SI ? r.system.temperature_to_theta(t) : t);
  }
  return out;
}

ThermalState state_for(double theta) {
  return theta == 0.0 ? ThermalState::zero() : ThermalState::finite(theta);
}

std::string base_config(const std::string& command, const Options& o, const Resolved& r) {
  std::ostringstream os;
  os << "command=" << command << " units=" << o.units;
  if (r.units == Units::SI) os << " omega0_si=" << format_number(r.system.omega0_si);
  if (r.table) {
    os << " chi_table=" << o.chi_table << " tail_exponent=" << format_number(r.table->tail_exponent());
  } else {
    os << " omega0=" << format_number(r.params.omega0) << " gamma1=" << format_number(r.params.gamma1)
       << " gamma2=" << format_number(r.params.gamma2);
  }
  os << " rel_tol=" << format_number(r.cfg.rel_tol);
  return os.str();
}

void emit(const Options& o, const CsvTable& table) {
  if (o.out.empty()) {
    write_csv(std::cout, table);
    return;
  }
  std::ofstream file(o.out);
  if (!file) throw DomainError("cannot open " + o.out + " for writing");
  write_csv(file, table);
}

void observables_row(CsvTable& table, double theta, Observables obs, const Resolved& r) {
  if (r.units == Units::SI) obs = r.system.observables_to_si(obs);
  const double t = r.units == Units::SI ? r.system.theta_to_temperature(theta) : theta;
  table.rows.push_back({t, obs.q2, obs.pi2, obs.energy, obs.delta_q(), obs.delta_p(),
                        obs.uncertainty_product(), obs.error.q2, obs.error.pi2,
                        obs.error.energy});
  for (const auto& w : obs.warnings) {
    if (std::find(table.warnings.begin(), table.warnings.end(), w) == table.warnings.end()) {
      table.warnings.push_back(w);
    }
  }
}

const std::vector<std::string> kObservableColumns = {
    "theta", "q2", "pi2", "energy", "dq", "dp", "dq_dp", "err_q2", "err_pi2", "err_energy"};

int cmd_zero_point(const Options& o) {
  const Resolved r = resolve(o);
  CsvTable table;
  table.columns = kObservableColumns;
  Observables obs;
  if (r.table) {
    obs = thermal_observables(r.source(), ThermalState::zero(), r.cfg);
  } else {
    r.params.require_diagonalizable();
    obs = zero_point_closed(r.params);
  }
  table.config = base_config("zero-point", o, r) + " path=" + std::string(to_string(obs.path));
  observables_row(table, 0.0, obs, r);
  emit(o, table);
  return 0;
}

int cmd_thermal(const Options& o) {
  const Resolved r = resolve(o);
  std::vector<double> ts = thetas(o, r);
  if (ts.empty()) throw DomainError("thermal needs --theta");
  CsvTable table;
  table.columns = kObservableColumns;
  table.config = base_config("thermal", o, r) + " path=quadrature";
  const SusceptibilitySource src = r.source();
  if (!check_diagonalizable(src, r.cfg).diagonalizable) {
    throw NotDiagonalizableError("stability criterion omega0^2 > int alpha^2/x^2 fails");
  }
  const GreenFunction g(src, r.cfg);
  const auto results = parallel_map(ts.size(), [&](std::size_t i) {
    return thermal_observables(g, state_for(ts[i]));
  });
  for (std::size_t i = 0; i < ts.size(); ++i) observables_row(table, ts[i], results[i], r);
  emit(o, table);
  return 0;
}

int cmd_sweep(const Options& o) {
  const Resolved r = resolve(o);
  if (r.table) throw DomainError("sweep runs on the model; drop --chi-table");
  SweepSpec spec = parse_sweep(o.sweep);
  if (r.units == Units::SI) {
    spec.start /= r.system.omega0_si;
    spec.stop /= r.system.omega0_si;
  }
  CsvTable table;
  if (o.figure == 1) {
    table = run_sweep_figure1(r.params.omega0, r.params.gamma1, spec);
  } else {
    std::vector<double> ts = thetas(o, r);
    if (ts.empty()) ts = {1.0};
    table = run_sweep_figure2(r.params.omega0, r.params.gamma1, spec, ts, r.cfg);
  }
  if (r.units == Units::SI) table.config += " (values in internal units; omega0_si=" +
                                            format_number(r.system.omega0_si) + ")";
  emit(o, table);
  if (!o.plot_script.empty()) {
    std::ofstream script(o.plot_script);
    if (!script) throw DomainError("cannot open " + o.plot_script + " for writing");
    script << plot_script(o.figure, o.out.empty() ? "sweep.csv" : o.out);
  }
  return 0;
}

int cmd_kk(const Options& o) {
  const Resolved r = resolve(o);
  // --omegas START:STOP:N reuses the sweep grammar
  SweepSpec grid = parse_sweep("gamma2=" + o.omegas);
  std::vector<double> omegas = grid.values();
  if (r.units == Units::SI) {
    for (double& w : omegas) w = r.system.frequency_to_internal(w);
  }
  CsvTable table = run_kk(r.source(), omegas, r.cfg);
  if (r.units == Units::SI) {
    for (auto& row : table.rows) row[0] = r.system.frequency_to_si(row[0]);
  }
  table.config = base_config("kk", o, r);
  emit(o, table);
  return 0;
}

int cmd_oracle(const Options& o) {
  const Resolved r = resolve(o);
  std::vector<double> ts = thetas(o, r);
  if (ts.empty()) ts = {0.0};
  if (o.spacing != "uniform" && o.spacing != "log") {
    throw DomainError("--spacing must be uniform or log");
  }
  const Spacing spacing = o.spacing == "log" ? Spacing::Log : Spacing::Uniform;
  const double omega_max =
      r.units == Units::SI ? r.system.frequency_to_internal(o.omega_max) : o.omega_max;
  const DiscreteSystem sys = build_hamiltonian(r.source(), o.modes, omega_max, spacing);
  const NormalModes modes = normal_modes(sys);

  CsvTable table;
  table.columns = kObservableColumns;
  table.columns.push_back("hmf_residual");
  table.config = base_config("oracle", o, r) + " modes=" + std::to_string(o.modes) +
                 " omega_max=" + format_number(omega_max) + " spacing=" + o.spacing;
  for (double t : ts) {
    observables_row(table, t, thermal_observables_discrete(sys, modes, state_for(t)), r);
    table.rows.back().push_back(t > 0.0 ? hmf_partition_identity(sys, t).residual : 0.0);
  }
  emit(o, table);
  return 0;
}

int cmd_check(const Options& o) {
  const Resolved r = resolve(o);
  const double theta = o.theta.empty() ? 1.0 : thetas(o, r).front();
  const CheckReport report = run_check(r.params, r.table, theta, r.cfg);
  const std::string text = o.json ? report.to_json() + "\n" : report.to_text();
  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream(o.out) << text;
  }
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermal and zero-point observables of a damped quantum oscillator"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;

  app.add_option("--omega0", o.omega0, "Bare frequency (1/s with --units si; default 1 or 1e10)");
  app.add_option("--gamma1", o.gamma1, "Damping constant gamma1 (default omega0/4)");
  app.add_option("--gamma2", o.gamma2, "Damping constant gamma2")->capture_default_str();
  app.add_option("--theta", o.theta, "Temperature(s): k_B T / hbar omega0, or kelvin in SI mode")
      ->delimiter(',');
  app.add_option("--units", o.units, "internal or si")
      ->check(CLI::IsMember({"internal", "si"}))
      ->capture_default_str();
  app.add_option("--out", o.out, "Output file (default stdout)");
  app.add_option("--chi-table", o.chi_table, "CSV with columns omega,im_chi");
  app.add_option("--table-units", o.table_units,
                 "Frequency unit of the table when no sidecar says otherwise");
  app.add_option("--tail-exponent", o.tail_exponent, "Im chi ~ c / omega^P beyond the table")
      ->capture_default_str();
  app.add_option("--tol", o.tol, "Relative quadrature tolerance")->capture_default_str();

  auto* zero = app.add_subcommand("zero-point", "T = 0 observables");
  auto* thermal = app.add_subcommand("thermal", "Observables at --theta by quadrature");
  auto* sweep = app.add_subcommand("sweep", "Figure sweeps over gamma2");
  sweep->add_option("--sweep", o.sweep, "gamma2=START:STOP:N")->capture_default_str();
  sweep->add_option("--figure", o.figure, "1: uncertainties, 2: energies")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  sweep->add_option("--plot-script", o.plot_script, "Write a matplotlib script here");
  auto* kk = app.add_subcommand("kk", "Kramers-Kronig reconstruction of chi");
  kk->add_option("--omegas", o.omegas, "START:STOP:N")->capture_default_str();
  auto* oracle = app.add_subcommand("oracle", "Discrete-reservoir normal-mode oracle");
  oracle->add_option("--modes", o.modes, "Reservoir modes N")->capture_default_str();
  oracle->add_option("--omega-max", o.omega_max, "Reservoir cutoff")->capture_default_str();
  oracle->add_option("--spacing", o.spacing, "uniform or log")->capture_default_str();
  auto* check = app.add_subcommand("check", "Consistency report; nonzero exit on failure");
  check->add_flag("--json", o.json, "Machine-readable report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (zero->parsed()) return cmd_zero_point(o);
    if (thermal->parsed()) return cmd_thermal(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (kk->parsed()) return cmd_kk(o);
    if (oracle->parsed()) return cmd_oracle(o);
    if (check->parsed()) return cmd_check(o);
  } catch (const qdho::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
