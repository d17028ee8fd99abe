#include "qdho/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qdho/errors.hpp"
#include "qdho/response.hpp"

namespace qdho::cli {

Units parse_units(const std::string& text) {
  if (text == "internal") return Units::Internal;
  if (text == "si") return Units::SI;
  throw DomainError("units must be 'internal' or 'si', got '" + text + "'");
}

std::string to_string(Units units) { return units == Units::SI ? "si" : "internal"; }

double UnitSystem::temperature_to_theta(double kelvin) const {
  return kBoltzmann * kelvin / (kHbar * omega0_si);
}

double UnitSystem::theta_to_temperature(double theta) const {
  return theta * kHbar * omega0_si / kBoltzmann;
}

Observables UnitSystem::observables_to_si(const Observables& obs) const {
  Observables out = obs;
  const double length2 = kHbar / omega0_si;
  const double energy = kHbar * omega0_si;
  out.q2 *= length2;
  out.pi2 *= energy;
  out.energy *= energy;
  out.error = {obs.error.q2 * length2, obs.error.pi2 * energy, obs.error.energy * energy};
  return out;
}

Observables UnitSystem::observables_to_internal(const Observables& obs) const {
  Observables out = obs;
  const double length2 = kHbar / omega0_si;
  const double energy = kHbar * omega0_si;
  out.q2 /= length2;
  out.pi2 /= energy;
  out.energy /= energy;
  out.error = {obs.error.q2 / length2, obs.error.pi2 / energy, obs.error.energy / energy};
  return out;
}

// ---------------------------------------------------------------- sweeps

std::vector<double> SweepSpec::values() const {
  if (count < 1) throw DomainError("sweep needs at least one point");
  if (count == 1) return {start};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = start + (stop - start) * i / (count - 1);
  }
  out.back() = stop;
  return out;
}

SweepSpec parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw DomainError("sweep must look like gamma2=START:STOP:N");
  SweepSpec spec;
  spec.variable = text.substr(0, eq);
  if (spec.variable != "gamma2") {
    throw DomainError("only gamma2 can be swept, got '" + spec.variable + "'");
  }
  std::stringstream rest(text.substr(eq + 1));
  std::string start, stop, count;
  if (!std::getline(rest, start, ':') || !std::getline(rest, stop, ':') ||
      !std::getline(rest, count) || count.find(':') != std::string::npos) {
    throw DomainError("sweep must look like gamma2=START:STOP:N");
  }
  try {
    spec.start = std::stod(start);
    spec.stop = std::stod(stop);
    spec.count = std::stoi(count);
  } catch (const std::logic_error&) {
    throw DomainError("sweep bounds must be numbers: '" + text + "'");
  }
  if (spec.count < 1) throw DomainError("sweep needs at least one point");
  if (spec.count > 1 && !(spec.stop > spec.start)) {
    throw DomainError("sweep range is empty: STOP must exceed START");
  }
  return spec;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw DomainError("no column named " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  out << "# " << table.config << '\n';
  for (const std::string& w : table.warnings) out << "# warning: " << w << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

std::vector<Observables> parallel_map(std::size_t n,
                                      const std::function<Observables(std::size_t)>& fn) {
  std::vector<Observables> results(n);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> jobs;
  jobs.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) results[i] = fn(i);
    }));
  }
  // get() rethrows the first failure in worker order
  for (auto& job : jobs) job.get();
  return results;
}

namespace {

std::string sweep_text(const SweepSpec& s) {
  std::ostringstream os;
  os << s.variable << '=' << format_number(s.start) << ':' << format_number(s.stop) << ':'
     << s.count;
  return os.str();
}

struct ValidPoints {
  std::vector<double> gamma2;
  std::vector<std::string> warnings;
};

ValidPoints valid_points(double omega0, double gamma1, const SweepSpec& sweep) {
  ValidPoints out;
  for (double g2 : sweep.values()) {
    const ModelParams p{omega0, gamma1, g2};
    p.validate();
    if (p.diagonalizable()) {
      out.gamma2.push_back(g2);
    } else {
      out.warnings.push_back("gamma2=" + format_number(g2) +
                             " violates omega0^2 > 2 gamma1 gamma2; row skipped");
    }
  }
  return out;
}

}  // namespace

CsvTable run_sweep_figure1(double omega0, double gamma1, const SweepSpec& sweep) {
  const ValidPoints points = valid_points(omega0, gamma1, sweep);
  const auto obs = parallel_map(points.gamma2.size(), [&](std::size_t i) {
    return zero_point_closed(ModelParams{omega0, gamma1, points.gamma2[i]});
  });
  CsvTable table;
  table.config = "command=sweep figure=1 omega0=" + format_number(omega0) +
                 " gamma1=" + format_number(gamma1) + " sweep=" + sweep_text(sweep) +
                 " temperature=0 units=internal";
  table.warnings = points.warnings;
  table.columns = {"gamma2", "dq", "dp", "dq_dp"};
  for (std::size_t i = 0; i < obs.size(); ++i) {
    table.rows.push_back({points.gamma2[i], obs[i].delta_q(), obs[i].delta_p(),
                          obs[i].uncertainty_product()});
  }
  return table;
}

CsvTable run_sweep_figure2(double omega0, double gamma1, const SweepSpec& sweep,
                           const std::vector<double>& thetas, const QuadratureConfig& cfg) {
  const ValidPoints points = valid_points(omega0, gamma1, sweep);
  const std::size_t per_row = thetas.size() + 1;
  const std::size_t jobs = points.gamma2.size() * per_row;
  const auto energies = parallel_map(jobs, [&](std::size_t k) {
    const ModelParams p{omega0, gamma1, points.gamma2[k / per_row]};
    const std::size_t column = k % per_row;
    Observables o;
    if (column == 0) {
      o.energy = zero_point_closed(p).energy;
    } else {
      o.energy = energy_thermal(p, ThermalState::finite(thetas[column - 1]), cfg).value;
    }
    return o;
  });

  CsvTable table;
  std::string theta_text;
  for (double t : thetas) theta_text += (theta_text.empty() ? "" : ",") + format_number(t);
  table.config = "command=sweep figure=2 omega0=" + format_number(omega0) +
                 " gamma1=" + format_number(gamma1) + " sweep=" + sweep_text(sweep) +
                 " thetas=" + theta_text + " rel_tol=" + format_number(cfg.rel_tol) +
                 " units=internal";
  table.warnings = points.warnings;
  table.columns = {"gamma2", "E_T0"};
  for (double t : thetas) table.columns.push_back("E_theta=" + format_number(t));
  for (std::size_t i = 0; i < points.gamma2.size(); ++i) {
    std::vector<double> row{points.gamma2[i]};
    for (std::size_t c = 0; c < per_row; ++c) row.push_back(energies[i * per_row + c].energy);
    table.rows.push_back(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------- check

bool CheckReport::passed() const {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& c) { return c.passed; });
}

std::string CheckReport::to_text() const {
  std::ostringstream os;
  for (const CheckItem& c : items) {
    os << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << format_number(c.value);
    if (c.threshold != 0.0) os << " (threshold " << format_number(c.threshold) << ")";
    if (!c.detail.empty()) os << " - " << c.detail;
    os << '\n';
  }
  os << (passed() ? "all checks passed" : "some checks FAILED") << '\n';
  return os.str();
}

std::string CheckReport::to_json() const {
  nlohmann::json j;
  j["passed"] = passed();
  j["checks"] = nlohmann::json::array();
  for (const CheckItem& c : items) {
    j["checks"].push_back({{"name", c.name},
                           {"value", c.value},
                           {"threshold", c.threshold},
                           {"passed", c.passed},
                           {"detail", c.detail}});
  }
  return j.dump(2);
}

namespace {

double relative_difference(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

CheckItem below(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value, threshold, value < threshold, std::move(detail)};
}

}  // namespace

CheckReport run_check(const ModelParams& p, const std::optional<TabulatedChi>& table,
                      double theta, const QuadratureConfig& cfg) {
  CheckReport report;
  p.validate();
  const SusceptibilitySource src = p;
  const DiagonalizabilityReport diag = check_diagonalizable(src, cfg);
  report.items.push_back({"stability margin omega0^2 - 2 gamma1 gamma2", *diag.reduced_margin,
                          0.0, diag.diagonalizable,
                          diag.diagonalizable ? "diagonalizable"
                                              : "omega0^2 > 2 gamma1 gamma2 violated"});
  if (!diag.diagonalizable) return report;

  try {
    const PoleVerification poles = verify_poles(p);
    report.items.push_back(below("pole residual |newton - analytic|", poles.max_residual,
                                 1e-10 * p.omega0 * p.omega0));
  } catch (const Error& e) {
    report.items.push_back({"pole residual |newton - analytic|", 0.0, 1e-10 * p.omega0 * p.omega0, false,
                            e.what()});
  }

  if (p.gamma2 > 0.0) {
    const Observables closed = zero_point_closed(p);
    const Observables quad = thermal_observables(src, ThermalState::zero(), cfg);
    report.items.push_back(
        below("T=0 <q^2> closed form vs quadrature", relative_difference(closed.q2, quad.q2), 1e-8));
    report.items.push_back(below("T=0 <Pi^2> closed form vs quadrature",
                                 relative_difference(closed.pi2, quad.pi2), 1e-8));
    report.items.push_back(below("T=0 energy closed form vs quadrature",
                                 relative_difference(closed.energy, quad.energy), 1e-8));
    report.items.push_back({"uncertainty product dq*dp", closed.uncertainty_product(), 0.5,
                            closed.uncertainty_product() >= 0.5, ">= 1/2"});

    const complex exact = chi_model(p.omega0, p);
    const KramersKronig kk = kk_reconstruct(p.omega0, src, cfg);
    report.items.push_back(below("Kramers-Kronig Re chi(omega0) vs model",
                                 std::abs(kk.chi.real() - exact.real()) / std::abs(exact), 1e-6));

    const Estimate mats = q2_matsubara(p, theta, 1000, cfg);
    const Estimate q2 = q2_thermal(src, ThermalState::finite(theta), cfg);
    report.items.push_back(below("<q^2> Matsubara vs quadrature at theta=" + format_number(theta),
                                 relative_difference(mats.value, q2.value), 1e-6));
  }

  if (table) {
    const SusceptibilitySource tab = *table;
    double worst = 0.0;
    for (double f : {0.5, 1.0, 2.0}) {
      const double w = f * p.omega0;
      const complex exact = chi_model(w, p);
      const complex rebuilt = kk_reconstruct(w, tab, cfg).chi;
      worst = std::max(worst, std::abs(rebuilt - exact) / std::abs(exact));
    }
    report.items.push_back(below("table chi (Kramers-Kronig) vs model", worst, 1e-4,
                                 "at omega0/2, omega0, 2 omega0"));
  }
  return report;
}

CsvTable run_kk(const SusceptibilitySource& src, const std::vector<double>& omegas,
                const QuadratureConfig& cfg) {
  CsvTable table;
  const bool model = std::holds_alternative<ModelParams>(src);
  table.config = std::string("command=kk source=") + (model ? "model" : "table") +
                 " omega0=" + format_number(omega0_of(src)) +
                 " rel_tol=" + format_number(cfg.rel_tol) + " units=internal";
  table.columns = {"omega", "re_chi", "im_chi", "re_error"};
  if (model) table.columns.push_back("re_chi_model");
  const auto results = parallel_map(omegas.size(), [&](std::size_t i) {
    const KramersKronig kk = kk_reconstruct(omegas[i], src, cfg);
    Observables o;  // reuse the struct as a three-number carrier
    o.q2 = kk.chi.real();
    o.pi2 = kk.chi.imag();
    o.energy = kk.error;
    return o;
  });
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    std::vector<double> row{omegas[i], results[i].q2, results[i].pi2, results[i].energy};
    if (model) row.push_back(chi_model(omegas[i], std::get<ModelParams>(src)).real());
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string plot_script(int figure, const std::string& csv_path) {
  std::ostringstream os;
  os << "#!/usr/bin/env python3\n"
     << "import numpy as np\n"
     << "import matplotlib\n"
     << "matplotlib.use('Agg')\n"
     << "import matplotlib.pyplot as plt\n\n"
     << "data = np.genfromtxt(" << '"' << csv_path << '"'
     << ", delimiter=',', names=True, comments='#', deletechars='')\n"
     << "fig, ax = plt.subplots(figsize=(6, 4))\n";
  if (figure == 1) {
    os << "ax.plot(data['gamma2'], data['dq'] ** 2, label=r'$\\omega_0 (\\Delta q)^2/\\hbar$')\n"
       << "ax.plot(data['gamma2'], data['dp'] ** 2, label=r'$(\\Delta p)^2/(\\hbar\\omega_0)$')\n"
       << "ax.plot(data['gamma2'], data['dq_dp'], label=r'$\\Delta q\\,\\Delta p/\\hbar$')\n"
       << "ax.axhline(0.5, color='grey', lw=0.5)\n";
  } else {
    os << "for name in data.dtype.names[1:]:\n"
       << "    ax.plot(data['gamma2'], data[name], label=name)\n"
       << "ax.axhline(0.5, color='grey', lw=0.5)\n";
  }
  os << "ax.set_xlabel(r'$\\gamma_2/\\omega_0$')\n"
     << "ax.legend()\n"
     << "fig.tight_layout()\n"
     << "fig.savefig(" << '"' << csv_path << ".png" << '"' << ", dpi=150)\n";
  return os.str();
}

TabulatedChi load_table_with_sidecar(const std::filesystem::path& path, Units default_units,
                                     double default_tail_exponent, const UnitSystem& units) {
  Units table_units = default_units;
  double tail = default_tail_exponent;
  std::filesystem::path sidecar = path;
  sidecar += ".json";
  if (std::filesystem::exists(sidecar)) {
    std::ifstream in(sidecar);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw DomainError("cannot parse " + sidecar.string() + ": " + e.what());
    }
    if (j.contains("frequency_unit")) {
      table_units = parse_units(j.at("frequency_unit").get<std::string>());
    }
    if (j.contains("tail_exponent")) tail = j.at("tail_exponent").get<double>();
  }
  const double scale = table_units == Units::SI ? 1.0 / units.omega0_si : 1.0;
  return load_chi_table(path, tail, 1.0, scale);
}

}  // namespace qdho::cli
