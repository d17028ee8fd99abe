// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qdho/cli.hpp"
#include "qdho/errors.hpp"
#include "qdho/oracle.hpp"
#include "qdho/response.hpp"
#include "qdho/thermo.hpp"

using namespace qdho;

namespace {

// Frozen from a convergence study of |exact/asymptote - 1| along
// g1 = w0^2 / (4 g2): at g2 = 1e2, 1e3, 1e4 the energy ratio error is
// 5.7e-6, 5.9e-8, 6.0e-10 and the position-uncertainty ratio error is
// 9.4e-6, 9.4e-8, 9.4e-10 (50-digit reference arithmetic).
constexpr double kAsymptoteTolerance = 5e-9;

struct Outcome {
  bool passed;
  std::string detail;
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Outcome free_oscillator_recovery() {
  const ModelParams p{1.0, 0.25, 1e-8};
  double worst = 0.0;
  for (const ThermalState& s : {ThermalState::zero(), ThermalState::finite(1.0)}) {
    const Observables o = thermal_observables(p, s);
    const double c = s.weight(1.0);
    worst = std::max({worst, rel(o.q2, 0.5 * c), rel(o.pi2, 0.5 * c), rel(o.energy, 0.5 * c)});
  }
  return {worst < 1e-4, fmt("max relative deviation %.3g (tol 1e-4)", worst)};
}

Outcome closed_form_vs_quadrature() {
  const auto start = std::chrono::steady_clock::now();
  const double g1s[] = {0.05, 0.1, 0.2, 0.25, 0.3};
  const double g2s[] = {0.1, 0.3, 0.5, 1.0, 1.5};
  double worst = 0.0;
  int overdamped = 0;
  for (double g1 : g1s) {
    for (double g2 : g2s) {
      const ModelParams p{1.0, g1, g2};
      if (model_poles(p).overdamped) ++overdamped;
      const Observables c = zero_point_closed(p);
      const Observables q = thermal_observables(p, ThermalState::zero());
      worst = std::max({worst, rel(q.q2, c.q2), rel(q.pi2, c.pi2), rel(q.energy, c.energy)});
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = worst < 1e-8 && overdamped > 0 && seconds < 60.0;
  return {ok, fmt("max relative difference %.3g (tol 1e-8), ", worst) +
                  std::to_string(overdamped) + " over-damped points, " + fmt("%.3g s", seconds)};
}

Outcome matsubara_vs_quadrature() {
  const ModelParams p{1.0, 0.25, 0.5};
  double worst = 0.0;
  for (double theta : {0.1, 1.0, 10.0}) {
    const double q = q2_thermal(p, ThermalState::finite(theta)).value;
    const double m = q2_matsubara(p, theta).value;
    worst = std::max(worst, rel(m, q));
  }
  return {worst < 1e-6, fmt("max relative difference %.3g (tol 1e-6)", worst)};
}

Outcome uncertainty_bound() {
  double min_excess = std::numeric_limits<double>::infinity();
  int points = 0;
  for (int i = 0; i < 20; ++i) {
    const double g1 = 0.05 + (2.0 - 0.05) * i / 19.0;
    for (int j = 0; j < 20; ++j) {
      // g2 spans [0, 0.98] of the stability limit w0^2 / (2 g1)
      const double g2 = 0.98 * j / 19.0 / (2.0 * g1);
      const Observables o = zero_point_closed(ModelParams{1.0, g1, g2});
      min_excess = std::min(min_excess, o.q2 * o.pi2 - 0.25);
      ++points;
    }
  }
  const Observables near_free = thermal_observables(ModelParams{1.0, 0.25, 1e-8}, ThermalState::zero());
  const double excess = near_free.q2 * near_free.pi2 - 0.25;
  const bool ok = min_excess >= 0.0 && excess >= 0.0 && excess < 1e-6;
  return {ok, std::to_string(points) + " points, " +
                  fmt("min(q2*pi2 - 1/4) = %.3g; at g2=1e-8: %.3g (tol 1e-6)", min_excess, excess)};
}

cli::CsvTable figure_sweep(int figure) {
  const cli::SweepSpec sweep = cli::parse_sweep("gamma2=0:2:41");
  return figure == 1 ? cli::run_sweep_figure1(1.0, 0.25, sweep)
                     : cli::run_sweep_figure2(1.0, 0.25, sweep, {1.0});
}

Outcome energy_monotonicity() {
  const cli::CsvTable t = figure_sweep(2);
  bool decreasing = true, extractable_increasing = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    decreasing = decreasing && t.rows[i][1] < t.rows[i - 1][1];
    extractable_increasing = extractable_increasing &&
                             t.rows[i][2] - t.rows[i][1] > t.rows[i - 1][2] - t.rows[i - 1][1];
  }
  const bool endpoint = t.rows.front()[0] == 0.0 && t.rows.front()[1] == 0.5;
  const bool ok = decreasing && extractable_increasing && endpoint;
  return {ok, std::to_string(t.rows.size()) + " rows; E(0) decreasing: " +
                  (decreasing ? "yes" : "no") + "; E(1)-E(0) increasing: " +
                  (extractable_increasing ? "yes" : "no") + fmt("; E(0,0) = %.17g", t.rows.front()[1]) +
                  (t.warnings.empty() ? "" : "; skipped " + std::to_string(t.warnings.size()) +
                                                " boundary row")};
}

Outcome uncertainty_monotonicity() {
  const cli::CsvTable t = figure_sweep(1);
  bool dq_up = true, dp_down = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    dq_up = dq_up && t.rows[i][1] > t.rows[i - 1][1];
    dp_down = dp_down && t.rows[i][2] < t.rows[i - 1][2];
  }
  return {dq_up && dp_down, std::to_string(t.rows.size()) + " rows; dq increasing: " +
                                (dq_up ? "yes" : "no") + "; dp decreasing: " +
                                (dp_down ? "yes" : "no")};
}

Outcome asymptotics() {
  double last_e = std::numeric_limits<double>::infinity();
  double last_q = last_e;
  bool monotone = true;
  std::string detail;
  for (double g2 : {1e2, 1e3, 1e4}) {
    const Observables o = zero_point_closed(infinite_damping_params(g2));
    const double re = std::abs(o.energy / energy_asymptote(g2) - 1.0);
    const double rq = std::abs(o.delta_q() / deltaq_asymptote(g2) - 1.0);
    monotone = monotone && re < last_e && rq < last_q;
    last_e = re;
    last_q = rq;
    detail += fmt("g2=%.0e: ", g2) + fmt("%.2g/%.2g  ", re, rq);
  }
  const bool ok = monotone && last_e < kAsymptoteTolerance && last_q < kAsymptoteTolerance;
  return {ok, "|ratio-1| energy/dq " + detail + fmt("(final tol %.0e)", kAsymptoteTolerance)};
}

Outcome pole_verification() {
  double worst = 0.0;
  for (const ModelParams& p : {ModelParams{1.0, 0.25, 0.5}, ModelParams{1.0, 0.1, 1.5}}) {
    const PoleVerification v = verify_poles(p);
    worst = std::max(worst, std::max(v.max_residual, v.max_inverse_green) / (p.omega0 * p.omega0));
  }
  return {worst < 1e-10, fmt("max residual %.3g w0^2 (tol 1e-10)", worst)};
}

Outcome diagonalizability_boundary() {
  bool ok = true;
  std::string detail;
  for (double g1 : {0.9, 1.1}) {
    const ModelParams p{1.0, g1, 0.5};
    const DiscreteSystem s = build_hamiltonian(p, 1000, 100.0);
    const double lambda = smallest_stiffness_eigenvalue(s);
    const bool expect_stable = 2.0 * g1 * 0.5 < 1.0;
    ok = ok && ((lambda > 0.0) == expect_stable) &&
         ((s.reservoir.coupling_sum() < 1.0) == expect_stable);
    detail += fmt("2g1g2=%.1f: lambda_min=%.3g  ", 2.0 * g1 * 0.5, lambda);
  }
  return {ok, detail};
}

Outcome oracle_convergence() {
  const ModelParams p{1.0, 0.25, 0.5};
  const Observables exact = zero_point_closed(p);
  const std::pair<std::size_t, double> steps[] = {{500, 50.0}, {1000, 100.0}, {2000, 200.0}};
  double prev[3] = {INFINITY, INFINITY, INFINITY};
  bool decreasing = true;
  double err[3] = {0, 0, 0};
  for (const auto& [n, omega_max] : steps) {
    const Observables o = thermal_observables_discrete(build_hamiltonian(p, n, omega_max),
                                                       ThermalState::zero());
    err[0] = rel(o.q2, exact.q2);
    err[1] = rel(o.pi2, exact.pi2);
    err[2] = rel(o.energy, exact.energy);
    for (int k = 0; k < 3; ++k) {
      decreasing = decreasing && err[k] < prev[k];
      prev[k] = err[k];
    }
  }
  const bool ok = decreasing && err[0] < 0.02 && err[1] < 0.02 && err[2] < 0.05;
  return {ok, fmt("final errors q2 %.3g, pi2 %.3g, ", err[0], err[1]) +
                  fmt("energy %.3g (tol 2%%, 2%%, 5%%); ", err[2]) +
                  (decreasing ? "strictly decreasing" : "NOT decreasing")};
}

Outcome hmf_identity() {
  const DiscreteSystem s = build_hamiltonian(ModelParams{1.0, 0.25, 0.5}, 1000, 100.0);
  double worst = 0.0;
  for (double theta : {1.0, 10.0}) worst = std::max(worst, hmf_partition_identity(s, theta).residual);
  return {worst < 1e-6, fmt("max residual %.3g (tol 1e-6)", worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 free-oscillator recovery", free_oscillator_recovery},
      {"2 closed form vs quadrature", closed_form_vs_quadrature},
      {"3 Matsubara vs quadrature", matsubara_vs_quadrature},
      {"4 uncertainty bound", uncertainty_bound},
      {"5 energy monotonicity", energy_monotonicity},
      {"6 uncertainty monotonicity", uncertainty_monotonicity},
      {"7 infinite-damping asymptotics", asymptotics},
      {"8 pole verification", pole_verification},
      {"9 diagonalizability boundary", diagonalizability_boundary},
      {"10 oracle convergence", oracle_convergence},
      {"11 mean-force energy identity", hmf_identity},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failures;
    std::printf("%s [%s] %s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
