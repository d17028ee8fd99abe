#include "qdho/oracle.hpp"

#include <cmath>
#include <sstream>

#include "qdho/errors.hpp"

namespace qdho {

double DiscreteReservoir::coupling_sum() const {
  double sum = 0.0;
  for (std::size_t j = 0; j < size(); ++j) {
    sum += couplings[j] * couplings[j] / (frequencies[j] * frequencies[j]);
  }
  return sum;
}

DiscreteSystem build_hamiltonian(const SusceptibilitySource& src, std::size_t n_modes,
                                 double omega_max, Spacing spacing) {
  if (n_modes == 0) throw DomainError("reservoir needs at least one mode");
  if (!(omega_max > 0.0)) throw DomainError("omega_max must be > 0");
  if (const auto* p = std::get_if<ModelParams>(&src)) p->validate();

  DiscreteSystem sys;
  DiscreteReservoir& res = sys.reservoir;
  res.omega0 = omega0_of(src);
  res.frequencies.resize(n_modes);
  res.weights.resize(n_modes);
  res.couplings.resize(n_modes);
  const double n = static_cast<double>(n_modes);
  for (std::size_t j = 0; j < n_modes; ++j) {
    double lo = 0.0, hi = 0.0;
    if (spacing == Spacing::Uniform) {
      lo = omega_max * static_cast<double>(j) / n;
      hi = omega_max * static_cast<double>(j + 1) / n;
    } else {
      const double start = omega_max * 1e-4;
      lo = start * std::pow(omega_max / start, static_cast<double>(j) / n);
      hi = start * std::pow(omega_max / start, static_cast<double>(j + 1) / n);
    }
    res.frequencies[j] = 0.5 * (lo + hi);
    res.weights[j] = hi - lo;
    res.couplings[j] = coupling_alpha(res.frequencies[j], src) * std::sqrt(res.weights[j]);
  }

  const Eigen::Index dim = static_cast<Eigen::Index>(n_modes) + 1;
  sys.stiffness = Eigen::MatrixXd::Zero(dim, dim);
  sys.stiffness(0, 0) = res.omega0 * res.omega0;
  for (std::size_t j = 0; j < n_modes; ++j) {
    const Eigen::Index k = static_cast<Eigen::Index>(j) + 1;
    sys.stiffness(k, k) = res.frequencies[j] * res.frequencies[j];
    sys.stiffness(0, k) = -res.couplings[j];
    sys.stiffness(k, 0) = -res.couplings[j];
  }
  return sys;
}

double smallest_stiffness_eigenvalue(const DiscreteSystem& system) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(system.stiffness,
                                                        Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

NormalModes normal_modes(const DiscreteSystem& system) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(system.stiffness);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("eigen decomposition of the stiffness matrix failed");
  }
  const Eigen::VectorXd& eig = solver.eigenvalues();
  if (!(eig(0) > 0.0)) {
    std::ostringstream os;
    os << "stiffness matrix is not positive definite (smallest eigenvalue " << eig(0) << ")";
    throw NotDiagonalizableError(os.str());
  }
  return {eig.cwiseSqrt(), solver.eigenvectors()};
}

Observables thermal_observables_discrete(const DiscreteSystem& system,
                                         const ThermalState& state) {
  return thermal_observables_discrete(system, normal_modes(system), state);
}

Observables thermal_observables_discrete(const DiscreteSystem& system,
                                         const NormalModes& modes,
                                         const ThermalState& state) {
  Observables out;
  out.path = EvaluationPath::Oracle;
  for (Eigen::Index k = 0; k < modes.frequencies.size(); ++k) {
    const double w = modes.frequencies(k);
    const double overlap = modes.transform(0, k) * modes.transform(0, k);
    const double c = state.weight(w);
    out.q2 += overlap * c / (2.0 * w);
    out.pi2 += overlap * w * c / 2.0;
    out.energy += w * c / 2.0;
  }
  for (double w : system.reservoir.frequencies) out.energy -= w * state.weight(w) / 2.0;
  return out;
}

namespace {

// log(2 sinh(x)) for x > 0 without overflow.
double log_two_sinh(double x) { return x + std::log1p(-std::exp(-2.0 * x)); }

}  // namespace

double log_partition_star(const DiscreteSystem& system, const NormalModes& modes,
                          double beta) {
  double log_z = 0.0;
  for (Eigen::Index k = 0; k < modes.frequencies.size(); ++k) {
    log_z -= log_two_sinh(0.5 * beta * modes.frequencies(k));
  }
  double log_zr = 0.0;
  for (double w : system.reservoir.frequencies) log_zr -= log_two_sinh(0.5 * beta * w);
  return log_z - log_zr;
}

HmfIdentity hmf_partition_identity(const DiscreteSystem& system, double theta,
                                   double beta_step) {
  const ThermalState state = ThermalState::finite(theta);
  const double beta = 1.0 / theta;
  if (!(beta_step > 0.0) || beta_step >= 0.5 * beta) {
    throw DomainError("beta step must be positive and below beta / 2");
  }
  const NormalModes modes = normal_modes(system);
  const auto log_z = [&](double b) { return log_partition_star(system, modes, b); };
  const double h = beta_step;
  const double derivative = (-log_z(beta + 2.0 * h) + 8.0 * log_z(beta + h) -
                             8.0 * log_z(beta - h) + log_z(beta - 2.0 * h)) /
                            (12.0 * h);

  HmfIdentity out;
  out.log_z_star = log_z(beta);
  out.energy_from_partition = -derivative;
  out.energy_from_modes = thermal_observables_discrete(system, modes, state).energy;
  out.residual = std::abs(out.energy_from_partition - out.energy_from_modes);
  return out;
}

}  // namespace qdho
