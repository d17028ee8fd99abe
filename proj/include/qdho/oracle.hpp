#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qdho/susceptibility.hpp"
#include "qdho/thermo.hpp"

namespace qdho {

enum class Spacing { Uniform, Log };

/// N reservoir oscillators standing in for the continuum X_w.
struct DiscreteReservoir {
  double omega0 = 1.0;
  std::vector<double> frequencies;  // w_j
  std::vector<double> weights;      // dw_j
  std::vector<double> couplings;    // c_j = alpha(w_j) sqrt(dw_j)

  std::size_t size() const { return frequencies.size(); }
  /// sum_j c_j^2 / w_j^2, the discrete stability integral.
  double coupling_sum() const;
};

/// Reservoir plus the (N+1)x(N+1) stiffness matrix of the quadratic
/// Hamiltonian. Index 0 is the oscillator; masses are all one.
struct DiscreteSystem {
  DiscreteReservoir reservoir;
  Eigen::MatrixXd stiffness;
};

/// K_00 = w0^2, K_jj = w_j^2, K_0j = K_j0 = -c_j (coupling +q int alpha X).
/// Uniform spacing puts w_j at the midpoints of N equal cells on (0, omega_max];
/// log spacing uses geometric cells on [omega_max * 1e-4, omega_max].
DiscreteSystem build_hamiltonian(const SusceptibilitySource& src, std::size_t n_modes,
                                 double omega_max, Spacing spacing = Spacing::Uniform);

struct NormalModes {
  Eigen::VectorXd frequencies;  // Omega_k, ascending
  Eigen::MatrixXd transform;    // columns are normal-mode vectors
};

/// Smallest eigenvalue of K (negative when the criterion fails).
double smallest_stiffness_eigenvalue(const DiscreteSystem& system);

/// Diagonalises K. Throws NotDiagonalizableError unless K is positive definite.
NormalModes normal_modes(const DiscreteSystem& system);

/// Normal-mode thermal averages:
///   <q^2>  = sum_k O_0k^2 coth(W_k / 2T) / (2 W_k)
///   <Pi^2> = sum_k O_0k^2 W_k coth(W_k / 2T) / 2
///   energy = sum_k W_k coth(W_k/2T)/2 - sum_j w_j coth(w_j/2T)/2  (= <H> - <H_R>)
Observables thermal_observables_discrete(const DiscreteSystem& system,
                                         const ThermalState& state);
/// Same, reusing an existing diagonalisation.
Observables thermal_observables_discrete(const DiscreteSystem& system,
                                         const NormalModes& modes,
                                         const ThermalState& state);

struct HmfIdentity {
  double log_z_star = 0.0;
  /// -d(log Z*)/d beta by a five-point centred difference.
  double energy_from_partition = 0.0;
  /// <H> - <H_R> from the normal modes.
  double energy_from_modes = 0.0;
  double residual = 0.0;
};

/// log Z* = log Z - log Z_R with log Z = -sum log(2 sinh(W_k beta / 2)).
double log_partition_star(const DiscreteSystem& system, const NormalModes& modes,
                          double beta);

/// Checks -d(log Z*)/d beta = <H> - <H_R> with step `beta_step` in beta.
HmfIdentity hmf_partition_identity(const DiscreteSystem& system, double theta,
                                   double beta_step = 1e-4);

}  // namespace qdho
