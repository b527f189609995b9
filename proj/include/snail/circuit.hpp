#pragma once

// SNAIL circuit: single-phase expansion and full two-island charge-basis model.
// Energies in GHz, phases in radians.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace snail {

struct SnailParams {
  double charging_energy = 0.21;  ///< E_C of the shunt capacitance
  double junction_scale = 84.0;   ///< E_J0
  double k1 = 0.07;
  double k2 = 0.20;
  double k3 = 0.20;
  double reduced_flux = 0.0;      ///< 2*pi*Phi/Phi0, canonicalized into [-pi, pi]

  static SnailParams with_flux_quanta(SnailParams p, double flux_quanta);
  double flux_quanta() const;
  /// Throws std::invalid_argument on non-positive energies or scale factors.
  void validate() const;
};

struct PotentialExpansion {
  double minimum_phase = 0.0;
  double d2 = 0.0, d3 = 0.0, d4 = 0.0;
};

struct BareCubicModes {
  double omega_c0 = 0.0;
  double beta_c0 = 0.0;
  double alpha_c0 = 0.0;
  double effective_charging = 0.0;
};

/// U(x) and its first four derivatives for the single-phase potential.
double snail_potential(const SnailParams& p, double x, int derivative = 0);

double effective_charging_energy(const SnailParams& p);

PotentialExpansion find_potential_minimum(const SnailParams& p);

BareCubicModes single_phase_modes(const PotentialExpansion& e, const SnailParams& p);

struct ChargeBasisModel {
  int cutoff = 0;
  Eigen::MatrixXcd hamiltonian;
  std::vector<std::pair<int, int>> labels;  ///< (n1, n2) per basis index

  int dimension() const { return static_cast<int>(labels.size()); }
  int index(int n1, int n2) const { return (n1 + cutoff) * (2 * cutoff + 1) + (n2 + cutoff); }
};

ChargeBasisModel build_charge_model(const SnailParams& p, int cutoff);

struct Eigenpairs {
  Eigen::VectorXd energies;   ///< ascending, ground shifted to zero
  Eigen::MatrixXcd vectors;   ///< columns match energies
};

Eigenpairs diagonalize(const ChargeBasisModel& m, int n_levels);

std::vector<double> spectrum(const ChargeBasisModel& m, int n_levels);

struct TransitionMoments {
  double a_ge = 0.0;
  double a_gf = 0.0;
};

/// Moments of the island-1 charge operator between the three lowest states.
TransitionMoments transition_moments(const ChargeBasisModel& m, const Eigenpairs& low);

struct FullCircuitModes {
  double omega_c0 = 0.0;
  double alpha_c0 = 0.0;
  double abs_beta_c0 = 0.0;
  double beta_c0 = 0.0;  ///< sign borrowed from the single-phase D3
  TransitionMoments moments;
};

FullCircuitModes full_circuit_modes(const SnailParams& p, int cutoff);

struct ConvergenceReport {
  int cutoff = 0;
  double max_shift = 0.0;  ///< max |E_k(N+2) - E_k(N)|, k = 0..2, absolute energies
  bool converged = false;
};

ConvergenceReport check_convergence(const SnailParams& p, int cutoff, double tolerance = 1e-6);

/// Builds the model and throws CutoffTooSmall when the spectrum is not converged.
ChargeBasisModel build_converged_charge_model(const SnailParams& p, int cutoff);

struct FluxRow {
  double flux_quanta = 0.0;
  std::string model;  ///< "single_phase" or "full_circuit"
  double omega_c0 = 0.0, alpha_c0 = 0.0, abs_beta_c0 = 0.0;
  std::string flag;   ///< empty when the row is valid
};

/// One row per flux point per model; failing points are flagged.
std::vector<FluxRow> flux_sweep(const SnailParams& single_phase, const SnailParams& full_circuit,
                                const std::vector<double>& flux_grid, int cutoff, int threads = 1);

}  // namespace snail
