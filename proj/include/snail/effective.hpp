#pragma once

// Dressed two-qubit parameters of the cubic transmon + transmon pair.
// All frequencies are ordinary frequencies in GHz.

#include <Eigen/Dense>
#include <string>
#include <utility>

namespace snail {

struct DeviceParams {
  double omega_c0 = 0.0;
  double beta_c0 = 0.0;
  double alpha_c0 = 0.0;
  double omega_t0 = 0.0;
  double alpha_t0 = 0.0;
  double g0 = 0.0;

  /// Dispersive validity |omega_t0 - omega_c0| > 3 g0 and |beta_c0| < omega_c0.
  void validate() const;
};

struct EffectiveParams {
  double omega_c = 0.0, omega_t = 0.0;
  double alpha_c = 0.0, alpha_t = 0.0;
  double g = 0.0;
  double j_zz = 0.0;
  double eta = 0.0, eta_cz = 0.0;
  double delta0 = 0.0;  ///< omega_t0 - omega_c0
  double delta = 0.0;   ///< omega_t - omega_c
  std::string provenance = "formula";
};

/// Closed-form second-order expressions (fourth order in g0 for the ZZ term).
/// Throws NearResonantDenominator if any denominator is below 10 MHz.
EffectiveParams closed_form_effective(const DeviceParams& p);

struct TruncatedHamiltonian {
  int levels = 4;
  Eigen::MatrixXd matrix;
  int index(int i, int j) const { return i * levels + j; }
};

TruncatedHamiltonian build_truncated_hamiltonian(const DeviceParams& p, int levels = 4);

struct DressedSpectrum {
  int levels = 4;
  Eigen::VectorXd energies;  ///< eigenvalue of the state labeled by bare index i*levels+j
  Eigen::MatrixXd vectors;   ///< column k is the eigenvector labeled by bare index k
  double energy(int i, int j) const { return energies(i * levels + j); }
  double zz() const { return energy(1, 1) - energy(1, 0) - energy(0, 1) + energy(0, 0); }
};

DressedSpectrum exact_dressed(const TruncatedHamiltonian& h);

/// omega_c, omega_t, alpha_c, alpha_t and j_zz from exact eigenvalues; other fields zero.
EffectiveParams exact_effective(const DeviceParams& p, int levels = 4);

/// Second-order numeric Schrieffer-Wolff on the truncated Hamiltonian.
EffectiveParams numeric_sw(const DeviceParams& p, int levels = 4);

/// (omega_swap, omega_cz) = (Delta, Delta + alpha_t).
std::pair<double, double> eta_resonance_frequencies(const EffectiveParams& e);

struct DressedTargets {
  double omega_c = 3.633, omega_t = 4.479;
  double alpha_c = -0.132, alpha_t = -0.168;
};

/// Bare (omega_c0, alpha_c0, omega_t0, alpha_t0) such that the closed-form
/// dressed values hit `targets`, for given beta_c0 and g0.
DeviceParams reconstruct_device(const DressedTargets& targets, double beta_c0, double g0);

}  // namespace snail
