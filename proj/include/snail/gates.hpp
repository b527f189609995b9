#pragma once

// Composite two-tone sideband gates (CZ, iSWAP, SWAP and general FSim points),
// their numerical calibration, and FSim parameter extraction.
//
// All gates are simulated in the dressed frame of the CW ZZ-nulling tone.
// FSim(sw, cp) = [[1,0,0,0],[0,cos(sw/2),-i sin(sw/2),0],[0,-i sin(sw/2),cos(sw/2),0],[0,0,0,e^{i cp}]]
// in the basis (gg, ge, eg, ee).

#include <Eigen/Dense>
#include <array>
#include <string>

#include "snail/dynamics.hpp"

namespace snail {

struct FsimTarget {
  double swap_angle = 0.0;         ///< [0, pi]
  double conditional_phase = 0.0;  ///< (-pi, pi]

  static FsimTarget identity() { return {0.0, 0.0}; }
  static FsimTarget cz();
  static FsimTarget iswap();
  static FsimTarget swap();
  bool is_identity() const { return swap_angle == 0.0 && conditional_phase == 0.0; }
  void validate() const;
};

Eigen::Matrix4cd fsim_matrix(const FsimTarget& t);

/// Timing of the 50 ns slot.
struct GateLayout {
  double slot = 50.0;             ///< ns
  double swap_flat = 32.0;
  double swap_edge_hwhm = 3.0;
  double cp_flat = 16.0;          ///< per segment
  double cp_edge_hwhm = 1.5;
  double single_qubit_fwhm = 18.6;
};

/// CW tone active during every gate.
struct CwSetting {
  double frequency = 0.93;
  double amplitude = 0.0;
};

struct GateCalibration {
  FsimTarget target;
  bool swap_tone = false;
  double swap_amplitude = 0.0, swap_frequency = 0.0, swap_phase = 0.0;
  bool cp_tone = false;
  double cp_amplitude = 0.0, cp_frequency = 0.0;
  double cp_phase_a = 0.0, cp_phase_b = 0.0;
  CwSetting cw;
  GateLayout layout;
  // diagnostics filled by calibrate()
  double leakage = 0.0;
  double residual_gf = 0.0;
  int iterations = 0;
};

/// Analytic first guess: areas from the effective couplings and resonances from
/// the dressed quasi-energies. Throws AmplitudeOutOfRange in the leakage regime.
GateCalibration initial_calibration(const FsimTarget& target, const TwoModeModel& model, const CwSetting& cw,
                                    const GateLayout& layout = {});

PulseSchedule synthesize_gate(const GateCalibration& cal);

/// Nested 1-D searches followed by a joint least-squares polish.
/// Throws CalibrationDiverged when a search fails to reach its tolerance.
GateCalibration calibrate(const FsimTarget& target, const TwoModeModel& model, const CwSetting& cw,
                          const GateLayout& layout = {});

struct FsimReport {
  double swap_angle = 0.0;
  double conditional_phase = 0.0;
  double leakage = 0.0;        ///< mean population leaving the computational block
  double fsim_deviation = 0.0; ///< operator norm after Z-gauge removal
  /// Z phases with block ~= e^{i global} Z(after) FSim Z(before),
  /// Z(c, t) = diag(1, e^{i t}, e^{i c}, e^{i(c+t)}).
  double global_phase = 0.0;
  std::array<double, 2> before{0.0, 0.0};  ///< (cubic, transmon)
  std::array<double, 2> after{0.0, 0.0};
  Eigen::Matrix4cd block;
};

/// block ~= e^{i global} Z(after) ideal Z(before), fitted by multi-start least squares.
struct ZGaugeFit {
  double global_phase = 0.0;
  std::array<double, 2> before{0.0, 0.0};  ///< (cubic, transmon)
  std::array<double, 2> after{0.0, 0.0};
  double deviation = 0.0;                  ///< operator norm of the residual
};
/// `weights` scales each matrix element of the residual (default: all ones).
ZGaugeFit fit_z_gauge(const Eigen::Matrix4cd& block, const Eigen::Matrix4cd& ideal,
                      const Eigen::Matrix4d& weights = Eigen::Matrix4d::Ones());

/// Z(c, t) on the full space: exp(i (c n_cubic + t n_transmon)).
Eigen::VectorXcd z_phases(double cubic, double transmon);

/// Computational block (gg, ge, eg, ee) of a 16 x 16 frame unitary.
Eigen::Matrix4cd computational_block(const Eigen::MatrixXcd& u);

/// Throws NotFsimLike if the gauge-fixed block deviates from FSim form by more than `tolerance`.
FsimReport extract_fsim(const Eigen::MatrixXcd& unitary, double tolerance = 1e-2);
FsimReport extract_fsim(const PulseSchedule& schedule, const TwoModeModel& model, const DynamicsOptions& options = {});

/// Single-qubit X pulses (gaussian, fixed slot) on either mode.
struct SingleQubitCalibration {
  double cubic_frequency = 0.0, transmon_frequency = 0.0;
  double cubic_pi = 0.0, cubic_half_pi = 0.0;        ///< amplitudes
  double transmon_pi = 0.0, transmon_half_pi = 0.0;
  double cubic_pi_detuning = 0.0, transmon_pi_detuning = 0.0;  ///< GHz, offsets Stark shifts of the pi pulses
  CwSetting cw;
  GateLayout layout;
};

SingleQubitCalibration calibrate_single_qubit(const TwoModeModel& model, const CwSetting& cw,
                                              const GateLayout& layout = {});

/// Slot schedule with simultaneous X rotations; angle index 0, 1, 2 = 0, pi/2, pi.
PulseSchedule single_qubit_slot(const SingleQubitCalibration& cal, int cubic_angle, int transmon_angle);

}  // namespace snail
