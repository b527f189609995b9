#pragma once

// Simulated experiments on the effective two-mode model: sideband chevron,
// ZZ nulling with a CW tone, conditional Ramsey and pulsed spectroscopy.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "snail/dynamics.hpp"
#include "snail/fit.hpp"

namespace snail {

// ---- chevron -------------------------------------------------------------

struct ChevronResult {
  std::vector<double> frequencies;  ///< GHz
  std::vector<double> times;        ///< ns
  Eigen::MatrixXd excitation;       ///< <n_t>, rows: frequency, cols: time
  std::vector<double> rabi;         ///< fitted oscillation frequency per row (0 if flat)
  double resonance_grid = 0.0;      ///< row of maximum contrast
  double resonance = 0.0;           ///< from the generalized-Rabi hyperbola, NaN if unavailable
};

/// Sideband drive on the cubic port, starting from |eg> with the CW tone off.
ChevronResult chevron_scan(const TwoModeModel& model, const std::vector<double>& frequencies,
                           const std::vector<double>& times, double amplitude, int threads = 1,
                           const DynamicsOptions& options = {});

struct RabiLinearity {
  std::vector<double> amplitudes;
  std::vector<double> rates;  ///< GHz
  LinearFit fit;              ///< rate vs amplitude
};

/// Resonant |eg> <-> |ge> oscillation frequency for each drive amplitude.
RabiLinearity rabi_linearity(const TwoModeModel& model, const std::vector<double>& amplitudes, int threads = 1,
                             const DynamicsOptions& options = {});

// ---- ZZ nulling ----------------------------------------------------------

enum class ZzMethod { Eigen, Ramsey };

struct ZzRamseyOptions {
  double ramp_hwhm = 20.0;  ///< ns
  double window = 400.0;    ///< ns of free evolution after the ramp
  double sample_step = 2.0; ///< ns
};

struct ZzPoint {
  double amplitude = 0.0;
  double f_ge = 0.0;      ///< gg <-> ge, GHz
  double f_ee_eg = 0.0;   ///< eg <-> ee, GHz
  double residual = 0.0;  ///< f_ee_eg - f_ge
};

ZzPoint zz_point(const TwoModeModel& model, double cw_frequency, double amplitude, ZzMethod method,
                 const ZzRamseyOptions& ramsey = {}, const DynamicsOptions& options = {});

struct ZzSweep {
  ZzMethod method = ZzMethod::Eigen;
  double cw_frequency = 0.0;
  std::vector<ZzPoint> points;
  double crossing = 0.0;  ///< CW amplitude where the residual vanishes
};

/// Evaluates the residual on the grid and bisects the first sign change.
/// Throws NoCrossing when the residual is single-signed on the grid.
ZzSweep zz_null_sweep(const TwoModeModel& model, double cw_frequency, const std::vector<double>& amplitudes,
                      ZzMethod method, int threads = 1, const ZzRamseyOptions& ramsey = {},
                      const DynamicsOptions& options = {});

// ---- conditional Ramsey ---------------------------------------------------

struct RamseyTrace {
  std::vector<double> phases;
  std::vector<double> sigma_z;  ///< P_e - P_g of the read qubit
  CosineFit fit;
};

/// pi/2 on the transmon, optional pi on the cubic mode beforehand, the gate,
/// then pi/2 with phase phi on `read`. Rotations are ideal and act on the g/e
/// doublet of each mode; `gate` is a 16 x 16 frame-basis unitary.
RamseyTrace ramsey_experiment(const Eigen::MatrixXcd& gate, bool control_prepared, const std::vector<double>& phases,
                              Port read);

struct ConditionalRamsey {
  RamseyTrace without_control, with_control;
  double phase_shift = 0.0;        ///< fitted phase difference, wrapped
  double conditional_phase = 0.0;  ///< phase_shift, minus pi for swap-type gates
};

/// Swap-type gates read out the cubic mode, the others the transmon.
ConditionalRamsey conditional_ramsey(const Eigen::MatrixXcd& gate, bool swap_type, const std::vector<double>& phases);

// ---- pulsed spectroscopy -------------------------------------------------

struct SpectroscopyOptions {
  bool cw_on = true;
  double cw_frequency = 0.93;
  double cw_amplitude = 0.0;
  double probe_amplitude = 0.02;  ///< GHz
  double probe_fwhm = 60.0;       ///< ns
  int threads = 1;
};

struct SpectroscopyResult {
  std::vector<double> frequencies;
  std::vector<double> response;  ///< cubic-mode excitation after the probe
  std::optional<PeakFit> peak;
  double raman_prediction = 0.0;  ///< dressed |gg> -> |eg> Raman line, GHz
};

/// Gaussian probe on the transmon port with the CW tone held at constant amplitude.
SpectroscopyResult pulsed_spectroscopy(const TwoModeModel& model, const std::vector<double>& frequencies,
                                       const SpectroscopyOptions& opt, const DynamicsOptions& options = {});

}  // namespace snail
