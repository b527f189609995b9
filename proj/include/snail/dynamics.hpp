#pragma once

// Time-domain simulation of the driven effective two-mode Hamiltonian.
//
// Basis: |i>_c (x) |j>_t with four levels per mode, index i*4 + j.
// Frames:
//   Lab      - Schroedinger picture, real drive fields, no RWA.
//   Rotating - interaction picture of the static Hamiltonian, RWA; the CW tone
//              stays explicit and time dependent.
//   Dressed  - the CW tone is absorbed by a frame rotating at its frequency on
//              the transmon, the resulting static Hamiltonian is diagonalized and
//              the interaction picture is taken with respect to its eigenvalues.
//              States are indexed by the bare label of each dressed state.

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "snail/effective.hpp"
#include "snail/ode.hpp"
#include "snail/pulse.hpp"

namespace snail {

using cd = std::complex<double>;

inline constexpr int kModeLevels = 4;
inline constexpr int kSpaceDim = kModeLevels * kModeLevels;

constexpr int fock_index(int cubic, int transmon) { return cubic * kModeLevels + transmon; }
constexpr int cubic_number(int index) { return index / kModeLevels; }
constexpr int transmon_number(int index) { return index % kModeLevels; }

namespace basis {
inline constexpr int gg = fock_index(0, 0);
inline constexpr int ge = fock_index(0, 1);  // transmon excited
inline constexpr int eg = fock_index(1, 0);  // cubic transmon excited
inline constexpr int ee = fock_index(1, 1);
inline constexpr int gf = fock_index(0, 2);
inline constexpr int fg = fock_index(2, 0);
}  // namespace basis

enum class Frame { Lab, Rotating, Dressed };

struct DynamicsOptions {
  double rwa_cutoff = 0.6;  ///< GHz; interaction-picture rates above this are dropped
  double rtol_unitary = 1e-9;
  double rtol_lindblad = 1e-8;
  double atol = 1e-12;
  double max_step = 1.0;    ///< ns
};

/// Operators of the effective model in the bare Fock basis.
struct TwoModeModel {
  EffectiveParams params;
  Eigen::VectorXd energies;  ///< static diagonal Hamiltonian
  Eigen::MatrixXcd a, b;     ///< lowering operators
  Eigen::MatrixXcd sideband; ///< raises the cubic mode and lowers the transmon

  explicit TwoModeModel(const EffectiveParams& p);
};

/// Static frame in which a CW sideband tone of fixed amplitude is time independent.
struct DressedFrame {
  double cw_frequency = 0.0;
  double cw_amplitude = 0.0;
  Eigen::MatrixXcd vectors;    ///< column k: dressed state labeled by bare index k
  Eigen::VectorXd energies;    ///< quasi-energies by label

  double cubic_frequency() const;     ///< gg -> eg
  double transmon_frequency() const;  ///< gg -> ge, lab-frame value
  double conditional_transmon_frequency(int cubic_level) const;
  double residual_zz() const;
  /// Carrier that makes the sideband element between labels `from` and `to` resonant,
  /// where `to` has one more cubic and one less transmon excitation than `from`.
  double sideband_resonance(int from, int to) const;
};

DressedFrame make_dressed_frame(const TwoModeModel& m, double cw_frequency, double cw_amplitude);

/// Immutable propagator for a schedule in a given frame.
class Propagator {
 public:
  Propagator(const TwoModeModel& model, const PulseSchedule& schedule, Frame frame,
             const DynamicsOptions& options = {}, std::optional<DecoherenceParams> decoherence = std::nullopt);

  Frame frame() const { return frame_; }
  const DressedFrame& dressed() const { return dressed_; }
  double duration() const { return duration_; }

  /// Evolves the columns of psi (frame basis) from t0 to t1. The evolution is
  /// restricted to the subspace reachable from the nonzero rows of psi.
  Eigen::MatrixXcd evolve(const Eigen::MatrixXcd& psi, double t0, double t1) const;
  std::vector<Eigen::MatrixXcd> evolve_sampled(const Eigen::MatrixXcd& psi, double t0,
                                               const std::vector<double>& times) const;

  Eigen::MatrixXcd evolve_density(const Eigen::MatrixXcd& rho, double t0, double t1) const;
  std::vector<Eigen::MatrixXcd> evolve_density_sampled(const Eigen::MatrixXcd& rho, double t0,
                                                       const std::vector<double>& times) const;

  /// Full frame-basis unitary from 0 to the schedule end (16 x 16).
  Eigen::MatrixXcd unitary() const;
  /// Unitaries at the requested times, starting from identity at t = 0.
  std::vector<Eigen::MatrixXcd> unitary_sampled(const std::vector<double>& times) const;

  void hamiltonian(double t, Eigen::MatrixXcd& h) const;
  std::vector<Eigen::MatrixXcd> collapse_operators(double t) const;

  /// Frame vector at time t <-> Schroedinger vector in the bare basis.
  Eigen::VectorXcd to_bare(const Eigen::VectorXcd& psi, double t) const;
  Eigen::VectorXcd from_bare(const Eigen::VectorXcd& psi, double t) const;

  long last_steps() const { return last_steps_; }

 private:
  struct Element {
    int m, n;
    cd coeff;
    double rate;  ///< GHz
    int term;     ///< -1: static
  };
  struct Term {
    enum Kind { Tone, Cw } kind;
    int tone;
  };

  void add_channel(int term, const Eigen::MatrixXcd& raise, int s, int q, double frequency, double phase);
  double term_amplitude(int term, double t) const;
  std::vector<double> breakpoints(double t0, double t1) const;
  std::vector<int> reachable(const std::vector<int>& seeds) const;

  TwoModeModel model_;
  PulseSchedule schedule_;
  Frame frame_;
  DynamicsOptions options_;
  std::optional<DecoherenceParams> decoherence_;
  DressedFrame dressed_;
  double duration_ = 0.0;
  Eigen::VectorXd frame_energies_;  ///< interaction-picture reference energies (Rotating, Dressed)
  std::vector<Term> terms_;
  std::vector<Element> elements_;
  Eigen::VectorXd static_diagonal_;  ///< Lab only
  std::vector<std::vector<Element>> collapse_;
  mutable long last_steps_ = 0;
};

/// Channels a cubic-port tone at `frequency` couples to under the RWA cutoff.
struct ChannelChoice {
  bool direct = false;
  bool sideband = false;
};
ChannelChoice select_channels(const TwoModeModel& m, double frequency, double cutoff);

}  // namespace snail
