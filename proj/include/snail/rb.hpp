#pragma once

// Randomized benchmarking (standard and interleaved, one and two qubits).
//
// Every physical 50 ns slot is reduced once to a 256 x 256 superoperator in the
// dressed frame (column-stacked density matrices), including the Z-gauge
// corrections applied as virtual Z rotations. Sequences are then propagated
// exactly through those channels.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "snail/clifford.hpp"
#include "snail/fit.hpp"
#include "snail/gates.hpp"

namespace snail {

constexpr int kSuperDim = kSpaceDim * kSpaceDim;

/// Channel of one slot schedule (starting at t = 0). The dissipator is taken in the
/// toggling frame of the coherent evolution, averaged on Gauss nodes over
/// `subintervals` pieces and exponentiated piecewise.
Eigen::MatrixXcd slot_superoperator(const TwoModeModel& model, const PulseSchedule& schedule,
                                    const std::optional<DecoherenceParams>& decoherence, int subintervals = 10,
                                    const DynamicsOptions& options = {});

/// Superoperator of rho -> U rho U^dagger.
Eigen::MatrixXcd unitary_superoperator(const Eigen::MatrixXcd& u);

struct SlotInfo {
  std::string label;
  double gauge_deviation = 0.0;  ///< Z-gauge fit residual of the coherent part
  double leakage = 0.0;
};

class SlotChannels {
 public:
  /// Error-free channels acting as the ideal gates on the computational block.
  static SlotChannels ideal();

  /// Channels from the calibrated schedules. `pulses` lists the (cubic, transmon)
  /// quarter-turn pairs needed; `gates` the calibrated entanglers. With `idle` set,
  /// that qubit stays in its ground state and the Z gauge is fitted on the
  /// corresponding 2 x 2 block only.
  static SlotChannels simulate(const TwoModeModel& model, const SingleQubitCalibration& single,
                               const std::vector<std::array<int, 2>>& pulses,
                               const std::map<Entangler, GateCalibration>& gates,
                               const std::optional<DecoherenceParams>& decoherence, int threads = 1,
                               int subintervals = 10, std::optional<Port> idle = std::nullopt);

  const Eigen::MatrixXcd& pulses(int cubic_quarter_turns, int transmon_quarter_turns) const;
  const Eigen::MatrixXcd& entangler(Entangler e) const;
  const std::vector<SlotInfo>& info() const { return info_; }
  double slot_duration() const { return slot_duration_; }

 private:
  std::map<std::array<int, 2>, Eigen::MatrixXcd> pulses_;
  std::map<Entangler, Eigen::MatrixXcd> entanglers_;
  std::vector<SlotInfo> info_;
  double slot_duration_ = 50.0;
};

/// All (cubic, transmon) pulse pairs used by the decompositions of a group; for a
/// one-qubit group the pulses act on `qubit`.
std::vector<std::array<int, 2>> required_pulses(const CliffordGroup& group, Port qubit = Port::Cubic);

struct RbConfig {
  std::vector<int> lengths{1, 3, 6, 10, 15, 20, 25, 30};
  int randomizations = 20;
  int shots = 0;  ///< 0: exact expectation values
  std::uint64_t seed = 1234;
  std::optional<Entangler> interleaved;
  Port qubit = Port::Cubic;        ///< one-qubit RB: qubit under test
  Port readout = Port::Transmon;   ///< two-qubit RB: measured qubit
  int threads = 1;
  void validate() const;
};

/// Clifford indices in time order: length - 1 random elements (each followed by the
/// interleaved gate when set) and the inverting element.
std::vector<int> generate_sequence(const CliffordGroup& group, const RbConfig& config, int length,
                                   int randomization);

struct RbPoint {
  int length = 0;
  double mean = 0.0;  ///< ground-state population of the readout qubit
  double sem = 0.0;
};

struct RbResult {
  int n_qubits = 0;
  std::vector<RbPoint> points;
  DecayFit fit;
  double fidelity = 0.0;         ///< average fidelity per Clifford (interleaved: per composite step)
  double fidelity_stderr = 0.0;
  double mean_slots = 0.0;       ///< physical slots per step
  TrendTest trend;
};

/// Throws FitFailed if the decay fit fails or the mean rises significantly with length.
RbResult run_rb(const CliffordGroup& group, const SlotChannels& channels, const RbConfig& config);

struct InterleavedResult {
  RbResult reference, interleaved;
  double gate_fidelity = 0.0, gate_fidelity_stderr = 0.0;
};
/// Gate fidelity from an existing reference and interleaved run.
InterleavedResult combine_interleaved(RbResult reference, RbResult interleaved, int n_qubits);
InterleavedResult run_interleaved_rb(const CliffordGroup& group, const SlotChannels& channels, RbConfig config,
                                     Entangler gate);

/// Average gate fidelity from a depolarizing parameter, d = 2^n.
double rb_fidelity(double p, int n_qubits);
double interleaved_fidelity(double p_reference, double p_interleaved, int n_qubits);

/// Average gate fidelity of an idle of the given duration under T1 and T2*
/// on the listed qubits.
double coherence_limit(const DecoherenceParams& d, double duration_ns, const std::vector<Port>& qubits);

}  // namespace snail
