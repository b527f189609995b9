#pragma once

// One- and two-qubit Clifford groups with decompositions into the device's
// primitives: X rotations by multiples of pi/2 (one 50 ns slot, both qubits may
// pulse simultaneously), virtual Z rotations (free) and the CZ / iSWAP / SWAP
// entanglers (one slot each).
//
// Two-qubit matrices use the basis (gg, ge, eg, ee) = index 2*cubic + transmon.
// Rz(phi) = diag(1, e^{i phi}), X(theta) = exp(-i theta sigma_x / 2).

#include <Eigen/Dense>
#include <array>
#include <string>
#include <unordered_map>
#include <vector>

#include "snail/gates.hpp"

namespace snail {

enum class Entangler { CZ, ISwap, Swap };

FsimTarget entangler_target(Entangler e);
std::string entangler_name(Entangler e);

/// One step of a decomposition. Angles are in quarter turns (multiples of pi/2);
/// index 0 of `quarter_turns` is qubit 0 (the cubic transmon in a two-qubit group).
struct CliffordOp {
  enum class Kind { Phase, Pulses, Entangle } kind = Kind::Phase;
  std::array<int, 2> quarter_turns{0, 0};
  Entangler entangler = Entangler::CZ;
};

struct Decomposition {
  std::vector<CliffordOp> ops;  ///< in time order
  int slots = 0;                ///< physical 50 ns slots
};

/// Ideal unitary of a decomposition on n qubits (2 x 2 or 4 x 4).
Eigen::MatrixXcd ideal_unitary(const Decomposition& d, int n_qubits);
Eigen::MatrixXcd ideal_unitary(const CliffordOp& op, int n_qubits);

class CliffordGroup {
 public:
  /// Builds the group by closure over generators. n_qubits is 1 or 2.
  explicit CliffordGroup(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  int size() const { return static_cast<int>(matrices_.size()); }
  static constexpr int identity() { return 0; }

  const Eigen::MatrixXcd& matrix(int i) const { return matrices_.at(i); }
  const Decomposition& decomposition(int i) const { return decompositions_.at(i); }

  /// Index of the element equal to u up to global phase, or -1.
  int find(const Eigen::MatrixXcd& u) const;
  /// Index of matrix(later) * matrix(earlier).
  int compose(int later, int earlier) const;
  int inverse(int i) const { return inverses_.at(i); }

  double mean_slots() const;

 private:
  int add(const Eigen::MatrixXcd& u);

  int n_qubits_;
  std::vector<Eigen::MatrixXcd> matrices_;
  std::vector<Decomposition> decompositions_;
  std::vector<int> inverses_;
  std::unordered_map<std::string, int> index_;
};

/// Phase-insensitive key of a Clifford matrix.
std::string clifford_key(const Eigen::MatrixXcd& u);

}  // namespace snail
