#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "snail/clifford.hpp"

using namespace snail;

namespace {

const CliffordGroup& group(int n) {
  static const CliffordGroup one(1), two(2);
  return n == 1 ? one : two;
}

// |tr(a^dag b)| / dim equals 1 exactly when a and b agree up to a global phase
double phase_insensitive_overlap(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return std::abs((a.adjoint() * b).trace()) / a.rows();
}

}  // namespace

TEST(Clifford, GroupOrders) {
  EXPECT_EQ(group(1).size(), 24);
  EXPECT_EQ(group(2).size(), 11520);
  EXPECT_EQ(group(1).find(Eigen::MatrixXcd::Identity(2, 2)), CliffordGroup::identity());
}

TEST(Clifford, DecompositionsReproduceElements) {
  for (int n : {1, 2}) {
    const CliffordGroup& g = group(n);
    for (int i = 0; i < g.size(); ++i) {
      const Eigen::MatrixXcd u = ideal_unitary(g.decomposition(i), n);
      ASSERT_NEAR(phase_insensitive_overlap(u, g.matrix(i)), 1.0, 1e-6) << n << " " << i;
    }
  }
}

TEST(Clifford, ClosureAndInverses) {
  for (int n : {1, 2}) {
    const CliffordGroup& g = group(n);
    const int step = n == 1 ? 1 : 97;
    for (int i = 0; i < g.size(); i += step) {
      EXPECT_EQ(g.compose(g.inverse(i), i), CliffordGroup::identity());
      for (int j = 0; j < g.size(); j += step * 7) {
        const int k = g.compose(i, j);
        ASSERT_GE(k, 0);
        EXPECT_NEAR(phase_insensitive_overlap(g.matrix(k), g.matrix(i) * g.matrix(j)), 1.0, 1e-9);
      }
    }
  }
}

TEST(Clifford, ElementsMapPaulisToPaulis) {
  const CliffordGroup& g = group(1);
  Eigen::Matrix2cd x, z;
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  for (int i = 0; i < g.size(); ++i)
    for (const Eigen::Matrix2cd& p : {x, z}) {
      const Eigen::MatrixXcd q = g.matrix(i) * p * g.matrix(i).adjoint();
      // a Pauli conjugate is traceless, Hermitian up to sign and squares to one
      EXPECT_NEAR(std::abs(q.trace()), 0.0, 1e-12);
      EXPECT_LT((q * q - Eigen::MatrixXcd::Identity(2, 2)).norm(), 1e-12);
    }
}

TEST(Clifford, SlotCounts) {
  for (int n : {1, 2}) {
    const CliffordGroup& g = group(n);
    double total = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      int slots = 0;
      for (const CliffordOp& op : g.decomposition(i).ops)
        if (op.kind != CliffordOp::Kind::Phase) ++slots;
      EXPECT_EQ(slots, g.decomposition(i).slots);
      total += slots;
    }
    EXPECT_NEAR(g.mean_slots(), total / g.size(), 1e-12);
  }
  EXPECT_EQ(group(1).decomposition(CliffordGroup::identity()).slots, 0);
  EXPECT_LT(group(1).mean_slots(), 2.0);
}

TEST(Clifford, KeyIgnoresGlobalPhase) {
  const Eigen::MatrixXcd u = group(2).matrix(1234);
  EXPECT_EQ(clifford_key(u), clifford_key(std::polar(1.0, 0.77) * u));
  EXPECT_EQ(group(2).find(std::polar(1.0, -2.0) * u), 1234);
}
