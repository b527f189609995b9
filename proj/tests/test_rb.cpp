#include <gtest/gtest.h>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

#include "snail/errors.hpp"
#include "snail/rb.hpp"

using namespace snail;

namespace {

const CliffordGroup& group(int n) {
  static const CliffordGroup one(1), two(2);
  return n == 1 ? one : two;
}

// Column-stacked Lindbladian of one qubit under T1 and T2*, exponentiated directly.
Eigen::Matrix4cd qubit_channel(double t1, double t2, double t) {
  const double tphi = 1.0 / (1.0 / t2 - 0.5 / t1);
  Eigen::Matrix2cd lower, number, id = Eigen::Matrix2cd::Identity();
  lower << 0, 1, 0, 0;
  number << 0, 0, 0, 1;
  auto dissipator = [&](const Eigen::Matrix2cd& c) -> Eigen::Matrix4cd {
    const Eigen::Matrix2cd cdc = c.adjoint() * c;
    return Eigen::kroneckerProduct(c.conjugate(), c).eval() -
           0.5 * Eigen::kroneckerProduct(id, cdc).eval() - 0.5 * Eigen::kroneckerProduct(cdc.transpose(), id).eval();
  };
  const Eigen::Matrix4cd l = dissipator(std::sqrt(1.0 / t1) * lower) + dissipator(std::sqrt(2.0 / tphi) * number);
  return (l * t).exp();
}

EffectiveParams device() {
  EffectiveParams p;
  p.omega_c = 3.633;
  p.omega_t = 4.479;
  p.alpha_c = -0.132;
  p.alpha_t = -0.168;
  p.eta = 0.022;
  p.eta_cz = 0.038;
  p.j_zz = -0.005;
  return p;
}

}  // namespace

TEST(Rb, FidelityConversions) {
  EXPECT_DOUBLE_EQ(rb_fidelity(1.0, 2), 1.0);
  EXPECT_DOUBLE_EQ(rb_fidelity(0.0, 1), 0.5);
  EXPECT_DOUBLE_EQ(rb_fidelity(0.9, 2), 1.0 - 0.1 * 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(interleaved_fidelity(0.9, 0.9, 2), 1.0);
}

TEST(Rb, SequencesInvertToIdentity) {
  for (int n : {1, 2}) {
    const CliffordGroup& g = group(n);
    RbConfig cfg;
    cfg.seed = 7;
    for (bool inter : {false, true}) {
      cfg.interleaved = inter ? std::optional<Entangler>(Entangler::ISwap) : std::nullopt;
      if (inter && n == 1) continue;
      for (int len : {1, 5, 17}) {
        const std::vector<int> seq = generate_sequence(g, cfg, len, 3);
        EXPECT_EQ(static_cast<int>(seq.size()), inter ? 2 * (len - 1) + 1 : len);
        Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(1 << n, 1 << n);
        for (int k : seq) u = g.matrix(k) * u;
        EXPECT_EQ(g.find(u), CliffordGroup::identity()) << n << " " << len;
      }
    }
  }
}

TEST(Rb, SequencesAreSeedDeterministic) {
  RbConfig a;
  a.seed = 11;
  RbConfig b = a;
  b.seed = 12;
  const CliffordGroup& g = group(2);
  EXPECT_EQ(generate_sequence(g, a, 20, 4), generate_sequence(g, a, 20, 4));
  EXPECT_NE(generate_sequence(g, a, 20, 4), generate_sequence(g, b, 20, 4));
  EXPECT_NE(generate_sequence(g, a, 20, 4), generate_sequence(g, a, 20, 5));
}

TEST(Rb, IdealChannelsDoNotDecay) {
  const SlotChannels ideal = SlotChannels::ideal();
  RbConfig cfg;
  cfg.lengths = {1, 4, 8, 16};
  cfg.randomizations = 5;
  for (int n : {1, 2}) {
    const RbResult r = run_rb(group(n), ideal, cfg);
    for (const RbPoint& p : r.points) EXPECT_NEAR(p.mean, 1.0, 1e-9);
    EXPECT_NEAR(r.fidelity, 1.0, 1e-6);
  }
  cfg.interleaved = Entangler::CZ;
  EXPECT_NEAR(run_rb(group(2), ideal, cfg).fidelity, 1.0, 1e-6);
}

TEST(Rb, CoherenceLimitMatchesLindbladOracle) {
  const DecoherenceParams d;
  for (double t : {50.0, 150.0}) {
    const Eigen::Matrix4cd c = qubit_channel(1e3 * d.t1_cubic, 1e3 * d.t2_star_cubic, t);
    const Eigen::Matrix4cd q = qubit_channel(1e3 * d.t1_transmon, 1e3 * d.t2_star_transmon, t);
    // average fidelity (d F_process + 1) / (d + 1) with F_process = tr(S) / d^2
    const double f1 = (2.0 * c.trace().real() / 4.0 + 1.0) / 3.0;
    EXPECT_NEAR(coherence_limit(d, t, {Port::Cubic}), f1, 1e-12);
    const Eigen::MatrixXcd both = Eigen::kroneckerProduct(c, q);
    const double f2 = (4.0 * both.trace().real() / 16.0 + 1.0) / 5.0;
    EXPECT_NEAR(coherence_limit(d, t, {Port::Cubic, Port::Transmon}), f2, 1e-12);
  }
}

TEST(Rb, IdleSlotChannelIsTracePreservingAndDecays) {
  const TwoModeModel m{device()};
  PulseSchedule idle;
  idle.duration = 50.0;
  const DecoherenceParams d;
  const Eigen::MatrixXcd s = slot_superoperator(m, idle, d, 4);
  Eigen::VectorXcd id = Eigen::VectorXcd::Zero(kSuperDim);
  for (int i = 0; i < kSpaceDim; ++i) id(i + kSpaceDim * i) = 1.0;
  EXPECT_LT((s.adjoint() * id - id).norm(), 1e-8);
  const int eg = basis::eg + kSpaceDim * basis::eg;
  EXPECT_NEAR(s(eg, eg).real(), std::exp(-50.0 / (1e3 * d.t1_cubic)), 1e-6);

  // without decoherence the idle slot is coherent: purity-preserving on the ground state
  const Eigen::MatrixXcd u = slot_superoperator(m, idle, std::nullopt, 4);
  EXPECT_NEAR(std::abs(u(eg, eg)), 1.0, 1e-8);
}

TEST(Rb, CombineInterleaved) {
  RbResult ref, inter;
  ref.fit.p = 0.9;
  ref.fit.p_stderr = 0.01;
  inter.fit.p = 0.81;
  inter.fit.p_stderr = 0.0;
  const InterleavedResult r = combine_interleaved(ref, inter, 2);
  EXPECT_NEAR(r.gate_fidelity, 1.0 - 0.1 * 0.75, 1e-12);
  EXPECT_NEAR(r.gate_fidelity_stderr, 0.9 * (0.01 / 0.9) * 0.75, 1e-12);
}

TEST(Rb, InvalidConfigRejected) {
  RbConfig cfg;
  cfg.lengths = {};
  EXPECT_ANY_THROW(cfg.validate());
  cfg = RbConfig{};
  cfg.randomizations = 0;
  EXPECT_ANY_THROW(cfg.validate());
}
