#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "snail/config.hpp"
#include "snail/device.hpp"
#include "snail/errors.hpp"
#include "snail/experiments.hpp"
#include "snail/gates.hpp"

using namespace snail;

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

Eigen::MatrixXcd embed(const Eigen::Matrix4cd& block) {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(kSpaceDim, kSpaceDim);
  const int idx[4] = {basis::gg, basis::ge, basis::eg, basis::ee};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) u(idx[r], idx[c]) = block(r, c);
  return u;
}

Eigen::Matrix4cd z_block(double c, double t) {
  Eigen::Vector4cd d(1.0, std::polar(1.0, t), std::polar(1.0, c), std::polar(1.0, c + t));
  return d.asDiagonal();
}

const Device& paper_device() {
  static const Device dev = build_device(Config::defaults());
  return dev;
}

}  // namespace

TEST(Fsim, MatrixIsUnitaryWithKnownSpecialPoints) {
  for (double sw : {0.0, 0.7, kPi / 2, kPi})
    for (double cp : {-2.0, 0.0, 1.0, kPi}) {
      const Eigen::Matrix4cd u = fsim_matrix({sw, cp});
      EXPECT_LT((u * u.adjoint() - Eigen::Matrix4cd::Identity()).norm(), 1e-14);
    }
  Eigen::Matrix4cd cz = Eigen::Matrix4cd::Identity();
  cz(3, 3) = -1.0;
  EXPECT_LT((fsim_matrix(FsimTarget::cz()) - cz).norm(), 1e-14);
  const Eigen::Matrix4cd sw = fsim_matrix(FsimTarget::swap());
  EXPECT_NEAR(std::abs(sw(1, 2)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(sw(1, 1)), 0.0, 1e-14);
  const Eigen::Matrix4cd is = fsim_matrix(FsimTarget::iswap());
  EXPECT_NEAR(std::abs(is(1, 2)), 1.0, 1e-14);
  EXPECT_NEAR(std::arg(is(1, 2)), -kPi / 2, 1e-14);
  EXPECT_THROW(FsimTarget({4.0, 0.0}).validate(), std::invalid_argument);
}

TEST(Fsim, ExtractionIsZGaugeInvariant) {
  for (auto [sw, cp] : {std::pair{0.0, kPi}, std::pair{kPi / 2, 0.0}, std::pair{1.1, -0.8}, std::pair{kPi, 2.0}}) {
    const Eigen::Matrix4cd block = std::polar(1.0, 0.37) * z_block(0.4, -1.3) * fsim_matrix({sw, cp}) * z_block(-2.1, 0.9);
    const FsimReport r = extract_fsim(embed(block));
    EXPECT_NEAR(r.swap_angle, sw, 1e-6);
    EXPECT_NEAR(std::remainder(r.conditional_phase - cp, 2 * kPi), 0.0, 1e-6);
    EXPECT_LT(r.fsim_deviation, 1e-6);
    EXPECT_NEAR(r.leakage, 0.0, 1e-12);
  }
}

TEST(Fsim, NonFsimBlockIsRejected) {
  Eigen::Matrix4cd h = Eigen::Matrix4cd::Identity();
  const double s = 1.0 / std::sqrt(2.0);
  h.topLeftCorner(2, 2) << s, s, s, -s;  // Hadamard on the transmon, cubic in g
  EXPECT_THROW(extract_fsim(embed(h)), Error);
}

TEST(Fsim, ZGaugeFitRecoversPhases) {
  const Eigen::Matrix4cd ideal = fsim_matrix({0.9, 0.4});
  const Eigen::Matrix4cd block = std::polar(1.0, -0.2) * z_block(0.3, 0.1) * ideal * z_block(1.0, -0.5);
  const ZGaugeFit f = fit_z_gauge(block, ideal);
  EXPECT_LT(f.deviation, 1e-8);
}

TEST(Gates, CalibratedCzHasConditionalPhasePi) {
  const Device& dev = paper_device();
  const GateCalibration cal = calibrate(FsimTarget::cz(), dev.model, dev.cw, dev.layout);
  const PulseSchedule s = synthesize_gate(cal);
  EXPECT_LE(s.end(), dev.layout.slot + 1e-9);
  const Eigen::MatrixXcd u = Propagator(dev.model, s, Frame::Dressed).unitary();
  const FsimReport r = extract_fsim(u);
  EXPECT_LT(r.swap_angle, 2e-2);
  EXPECT_NEAR(std::abs(std::remainder(r.conditional_phase, 2 * kPi)), kPi, 2e-2);
  EXPECT_LT(r.leakage, 1e-3);

  std::vector<double> phases;
  for (int i = 0; i < 25; ++i) phases.push_back(2 * kPi * i / 25);
  const ConditionalRamsey ramsey = conditional_ramsey(u, false, phases);
  EXPECT_NEAR(std::abs(ramsey.conditional_phase), kPi, 1e-2);
}

TEST(Gates, IdentityTargetNeedsNoTones) {
  const Device& dev = paper_device();
  const GateCalibration cal = initial_calibration(FsimTarget::identity(), dev.model, dev.cw, dev.layout);
  EXPECT_FALSE(cal.cp_tone);
  EXPECT_EQ(cal.swap_amplitude, 0.0);
}

TEST(Gates, ParseTarget) {
  EXPECT_EQ(parse_gate_target("cz").conditional_phase, FsimTarget::cz().conditional_phase);
  EXPECT_EQ(parse_gate_target("custom", 1.0, 0.5).swap_angle, 1.0);
  EXPECT_THROW(parse_gate_target("cnot"), Error);
}
