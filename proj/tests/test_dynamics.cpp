#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "snail/dynamics.hpp"
#include "snail/experiments.hpp"
#include "snail/pulse.hpp"

using namespace snail;

namespace {

EffectiveParams device() {
  EffectiveParams p;
  p.omega_c = 3.633;
  p.omega_t = 4.479;
  p.alpha_c = -0.132;
  p.alpha_t = -0.168;
  p.eta = 0.022;
  p.eta_cz = 0.038;
  p.j_zz = -0.005;
  p.delta = p.omega_t - p.omega_c;
  return p;
}

Eigen::MatrixXcd ket(int index) {
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(kSpaceDim, 1);
  v(index, 0) = 1.0;
  return v;
}

PulseSchedule idle(double duration) {
  PulseSchedule s;
  s.duration = duration;
  return s;
}

DriveTone transmon_tone(double frequency, const PulseEnvelope& env) {
  DriveTone t;
  t.frequency = frequency;
  t.envelope = env;
  t.target = Port::Transmon;
  return t;
}

}  // namespace

TEST(Pulse, GaussianEnvelopeIsLiftedAndContinuous) {
  const PulseEnvelope e = PulseEnvelope::gaussian(1.0, 18.6);
  const double len = e.duration();
  EXPECT_NEAR(e.value(0.5 * len), 1.0, 1e-12);
  EXPECT_NEAR(e.value(0.0), 0.0, 1e-12);
  EXPECT_NEAR(e.value(len), 0.0, 1e-12);
  // at +-fwhm/2 the raw gaussian is 1/2; lifting maps v -> (v - thr) / (1 - thr)
  const double thr = e.truncation;
  EXPECT_NEAR(e.value(0.5 * len - 9.3), (0.5 - thr) / (1 - thr), 1e-9);
  EXPECT_NEAR(e.value(0.5 * len + 9.3), (0.5 - thr) / (1 - thr), 1e-9);
  for (double t = 0.0; t < len; t += 0.01) EXPECT_LT(std::abs(e.value(t + 0.01) - e.value(t)), 0.01);

  // trapezoid integration of the envelope
  double area = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) area += 0.5 * (e.value(len * i / n) + e.value(len * (i + 1) / n)) * len / n;
  EXPECT_NEAR(area, e.unit_area(), 1e-6);
}

TEST(Pulse, FlatTopWindowing) {
  const PulseEnvelope e = PulseEnvelope::flat_top(0.3, 32.0, 3.0, 50.0);
  EXPECT_LE(e.duration(), 50.0 + 1e-12);
  EXPECT_NEAR(e.value(0.5 * e.duration()), 0.3, 1e-12);
  EXPECT_EQ(e.value(-1.0), 0.0);
  EXPECT_EQ(e.value(e.duration() + 1.0), 0.0);
}

TEST(Dynamics, EnergyRelaxationIsExponential) {
  DecoherenceParams d;
  const TwoModeModel m(device());
  const Propagator p(m, idle(1000.0), Frame::Rotating, {}, d);
  const Eigen::MatrixXcd rho = ket(basis::eg) * ket(basis::eg).adjoint();
  const std::vector<double> times{100.0, 400.0, 1000.0};
  const auto out = p.evolve_density_sampled(rho, 0.0, times);
  for (size_t k = 0; k < times.size(); ++k) {
    EXPECT_NEAR(out[k](basis::eg, basis::eg).real(), std::exp(-times[k] / (1e3 * d.t1_cubic)), 1e-5);
    EXPECT_NEAR(out[k].trace().real(), 1.0, 1e-9);
  }
}

TEST(Dynamics, RamseyCoherenceDecaysWithT2Star) {
  DecoherenceParams d;
  const TwoModeModel m(device());
  const Propagator p(m, idle(1000.0), Frame::Rotating, {}, d);
  const Eigen::MatrixXcd psi = (ket(basis::gg) + ket(basis::ge)) / std::sqrt(2.0);
  const Eigen::MatrixXcd rho = psi * psi.adjoint();
  const std::vector<double> times{50.0, 500.0, 1000.0};
  const auto out = p.evolve_density_sampled(rho, 0.0, times);
  for (size_t k = 0; k < times.size(); ++k) {
    EXPECT_NEAR(std::abs(out[k](basis::gg, basis::ge)), 0.5 * std::exp(-times[k] / (1e3 * d.t2_star_transmon)), 1e-5);
    EXPECT_LT((out[k] - out[k].adjoint()).norm(), 1e-10);
  }
}

TEST(Dynamics, DetunedRabiMatchesTwoLevelFormula) {
  const TwoModeModel m(device());
  const double omega = 0.0005, detuning = 0.001;
  PulseSchedule s;
  s.tones.push_back(transmon_tone(m.params.omega_t + detuning, PulseEnvelope::constant(omega, 400.0)));
  s.duration = 400.0;
  const Propagator p(m, s, Frame::Rotating);
  std::vector<double> times;
  for (int i = 1; i <= 20; ++i) times.push_back(20.0 * i);
  const auto out = p.evolve_sampled(ket(basis::gg), 0.0, times);
  const double w = std::sqrt(omega * omega + 0.25 * detuning * detuning);
  for (size_t k = 0; k < times.size(); ++k) {
    const double expected = omega * omega / (w * w) * std::pow(std::sin(2 * std::numbers::pi * w * times[k]), 2);
    EXPECT_NEAR(std::norm(out[k](basis::ge, 0)), expected, 1e-2) << times[k];
    EXPECT_NEAR(out[k].norm(), 1.0, 1e-7);
  }
}

TEST(Dynamics, LabAndRotatingFramesAgree) {
  const TwoModeModel m(device());
  PulseSchedule s;
  s.tones.push_back(transmon_tone(m.params.omega_t, PulseEnvelope::gaussian(0.005, 18.6)));
  s.duration = s.tones[0].end();
  DynamicsOptions opt;
  opt.max_step = 0.02;
  const Propagator lab(m, s, Frame::Lab, opt), rot(m, s, Frame::Rotating);
  const Eigen::VectorXcd a = lab.evolve(ket(basis::gg), 0.0, s.duration).col(0);
  const Eigen::VectorXcd b = rot.to_bare(rot.evolve(ket(basis::gg), 0.0, s.duration).col(0), s.duration);
  EXPECT_GT(std::norm(a(basis::ge)), 1e-3);
  for (int i = 0; i < kSpaceDim; ++i) EXPECT_NEAR(std::norm(a(i)), std::norm(b(i)), 2e-4) << i;
}

TEST(Dynamics, UnitaryIsUnitary) {
  const TwoModeModel m(device());
  PulseSchedule s;
  DriveTone t = transmon_tone(m.params.omega_t - m.params.omega_c, PulseEnvelope::flat_top(0.2, 32.0, 3.0, 50.0));
  t.target = Port::Cubic;
  s.tones.push_back(t);
  s.cw = ContinuousTone{0.93, 0.43, 0.0};
  s.duration = 50.0;
  for (Frame f : {Frame::Rotating, Frame::Dressed}) {
    const Eigen::MatrixXcd u = Propagator(m, s, f).unitary();
    EXPECT_LT((u * u.adjoint() - Eigen::MatrixXcd::Identity(kSpaceDim, kSpaceDim)).norm(), 1e-6);
  }
}

TEST(Dynamics, DressedFrameWithoutCwIsBare) {
  const TwoModeModel m(device());
  const DressedFrame f = make_dressed_frame(m, 0.93, 0.0);
  EXPECT_NEAR(f.cubic_frequency(), m.params.omega_c, 1e-12);
  EXPECT_NEAR(f.transmon_frequency(), m.params.omega_t, 1e-12);
  EXPECT_NEAR(f.residual_zz(), m.params.j_zz, 1e-12);
}

TEST(Dynamics, RamseyAndEigenZzAgree) {
  const TwoModeModel m(device());
  for (double amp : {0.0, 0.3}) {
    const ZzPoint e = zz_point(m, 0.93, amp, ZzMethod::Eigen);
    const ZzPoint r = zz_point(m, 0.93, amp, ZzMethod::Ramsey);
    EXPECT_NEAR(r.residual, e.residual, 1e-4) << amp;
    EXPECT_NEAR(r.f_ge, e.f_ge, 1e-4) << amp;
  }
  EXPECT_NEAR(zz_point(m, 0.93, 0.0, ZzMethod::Eigen).residual, m.params.j_zz, 1e-12);
}
