#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "snail/circuit.hpp"
#include "snail/effective.hpp"
#include "snail/errors.hpp"

using namespace snail;

namespace {

DeviceParams paper_device() {
  const SnailParams p = SnailParams::with_flux_quanta(SnailParams{}, 0.34);
  const double beta = single_phase_modes(find_potential_minimum(p), p).beta_c0;
  return reconstruct_device(DressedTargets{}, beta, 0.075);
}

DeviceParams generic_device() { return DeviceParams{3.6, -0.2, -0.07, 4.45, -0.17, 0.075}; }

// Second-order perturbative oracle for the exchange-only problem (beta = 0):
// levels shift by the usual g^2 / detuning sums over the sqrt(n) matrix elements.
double shifted_level(const DeviceParams& p, int i, int j) {
  auto e0 = [&](int a, int b) {
    return a * p.omega_c0 + 0.5 * p.alpha_c0 * a * (a - 1) + b * p.omega_t0 + 0.5 * p.alpha_t0 * b * (b - 1);
  };
  double e = e0(i, j);
  if (i > 0 && j < 3) e += p.g0 * p.g0 * i * (j + 1) / (e0(i, j) - e0(i - 1, j + 1));
  if (j > 0 && i < 3) e += p.g0 * p.g0 * (i + 1) * j / (e0(i, j) - e0(i + 1, j - 1));
  return e;
}

}  // namespace

TEST(Effective, ZeroCouplingLimits) {
  DeviceParams p = generic_device();
  p.g0 = 0.0;
  const EffectiveParams e = closed_form_effective(p);
  EXPECT_EQ(e.j_zz, 0.0);
  EXPECT_EQ(e.g, 0.0);
  EXPECT_EQ(e.eta, 0.0);
  EXPECT_NEAR(e.omega_t, p.omega_t0, 1e-12);
  EXPECT_NEAR(e.alpha_t, p.alpha_t0, 1e-12);

  p = generic_device();
  p.beta_c0 = 0.0;
  const EffectiveParams f = closed_form_effective(p);
  EXPECT_EQ(f.g, 0.0);
  EXPECT_EQ(f.eta, 0.0);
  EXPECT_EQ(f.eta_cz, 0.0);
}

TEST(Effective, OppositeAnharmonicitiesCancelZz) {
  DeviceParams p = generic_device();
  p.alpha_t0 = -p.alpha_c0;
  EXPECT_NEAR(closed_form_effective(p).j_zz, 0.0, 1e-15);
}

TEST(Effective, TruncatedHamiltonianStructure) {
  const DeviceParams p = generic_device();
  const TruncatedHamiltonian h = build_truncated_hamiltonian(p);
  ASSERT_EQ(h.matrix.rows(), 16);
  EXPECT_EQ((h.matrix - h.matrix.transpose()).norm(), 0.0);
  double diag = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      diag += i * p.omega_c0 + 0.5 * p.alpha_c0 * i * (i - 1) + j * p.omega_t0 + 0.5 * p.alpha_t0 * j * (j - 1);
  EXPECT_NEAR(h.matrix.trace(), diag, 1e-12);

  DeviceParams q = p;
  q.beta_c0 = q.g0 = 0.0;
  const TruncatedHamiltonian d = build_truncated_hamiltonian(q);
  EXPECT_EQ((Eigen::MatrixXd(d.matrix.diagonal().asDiagonal()) - d.matrix).norm(), 0.0);
}

TEST(Effective, ExchangeOnlyLevelsMatchPerturbationTheory) {
  DeviceParams p = generic_device();
  p.beta_c0 = 0.0;
  p.g0 = 0.02;
  const DressedSpectrum s = exact_dressed(build_truncated_hamiltonian(p));
  for (auto [i, j] : {std::pair{1, 0}, std::pair{0, 1}, std::pair{1, 1}, std::pair{2, 0}, std::pair{0, 2}})
    EXPECT_NEAR(s.energy(i, j) - s.energy(0, 0), shifted_level(p, i, j), 2e-6) << i << j;
}

TEST(Effective, ZzHalvingCouplingQuarters) {
  DeviceParams p = generic_device();
  p.beta_c0 = 0.0;
  p.g0 = 0.03;
  const double a = exact_effective(p).j_zz;
  p.g0 = 0.015;
  const double b = exact_effective(p).j_zz;
  EXPECT_NEAR(b / a, 0.25, 0.25 * 0.05);
  p.g0 = 0.03;
  const double c = closed_form_effective(p).j_zz;
  p.g0 = 0.015;
  EXPECT_NEAR(closed_form_effective(p).j_zz / c, 0.25, 0.25 * 0.05);
}

TEST(Effective, NumericSwMatchesClosedForm) {
  const DeviceParams p = paper_device();
  const EffectiveParams cf = closed_form_effective(p), sw = numeric_sw(p);
  EXPECT_NEAR(sw.omega_c / cf.omega_c, 1.0, 0.01);
  EXPECT_NEAR(sw.omega_t / cf.omega_t, 1.0, 0.01);
  EXPECT_NEAR(sw.j_zz / cf.j_zz, 1.0, 0.10);

  DeviceParams bare = p;
  bare.beta_c0 = bare.g0 = 0.0;
  const EffectiveParams id = numeric_sw(bare);
  EXPECT_NEAR(id.omega_c, bare.omega_c0, 1e-12);
  EXPECT_NEAR(id.alpha_t, bare.alpha_t0, 1e-12);
}

TEST(Effective, PaperDeviceParameters) {
  const DeviceParams p = paper_device();
  const EffectiveParams e = closed_form_effective(p);
  EXPECT_NEAR(e.omega_c, 3.633, 1e-9);
  EXPECT_NEAR(e.omega_t, 4.479, 1e-9);
  EXPECT_NEAR(e.alpha_c, -0.132, 1e-9);
  EXPECT_NEAR(e.alpha_t, -0.168, 1e-9);
  EXPECT_NEAR(e.g / -0.014, 1.0, 0.15);
  EXPECT_NEAR(e.eta / 0.022, 1.0, 0.15);
  EXPECT_NEAR(std::abs(e.j_zz) / 0.005, 1.0, 0.20);
  EXPECT_NEAR(p.beta_c0 / -0.195, 1.0, 0.15);
  // g carries the sign of -beta (d + wc0 + 2 ac0) / ((ac0 + d)(ac0 + wc0)) with d = wc0 - wt0
  const double d0 = p.omega_c0 - p.omega_t0;
  const double s = -p.beta_c0 * (d0 + p.omega_c0 + 2 * p.alpha_c0) / ((p.alpha_c0 + d0) * (p.alpha_c0 + p.omega_c0));
  EXPECT_EQ(std::signbit(e.g), std::signbit(s));
  // ZZ from the exact spectrum
  EXPECT_NEAR(std::abs(exact_effective(p).j_zz) / std::abs(e.j_zz), 1.0, 0.10);
}

TEST(Effective, ResonanceFrequencies) {
  EffectiveParams e;
  e.omega_c = 3.633;
  e.omega_t = 4.479;
  e.delta = e.omega_t - e.omega_c;
  e.alpha_t = -0.168;
  auto [swap, cz] = eta_resonance_frequencies(e);
  EXPECT_NEAR(swap, 0.846, 1e-12);
  EXPECT_NEAR(cz, 0.678, 1e-12);
  e.alpha_t = 0.0;
  EXPECT_EQ(eta_resonance_frequencies(e).first, eta_resonance_frequencies(e).second);
}

TEST(Effective, NearResonanceIsReported) {
  DeviceParams p = generic_device();
  p.omega_t0 = p.omega_c0 + p.alpha_c0 + 0.001;  // alpha_c0 + omega_c0 - omega_t0 ~ -1 MHz
  try {
    closed_form_effective(p);
    FAIL() << "expected NearResonantDenominator";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NearResonantDenominator);
  }
}

TEST(Effective, RandomSetsAgreeWithExactDiagonalization) {
  std::mt19937_64 rng(99);
  auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  for (double beta_max : {0.1, 0.02}) {
    int n = 0;
    while (n < 100) {
      DeviceParams p;
      p.omega_c0 = u(3.0, 5.0);
      const double d = u(0.5, 1.5) * (u(0, 1) < 0.5 ? -1 : 1);
      p.omega_t0 = p.omega_c0 + d;
      p.alpha_c0 = u(-0.3, -0.05);
      p.alpha_t0 = u(-0.3, -0.1);
      p.beta_c0 = u(-beta_max, beta_max) * p.omega_c0;
      p.g0 = u(0.02, 0.1) * std::min({std::abs(d), std::abs(p.alpha_c0 + d), std::abs(d - p.alpha_t0)});
      EffectiveParams cf, ex;
      try {
        cf = closed_form_effective(p);
        ex = exact_effective(p);
      } catch (const Error& e) {
        ASSERT_TRUE(e.kind() == ErrorKind::NearResonantDenominator || e.kind() == ErrorKind::LabelingFailed);
        continue;
      }
      ++n;
      EXPECT_NEAR(cf.omega_c / ex.omega_c, 1.0, 0.02);
      EXPECT_NEAR(cf.omega_t / ex.omega_t, 1.0, 0.02);
      if (beta_max <= 0.02) EXPECT_NEAR(cf.j_zz / ex.j_zz, 1.0, 0.10);
    }
  }
}
