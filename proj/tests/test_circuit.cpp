#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "snail/circuit.hpp"
#include "snail/errors.hpp"

using namespace snail;

namespace {

SnailParams single_row(double flux) { return SnailParams::with_flux_quanta(SnailParams{}, flux); }

SnailParams full_row(double flux) {
  SnailParams p;
  p.charging_energy = 0.18;
  p.junction_scale = 103.0;
  return SnailParams::with_flux_quanta(p, flux);
}

// Central differences of the potential itself.
double numeric_derivative(const SnailParams& p, double x, int order) {
  const double h = 1e-3;
  auto u = [&](double y) { return snail_potential(p, y); };
  switch (order) {
    case 1: return (u(x + h) - u(x - h)) / (2 * h);
    case 2: return (u(x + h) - 2 * u(x) + u(x - h)) / (h * h);
    case 3: return (u(x + 2 * h) - 2 * u(x + h) + 2 * u(x - h) - u(x - 2 * h)) / (2 * h * h * h);
  }
  return 0.0;
}

}  // namespace

TEST(Circuit, MinimumIsStationaryAndDerivativesMatchFiniteDifferences) {
  for (double flux : {0.0, 0.1, 0.2, 0.34, 0.45}) {
    const SnailParams p = single_row(flux);
    const PotentialExpansion e = find_potential_minimum(p);
    EXPECT_NEAR(numeric_derivative(p, e.minimum_phase, 1), 0.0, 1e-4) << flux;
    EXPECT_NEAR(numeric_derivative(p, e.minimum_phase, 2), e.d2 * 2.0, 1e-3 * std::abs(e.d2) + 1e-4)
        << "D2 is the second-order Taylor coefficient, flux " << flux;
    EXPECT_NEAR(numeric_derivative(p, e.minimum_phase, 3), e.d3 * 6.0, 1e-3 * std::abs(e.d2)) << flux;
  }
}

TEST(Circuit, ParityAtZeroFlux) {
  const SnailParams s = single_row(0.0);
  const PotentialExpansion e = find_potential_minimum(s);
  EXPECT_NEAR(e.minimum_phase, 0.0, 1e-12);
  EXPECT_NEAR(single_phase_modes(e, s).beta_c0, 0.0, 1e-12);

  const FullCircuitModes f = full_circuit_modes(full_row(0.0), 12);
  EXPECT_LT(f.abs_beta_c0, 1e-6);
  EXPECT_LT(f.moments.a_gf, 1e-6) << "g-f charge matrix element is parity forbidden";

  const FullCircuitModes g = full_circuit_modes(full_row(0.34), 12);
  EXPECT_GT(g.moments.a_gf, 1e-3);
  EXPECT_GT(g.abs_beta_c0, 1e-3);
}

TEST(Circuit, BetaSignFollowsFlux) {
  const SnailParams a = single_row(0.2), b = single_row(-0.2);
  const double ba = single_phase_modes(find_potential_minimum(a), a).beta_c0;
  const double bb = single_phase_modes(find_potential_minimum(b), b).beta_c0;
  EXPECT_NEAR(ba, -bb, 1e-9 * std::abs(ba));
  EXPECT_NE(ba, 0.0);
}

TEST(Circuit, ChargeHamiltonianIsHermitianAndConverged) {
  const ChargeBasisModel m = build_charge_model(full_row(0.34), 12);
  EXPECT_EQ(m.dimension(), 625);
  EXPECT_LT((m.hamiltonian - m.hamiltonian.adjoint()).norm(), 1e-12);
  const ConvergenceReport r = check_convergence(full_row(0.34), 12);
  EXPECT_TRUE(r.converged);
  EXPECT_THROW(build_converged_charge_model(full_row(0.34), 2), Error);
}

TEST(Circuit, SingleAndFullModelsAgreeOverLowFlux) {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.015 * i);
  const std::vector<FluxRow> rows = flux_sweep(SnailParams{}, full_row(0.0), grid, 12, 1);
  ASSERT_EQ(rows.size(), 2 * grid.size());
  for (size_t i = 0; i < rows.size(); i += 2) {
    ASSERT_TRUE(rows[i].flag.empty() && rows[i + 1].flag.empty());
    EXPECT_EQ(rows[i].model, "single_phase");
    EXPECT_EQ(rows[i + 1].model, "full_circuit");
    EXPECT_NEAR(rows[i + 1].omega_c0 / rows[i].omega_c0, 1.0, 0.02) << rows[i].flux_quanta;
  }
}

TEST(Circuit, SweepIsIndependentOfThreadCount) {
  const std::vector<double> grid{0.0, 0.1, 0.2, 0.3};
  const auto a = flux_sweep(SnailParams{}, full_row(0.0), grid, 10, 1);
  const auto b = flux_sweep(SnailParams{}, full_row(0.0), grid, 10, 3);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].omega_c0, b[i].omega_c0);
    EXPECT_EQ(a[i].abs_beta_c0, b[i].abs_beta_c0);
  }
}

TEST(Circuit, ZeroFluxExpansionMatchesClosedForm) {
  // at zero flux the minimum sits at the origin and every cosine expands directly
  const SnailParams p = single_row(0.0);
  const PotentialExpansion e = find_potential_minimum(p);
  const double ej = p.junction_scale;
  EXPECT_NEAR(e.d2, 0.5 * ej * (p.k1 + 0.5 * p.k2), 1e-12 * ej);
  EXPECT_NEAR(e.d4, -ej * (p.k1 + p.k2 / 8.0) / 24.0, 1e-12 * ej);
}

TEST(Circuit, RejectsInvalidParameters) {
  SnailParams p;
  p.charging_energy = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}
