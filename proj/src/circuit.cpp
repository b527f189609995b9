#include "snail/circuit.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "snail/errors.hpp"
#include "snail/parallel.hpp"
#include "snail/units.hpp"

namespace snail {

namespace {

constexpr double kPi = std::numbers::pi;

double canonical_phase(double x) {
  double y = std::remainder(x, units::two_pi);
  if (y < -kPi) y += units::two_pi;
  return y;
}

}  // namespace

SnailParams SnailParams::with_flux_quanta(SnailParams p, double flux_quanta) {
  p.reduced_flux = canonical_phase(units::two_pi * flux_quanta);
  return p;
}

double SnailParams::flux_quanta() const { return reduced_flux / units::two_pi; }

void SnailParams::validate() const {
  if (!(charging_energy > 0.0)) throw std::invalid_argument("charging_energy must be > 0");
  if (!(junction_scale > 0.0)) throw std::invalid_argument("junction_scale must be > 0");
  if (!(k1 > 0.0 && k2 > 0.0 && k3 > 0.0)) throw std::invalid_argument("k1, k2, k3 must be > 0");
  if (!std::isfinite(reduced_flux)) throw std::invalid_argument("reduced_flux must be finite");
}

// U(x) = -k1 EJ0 cos x - 2 k2 EJ0 cos((phi - x)/2)
double snail_potential(const SnailParams& p, double x, int derivative) {
  const double a = p.k1 * p.junction_scale;
  const double b = 2.0 * p.k2 * p.junction_scale;
  const double u = 0.5 * (p.reduced_flux - x);
  switch (derivative) {
    case 0: return -a * std::cos(x) - b * std::cos(u);
    case 1: return a * std::sin(x) - 0.5 * b * std::sin(u);
    case 2: return a * std::cos(x) + 0.25 * b * std::cos(u);
    case 3: return -a * std::sin(x) + 0.125 * b * std::sin(u);
    case 4: return -a * std::cos(x) - 0.0625 * b * std::cos(u);
    default: throw std::invalid_argument("derivative order must be 0..4");
  }
}

double effective_charging_energy(const SnailParams& p) {
  const double s = p.k2 + p.k3;
  return p.charging_energy * s / (s + p.k1 * s + p.k2 * p.k3);
}

PotentialExpansion find_potential_minimum(const SnailParams& p) {
  p.validate();
  if (std::abs(p.k2 - p.k3) > 1e-12 * std::max(p.k2, p.k3))
    throw std::invalid_argument("single-phase expansion assumes k2 == k3");

  const double target = canonical_phase(p.reduced_flux);
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(target) / (0.005 * units::two_pi))));
  SnailParams q = p;
  double x = 0.0;
  for (int s = 1; s <= steps; ++s) {
    q.reduced_flux = target * static_cast<double>(s) / steps;
    // damped Newton on U'(x), warm-started from the previous flux step
    for (int it = 0; it < 100; ++it) {
      const double g = snail_potential(q, x, 1);
      const double h = snail_potential(q, x, 2);
      if (!(h > 0.0)) throw Error(ErrorKind::NoMinimum, "U'' <= 0 during continuation at phi=" + std::to_string(q.reduced_flux));
      double dx = -g / h;
      if (std::abs(dx) > 0.2) dx = std::copysign(0.2, dx);
      x += dx;
      if (std::abs(dx) < 1e-15 && std::abs(g) < 1e-12) break;
    }
  }
  // polish at the final flux
  for (int it = 0; it < 5; ++it) {
    const double g = snail_potential(q, x, 1);
    const double h = snail_potential(q, x, 2);
    if (g == 0.0) break;
    x -= g / h;
  }

  PotentialExpansion e;
  e.minimum_phase = x;
  e.d2 = snail_potential(q, x, 2) / 2.0;
  e.d3 = snail_potential(q, x, 3) / 6.0;
  e.d4 = snail_potential(q, x, 4) / 24.0;
  if (target == 0.0) {
    e.minimum_phase = 0.0;
    e.d3 = 0.0;
  }
  if (!(e.d2 > 0.0)) throw Error(ErrorKind::NoMinimum, "D2 <= 0 at continued solution");
  return e;
}

BareCubicModes single_phase_modes(const PotentialExpansion& e, const SnailParams& p) {
  if (!(e.d2 > 0.0)) throw std::invalid_argument("single_phase_modes requires D2 > 0");
  BareCubicModes m;
  const double ec = effective_charging_energy(p);
  m.effective_charging = ec;
  m.omega_c0 = std::sqrt(16.0 * e.d2 * ec) + 12.0 * e.d4 * ec / e.d2;
  m.beta_c0 = 3.0 * std::pow(ec / e.d2, 0.75) * e.d3;
  m.alpha_c0 = 6.0 * e.d4 * ec / e.d2;
  return m;
}

ChargeBasisModel build_charge_model(const SnailParams& p, int cutoff) {
  p.validate();
  if (cutoff < 1) throw std::invalid_argument("charge cutoff must be >= 1");
  ChargeBasisModel m;
  m.cutoff = cutoff;
  const int w = 2 * cutoff + 1;
  const int dim = w * w;
  m.labels.reserve(dim);
  for (int n1 = -cutoff; n1 <= cutoff; ++n1)
    for (int n2 = -cutoff; n2 <= cutoff; ++n2) m.labels.emplace_back(n1, n2);

  Eigen::Matrix2d cap;
  cap << 1.0 + p.k1 + p.k3, -p.k3, -p.k3, p.k2 + p.k3;
  const Eigen::Matrix2d inv = cap.inverse();

  m.hamiltonian = Eigen::MatrixXcd::Zero(dim, dim);
  const double t1 = -0.5 * p.k1 * p.junction_scale;
  const double t2 = -0.5 * p.k2 * p.junction_scale;
  const std::complex<double> t3 = -0.5 * p.k3 * p.junction_scale * std::polar(1.0, p.reduced_flux);
  for (int i = 0; i < dim; ++i) {
    const auto [n1, n2] = m.labels[i];
    const Eigen::Vector2d n(n1, n2);
    m.hamiltonian(i, i) = 4.0 * p.charging_energy * n.dot(inv * n);
    if (n1 < cutoff) {
      const int j = m.index(n1 + 1, n2);
      m.hamiltonian(j, i) += t1;
      m.hamiltonian(i, j) += t1;
    }
    if (n2 < cutoff) {
      const int j = m.index(n1, n2 + 1);
      m.hamiltonian(j, i) += t2;
      m.hamiltonian(i, j) += t2;
    }
    if (n1 < cutoff && n2 > -cutoff) {
      const int j = m.index(n1 + 1, n2 - 1);
      m.hamiltonian(j, i) += t3;
      m.hamiltonian(i, j) += std::conj(t3);
    }
  }
  return m;
}

Eigenpairs diagonalize(const ChargeBasisModel& m, int n_levels) {
  if (n_levels < 1 || n_levels > m.dimension()) throw std::invalid_argument("n_levels out of range");
  Eigenpairs out;
  if (m.hamiltonian.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.hamiltonian.real());
    out.energies = es.eigenvalues().head(n_levels);
    out.vectors = es.eigenvectors().leftCols(n_levels).cast<std::complex<double>>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.hamiltonian);
    out.energies = es.eigenvalues().head(n_levels);
    out.vectors = es.eigenvectors().leftCols(n_levels);
  }
  out.energies.array() -= out.energies(0);
  return out;
}

std::vector<double> spectrum(const ChargeBasisModel& m, int n_levels) {
  const Eigenpairs e = diagonalize(m, n_levels);
  return {e.energies.data(), e.energies.data() + e.energies.size()};
}

TransitionMoments transition_moments(const ChargeBasisModel& m, const Eigenpairs& low) {
  if (low.energies.size() < 3) throw std::invalid_argument("transition_moments needs three levels");
  if (std::abs(low.energies(2) - low.energies(1)) < 1e-6)
    throw Error(ErrorKind::DegenerateLevels, "E1 and E2 within 1e-6 GHz");
  Eigen::VectorXd n1(m.dimension());
  for (int i = 0; i < m.dimension(); ++i) n1(i) = m.labels[i].first;
  const Eigen::VectorXcd g = low.vectors.col(0);
  TransitionMoments t;
  t.a_ge = std::abs(g.dot(n1.cwiseProduct(low.vectors.col(1))));
  t.a_gf = std::abs(g.dot(n1.cwiseProduct(low.vectors.col(2))));
  return t;
}

FullCircuitModes full_circuit_modes(const SnailParams& p, int cutoff) {
  const ChargeBasisModel m = build_charge_model(p, cutoff);
  const Eigenpairs low = diagonalize(m, 3);
  FullCircuitModes r;
  r.omega_c0 = low.energies(1);
  r.alpha_c0 = low.energies(2) - 2.0 * low.energies(1);
  r.moments = transition_moments(m, low);
  r.abs_beta_c0 = 0.5 * (r.omega_c0 + r.alpha_c0) * r.moments.a_gf / r.moments.a_ge;
  double sign = 0.0;
  if (p.reduced_flux != 0.0 && std::abs(p.k2 - p.k3) <= 1e-12 * std::max(p.k2, p.k3)) {
    const PotentialExpansion e = find_potential_minimum(p);
    sign = (e.d3 > 0.0) - (e.d3 < 0.0);
  }
  r.beta_c0 = sign * r.abs_beta_c0;
  return r;
}

ConvergenceReport check_convergence(const SnailParams& p, int cutoff, double tolerance) {
  ConvergenceReport r;
  r.cutoff = cutoff;
  auto absolute = [&](int n) {
    const ChargeBasisModel m = build_charge_model(p, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.hamiltonian, Eigen::EigenvaluesOnly);
    return Eigen::Vector3d(es.eigenvalues().head(3));
  };
  r.max_shift = (absolute(cutoff + 2) - absolute(cutoff)).cwiseAbs().maxCoeff();
  r.converged = r.max_shift < tolerance;
  return r;
}

ChargeBasisModel build_converged_charge_model(const SnailParams& p, int cutoff) {
  const ConvergenceReport c = check_convergence(p, cutoff);
  if (!c.converged)
    throw Error(ErrorKind::CutoffTooSmall, "lowest levels shift by " + std::to_string(c.max_shift) +
                                               " GHz from N=" + std::to_string(cutoff) + " to N+2");
  return build_charge_model(p, cutoff);
}

std::vector<FluxRow> flux_sweep(const SnailParams& single_phase, const SnailParams& full_circuit,
                                const std::vector<double>& flux_grid, int cutoff, int threads) {
  const int n = static_cast<int>(flux_grid.size());
  std::vector<FluxRow> rows(2 * n);
  parallel_for(n, threads, [&](int i) {
    const double f = flux_grid[i];
    FluxRow& sp = rows[2 * i];
    FluxRow& fc = rows[2 * i + 1];
    sp.flux_quanta = fc.flux_quanta = f;
    sp.model = "single_phase";
    fc.model = "full_circuit";
    if (!(f > -0.5 && f < 0.5)) {
      sp.flag = fc.flag = "OutOfRange";
      return;
    }
    try {
      const SnailParams p = SnailParams::with_flux_quanta(single_phase, f);
      const BareCubicModes m = single_phase_modes(find_potential_minimum(p), p);
      sp.omega_c0 = m.omega_c0;
      sp.alpha_c0 = m.alpha_c0;
      sp.abs_beta_c0 = std::abs(m.beta_c0);
    } catch (const Error& e) {
      sp.flag = to_string(e.kind());
    }
    try {
      const FullCircuitModes m = full_circuit_modes(SnailParams::with_flux_quanta(full_circuit, f), cutoff);
      fc.omega_c0 = m.omega_c0;
      fc.alpha_c0 = m.alpha_c0;
      fc.abs_beta_c0 = m.abs_beta_c0;
    } catch (const Error& e) {
      fc.flag = to_string(e.kind());
    }
  });
  return rows;
}

}  // namespace snail
