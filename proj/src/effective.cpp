#include "snail/effective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

#include <unsupported/Eigen/KroneckerProduct>

#include "snail/errors.hpp"
#include "snail/labeling.hpp"

namespace snail {

std::vector<int> greedy_labels(const Eigen::MatrixXcd& vectors, double threshold) {
  const int n = static_cast<int>(vectors.rows());
  const int m = static_cast<int>(vectors.cols());
  std::vector<std::tuple<double, int, int>> pairs;
  pairs.reserve(static_cast<size_t>(n) * m);
  for (int k = 0; k < n; ++k)
    for (int c = 0; c < m; ++c) pairs.emplace_back(std::norm(vectors(k, c)), k, c);
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
  std::vector<int> label(n, -1);
  std::vector<char> used(m, 0);
  int assigned = 0;
  for (const auto& [w, k, c] : pairs) {
    if (label[k] >= 0 || used[c]) continue;
    if (w < threshold)
      throw Error(ErrorKind::LabelingFailed, "best overlap " + std::to_string(w) + " for bare state " + std::to_string(k));
    label[k] = c;
    used[c] = 1;
    if (++assigned == std::min(n, m)) break;
  }
  return label;
}

void DeviceParams::validate() const {
  if (!(std::abs(omega_t0 - omega_c0) > 3.0 * std::abs(g0)))
    throw std::invalid_argument("dispersive condition |omega_t0 - omega_c0| > 3 g0 violated");
  if (!(std::abs(beta_c0) < omega_c0)) throw std::invalid_argument("|beta_c0| must be below omega_c0");
}

namespace {

constexpr double kMinDenominator = 0.010;

void check_denominator(double value, const char* name) {
  if (std::abs(value) < kMinDenominator)
    throw Error(ErrorKind::NearResonantDenominator, std::string(name) + " = " + std::to_string(value) + " GHz");
}

}  // namespace

// The formulas below use d = omega_c0 - omega_t0; with this orientation the
// g0^2/d shifts repel the two modes as exact diagonalization does.
EffectiveParams closed_form_effective(const DeviceParams& p) {
  const double wc = p.omega_c0, b = p.beta_c0, ac = p.alpha_c0;
  const double wt = p.omega_t0, at = p.alpha_t0, g0 = p.g0;
  const double d = wc - wt;

  check_denominator(d, "Delta0");
  check_denominator(ac + d, "alpha_c0 + Delta0");
  check_denominator(at - d, "alpha_t0 - Delta0");
  check_denominator(ac + wc, "alpha_c0 + omega_c0");
  check_denominator(ac + wc + d, "alpha_c0 + omega_c0 + Delta0");
  check_denominator(d - wc, "Delta0 - omega_c0");
  check_denominator(2.0 * ac + wc, "2 alpha_c0 + omega_c0");
  check_denominator(at - d + wc, "alpha_t0 - Delta0 + omega_c0");
  check_denominator(ac - at + wc + d, "alpha_c0 - alpha_t0 + omega_c0 + Delta0");

  EffectiveParams e;
  e.omega_c = wc - 2.0 * b * b / (wc + ac) + g0 * g0 / d;
  e.omega_t = wt - g0 * g0 / d;
  e.alpha_c = ac - 6.0 * b * b * wc / ((wc + ac) * (2.0 * ac + wc)) - 2.0 * g0 * g0 * ac / (d * (ac + d));
  e.alpha_t = at + 2.0 * g0 * g0 * at / (d * (at - d));
  e.g = -g0 * b * (d + wc + 2.0 * ac) / ((ac + d) * (ac + wc));
  e.j_zz = 2.0 * g0 * g0 * (ac + at) / ((ac + d) * (d - at));
  const double common = 2.0 * wc * wc - ac * d + 2.0 * ac * wc;
  e.eta = -2.0 * g0 * b * common / (d * (d - wc) * (ac + wc) * (ac + wc + d));
  e.eta_cz = 2.0 * std::sqrt(2.0) * g0 * b * (common + ac * at) /
             ((d - at) * (at - d + wc) * (ac + wc) * (ac - at + wc + d));
  e.delta0 = wt - wc;
  e.delta = e.omega_t - e.omega_c;
  e.provenance = "formula";
  return e;
}

TruncatedHamiltonian build_truncated_hamiltonian(const DeviceParams& p, int levels) {
  if (levels < 2) throw std::invalid_argument("levels must be >= 2");
  TruncatedHamiltonian h;
  h.levels = levels;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(levels, levels);
  const Eigen::MatrixXd ac = Eigen::kroneckerProduct(a, id);
  const Eigen::MatrixXd bt = Eigen::kroneckerProduct(id, a);
  const Eigen::MatrixXd acd = ac.transpose(), btd = bt.transpose();
  h.matrix = p.omega_c0 * acd * ac + p.beta_c0 * (acd * acd * ac + acd * ac * ac) +
             0.5 * p.alpha_c0 * acd * acd * ac * ac + p.omega_t0 * btd * bt +
             0.5 * p.alpha_t0 * btd * btd * bt * bt + p.g0 * (acd * bt + ac * btd);
  return h;
}

DressedSpectrum exact_dressed(const TruncatedHamiltonian& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix);
  const std::vector<int> label = greedy_labels(es.eigenvectors().cast<std::complex<double>>());
  DressedSpectrum s;
  s.levels = h.levels;
  const int dim = static_cast<int>(h.matrix.rows());
  s.energies.resize(dim);
  s.vectors.resize(dim, dim);
  for (int k = 0; k < dim; ++k) {
    s.energies(k) = es.eigenvalues()(label[k]);
    Eigen::VectorXd v = es.eigenvectors().col(label[k]);
    if (v(k) < 0.0) v = -v;
    s.vectors.col(k) = v;
  }
  return s;
}

namespace {

EffectiveParams from_levels(const DeviceParams& p, double e00, double e10, double e01, double e11, double e20,
                            double e02, const char* provenance) {
  EffectiveParams e;
  e.omega_c = e10 - e00;
  e.omega_t = e01 - e00;
  e.alpha_c = e20 - 2.0 * e10 + e00;
  e.alpha_t = e02 - 2.0 * e01 + e00;
  e.j_zz = e11 - e10 - e01 + e00;
  e.delta0 = p.omega_t0 - p.omega_c0;
  e.delta = e.omega_t - e.omega_c;
  e.provenance = provenance;
  return e;
}

}  // namespace

EffectiveParams exact_effective(const DeviceParams& p, int levels) {
  const DressedSpectrum s = exact_dressed(build_truncated_hamiltonian(p, levels));
  return from_levels(p, s.energy(0, 0), s.energy(1, 0), s.energy(0, 1), s.energy(1, 1), s.energy(2, 0),
                     s.energy(0, 2), "exact");
}

EffectiveParams numeric_sw(const DeviceParams& p, int levels) {
  const TruncatedHamiltonian h = build_truncated_hamiltonian(p, levels);
  const int dim = static_cast<int>(h.matrix.rows());
  const Eigen::VectorXd e0 = h.matrix.diagonal();
  Eigen::MatrixXd v = h.matrix;
  v.diagonal().setZero();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim, dim);
  constexpr double kDegenerate = 1e-3;
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) {
      if (m == n || v(m, n) == 0.0) continue;
      const double gap = e0(m) - e0(n);
      if (std::abs(gap) < kDegenerate)
        throw Error(ErrorKind::DegenerateSubspace, "coupled bare states " + std::to_string(m) + ", " +
                                                      std::to_string(n) + " within 1 MHz");
      s(m, n) = v(m, n) / gap;  // enforces V = -[S, H0]
    }
  const Eigen::MatrixXd heff = e0.asDiagonal().toDenseMatrix() + 0.5 * (s * v - v * s);
  auto at = [&](int i, int j) { return heff(i * levels + j, i * levels + j); };
  return from_levels(p, at(0, 0), at(1, 0), at(0, 1), at(1, 1), at(2, 0), at(0, 2), "numeric_sw");
}

std::pair<double, double> eta_resonance_frequencies(const EffectiveParams& e) {
  return {e.delta, e.delta + e.alpha_t};
}

DeviceParams reconstruct_device(const DressedTargets& t, double beta_c0, double g0) {
  // Newton iteration on the four dressed frequencies with a finite-difference Jacobian.
  Eigen::Vector4d x(t.omega_c, t.alpha_c, t.omega_t, t.alpha_t);
  const Eigen::Vector4d goal(t.omega_c, t.alpha_c, t.omega_t, t.alpha_t);
  auto eval = [&](const Eigen::Vector4d& y) {
    DeviceParams p{y(0), beta_c0, y(1), y(2), y(3), g0};
    const EffectiveParams e = closed_form_effective(p);
    return Eigen::Vector4d(e.omega_c, e.alpha_c, e.omega_t, e.alpha_t);
  };
  for (int it = 0; it < 50; ++it) {
    const Eigen::Vector4d r = eval(x) - goal;
    if (r.cwiseAbs().maxCoeff() < 1e-13) break;
    Eigen::Matrix4d jac;
    for (int k = 0; k < 4; ++k) {
      Eigen::Vector4d dx = Eigen::Vector4d::Zero();
      dx(k) = 1e-7;
      jac.col(k) = (eval(x + dx) - eval(x - dx)) / 2e-7;
    }
    x -= jac.partialPivLu().solve(r);
  }
  if ((eval(x) - goal).cwiseAbs().maxCoeff() > 1e-9)
    throw Error(ErrorKind::CalibrationDiverged, "device reconstruction did not converge");
  return DeviceParams{x(0), beta_c0, x(1), x(2), x(3), g0};
}

}  // namespace snail
