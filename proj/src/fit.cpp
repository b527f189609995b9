#include "snail/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <unsupported/Eigen/NonLinearOptimization>

#include "snail/errors.hpp"
#include "snail/units.hpp"

namespace snail {

namespace {

void check_sizes(const std::vector<double>& x, const std::vector<double>& y, size_t minimum) {
  if (x.size() != y.size()) throw std::invalid_argument("fit: x and y differ in length");
  if (x.size() < minimum) throw Error(ErrorKind::FitFailed, "too few points");
}

// Generic Levenberg-Marquardt adaptor around a residual callback.
template <class Residual>
struct Functor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  Residual r;
  int n_in, n_out;
  int inputs() const { return n_in; }
  int values() const { return n_out; }
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    r(x, f);
    return 0;
  }
  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& j) const {
    Eigen::VectorXd f0(n_out), f1(n_out);
    r(x, f0);
    for (int k = 0; k < n_in; ++k) {
      Eigen::VectorXd xs = x;
      const double h = 1e-7 * std::max(1.0, std::abs(x(k)));
      xs(k) += h;
      r(xs, f1);
      j.col(k) = (f1 - f0) / h;
    }
    return 0;
  }
};

template <class Residual>
Eigen::VectorXd levenberg_marquardt(Residual r, Eigen::VectorXd x0, int n_out, Eigen::MatrixXd* jac_out = nullptr,
                                    int max_evaluations = 2000) {
  Functor<Residual> f{r, static_cast<int>(x0.size()), n_out};
  Eigen::LevenbergMarquardt<Functor<Residual>> lm(f);
  lm.parameters.maxfev = max_evaluations;
  lm.parameters.xtol = 1e-12;
  lm.parameters.ftol = 1e-14;
  const auto status = lm.minimize(x0);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters)
    throw Error(ErrorKind::FitFailed, "improper input to least squares");
  if (jac_out) {
    jac_out->resize(n_out, x0.size());
    f.df(x0, *jac_out);
  }
  return x0;
}

}  // namespace

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  check_sizes(x, y, 2);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorKind::FitFailed, "degenerate abscissa");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double sse = std::max(0.0, syy - f.slope * sxy);
  f.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
  if (x.size() > 2) f.slope_stderr = std::sqrt(sse / (n - 2) / sxx);
  return f;
}

CosineFit fit_cosine(const std::vector<double>& x, const std::vector<double>& y) {
  check_sizes(x, y, 3);
  Eigen::MatrixXd a(x.size(), 3);
  Eigen::VectorXd b(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    a(i, 0) = std::cos(x[i]);
    a(i, 1) = std::sin(x[i]);
    a(i, 2) = 1.0;
    b(i) = y[i];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  CosineFit f;
  f.amplitude = std::hypot(c(0), c(1));
  f.phase = std::atan2(c(1), c(0));
  f.offset = c(2);
  f.rms = std::sqrt((a * c - b).squaredNorm() / static_cast<double>(x.size()));
  return f;
}

namespace {

// Residual norm of the linear sinusoid model at fixed frequency.
double oscillation_residual(const std::vector<double>& t, const std::vector<double>& y, double f, Eigen::Vector3d* coef) {
  Eigen::MatrixXd a(t.size(), 3);
  Eigen::VectorXd b(t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = std::cos(units::phase(f, t[i]));
    a(i, 2) = std::sin(units::phase(f, t[i]));
    b(i) = y[i];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  if (coef) *coef = c;
  return (a * c - b).squaredNorm();
}

}  // namespace

OscillationFit fit_oscillation(const std::vector<double>& t, const std::vector<double>& y) {
  check_sizes(t, y, 4);
  const double span = t.back() - t.front();
  if (span <= 0.0) throw Error(ErrorKind::FitFailed, "time grid must be increasing");
  const double dt = span / static_cast<double>(t.size() - 1);
  const double f_max = 0.5 / dt;
  const double df = 0.1 / span;
  double best_f = 0.0, best = std::numeric_limits<double>::infinity();
  for (double f = df; f < f_max; f += df) {
    const double r = oscillation_residual(t, y, f, nullptr);
    if (r < best) {
      best = r;
      best_f = f;
    }
  }
  const double lo = std::max(best_f - df, 0.25 * df), hi = std::min(best_f + df, f_max);
  const auto res = boost::math::tools::brent_find_minima(
      [&](double f) { return oscillation_residual(t, y, f, nullptr); }, lo, hi, 40);
  Eigen::Vector3d c;
  const double r = oscillation_residual(t, y, res.first, &c);
  OscillationFit out;
  out.frequency = res.first;
  out.offset = c(0);
  out.amplitude = std::hypot(c(1), c(2));
  out.rms = std::sqrt(r / static_cast<double>(t.size()));
  return out;
}

PeakFit fit_gaussian_peak(const std::vector<double>& x, const std::vector<double>& y) {
  check_sizes(x, y, 5);
  const auto imax = std::max_element(y.begin(), y.end()) - y.begin();
  const double base0 = *std::min_element(y.begin(), y.end());
  const double h0 = y[imax] - base0;
  if (!(h0 > 0.0)) throw Error(ErrorKind::FitFailed, "flat trace has no peak");
  // width guess from the points above half maximum
  double lo = x[imax], hi = x[imax];
  for (size_t i = 0; i < x.size(); ++i)
    if (y[i] - base0 > 0.5 * h0) {
      lo = std::min(lo, x[i]);
      hi = std::max(hi, x[i]);
    }
  const double step = std::abs(x[1] - x[0]);
  const double s0 = std::max(hi - lo, step) / 2.3548;

  auto resid = [&](const Eigen::VectorXd& p, Eigen::VectorXd& f) {
    for (size_t i = 0; i < x.size(); ++i) {
      const double d = (x[i] - p(0)) / p(2);
      f(i) = p(3) + p(1) * std::exp(-0.5 * d * d) - y[i];
    }
  };
  Eigen::VectorXd p0(4);
  p0 << x[imax], h0, s0, base0;
  const Eigen::VectorXd p = levenberg_marquardt(resid, p0, static_cast<int>(x.size()));
  Eigen::VectorXd f(x.size());
  resid(p, f);
  PeakFit out;
  out.center = p(0);
  out.height = p(1);
  out.fwhm = 2.0 * std::sqrt(2.0 * std::log(2.0)) * std::abs(p(2));
  out.baseline = p(3);
  out.rms = std::sqrt(f.squaredNorm() / static_cast<double>(x.size()));
  return out;
}

DecayFit fit_decay(const std::vector<double>& n, const std::vector<double>& y, const std::vector<double>& sigma,
                   std::optional<double> fixed_b) {
  check_sizes(n, y, 3);
  if (sigma.size() != y.size()) throw std::invalid_argument("fit_decay: sigma length mismatch");
  std::vector<double> w(y.size());
  const double floor = 1e-6;
  for (size_t i = 0; i < y.size(); ++i) w[i] = 1.0 / std::max(sigma[i] > 0 ? sigma[i] : 1.0, floor);

  // initial p from a log-linear regression with B = 0.5
  const double b_init = fixed_b.value_or(0.5);
  std::vector<double> xs, ls;
  for (size_t i = 0; i < y.size(); ++i)
    if (y[i] - b_init > 1e-9) {
      xs.push_back(n[i]);
      ls.push_back(std::log(y[i] - b_init));
    }
  double p_init = 0.98;
  if (xs.size() >= 2) {
    const double s = linear_fit(xs, ls).slope;
    p_init = std::clamp(std::exp(s), 0.5, 0.99999);
  }
  // p parameterized through a logistic map so it stays inside (0, 1)
  auto to_p = [](double u) { return 1.0 / (1.0 + std::exp(-u)); };
  const int np = fixed_b ? 2 : 3;  // (A, u [, B])
  auto resid = [&](const Eigen::VectorXd& q, Eigen::VectorXd& f) {
    const double p = to_p(q(1));
    const double bb = fixed_b ? *fixed_b : q(2);
    for (size_t i = 0; i < y.size(); ++i) f(i) = w[i] * (q(0) * std::pow(p, n[i]) + bb - y[i]);
  };
  Eigen::VectorXd q0(np);
  q0(0) = 0.5;
  q0(1) = std::log(p_init / (1.0 - p_init));
  if (!fixed_b) q0(2) = 0.5;
  const Eigen::VectorXd q = levenberg_marquardt(resid, q0, static_cast<int>(y.size()));
  if (!q.allFinite()) throw Error(ErrorKind::FitFailed, "decay fit diverged");

  DecayFit out;
  out.a = q(0);
  out.p = to_p(q(1));
  out.b = fixed_b ? *fixed_b : q(2);
  if (!(out.p > 0.0 && out.p <= 1.0)) throw Error(ErrorKind::FitFailed, "decay constant outside (0, 1]");

  // covariance in (A, p [, B]) from the analytic jacobian
  Eigen::MatrixXd j(y.size(), np);
  Eigen::VectorXd f(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    const double pn = std::pow(out.p, n[i]);
    j(i, 0) = w[i] * pn;
    j(i, 1) = n[i] > 0 ? w[i] * out.a * n[i] * pn / out.p : 0.0;
    if (!fixed_b) j(i, 2) = w[i];
    f(i) = w[i] * (out.a * pn + out.b - y[i]);
  }
  out.chi2 = f.squaredNorm();
  const Eigen::MatrixXd jtj = j.transpose() * j;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
  if (lu.isInvertible()) {
    const double dof = std::max<double>(1.0, static_cast<double>(y.size()) - np);
    // residual variance rescaling, so errors are meaningful with arbitrary weights
    const Eigen::MatrixXd cov = lu.inverse() * std::max(out.chi2 / dof, 1e-300);
    out.a_stderr = std::sqrt(std::max(0.0, cov(0, 0)));
    out.p_stderr = std::sqrt(std::max(0.0, cov(1, 1)));
    if (!fixed_b) out.b_stderr = std::sqrt(std::max(0.0, cov(2, 2)));
  }
  return out;
}

Eigen::VectorXd least_squares(const ResidualFn& residual, Eigen::VectorXd x0, int n_residuals, int max_evaluations) {
  return levenberg_marquardt(residual, std::move(x0), n_residuals, nullptr, max_evaluations);
}

TrendTest mann_kendall(const std::vector<double>& y) {
  const size_t n = y.size();
  TrendTest t;
  if (n < 3) return t;
  double s = 0.0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) s += (y[j] > y[i]) - (y[j] < y[i]);
  const double nn = static_cast<double>(n);
  const double var = nn * (nn - 1) * (2 * nn + 5) / 18.0;
  t.s = s;
  if (s > 0) t.z = (s - 1) / std::sqrt(var);
  else if (s < 0) t.z = (s + 1) / std::sqrt(var);
  t.p_value = std::erfc(std::abs(t.z) / std::sqrt(2.0));
  return t;
}

}  // namespace snail
