#pragma once

// Small curve fits used by the experiments and the benchmarking engine.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

namespace snail {

struct LinearFit {
  double slope = 0.0, intercept = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// y = offset + amplitude * cos(x - phase), linear least squares.
struct CosineFit {
  double amplitude = 0.0, phase = 0.0, offset = 0.0;
  double rms = 0.0;
};
CosineFit fit_cosine(const std::vector<double>& x, const std::vector<double>& y);

/// y = c0 + c1 cos(2 pi f t) + c2 sin(2 pi f t); f scanned on a grid up to the
/// Nyquist limit, then refined by a bounded 1-D minimization.
struct OscillationFit {
  double frequency = 0.0;  ///< GHz
  double amplitude = 0.0, offset = 0.0;
  double rms = 0.0;
};
OscillationFit fit_oscillation(const std::vector<double>& t, const std::vector<double>& y);

/// y = baseline + height * exp(-(x - center)^2 / (2 s^2)), fwhm = 2.3548 s.
struct PeakFit {
  double center = 0.0, fwhm = 0.0, height = 0.0, baseline = 0.0;
  double rms = 0.0;
};
PeakFit fit_gaussian_peak(const std::vector<double>& x, const std::vector<double>& y);

/// y_n = A p^n + B, weighted by 1/sigma^2 (sigma <= 0 entries get unit weight);
/// B is held at `fixed_b` when given.
/// Throws FitFailed when the iteration does not converge or p leaves (0, 1].
struct DecayFit {
  double a = 0.0, b = 0.0, p = 0.0;
  double a_stderr = 0.0, b_stderr = 0.0, p_stderr = 0.0;
  double chi2 = 0.0;
};
DecayFit fit_decay(const std::vector<double>& n, const std::vector<double>& y, const std::vector<double>& sigma,
                   std::optional<double> fixed_b = std::nullopt);

/// Two-sided Mann-Kendall trend test.
struct TrendTest {
  double s = 0.0;
  double z = 0.0;
  double p_value = 1.0;
};
TrendTest mann_kendall(const std::vector<double>& y);

/// Levenberg-Marquardt on residual(x, r) with a forward-difference jacobian.
using ResidualFn = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;
Eigen::VectorXd least_squares(const ResidualFn& residual, Eigen::VectorXd x0, int n_residuals, int max_evaluations = 2000);

}  // namespace snail
