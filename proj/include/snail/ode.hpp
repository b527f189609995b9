#pragma once

// Dormand-Prince 5(4) with FSAL and PI step control, for Eigen-valued states.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "snail/errors.hpp"

namespace snail {

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = 2.0;
  double initial_step = 1e-3;
  long max_steps = 10'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

template <class State>
class Dopri5 {
 public:
  explicit Dopri5(OdeOptions opt = {}) : opt_(opt), h_(opt.initial_step) {}

  /// Advances y from t to t_end. f(t, y, dydt) must write dydt.
  template <class Rhs>
  void integrate(State& y, double& t, double t_end, Rhs&& f) {
    if (t_end <= t) return;
    if (!fsal_valid_ || t != t_fsal_) {
      k1_.resizeLike(y);
      f(t, y, k1_);
      ++stats_.evaluations;
      fsal_valid_ = true;
    }
    while (t < t_end) {
      double h = std::min({h_, opt_.max_step, t_end - t});
      const bool last = (t + h >= t_end);
      if (last) h = t_end - t;

      tmp_ = y + h * (a21 * k1_);
      f(t + c2 * h, tmp_, k2_);
      tmp_ = y + h * (a31 * k1_ + a32 * k2_);
      f(t + c3 * h, tmp_, k3_);
      tmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
      f(t + c4 * h, tmp_, k4_);
      tmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
      f(t + c5 * h, tmp_, k5_);
      tmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
      f(t + h, tmp_, k6_);
      ynew_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
      f(t + h, ynew_, k7_);
      stats_.evaluations += 6;

      err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
      const double scale_floor = opt_.atol;
      double err = 0.0;
      for (Eigen::Index i = 0; i < err_.size(); ++i) {
        const double sc = scale_floor + opt_.rtol * std::max(std::abs(y.data()[i]), std::abs(ynew_.data()[i]));
        err = std::max(err, std::abs(err_.data()[i]) / sc);
      }

      if (err <= 1.0) {
        t = last ? t_end : t + h;
        y = ynew_;
        k1_ = k7_;
        t_fsal_ = t;
        ++stats_.accepted;
        const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2) * std::pow(prev_err_, 0.04), 0.2, 5.0);
        prev_err_ = std::max(err, 1e-4);
        if (!last || fac < 1.0) h_ = h * fac;
      } else {
        ++stats_.rejected;
        h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
        if (h_ < 1e-14 * std::max(1.0, std::abs(t)))
          throw Error(ErrorKind::StepRejection, "step size underflow at t=" + std::to_string(t) + " ns");
      }
      if (stats_.accepted + stats_.rejected > opt_.max_steps)
        throw Error(ErrorKind::StepRejection, "step budget exhausted at t=" + std::to_string(t) + " ns");
    }
  }

  /// Forget the cached derivative (call after modifying y or the right-hand side).
  void reset() { fsal_valid_ = false; }
  const OdeStats& stats() const { return stats_; }

 private:
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeOptions opt_;
  OdeStats stats_;
  double h_;
  double prev_err_ = 1e-4;
  bool fsal_valid_ = false;
  double t_fsal_ = 0.0;
  State k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_, err_;
};

}  // namespace snail
