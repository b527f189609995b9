#include "snail/gates.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "snail/errors.hpp"
#include "snail/fit.hpp"
#include "snail/units.hpp"

namespace snail {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kComp[4] = {basis::gg, basis::ge, basis::eg, basis::ee};

Eigen::MatrixXcd computational_columns() {
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(kSpaceDim, 4);
  for (int k = 0; k < 4; ++k) psi(kComp[k], k) = 1.0;
  return psi;
}

// Frame-basis columns U|gg>, U|ge>, U|eg>, U|ee> for a gate schedule.
Eigen::MatrixXcd gate_columns(const GateCalibration& cal, const TwoModeModel& model,
                              const DynamicsOptions& options = {}) {
  const PulseSchedule s = synthesize_gate(cal);
  const Propagator prop(model, s, Frame::Dressed, options);
  return prop.evolve(computational_columns(), 0.0, cal.layout.slot);
}

Eigen::Matrix4cd z_gauge(double cubic, double transmon) {
  Eigen::Matrix4cd z = Eigen::Matrix4cd::Zero();
  z(0, 0) = 1.0;
  z(1, 1) = std::polar(1.0, transmon);
  z(2, 2) = std::polar(1.0, cubic);
  z(3, 3) = std::polar(1.0, cubic + transmon);
  return z;
}

double segment_area(const GateLayout& l, bool swap) {
  return swap ? PulseEnvelope::flat_top(1.0, l.swap_flat, l.swap_edge_hwhm, l.slot).unit_area()
              : PulseEnvelope::flat_top(1.0, l.cp_flat, l.cp_edge_hwhm, 0.5 * l.slot).unit_area();
}

struct GateErrors {
  double transfer = 0.0;  ///< swap population minus sin^2(sw/2)
  double cp = 0.0;        ///< wrapped conditional-phase error
  double sw = 0.0;        ///< swap-angle error
  cd gf = 0.0, fg = 0.0;  ///< leakage amplitudes out of |ee>
  cd m12 = 0.0, m21 = 0.0;  ///< exchange amplitudes <ge|U|eg>, <eg|U|ge>
  cd m11 = 0.0, m22 = 0.0;  ///< <ge|U|ge>, <eg|U|eg>
  double leakage = 0.0;
};

GateErrors gate_errors(const GateCalibration& cal, const TwoModeModel& model, const DynamicsOptions& options = {}) {
  const Eigen::MatrixXcd cols = gate_columns(cal, model, options);
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(kSpaceDim, kSpaceDim);
  for (int k = 0; k < 4; ++k) full.col(kComp[k]) = cols.col(k);
  GateErrors e;
  const Eigen::Matrix4cd b = computational_block(full);
  const double s = std::sin(0.5 * cal.target.swap_angle);
  e.transfer = 0.5 * (std::norm(b(1, 2)) + std::norm(b(2, 1))) - s * s;
  const cd det = b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1);
  e.cp = units::wrap_phase(std::arg(b(3, 3) * b(0, 0) / det) - cal.target.conditional_phase);
  const double sw = 2.0 * std::atan2(0.5 * (std::abs(b(1, 2)) + std::abs(b(2, 1))), 0.5 * (std::abs(b(1, 1)) + std::abs(b(2, 2))));
  e.sw = sw - cal.target.swap_angle;
  e.gf = cols(basis::gf, 3);
  e.fg = cols(basis::fg, 3);
  e.m11 = b(1, 1);
  e.m22 = b(2, 2);
  e.m12 = b(1, 2);
  e.m21 = b(2, 1);
  e.leakage = 1.0 - b.squaredNorm() / 4.0;
  return e;
}

double leakage_from_ee(const GateErrors& e) { return std::norm(e.gf) + std::norm(e.fg); }

template <class F>
double minimize_1d(F&& f, double lo, double hi) {
  boost::uintmax_t iters = 50;
  return boost::math::tools::brent_find_minima(f, lo, hi, 40, iters).first;
}

}  // namespace

FsimTarget FsimTarget::cz() { return {0.0, kPi}; }
FsimTarget FsimTarget::iswap() { return {kPi, 0.0}; }
FsimTarget FsimTarget::swap() { return {kPi, kPi}; }

void FsimTarget::validate() const {
  if (swap_angle < 0.0 || swap_angle > kPi + 1e-12) throw std::invalid_argument("swap angle must lie in [0, pi]");
  if (conditional_phase <= -kPi - 1e-12 || conditional_phase > kPi + 1e-12)
    throw std::invalid_argument("conditional phase must lie in (-pi, pi]");
}

Eigen::Matrix4cd fsim_matrix(const FsimTarget& t) {
  const double c = std::cos(0.5 * t.swap_angle), s = std::sin(0.5 * t.swap_angle);
  Eigen::Matrix4cd f = Eigen::Matrix4cd::Zero();
  f(0, 0) = 1.0;
  f(1, 1) = c;
  f(2, 2) = c;
  f(1, 2) = cd(0, -s);
  f(2, 1) = cd(0, -s);
  f(3, 3) = std::polar(1.0, t.conditional_phase);
  return f;
}

GateCalibration initial_calibration(const FsimTarget& target, const TwoModeModel& model, const CwSetting& cw,
                                    const GateLayout& layout) {
  target.validate();
  GateCalibration cal;
  cal.target = target;
  cal.cw = cw;
  cal.layout = layout;
  if (target.is_identity()) return cal;

  const DressedFrame f = make_dressed_frame(model, cw.frequency, cw.amplitude);
  const Eigen::MatrixXcd p = f.vectors.adjoint() * model.sideband * f.vectors;
  const double limit = 0.5 * std::abs(model.params.alpha_c);

  // A swap tone is kept even for conditional-phase gates, where it only cancels the
  // exchange driven off-resonantly by the control-phase tone.
  {
    const double eta = std::abs(p(basis::eg, basis::ge));
    cal.swap_tone = true;
    cal.swap_frequency = f.sideband_resonance(basis::ge, basis::eg);
    cal.swap_amplitude = target.swap_angle / (4.0 * kPi * eta * segment_area(layout, true));
    if (2.0 * eta * cal.swap_amplitude > limit)
      throw Error(ErrorKind::AmplitudeOutOfRange, "swap tone needs a sideband rate above |alpha_c|/2");
  }
  // The control-phase tone runs whenever a conditional phase must be set or the
  // swap tone's Stark-induced conditional phase must be canceled.
  cal.cp_tone = true;
  const double eta_cz = std::abs(p(basis::ee, basis::gf));
  cal.cp_frequency = f.sideband_resonance(basis::gf, basis::ee);
  cal.cp_amplitude = 1.0 / (4.0 * eta_cz * segment_area(layout, false));
  if (2.0 * eta_cz * cal.cp_amplitude > limit)
    throw Error(ErrorKind::AmplitudeOutOfRange, "control-phase tone needs a sideband rate above |alpha_c|/2");
  cal.cp_phase_a = 0.0;
  cal.cp_phase_b = units::wrap_phase(target.conditional_phase - kPi);
  return cal;
}

PulseSchedule synthesize_gate(const GateCalibration& cal) {
  const GateLayout& l = cal.layout;
  PulseSchedule s;
  s.duration = l.slot;
  s.cw = ContinuousTone{cal.cw.frequency, cal.cw.amplitude, 0.0};
  if (cal.swap_tone) {
    DriveTone t;
    t.frequency = cal.swap_frequency;
    t.phase = cal.swap_phase;
    t.envelope = PulseEnvelope::flat_top(cal.swap_amplitude, l.swap_flat, l.swap_edge_hwhm, l.slot);
    t.start = 0.5 * (l.slot - t.envelope.duration());
    t.channel = Channel::Sideband;
    t.label = "swap";
    s.tones.push_back(t);
  }
  if (cal.cp_tone) {
    for (int seg = 0; seg < 2; ++seg) {
      DriveTone t;
      t.frequency = cal.cp_frequency;
      t.phase = seg == 0 ? cal.cp_phase_a : cal.cp_phase_b;
      t.envelope = PulseEnvelope::flat_top(cal.cp_amplitude, l.cp_flat, l.cp_edge_hwhm, 0.5 * l.slot);
      t.start = seg * 0.5 * l.slot + 0.25 * l.slot - 0.5 * t.envelope.duration();
      t.channel = Channel::Sideband;
      t.label = seg == 0 ? "cp_a" : "cp_b";
      s.tones.push_back(t);
    }
  }
  for (const auto& t : s.tones)
    if (t.start < -1e-9 || t.end() > l.slot + 1e-9) throw std::invalid_argument("gate tone exceeds the slot");
  return s;
}

GateCalibration calibrate(const FsimTarget& target, const TwoModeModel& model, const CwSetting& cw,
                          const GateLayout& layout) {
  GateCalibration cal = initial_calibration(target, model, cw, layout);
  if (target.is_identity()) return cal;
  const bool full_swap = std::abs(target.swap_angle - kPi) < 1e-9;
  int evaluations = 0;
  auto errors = [&](const GateCalibration& c) {
    ++evaluations;
    return gate_errors(c, model);
  };

  // (1) swap amplitude, and for a full swap its carrier, on the transfer objective
  if (target.swap_angle > 0.0) {
    for (int outer = 0; outer < 2; ++outer) {
      const double a0 = cal.swap_amplitude;
      cal.swap_amplitude = minimize_1d(
          [&](double a) {
            GateCalibration c = cal;
            c.swap_amplitude = a;
            const double t = errors(c).transfer;
            return t * t;
          },
          0.7 * a0, 1.3 * a0);
      if (!full_swap) break;
      const double f0 = cal.swap_frequency;
      cal.swap_frequency = minimize_1d(
          [&](double f) {
            GateCalibration c = cal;
            c.swap_frequency = f;
            return -errors(c).transfer;
          },
          f0 - 0.005, f0 + 0.005);
    }
  }

  // (2) control-phase tone: the CW tone hybridizes |ee> with |fg>, so the loop that
  // returns |ee> without leakage is searched on a coarse (amplitude, carrier) grid
  struct Candidate {
    double leak, amplitude, frequency;
  };
  constexpr int kNf = 23, kNa = 13;
  std::vector<Candidate> cells(kNf * kNa);
  const double a_guess = cal.cp_amplitude, f_guess = cal.cp_frequency;
  DynamicsOptions coarse;
  coarse.rtol_unitary = 1e-7;
  for (int i = 0; i < kNf; ++i)
    for (int j = 0; j < kNa; ++j) {
      GateCalibration c = cal;
      c.cp_frequency = f_guess - 0.03 + 0.004 * i;
      c.cp_amplitude = a_guess * (0.3 + 0.1 * j);
      ++evaluations;
      cells[i * kNa + j] = {leakage_from_ee(gate_errors(c, model, coarse)), c.cp_amplitude, c.cp_frequency};
    }
  // candidates are the local minima of the grid
  std::vector<Candidate> grid;
  for (int i = 0; i < kNf; ++i)
    for (int j = 0; j < kNa; ++j) {
      bool minimum = true;
      for (int di = -1; di <= 1 && minimum; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int ii = i + di, jj = j + dj;
          if ((di || dj) && ii >= 0 && ii < kNf && jj >= 0 && jj < kNa &&
              cells[ii * kNa + jj].leak < cells[i * kNa + j].leak) {
            minimum = false;
            break;
          }
        }
      if (minimum) grid.push_back(cells[i * kNa + j]);
    }
  std::sort(grid.begin(), grid.end(), [](const Candidate& x, const Candidate& y) { return x.leak < y.leak; });

  // (3) per candidate: segment phase for the conditional phase, then a joint polish.
  // The swap tone enters through its complex amplitude so that zero is a regular point.
  const bool swapping = target.swap_angle > 0.0;
  const int n_par = swapping ? 6 : 5;  // sx, sy, cp amp, cp freq, cp phase [, swap freq]
  auto pack = [&](const GateCalibration& c) {
    Eigen::VectorXd x(n_par);
    x(0) = c.swap_amplitude * std::cos(c.swap_phase);
    x(1) = c.swap_amplitude * std::sin(c.swap_phase);
    x(2) = c.cp_amplitude;
    x(3) = c.cp_frequency;
    x(4) = c.cp_phase_b;
    if (swapping) x(5) = c.swap_frequency;
    return x;
  };
  auto unpack = [&](GateCalibration c, const Eigen::VectorXd& x) {
    c.swap_amplitude = std::hypot(x(0), x(1));
    c.swap_phase = c.swap_amplitude > 0.0 ? std::atan2(x(1), x(0)) : 0.0;
    c.cp_amplitude = x(2);
    c.cp_frequency = x(3);
    c.cp_phase_b = x(4);
    if (swapping) c.swap_frequency = x(5);
    return c;
  };
  const double sin_half = std::sin(0.5 * target.swap_angle);
  auto fill = [&](const GateErrors& e, Eigen::VectorXd& r) {
    r.setZero();
    if (target.swap_angle == 0.0) {
      r(0) = e.m12.real();
      r(1) = e.m12.imag();
      r(2) = e.m21.real();
      r(3) = e.m21.imag();
    } else if (full_swap) {
      r(0) = e.m11.real();
      r(1) = e.m11.imag();
      r(2) = e.m22.real();
      r(3) = e.m22.imag();
    } else {
      r(0) = 10.0 * (0.5 * (std::abs(e.m12) + std::abs(e.m21)) - sin_half);
    }
    r(4) = 10.0 * e.cp;
    r(5) = e.gf.real();
    r(6) = e.gf.imag();
    r(7) = e.fg.real();
    r(8) = e.fg.imag();
  };
  auto cost = [&](const GateErrors& e) {
    Eigen::VectorXd r(9);
    fill(e, r);
    return r.squaredNorm();
  };

  GateCalibration best = cal;
  double best_cost = std::numeric_limits<double>::infinity();
  const int n_candidates = std::min<int>(6, static_cast<int>(grid.size()));
  for (int k = 0; k < n_candidates; ++k) {
    GateCalibration c = cal;
    c.cp_amplitude = grid[k].amplitude;
    c.cp_frequency = grid[k].frequency;
    // the conditional phase moves one-to-one with the second segment's phase
    for (int it = 0; it < 6; ++it) {
      const double e0 = errors(c).cp;
      if (std::abs(e0) < 1e-4) break;
      GateCalibration probe = c;
      probe.cp_phase_b += 0.1;
      const double slope = units::wrap_phase(errors(probe).cp - e0) / 0.1;
      if (std::abs(slope) < 0.2) break;
      c.cp_phase_b = units::wrap_phase(c.cp_phase_b - e0 / slope);
    }
    auto residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) { fill(errors(unpack(c, x)), r); };
    const GateCalibration polished = unpack(c, least_squares(residual, pack(c), 9, 60));
    const double before = cost(errors(c)), after = cost(errors(polished));
    if (after < before) c = polished;
    const double final_cost = std::min(before, after);
    if (final_cost < best_cost) {
      best_cost = final_cost;
      best = c;
    }
    const GateErrors be = errors(best);
    if (std::abs(be.cp) < 1e-3 && std::abs(be.sw) < 1e-3 && leakage_from_ee(be) < 2e-4) break;
  }
  cal = best;
  cal.cp_phase_b = units::wrap_phase(cal.cp_phase_b);

  const GateErrors fin = errors(cal);
  cal.leakage = fin.leakage;
  cal.residual_gf = std::norm(fin.gf);
  cal.iterations = evaluations;
  if (std::abs(fin.cp) > 1e-2 || std::abs(fin.sw) > 1e-2)
    throw Error(ErrorKind::CalibrationDiverged, "calibrated gate misses its FSim target (swap error " +
                                                    std::to_string(fin.sw) + " rad, phase error " +
                                                    std::to_string(fin.cp) + " rad)");
  return cal;
}

ZGaugeFit fit_z_gauge(const Eigen::Matrix4cd& block, const Eigen::Matrix4cd& ideal, const Eigen::Matrix4d& weights) {
  // x = (global, before_c, before_t, after_c, after_t)
  auto model = [&](const Eigen::VectorXd& x) {
    return Eigen::Matrix4cd(std::polar(1.0, x(0)) * z_gauge(x(3), x(4)) * ideal * z_gauge(x(1), x(2)));
  };
  auto residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    const Eigen::Matrix4cd d = (model(x) - block).cwiseProduct(weights.cast<cd>());
    for (int k = 0; k < 16; ++k) {
      out(2 * k) = d.data()[k].real();
      out(2 * k + 1) = d.data()[k].imag();
    }
  };
  ZGaugeFit best;
  best.deviation = std::numeric_limits<double>::infinity();
  for (int start = 0; start < 16; ++start) {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(5);
    x0(1) = 0.5 * kPi * (start % 4);
    x0(2) = 0.5 * kPi * (start / 4);
    // global phase from the largest overlap of the trial model
    x0(0) = std::arg((model(x0).adjoint() * block).trace());
    const Eigen::VectorXd x = least_squares(residual, x0, 32);
    const Eigen::Matrix4cd d = (model(x) - block).cwiseProduct(weights.cast<cd>());
    const double dev = Eigen::JacobiSVD<Eigen::Matrix4cd>(d).singularValues()(0);
    if (dev < best.deviation) {
      best.deviation = dev;
      best.global_phase = units::wrap_phase(x(0));
      best.before = {units::wrap_phase(x(1)), units::wrap_phase(x(2))};
      best.after = {units::wrap_phase(x(3)), units::wrap_phase(x(4))};
    }
    if (best.deviation < 1e-3) break;
  }
  return best;
}

Eigen::VectorXcd z_phases(double cubic, double transmon) {
  Eigen::VectorXcd d(kSpaceDim);
  for (int c = 0; c < kModeLevels; ++c)
    for (int t = 0; t < kModeLevels; ++t) d(fock_index(c, t)) = std::polar(1.0, c * cubic + t * transmon);
  return d;
}

Eigen::Matrix4cd computational_block(const Eigen::MatrixXcd& u) {
  Eigen::Matrix4cd b;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) b(i, j) = u(kComp[i], kComp[j]);
  return b;
}

FsimReport extract_fsim(const Eigen::MatrixXcd& unitary, double tolerance) {
  FsimReport r;
  const Eigen::Matrix4cd b = computational_block(unitary);
  r.block = b;
  r.leakage = std::max(0.0, 1.0 - b.squaredNorm() / 4.0);
  const double s = 0.5 * (std::abs(b(1, 2)) + std::abs(b(2, 1)));
  const double c = 0.5 * (std::abs(b(1, 1)) + std::abs(b(2, 2)));
  r.swap_angle = 2.0 * std::atan2(s, c);
  const cd det = b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1);
  r.conditional_phase = units::wrap_phase(std::arg(b(3, 3) * b(0, 0) / det));
  const ZGaugeFit g = fit_z_gauge(b, fsim_matrix({r.swap_angle, r.conditional_phase}));
  r.fsim_deviation = g.deviation;
  r.global_phase = g.global_phase;
  r.before = g.before;
  r.after = g.after;
  if (r.fsim_deviation > tolerance)
    throw Error(ErrorKind::NotFsimLike, "computational block deviates from FSim form by " + std::to_string(r.fsim_deviation));
  return r;
}

FsimReport extract_fsim(const PulseSchedule& schedule, const TwoModeModel& model, const DynamicsOptions& options) {
  const Propagator prop(model, schedule, Frame::Dressed, options);
  const Eigen::MatrixXcd cols = prop.evolve(computational_columns(), 0.0, std::max(prop.duration(), 0.0));
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(kSpaceDim, kSpaceDim);
  for (int k = 0; k < 4; ++k) full.col(kComp[k]) = cols.col(k);
  return extract_fsim(full);
}

namespace {

DriveTone single_qubit_tone(const SingleQubitCalibration& cal, Port port, double amplitude, double detuning) {
  DriveTone t;
  t.target = port;
  t.channel = Channel::Direct;
  t.frequency = (port == Port::Cubic ? cal.cubic_frequency : cal.transmon_frequency) + detuning;
  t.envelope = PulseEnvelope::gaussian(amplitude, cal.layout.single_qubit_fwhm, cal.layout.slot);
  t.start = 0.5 * (cal.layout.slot - t.envelope.duration());
  t.label = port == Port::Cubic ? "x_cubic" : "x_transmon";
  return t;
}

double excited_population(const SingleQubitCalibration& cal, const TwoModeModel& model, Port port, double amplitude,
                          double detuning = 0.0) {
  PulseSchedule s;
  s.duration = cal.layout.slot;
  s.cw = ContinuousTone{cal.cw.frequency, cal.cw.amplitude, 0.0};
  s.tones.push_back(single_qubit_tone(cal, port, amplitude, detuning));
  const Propagator prop(model, s, Frame::Dressed);
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(kSpaceDim, 1);
  psi(basis::gg, 0) = 1.0;
  const Eigen::MatrixXcd out = prop.evolve(psi, 0.0, cal.layout.slot);
  return std::norm(out(port == Port::Cubic ? basis::eg : basis::ge, 0));
}

}  // namespace

SingleQubitCalibration calibrate_single_qubit(const TwoModeModel& model, const CwSetting& cw, const GateLayout& layout) {
  SingleQubitCalibration cal;
  cal.cw = cw;
  cal.layout = layout;
  const DressedFrame f = make_dressed_frame(model, cw.frequency, cw.amplitude);
  cal.cubic_frequency = f.cubic_frequency();
  cal.transmon_frequency = f.transmon_frequency();
  const double area = PulseEnvelope::gaussian(1.0, layout.single_qubit_fwhm, layout.slot).unit_area();
  const double guess = 1.0 / (4.0 * area);
  for (Port port : {Port::Cubic, Port::Transmon}) {
    // a pi pulse must also sit on its Stark-shifted resonance; pi/2 detuning is a Z gauge
    double pi_amp = guess, detuning = 0.0;
    for (int round = 0; round < 2; ++round) {
      pi_amp = minimize_1d([&](double a) { return 1.0 - excited_population(cal, model, port, a, detuning); },
                           0.8 * guess, 1.2 * guess);
      detuning = minimize_1d([&](double df) { return 1.0 - excited_population(cal, model, port, pi_amp, df); },
                             -0.005, 0.005);
    }
    const double half_amp = minimize_1d(
        [&](double a) {
          const double d = excited_population(cal, model, port, a) - 0.5;
          return d * d;
        },
        0.35 * guess, 0.65 * guess);
    if (port == Port::Cubic) {
      cal.cubic_pi = pi_amp;
      cal.cubic_pi_detuning = detuning;
      cal.cubic_half_pi = half_amp;
    } else {
      cal.transmon_pi = pi_amp;
      cal.transmon_pi_detuning = detuning;
      cal.transmon_half_pi = half_amp;
    }
  }
  return cal;
}

PulseSchedule single_qubit_slot(const SingleQubitCalibration& cal, int cubic_angle, int transmon_angle) {
  if (cubic_angle < 0 || cubic_angle > 2 || transmon_angle < 0 || transmon_angle > 2)
    throw std::invalid_argument("single-qubit angle index must be 0, 1 or 2");
  PulseSchedule s;
  s.duration = cal.layout.slot;
  s.cw = ContinuousTone{cal.cw.frequency, cal.cw.amplitude, 0.0};
  if (cubic_angle > 0)
    s.tones.push_back(cubic_angle == 1 ? single_qubit_tone(cal, Port::Cubic, cal.cubic_half_pi, 0.0)
                                       : single_qubit_tone(cal, Port::Cubic, cal.cubic_pi, cal.cubic_pi_detuning));
  if (transmon_angle > 0)
    s.tones.push_back(transmon_angle == 1
                          ? single_qubit_tone(cal, Port::Transmon, cal.transmon_half_pi, 0.0)
                          : single_qubit_tone(cal, Port::Transmon, cal.transmon_pi, cal.transmon_pi_detuning));
  return s;
}

}  // namespace snail
