#include "snail/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "snail/errors.hpp"
#include "snail/parallel.hpp"
#include "snail/units.hpp"

namespace snail {

namespace {

Eigen::MatrixXcd basis_state(int index) {
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(kSpaceDim, 1);
  psi(index, 0) = 1.0;
  return psi;
}

double transmon_excitation(const Eigen::MatrixXcd& psi) {
  double n = 0.0;
  for (int k = 0; k < kSpaceDim; ++k) n += transmon_number(k) * std::norm(psi(k, 0));
  return n;
}

double cubic_excitation(const Eigen::MatrixXcd& psi) {
  double n = 0.0;
  for (int k = 0; k < kSpaceDim; ++k) n += cubic_number(k) * std::norm(psi(k, 0));
  return n;
}

PulseSchedule sideband_drive(double frequency, double amplitude, double duration) {
  PulseSchedule s;
  DriveTone t;
  t.frequency = frequency;
  t.envelope = PulseEnvelope::constant(amplitude, duration);
  t.target = Port::Cubic;
  t.channel = Channel::Sideband;
  t.label = "sideband";
  s.tones.push_back(t);
  s.duration = duration;
  return s;
}

// Single-mode rotation on the g/e doublet, embedded in the 16-dim space.
Eigen::MatrixXcd doublet_rotation(Port mode, double angle, double phase) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  Eigen::Matrix2cd r;
  r << c, cd(0, -1) * s * std::polar(1.0, -phase), cd(0, -1) * s * std::polar(1.0, phase), c;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(kSpaceDim, kSpaceDim);
  for (int other = 0; other < kModeLevels; ++other) {
    int idx[2];
    for (int l = 0; l < 2; ++l) idx[l] = mode == Port::Cubic ? fock_index(l, other) : fock_index(other, l);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) u(idx[i], idx[j]) = r(i, j);
  }
  return u;
}

}  // namespace

ChevronResult chevron_scan(const TwoModeModel& model, const std::vector<double>& frequencies,
                           const std::vector<double>& times, double amplitude, int threads,
                           const DynamicsOptions& options) {
  if (times.empty() || frequencies.empty()) throw std::invalid_argument("chevron grid is empty");
  ChevronResult r;
  r.frequencies = frequencies;
  r.times = times;
  const int nf = static_cast<int>(frequencies.size()), nt = static_cast<int>(times.size());
  r.excitation = Eigen::MatrixXd::Zero(nf, nt);
  r.rabi.assign(nf, 0.0);
  const double t_end = *std::max_element(times.begin(), times.end());

  parallel_for(nf, threads, [&](int i) {
    const Propagator prop(model, sideband_drive(frequencies[i], amplitude, t_end), Frame::Rotating, options);
    const auto states = prop.evolve_sampled(basis_state(basis::eg), 0.0, times);
    for (int j = 0; j < nt; ++j) r.excitation(i, j) = transmon_excitation(states[j]);
  });

  double best = -1.0;
  for (int i = 0; i < nf; ++i) {
    const double contrast = r.excitation.row(i).maxCoeff() - r.excitation.row(i).minCoeff();
    if (contrast > best + 1e-12) {
      best = contrast;
      r.resonance_grid = frequencies[i];
    }
    if (contrast > 1e-6 && nt >= 4) {
      std::vector<double> row(nt);
      for (int j = 0; j < nt; ++j) row[j] = r.excitation(i, j);
      r.rabi[i] = fit_oscillation(times, row).frequency;
    }
  }

  // generalized Rabi rate: rabi^2 = rabi0^2 + (f - f0)^2, linear in f after subtracting f^2
  std::vector<double> fx, fy;
  for (int i = 0; i < nf; ++i)
    if (r.rabi[i] > 0.0) {
      fx.push_back(frequencies[i]);
      fy.push_back(r.rabi[i] * r.rabi[i] - frequencies[i] * frequencies[i]);
    }
  r.resonance = std::numeric_limits<double>::quiet_NaN();
  if (fx.size() >= 3) r.resonance = -0.5 * linear_fit(fx, fy).slope;
  return r;
}

RabiLinearity rabi_linearity(const TwoModeModel& model, const std::vector<double>& amplitudes, int threads,
                             const DynamicsOptions& options) {
  RabiLinearity out;
  out.amplitudes = amplitudes;
  out.rates.assign(amplitudes.size(), 0.0);
  const DressedFrame bare = make_dressed_frame(model, 0.0, 0.0);
  const double f = bare.sideband_resonance(basis::ge, basis::eg);
  parallel_for(static_cast<int>(amplitudes.size()), threads, [&](int i) {
    const double expected = 2.0 * std::abs(model.params.eta) * amplitudes[i];
    if (expected <= 0.0) return;
    const double t_end = 3.0 / expected;
    std::vector<double> times(61);
    for (int k = 0; k < 61; ++k) times[k] = t_end * k / 60.0;
    const Propagator prop(model, sideband_drive(f, amplitudes[i], t_end), Frame::Rotating, options);
    const auto states = prop.evolve_sampled(basis_state(basis::eg), 0.0, times);
    std::vector<double> y(times.size());
    for (size_t k = 0; k < times.size(); ++k) y[k] = transmon_excitation(states[k]);
    out.rates[i] = fit_oscillation(times, y).frequency;
  });
  if (amplitudes.size() >= 2) out.fit = linear_fit(out.amplitudes, out.rates);
  return out;
}

ZzPoint zz_point(const TwoModeModel& model, double cw_frequency, double amplitude, ZzMethod method,
                 const ZzRamseyOptions& ramsey, const DynamicsOptions& options) {
  ZzPoint p;
  p.amplitude = amplitude;
  if (method == ZzMethod::Eigen) {
    const DressedFrame f = make_dressed_frame(model, cw_frequency, amplitude);
    p.f_ge = f.conditional_transmon_frequency(0);
    p.f_ee_eg = f.conditional_transmon_frequency(1);
    p.residual = p.f_ee_eg - p.f_ge;
    return p;
  }

  PulseSchedule s;
  s.cw = ContinuousTone{cw_frequency, amplitude, ramsey.ramp_hwhm};
  const double t_start = s.cw->ramp_duration();
  s.duration = t_start + ramsey.window;
  const Propagator prop(model, s, Frame::Rotating, options);
  std::vector<double> times;
  for (double t = t_start; t <= s.duration + 1e-9; t += ramsey.sample_step) times.push_back(t);

  double freq[2];
  for (int c = 0; c < 2; ++c) {
    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(kSpaceDim, 1);
    psi(fock_index(c, 0), 0) = std::sqrt(0.5);
    psi(fock_index(c, 1), 0) = std::sqrt(0.5);
    const auto states = prop.evolve_sampled(psi, 0.0, times);
    std::vector<double> phase(times.size());
    double prev = 0.0, offset = 0.0;
    for (size_t k = 0; k < times.size(); ++k) {
      const cd coh = states[k](fock_index(c, 1), 0) * std::conj(states[k](fock_index(c, 0), 0));
      const double raw = std::arg(coh);
      if (k > 0) {
        const double jump = raw - prev;
        offset -= units::two_pi * std::round(jump / units::two_pi);
      }
      prev = raw;
      phase[k] = raw + offset;
    }
    // reference frequency of the rotating frame for this conditional transition
    const double reference = model.energies(fock_index(c, 1)) - model.energies(fock_index(c, 0));
    freq[c] = reference - linear_fit(times, phase).slope / units::two_pi;
  }
  p.f_ge = freq[0];
  p.f_ee_eg = freq[1];
  p.residual = p.f_ee_eg - p.f_ge;
  return p;
}

ZzSweep zz_null_sweep(const TwoModeModel& model, double cw_frequency, const std::vector<double>& amplitudes,
                      ZzMethod method, int threads, const ZzRamseyOptions& ramsey, const DynamicsOptions& options) {
  ZzSweep out;
  out.method = method;
  out.cw_frequency = cw_frequency;
  out.points.resize(amplitudes.size());
  parallel_for(static_cast<int>(amplitudes.size()), threads, [&](int i) {
    out.points[i] = zz_point(model, cw_frequency, amplitudes[i], method, ramsey, options);
  });
  for (size_t i = 0; i + 1 < out.points.size(); ++i) {
    double lo = out.points[i].amplitude, hi = out.points[i + 1].amplitude;
    double rlo = out.points[i].residual, rhi = out.points[i + 1].residual;
    if (rlo == 0.0) {
      out.crossing = lo;
      return out;
    }
    if (rlo * rhi > 0.0) continue;
    for (int it = 0; it < 60 && hi - lo > 1e-7 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      const double rm = zz_point(model, cw_frequency, mid, method, ramsey, options).residual;
      if ((rm < 0.0) == (rlo < 0.0)) {
        lo = mid;
        rlo = rm;
      } else {
        hi = mid;
        rhi = rm;
      }
    }
    out.crossing = 0.5 * (lo + hi);
    return out;
  }
  throw Error(ErrorKind::NoCrossing, "residual ZZ keeps one sign over the amplitude grid");
}

RamseyTrace ramsey_experiment(const Eigen::MatrixXcd& gate, bool control_prepared, const std::vector<double>& phases,
                              Port read) {
  if (gate.rows() != kSpaceDim || gate.cols() != kSpaceDim) throw std::invalid_argument("gate must be 16 x 16");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(kSpaceDim);
  psi(basis::gg) = 1.0;
  if (control_prepared) psi = doublet_rotation(Port::Cubic, std::numbers::pi, 0.0) * psi;
  psi = doublet_rotation(Port::Transmon, std::numbers::pi / 2, 0.0) * psi;
  psi = gate * psi;

  RamseyTrace tr;
  tr.phases = phases;
  for (double phi : phases) {
    const Eigen::VectorXcd out = doublet_rotation(read, std::numbers::pi / 2, phi) * psi;
    double pe = 0.0, pg = 0.0;
    for (int k = 0; k < kSpaceDim; ++k) {
      const int level = read == Port::Cubic ? cubic_number(k) : transmon_number(k);
      if (level == 0) pg += std::norm(out(k));
      if (level == 1) pe += std::norm(out(k));
    }
    tr.sigma_z.push_back(pe - pg);
  }
  tr.fit = fit_cosine(tr.phases, tr.sigma_z);
  return tr;
}

ConditionalRamsey conditional_ramsey(const Eigen::MatrixXcd& gate, bool swap_type, const std::vector<double>& phases) {
  const Port read = swap_type ? Port::Cubic : Port::Transmon;
  ConditionalRamsey r;
  r.without_control = ramsey_experiment(gate, false, phases, read);
  r.with_control = ramsey_experiment(gate, true, phases, read);
  r.phase_shift = units::wrap_phase(r.with_control.fit.phase - r.without_control.fit.phase);
  r.conditional_phase = swap_type ? units::wrap_phase(r.phase_shift - std::numbers::pi) : r.phase_shift;
  return r;
}

SpectroscopyResult pulsed_spectroscopy(const TwoModeModel& model, const std::vector<double>& frequencies,
                                       const SpectroscopyOptions& opt, const DynamicsOptions& options) {
  SpectroscopyResult r;
  r.frequencies = frequencies;
  r.response.assign(frequencies.size(), 0.0);
  const double amp = opt.cw_on ? opt.cw_amplitude : 0.0;
  const DressedFrame frame = make_dressed_frame(model, opt.cw_frequency, amp);
  r.raman_prediction = frame.energies(basis::eg) - frame.energies(basis::gg) + opt.cw_frequency;

  parallel_for(static_cast<int>(frequencies.size()), opt.threads, [&](int i) {
    PulseSchedule s;
    s.cw = ContinuousTone{opt.cw_frequency, amp, 0.0};
    DriveTone probe;
    probe.frequency = frequencies[i];
    probe.envelope = PulseEnvelope::gaussian(opt.probe_amplitude, opt.probe_fwhm);
    probe.target = Port::Transmon;
    probe.label = "probe";
    s.tones.push_back(probe);
    const Propagator prop(model, s, Frame::Dressed, options);
    const Eigen::MatrixXcd out = prop.evolve(basis_state(basis::gg), 0.0, prop.duration());
    r.response[i] = cubic_excitation(out);
  });

  const double top = *std::max_element(r.response.begin(), r.response.end());
  if (top > 1e-9) {
    try {
      const PeakFit p = fit_gaussian_peak(frequencies, r.response);
      if (p.height > 0.0 && p.center >= frequencies.front() && p.center <= frequencies.back()) r.peak = p;
    } catch (const Error&) {
    }
  }
  return r;
}

}  // namespace snail
