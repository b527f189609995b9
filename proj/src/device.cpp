#include "snail/device.hpp"

#include <numbers>

#include "snail/errors.hpp"

namespace snail {

namespace {

SnailParams row(const Config& c, const std::string& prefix) {
  SnailParams p;
  p.charging_energy = c.number(prefix + "charging_energy_ghz");
  p.junction_scale = c.number(prefix + "junction_scale_ghz");
  p.k1 = c.number(prefix + "k1");
  p.k2 = c.number(prefix + "k2");
  p.k3 = c.number(prefix + "k3");
  p = SnailParams::with_flux_quanta(p, c.number("circuit.flux_quanta"));
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorKind::Config, prefix + "*: " + e.what());
  }
  return p;
}

}  // namespace

SnailParams single_phase_params(const Config& c) { return row(c, "circuit."); }
SnailParams full_circuit_params(const Config& c) { return row(c, "circuit.full."); }

DecoherenceParams decoherence_params(const Config& c) {
  DecoherenceParams d;
  d.t1_cubic = c.number("decoherence.t1_cubic_us");
  d.t2_star_cubic = c.number("decoherence.t2_star_cubic_us");
  d.t1_transmon = c.number("decoherence.t1_transmon_us");
  d.t2_star_transmon = c.number("decoherence.t2_star_transmon_us");
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorKind::Config, std::string("decoherence.*: ") + e.what());
  }
  return d;
}

GateLayout gate_layout(const Config& c) {
  GateLayout l;
  l.slot = c.number("layout.slot_ns");
  l.swap_flat = c.number("layout.swap_flat_ns");
  l.swap_edge_hwhm = c.number("layout.swap_edge_hwhm_ns");
  l.cp_flat = c.number("layout.cp_flat_ns");
  l.cp_edge_hwhm = c.number("layout.cp_edge_hwhm_ns");
  l.single_qubit_fwhm = c.number("layout.single_qubit_fwhm_ns");
  if (l.slot <= 0 || l.swap_flat < 0 || l.cp_flat < 0 || l.swap_edge_hwhm <= 0 || l.cp_edge_hwhm <= 0 ||
      l.single_qubit_fwhm <= 0)
    throw Error(ErrorKind::Config, "layout.*: durations must be positive");
  return l;
}

ZzMethod zz_method(const Config& c) {
  const std::string m = c.text("zznull.method");
  if (m == "eigen") return ZzMethod::Eigen;
  if (m == "ramsey") return ZzMethod::Ramsey;
  throw Error(ErrorKind::Config, "key 'zznull.method' must be eigen or ramsey, got " + m);
}

std::vector<double> null_amplitudes(const Config& c) {
  const int n = c.integer("zznull.points");
  const double max = c.number("zznull.amplitude_max_ghz");
  if (n < 2) throw Error(ErrorKind::Config, "key 'zznull.points' must be at least 2");
  if (max <= 0) throw Error(ErrorKind::Config, "key 'zznull.amplitude_max_ghz' must be positive");
  std::vector<double> a(n);
  for (int i = 0; i < n; ++i) a[i] = max * i / (n - 1);
  return a;
}

Device build_device(const Config& c, int threads) {
  const SnailParams single = single_phase_params(c);
  const SnailParams full = full_circuit_params(c);
  const int cutoff = c.integer("circuit.charge_cutoff");
  if (cutoff < 2) throw Error(ErrorKind::Config, "key 'circuit.charge_cutoff' must be at least 2");
  const BareCubicModes modes = single_phase_modes(find_potential_minimum(single), single);

  double beta = 0.0;
  const std::string beta_source = c.text("device.beta_source");
  if (beta_source == "circuit")
    beta = modes.beta_c0;
  else if (beta_source == "value")
    beta = c.number("device.beta_c0_ghz");
  else
    throw Error(ErrorKind::Config, "key 'device.beta_source' must be circuit or value, got " + beta_source);

  DeviceParams bare;
  const std::string mode = c.text("device.mode");
  if (mode == "reconstruct") {
    DressedTargets t;
    t.omega_c = c.number("device.target.omega_c_ghz");
    t.omega_t = c.number("device.target.omega_t_ghz");
    t.alpha_c = c.number("device.target.alpha_c_ghz");
    t.alpha_t = c.number("device.target.alpha_t_ghz");
    bare = reconstruct_device(t, beta, c.number("device.g0_ghz"));
  } else if (mode == "bare") {
    bare.omega_c0 = c.number("device.bare.omega_c0_ghz");
    bare.alpha_c0 = c.number("device.bare.alpha_c0_ghz");
    bare.omega_t0 = c.number("device.bare.omega_t0_ghz");
    bare.alpha_t0 = c.number("device.bare.alpha_t0_ghz");
    bare.beta_c0 = beta;
    bare.g0 = c.number("device.g0_ghz");
  } else {
    throw Error(ErrorKind::Config, "key 'device.mode' must be reconstruct or bare, got " + mode);
  }
  try {
    bare.validate();
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorKind::Config, std::string("device.*: ") + e.what());
  }

  const EffectiveParams effective = closed_form_effective(bare);
  TwoModeModel model(effective);

  CwSetting cw;
  cw.frequency = c.number("cw.frequency_ghz");
  std::optional<ZzSweep> sweep;
  if (c.flag("cw.auto_null")) {
    ZzRamseyOptions ro;
    ro.ramp_hwhm = c.number("zznull.ramp_hwhm_ns");
    ro.window = c.number("zznull.window_ns");
    sweep = zz_null_sweep(model, cw.frequency, null_amplitudes(c), zz_method(c), threads, ro);
    cw.amplitude = sweep->crossing;
  } else {
    cw.amplitude = c.number("cw.amplitude_ghz");
  }

  std::optional<DecoherenceParams> dec;
  if (c.flag("decoherence.enabled")) dec = decoherence_params(c);

  return Device{single, full, cutoff, modes, bare, effective, std::move(model), cw, sweep, dec, gate_layout(c)};
}

FsimTarget parse_gate_target(const std::string& name, double swap_angle, double conditional_phase) {
  FsimTarget t;
  if (name == "cz")
    t = FsimTarget::cz();
  else if (name == "iswap")
    t = FsimTarget::iswap();
  else if (name == "swap")
    t = FsimTarget::swap();
  else if (name == "identity")
    t = FsimTarget::identity();
  else if (name == "custom")
    t = FsimTarget{swap_angle, conditional_phase};
  else
    throw Error(ErrorKind::Config, "gate target must be cz, iswap, swap, identity or custom, got " + name);
  try {
    t.validate();
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorKind::Config, std::string("gate target: ") + e.what());
  }
  return t;
}

}  // namespace snail
