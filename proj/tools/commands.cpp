#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "cli.hpp"
#include "snail/errors.hpp"
#include "snail/units.hpp"

namespace snail::cli {

namespace fs = std::filesystem;

// ---- bookkeeping ----------------------------------------------------------

Run::Run(std::string subcommand, Config config, fs::path out_dir, std::uint64_t seed, int threads)
    : subcommand_(std::move(subcommand)),
      config_(std::move(config)),
      out_dir_(std::move(out_dir)),
      seed_(seed),
      threads_(threads),
      start_(std::chrono::steady_clock::now()) {
  std::error_code ec;
  fs::create_directories(out_dir_, ec);
  if (ec || !fs::is_directory(out_dir_))
    throw Error(ErrorKind::Config, "output directory " + out_dir_.string() + " is not writable");
}

void Run::record(const std::string& file) {
  for (const auto& f : outputs_)
    if (f == file) return;
  outputs_.push_back(file);
}

void Run::write_json(const std::string& name, const std::string& schema, json document) {
  document["schema"] = schema;
  document["schema_version"] = kSchemaVersion;
  const std::string file = name + ".json";
  std::ofstream out(out_dir_ / file);
  out << document.dump(2) << "\n";
  if (!out) throw Error(ErrorKind::Config, "cannot write " + (out_dir_ / file).string());
  record(file);
}

void Run::write_csv(const std::string& name, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  const std::string file = name + ".csv";
  std::ofstream out(out_dir_ / file);
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  if (!out) throw Error(ErrorKind::Config, "cannot write " + (out_dir_ / file).string());
  record(file);
}

json Run::manifest() const {
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  json m;
  m["schema"] = "snailsim.manifest";
  m["schema_version"] = kSchemaVersion;
  m["tool"] = "snailsim";
  m["version"] = SNAIL_VERSION;
  m["subcommand"] = subcommand_;
  m["seed"] = seed_;
  m["threads"] = threads_;
  m["config_hash"] = "sha256:" + sha256_hex(config_.canonical());
  m["parameters"] = config_.snapshot();
  m["outputs"] = outputs_;
  m["wall_time_s"] = wall;
  return m;
}

void Run::finish() {
  std::ofstream out(out_dir_ / "manifest.json");
  out << manifest().dump(2) << "\n";
  if (!out) throw Error(ErrorKind::Config, "cannot write manifest");
}

std::string num(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  // prefer the shortest form that reads back exactly
  for (int prec = 6; prec < 17; ++prec) {
    char shorter[32];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, x);
    if (std::strtod(shorter, nullptr) == x) return shorter;
  }
  return buf;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

std::vector<double> linspace(double a, double b, int n) {
  if (n == 1) return {a};
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

namespace {

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

int positive(const Config& c, const std::string& key, int minimum = 1) {
  const int v = c.integer(key);
  if (v < minimum) throw Error(ErrorKind::Config, "key '" + key + "' must be at least " + std::to_string(minimum));
  return v;
}

const char* envelope_name(EnvelopeKind k) {
  switch (k) {
    case EnvelopeKind::Gaussian: return "gaussian";
    case EnvelopeKind::FlatTop: return "flat_top";
    case EnvelopeKind::Constant: return "constant";
  }
  return "?";
}

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::Auto: return "auto";
    case Channel::Direct: return "direct";
    case Channel::Sideband: return "sideband";
  }
  return "?";
}

json params_json(const EffectiveParams& e) {
  return {{"omega_c_ghz", e.omega_c}, {"omega_t_ghz", e.omega_t}, {"alpha_c_ghz", e.alpha_c},
          {"alpha_t_ghz", e.alpha_t}, {"g_ghz", e.g},             {"j_zz_ghz", e.j_zz},
          {"eta", e.eta},             {"eta_cz", e.eta_cz},       {"delta0_ghz", e.delta0},
          {"delta_ghz", e.delta},     {"provenance", e.provenance}};
}

// numeric_sw and exact_effective fill only the level-derived fields
json oracle_json(const EffectiveParams& e) {
  return {{"omega_c_ghz", e.omega_c}, {"omega_t_ghz", e.omega_t}, {"alpha_c_ghz", e.alpha_c},
          {"alpha_t_ghz", e.alpha_t}, {"j_zz_ghz", e.j_zz},       {"delta_ghz", e.delta},
          {"provenance", e.provenance}};
}

json bare_json(const DeviceParams& d) {
  return {{"omega_c0_ghz", d.omega_c0}, {"beta_c0_ghz", d.beta_c0},   {"alpha_c0_ghz", d.alpha_c0},
          {"omega_t0_ghz", d.omega_t0}, {"alpha_t0_ghz", d.alpha_t0}, {"g0_ghz", d.g0}};
}

json cw_json(const CwSetting& cw) { return {{"frequency_ghz", cw.frequency}, {"amplitude_ghz", cw.amplitude}}; }

json fit_json(const DecayFit& f) {
  return {{"a", f.a},         {"b", f.b},         {"p", f.p},       {"a_stderr", f.a_stderr},
          {"b_stderr", f.b_stderr}, {"p_stderr", f.p_stderr}, {"chi2", f.chi2}};
}

}  // namespace

json schedule_to_json(const PulseSchedule& s) {
  json tones = json::array();
  for (const DriveTone& t : s.tones) {
    const PulseEnvelope& e = t.envelope;
    tones.push_back({{"label", t.label},
                     {"target", t.target == Port::Cubic ? "cubic" : "transmon"},
                     {"channel", channel_name(t.channel)},
                     {"frequency_ghz", t.frequency},
                     {"phase_rad", t.phase},
                     {"start_ns", t.start},
                     {"envelope",
                      {{"kind", envelope_name(e.kind)},
                       {"amplitude_ghz", e.amplitude},
                       {"fwhm_ns", e.fwhm},
                       {"flat_duration_ns", e.flat_duration},
                       {"edge_hwhm_ns", e.edge_hwhm},
                       {"constant_duration_ns", e.constant_duration},
                       {"truncation", e.truncation},
                       {"window_ns", e.window}}}});
  }
  json j;
  j["schema"] = "snailsim.schedule";
  j["schema_version"] = kSchemaVersion;
  j["duration_ns"] = s.duration;
  j["tones"] = tones;
  if (s.cw)
    j["cw"] = {{"frequency_ghz", s.cw->frequency}, {"amplitude_ghz", s.cw->amplitude}, {"ramp_hwhm_ns", s.cw->ramp}};
  else
    j["cw"] = nullptr;
  return j;
}

PulseSchedule schedule_from_json(const json& j) {
  try {
    PulseSchedule s;
    s.duration = j.at("duration_ns").get<double>();
    for (const json& t : j.at("tones")) {
      DriveTone tone;
      tone.label = t.at("label").get<std::string>();
      const std::string target = t.at("target").get<std::string>();
      if (target != "cubic" && target != "transmon") throw Error(ErrorKind::Config, "tone target " + target);
      tone.target = target == "cubic" ? Port::Cubic : Port::Transmon;
      const std::string channel = t.at("channel").get<std::string>();
      if (channel == "auto")
        tone.channel = Channel::Auto;
      else if (channel == "direct")
        tone.channel = Channel::Direct;
      else if (channel == "sideband")
        tone.channel = Channel::Sideband;
      else
        throw Error(ErrorKind::Config, "tone channel " + channel);
      tone.frequency = t.at("frequency_ghz").get<double>();
      tone.phase = t.at("phase_rad").get<double>();
      tone.start = t.at("start_ns").get<double>();
      const json& e = t.at("envelope");
      PulseEnvelope& env = tone.envelope;
      const std::string kind = e.at("kind").get<std::string>();
      if (kind == "gaussian")
        env.kind = EnvelopeKind::Gaussian;
      else if (kind == "flat_top")
        env.kind = EnvelopeKind::FlatTop;
      else if (kind == "constant")
        env.kind = EnvelopeKind::Constant;
      else
        throw Error(ErrorKind::Config, "envelope kind " + kind);
      env.amplitude = e.at("amplitude_ghz").get<double>();
      env.fwhm = e.at("fwhm_ns").get<double>();
      env.flat_duration = e.at("flat_duration_ns").get<double>();
      env.edge_hwhm = e.at("edge_hwhm_ns").get<double>();
      env.constant_duration = e.at("constant_duration_ns").get<double>();
      env.truncation = e.at("truncation").get<double>();
      env.window = e.at("window_ns").get<double>();
      s.tones.push_back(tone);
    }
    if (!j.at("cw").is_null()) {
      const json& c = j.at("cw");
      s.cw = ContinuousTone{c.at("frequency_ghz").get<double>(), c.at("amplitude_ghz").get<double>(),
                            c.at("ramp_hwhm_ns").get<double>()};
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("schedule document: ") + e.what());
  }
}

// ---- circuit --------------------------------------------------------------

void cmd_spectrum(Run& run) {
  const Config& c = run.config();
  const int levels = positive(c, "spectrum.levels", 3);
  const int cutoff = positive(c, "circuit.charge_cutoff", 2);
  const SnailParams single = single_phase_params(c);
  const SnailParams full = full_circuit_params(c);

  std::vector<std::vector<std::string>> rows;
  for (const auto& [name, p] : {std::pair{"single_row", single}, std::pair{"full_row", full}}) {
    const ChargeBasisModel m = build_converged_charge_model(p, cutoff);
    const std::vector<double> e = spectrum(m, levels);
    for (int k = 0; k < levels; ++k) rows.push_back({name, std::to_string(k), num(e[k])});
  }
  run.write_csv("spectrum", {"row", "level", "energy_ghz"}, rows);

  const PotentialExpansion ex = find_potential_minimum(single);
  const BareCubicModes sp = single_phase_modes(ex, single);
  const FullCircuitModes fc = full_circuit_modes(full, cutoff);
  const ConvergenceReport conv = check_convergence(full, cutoff);
  json doc;
  doc["flux_quanta"] = c.number("circuit.flux_quanta");
  doc["single_phase"] = {{"minimum_phase", ex.minimum_phase}, {"d2_ghz", ex.d2},
                         {"d3_ghz", ex.d3},                   {"d4_ghz", ex.d4},
                         {"omega_c0_ghz", sp.omega_c0},        {"beta_c0_ghz", sp.beta_c0},
                         {"alpha_c0_ghz", sp.alpha_c0},        {"effective_charging_ghz", sp.effective_charging}};
  doc["full_circuit"] = {{"omega_c0_ghz", fc.omega_c0}, {"alpha_c0_ghz", fc.alpha_c0},
                         {"abs_beta_c0_ghz", fc.abs_beta_c0}, {"beta_c0_ghz", fc.beta_c0},
                         {"a_ge", fc.moments.a_ge},            {"a_gf", fc.moments.a_gf}};
  doc["convergence"] = {{"cutoff", conv.cutoff}, {"max_shift_ghz", conv.max_shift}, {"converged", conv.converged}};
  run.write_json("spectrum", "snailsim.spectrum", doc);
}

std::vector<FluxRow> cmd_sweep_flux(Run& run) {
  const Config& c = run.config();
  const int points = positive(c, "sweep.points");
  const std::vector<double> grid = linspace(c.number("sweep.flux_min"), c.number("sweep.flux_max"), points);
  const std::vector<FluxRow> rows =
      flux_sweep(single_phase_params(c), full_circuit_params(c), grid, positive(c, "circuit.charge_cutoff", 2),
                 run.threads());
  std::vector<std::vector<std::string>> cells;
  double worst = 0.0;
  int flagged = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    const FluxRow& r = rows[i];
    cells.push_back({num(r.flux_quanta), num(r.omega_c0), num(r.alpha_c0), num(r.abs_beta_c0), r.model, r.flag});
    if (!r.flag.empty()) ++flagged;
    if (i % 2 == 1 && r.flag.empty() && rows[i - 1].flag.empty())
      worst = std::max(worst, std::abs(r.omega_c0 / rows[i - 1].omega_c0 - 1.0));
  }
  run.write_csv("sweep_flux", {"flux_quanta", "omega_c0_ghz", "alpha_c0_ghz", "abs_beta_c0_ghz", "model", "flag"},
                cells);
  run.write_json("sweep_flux", "snailsim.sweep_flux",
                 {{"points", points}, {"flagged_rows", flagged}, {"max_omega_relative_deviation", worst}});
  return rows;
}

// ---- effective ------------------------------------------------------------

json cmd_effective(Run& run, const Device& dev) {
  json doc;
  doc["mode"] = run.config().text("device.mode");
  doc["circuit_beta_c0_ghz"] = dev.circuit_modes.beta_c0;
  doc["bare"] = bare_json(dev.bare);
  doc["formula"] = params_json(dev.effective);
  doc["numeric_sw"] = oracle_json(numeric_sw(dev.bare));
  doc["exact"] = oracle_json(exact_effective(dev.bare));
  const auto [swap, cz] = eta_resonance_frequencies(dev.effective);
  doc["resonances"] = {{"swap_ghz", swap}, {"cz_ghz", cz}};
  doc["cw"] = cw_json(dev.cw);
  run.write_json("effective", "snailsim.effective", doc);
  return doc;
}

// ---- experiments ----------------------------------------------------------

json cmd_chevron(Run& run, const Device& dev) {
  const Config& c = run.config();
  const std::vector<double> freqs =
      linspace(c.number("chevron.freq_min_ghz"), c.number("chevron.freq_max_ghz"), positive(c, "chevron.freq_points", 3));
  const std::vector<double> times = linspace(0.0, c.number("chevron.time_max_ns"), positive(c, "chevron.time_points", 3));
  const ChevronResult ch = chevron_scan(dev.model, freqs, times, c.number("chevron.amplitude_ghz"), run.threads());
  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < freqs.size(); ++i)
    for (size_t j = 0; j < times.size(); ++j) rows.push_back({num(freqs[i]), num(times[j]), num(ch.excitation(i, j))});
  run.write_csv("chevron", {"frequency_ghz", "time_ns", "excitation"}, rows);

  const std::vector<double> amps = c.numbers("chevron.rabi_amplitudes_ghz");
  if (amps.size() < 2) throw Error(ErrorKind::Config, "key 'chevron.rabi_amplitudes_ghz' needs at least 2 values");
  const RabiLinearity rl = rabi_linearity(dev.model, amps, run.threads());
  rows.clear();
  double max_rate = 0.0;
  for (size_t i = 0; i < amps.size(); ++i) {
    rows.push_back({num(amps[i]), num(rl.rates[i])});
    max_rate = std::max(max_rate, rl.rates[i]);
  }
  run.write_csv("rabi", {"amplitude_ghz", "rate_ghz"}, rows);

  json doc;
  doc["amplitude_ghz"] = c.number("chevron.amplitude_ghz");
  doc["resonance_grid_ghz"] = ch.resonance_grid;
  doc["resonance_ghz"] = finite_or_null(ch.resonance);
  doc["predicted_swap_ghz"] = eta_resonance_frequencies(dev.effective).first;
  doc["rabi"] = {{"slope", rl.fit.slope},
                 {"intercept_ghz", rl.fit.intercept},
                 {"r_squared", rl.fit.r_squared},
                 {"max_rate_ghz", max_rate}};
  run.write_json("chevron", "snailsim.chevron", doc);
  return doc;
}

json cmd_zznull(Run& run, const Device& dev) {
  const Config& c = run.config();
  ZzRamseyOptions ro;
  ro.ramp_hwhm = c.number("zznull.ramp_hwhm_ns");
  ro.window = c.number("zznull.window_ns");
  const ZzSweep sweep =
      zz_null_sweep(dev.model, c.number("cw.frequency_ghz"), null_amplitudes(c), zz_method(c), run.threads(), ro);
  std::vector<std::vector<std::string>> rows;
  for (const ZzPoint& p : sweep.points) rows.push_back({num(p.amplitude), num(p.f_ge), num(p.f_ee_eg), num(p.residual)});
  run.write_csv("zznull", {"amplitude_ghz", "f_ge_ghz", "f_ee_eg_ghz", "residual_ghz"}, rows);
  json doc;
  doc["method"] = c.text("zznull.method");
  doc["cw_frequency_ghz"] = sweep.cw_frequency;
  doc["crossing_amplitude_ghz"] = sweep.crossing;
  doc["residual_at_zero_ghz"] = sweep.points.front().residual;
  doc["static_j_zz_ghz"] = dev.effective.j_zz;
  run.write_json("zznull", "snailsim.zznull", doc);
  return doc;
}

GateCalibration calibrated_entangler(const Device& dev, Calibrations& cal, Entangler e) {
  auto it = cal.gates.find(e);
  if (it == cal.gates.end()) it = cal.gates.emplace(e, calibrate(entangler_target(e), dev.model, dev.cw, dev.layout)).first;
  return it->second;
}

const SingleQubitCalibration& calibrated_single(const Device& dev, Calibrations& cal) {
  if (!cal.single) cal.single = calibrate_single_qubit(dev.model, dev.cw, dev.layout);
  return *cal.single;
}

json cmd_ramsey(Run& run, const Device& dev, Calibrations& cal) {
  const Config& c = run.config();
  const int n = positive(c, "ramsey.phase_points", 4);
  std::vector<double> phases(n);
  for (int i = 0; i < n; ++i) phases[i] = units::two_pi * i / n;
  std::vector<std::vector<std::string>> rows;
  json gates = json::array();
  for (const std::string& name : c.texts("ramsey.gates")) {
    GateCalibration g;
    if (name == "cz")
      g = calibrated_entangler(dev, cal, Entangler::CZ);
    else if (name == "iswap")
      g = calibrated_entangler(dev, cal, Entangler::ISwap);
    else if (name == "swap")
      g = calibrated_entangler(dev, cal, Entangler::Swap);
    else
      g = calibrate(parse_gate_target(name, c.number("gate.swap_angle"), c.number("gate.conditional_phase")),
                    dev.model, dev.cw, dev.layout);
    const Eigen::MatrixXcd u = Propagator(dev.model, synthesize_gate(g), Frame::Dressed).unitary();
    const bool swap_type = g.target.swap_angle > 0.0;
    const ConditionalRamsey r = conditional_ramsey(u, swap_type, phases);
    for (const auto& [label, trace] : {std::pair{"off", &r.without_control}, std::pair{"on", &r.with_control}})
      for (int i = 0; i < n; ++i) rows.push_back({name, label, num(phases[i]), num(trace->sigma_z[i])});
    const FsimReport rep = extract_fsim(u, 10.0);
    gates.push_back({{"gate", name},
                     {"read", swap_type ? "cubic" : "transmon"},
                     {"phase_shift_rad", r.phase_shift},
                     {"conditional_phase_rad", r.conditional_phase},
                     {"target_conditional_phase_rad", g.target.conditional_phase},
                     {"error_rad", units::wrap_phase(r.conditional_phase - g.target.conditional_phase)},
                     {"leakage", rep.leakage}});
  }
  run.write_csv("ramsey", {"gate", "control", "phase_rad", "sigma_z"}, rows);
  json doc;
  doc["cw"] = cw_json(dev.cw);
  doc["gates"] = gates;
  run.write_json("ramsey", "snailsim.ramsey", doc);
  return doc;
}

json cmd_spectroscopy(Run& run, const Device& dev, bool cw_on, const std::string& name) {
  const Config& c = run.config();
  const double wt = dev.effective.omega_t;
  const std::vector<double> freqs = linspace(wt + c.number("spectroscopy.detuning_min_ghz"),
                                             wt + c.number("spectroscopy.detuning_max_ghz"),
                                             positive(c, "spectroscopy.points", 5));
  SpectroscopyOptions so;
  so.cw_on = cw_on;
  so.cw_frequency = dev.cw.frequency;
  so.cw_amplitude = dev.cw.amplitude;
  so.probe_amplitude = c.number("spectroscopy.probe_amplitude_ghz");
  so.probe_fwhm = c.number("spectroscopy.probe_fwhm_ns");
  so.threads = run.threads();
  const SpectroscopyResult r = pulsed_spectroscopy(dev.model, freqs, so);
  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < freqs.size(); ++i) rows.push_back({num(freqs[i]), num(r.response[i])});
  run.write_csv(name, {"frequency_ghz", "response"}, rows);
  json doc;
  doc["cw_on"] = cw_on;
  doc["cw"] = cw_json(dev.cw);
  doc["omega_t_ghz"] = wt;
  doc["raman_prediction_ghz"] = r.raman_prediction;
  if (r.peak)
    doc["peak"] = {{"center_ghz", r.peak->center},
                   {"offset_from_omega_t_ghz", r.peak->center - wt},
                   {"fwhm_ghz", r.peak->fwhm},
                   {"height", r.peak->height},
                   {"baseline", r.peak->baseline}};
  else
    doc["peak"] = nullptr;
  run.write_json(name, "snailsim.spectroscopy", doc);
  return doc;
}

// ---- gates ----------------------------------------------------------------

json cmd_gate(Run& run, const Device& dev, const FsimTarget& target, const std::string& name) {
  const GateCalibration g = calibrate(target, dev.model, dev.cw, dev.layout);
  const PulseSchedule s = synthesize_gate(g);
  const FsimReport rep = extract_fsim(s, dev.model);
  run.write_json(name + "_schedule", "snailsim.schedule", schedule_to_json(s));
  json doc;
  doc["target"] = {{"swap_angle_rad", target.swap_angle}, {"conditional_phase_rad", target.conditional_phase}};
  doc["cw"] = cw_json(g.cw);
  doc["calibration"] = {{"swap_tone", g.swap_tone},
                        {"swap_amplitude_ghz", g.swap_amplitude},
                        {"swap_frequency_ghz", g.swap_frequency},
                        {"swap_phase_rad", g.swap_phase},
                        {"cp_tone", g.cp_tone},
                        {"cp_amplitude_ghz", g.cp_amplitude},
                        {"cp_frequency_ghz", g.cp_frequency},
                        {"cp_phase_a_rad", g.cp_phase_a},
                        {"cp_phase_b_rad", g.cp_phase_b},
                        {"iterations", g.iterations},
                        {"residual_gf", g.residual_gf}};
  doc["report"] = {{"swap_angle_rad", rep.swap_angle},
                   {"conditional_phase_rad", rep.conditional_phase},
                   {"leakage", rep.leakage},
                   {"fsim_deviation", rep.fsim_deviation},
                   {"global_phase_rad", rep.global_phase},
                   {"z_before_rad", rep.before},
                   {"z_after_rad", rep.after}};
  doc["error"] = {{"swap_angle_rad", rep.swap_angle - target.swap_angle},
                  {"conditional_phase_rad", units::wrap_phase(rep.conditional_phase - target.conditional_phase)}};
  doc["schedule_file"] = name + "_schedule.json";
  run.write_json(name, "snailsim.gate", doc);
  return doc;
}

// ---- benchmarking ---------------------------------------------------------

namespace {

const CliffordGroup& group(int n) {
  static const CliffordGroup one(1);
  if (n == 1) return one;
  static const CliffordGroup two(2);
  return two;
}

}  // namespace

json rb_pipeline(Run& run, const Device& dev, Calibrations& cal, const std::string& mode,
                 const std::vector<std::string>& interleaved, const std::string& prefix) {
  const Config& c = run.config();
  RbConfig rc;
  rc.lengths = c.integers("rb.lengths");
  rc.randomizations = c.integer("rb.randomizations");
  rc.shots = c.integer("rb.shots");
  rc.seed = run.seed();
  rc.threads = run.threads();
  const std::string readout = c.text("rb.readout");
  if (readout != "cubic" && readout != "transmon")
    throw Error(ErrorKind::Config, "key 'rb.readout' must be cubic or transmon, got " + readout);
  rc.readout = readout == "cubic" ? Port::Cubic : Port::Transmon;
  const int subintervals = positive(c, "rb.subintervals");
  try {
    rc.validate();
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorKind::Config, std::string("rb.*: ") + e.what());
  }

  std::vector<Entangler> targets;
  for (const std::string& name : interleaved) {
    if (name == "cz")
      targets.push_back(Entangler::CZ);
    else if (name == "iswap")
      targets.push_back(Entangler::ISwap);
    else if (name == "swap")
      targets.push_back(Entangler::Swap);
    else
      throw Error(ErrorKind::Config, "interleaved gate must be cz, iswap or swap, got " + name);
  }

  const SingleQubitCalibration& single = calibrated_single(dev, cal);
  int n_qubits = 2;
  std::vector<Port> qubits{Port::Cubic, Port::Transmon};
  std::optional<SlotChannels> channels;
  if (mode == "two_qubit") {
    std::map<Entangler, GateCalibration> gates;
    for (Entangler e : {Entangler::CZ, Entangler::ISwap, Entangler::Swap}) gates[e] = calibrated_entangler(dev, cal, e);
    channels = SlotChannels::simulate(dev.model, single, required_pulses(group(2)), gates, dev.decoherence,
                                      run.threads(), subintervals);
  } else if (mode == "cubic" || mode == "transmon") {
    if (!targets.empty()) throw Error(ErrorKind::Config, "key 'rb.interleaved' needs rb.mode two_qubit");
    n_qubits = 1;
    rc.qubit = mode == "cubic" ? Port::Cubic : Port::Transmon;
    qubits = {rc.qubit};
    const Port idle = rc.qubit == Port::Cubic ? Port::Transmon : Port::Cubic;
    channels = SlotChannels::simulate(dev.model, single, required_pulses(group(1), rc.qubit), {}, dev.decoherence,
                                      run.threads(), subintervals, idle);
  } else {
    throw Error(ErrorKind::Config, "key 'rb.mode' must be two_qubit, cubic or transmon, got " + mode);
  }
  const CliffordGroup& g = group(n_qubits);

  auto points_csv = [&](const std::string& name, const RbResult& r) {
    std::vector<std::vector<std::string>> rows;
    for (const RbPoint& p : r.points) rows.push_back({std::to_string(p.length), num(p.mean), num(p.sem)});
    run.write_csv(name, {"n", "mean", "sem"}, rows);
  };
  auto result_json = [&](const RbResult& r) {
    return json{{"fit", fit_json(r.fit)},
                {"fidelity", r.fidelity},
                {"fidelity_stderr", r.fidelity_stderr},
                {"mean_slots", r.mean_slots},
                {"trend", {{"s", r.trend.s}, {"z", r.trend.z}, {"p_value", r.trend.p_value}}}};
  };

  rc.interleaved.reset();
  const RbResult reference = run_rb(g, *channels, rc);
  points_csv(prefix + "_reference", reference);

  json doc;
  doc["mode"] = mode;
  doc["n_qubits"] = n_qubits;
  doc["lengths"] = rc.lengths;
  doc["randomizations"] = rc.randomizations;
  doc["shots"] = rc.shots;
  doc["seed"] = rc.seed;
  doc["readout"] = n_qubits == 2 ? readout : mode;
  doc["reference"] = result_json(reference);
  doc["reference"]["csv"] = prefix + "_reference.csv";
  if (dev.decoherence) {
    const double slot = channels->slot_duration();
    doc["coherence_limit"] = {
        {"per_slot", coherence_limit(*dev.decoherence, slot, qubits)},
        {"per_clifford", coherence_limit(*dev.decoherence, slot * reference.mean_slots, qubits)}};
  } else {
    doc["coherence_limit"] = nullptr;
  }
  json inter = json::array();
  for (Entangler e : targets) {
    rc.interleaved = e;
    const InterleavedResult ir = combine_interleaved(reference, run_rb(g, *channels, rc), n_qubits);
    const std::string csv = prefix + "_interleaved_" + entangler_name(e);
    points_csv(csv, ir.interleaved);
    json item = result_json(ir.interleaved);
    item["gate"] = entangler_name(e);
    item["gate_fidelity"] = ir.gate_fidelity;
    item["gate_fidelity_stderr"] = ir.gate_fidelity_stderr;
    item["csv"] = csv + ".csv";
    inter.push_back(item);
  }
  doc["interleaved"] = inter;
  json slots = json::array();
  for (const SlotInfo& s : channels->info())
    slots.push_back({{"label", s.label}, {"gauge_deviation", s.gauge_deviation}, {"leakage", s.leakage}});
  doc["slots"] = slots;
  run.write_json(prefix, "snailsim.rb", doc);
  return doc;
}

json cmd_rb(Run& run, const Device& dev, Calibrations& cal) {
  const Config& c = run.config();
  const std::string inter = c.text("rb.interleaved");
  std::vector<std::string> targets;
  if (inter == "all")
    targets = {"cz", "iswap", "swap"};
  else if (inter != "none")
    targets = {inter};
  return rb_pipeline(run, dev, cal, c.text("rb.mode"), targets, "rb");
}

}  // namespace snail::cli
