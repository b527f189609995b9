#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "snail/errors.hpp"
#include "snail/units.hpp"

namespace snail::cli {

namespace {

constexpr double kPi = std::numbers::pi;

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool within(double value, double target, double rel) { return std::abs(value / target - 1.0) <= rel; }

struct OracleCheck {
  double worst_frequency = 0.0, worst_zz = 0.0;
  int drawn = 0;
};

// Random dispersive sets: closed form against exact diagonalization.
// Frequencies use |beta_c0| / omega_c0 <= 0.1, the ZZ combination <= 0.02.
OracleCheck oracle_sets(Run& run, int n_sets) {
  std::mt19937_64 rng(run.seed());
  auto uniform = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  OracleCheck out;
  std::vector<std::vector<std::string>> rows;
  for (const auto& [kind, beta_max] : {std::pair{"frequency", 0.1}, std::pair{"zz", 0.02}}) {
    int accepted = 0;
    while (accepted < n_sets) {
      ++out.drawn;
      DeviceParams p;
      p.omega_c0 = uniform(3.0, 5.0);
      const double delta = uniform(0.5, 1.5) * (uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
      p.omega_t0 = p.omega_c0 + delta;
      p.alpha_c0 = uniform(-0.3, -0.05);
      p.alpha_t0 = uniform(-0.3, -0.1);
      p.beta_c0 = uniform(-beta_max, beta_max) * p.omega_c0;
      p.g0 = uniform(0.02, 0.1) *
             std::min({std::abs(delta), std::abs(p.alpha_c0 + delta), std::abs(delta - p.alpha_t0)});
      // draws outside the perturbative domain or with hybridized spectator levels are redrawn
      EffectiveParams cf, ex;
      try {
        cf = closed_form_effective(p);
        ex = exact_effective(p);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::NearResonantDenominator || e.kind() == ErrorKind::LabelingFailed) continue;
        throw;
      }
      const double fc = std::abs(cf.omega_c / ex.omega_c - 1.0);
      const double ft = std::abs(cf.omega_t / ex.omega_t - 1.0);
      const double zz = std::abs(cf.j_zz / ex.j_zz - 1.0);
      if (std::string(kind) == "frequency")
        out.worst_frequency = std::max({out.worst_frequency, fc, ft});
      else
        out.worst_zz = std::max(out.worst_zz, zz);
      rows.push_back({kind, std::to_string(accepted), num(p.omega_c0), num(p.beta_c0), num(p.g0), num(fc), num(ft),
                      num(zz)});
      ++accepted;
    }
  }
  run.write_csv("oracle", {"family", "set", "omega_c0_ghz", "beta_c0_ghz", "g0_ghz", "omega_c_rel_error",
                           "omega_t_rel_error", "zz_rel_error"},
                rows);
  return out;
}

struct GridCheck {
  double worst = 0.0;
  double seconds = 0.0;
  std::string worst_point;
};

// FSim round trip on an n x n grid of (swap angle, conditional phase) in [0, pi].
GridCheck fsim_grid(Run& run, const Device& dev, Calibrations& cal, int n) {
  GridCheck out;
  Stopwatch sw;
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const FsimTarget t{kPi * i / (n - 1), kPi * j / (n - 1)};
      const GateCalibration g = calibrate(t, dev.model, dev.cw, dev.layout);
      const FsimReport r = extract_fsim(synthesize_gate(g), dev.model);
      const double err =
          std::max(std::abs(r.swap_angle - t.swap_angle), std::abs(units::wrap_phase(r.conditional_phase - t.conditional_phase)));
      if (err > out.worst) {
        out.worst = err;
        out.worst_point = "(" + num(t.swap_angle) + "," + num(t.conditional_phase) + ")";
      }
      rows.push_back({num(t.swap_angle), num(t.conditional_phase), num(r.swap_angle), num(r.conditional_phase),
                      num(r.leakage), num(err)});
      if (i == 0 && j == n - 1) cal.gates.emplace(Entangler::CZ, g);
      if (i == n - 1 && j == 0) cal.gates.emplace(Entangler::ISwap, g);
      if (i == n - 1 && j == n - 1) cal.gates.emplace(Entangler::Swap, g);
    }
  run.write_csv("fsim_grid", {"swap_angle_rad", "conditional_phase_rad", "measured_swap_angle_rad",
                              "measured_conditional_phase_rad", "leakage", "error_rad"},
                rows);
  out.seconds = sw.seconds();
  return out;
}

// Quick property checks: each returns an empty string on success.
std::vector<std::pair<std::string, std::string>> property_checks(const Device& dev, Calibrations& cal,
                                                                  std::uint64_t seed) {
  std::vector<std::pair<std::string, std::string>> out;
  auto check = [&](const std::string& name, bool ok, const std::string& why) { out.emplace_back(name, ok ? "" : why); };

  // norm conservation under a calibrated gate
  {
    const GateCalibration g = calibrated_entangler(dev, cal, Entangler::CZ);
    const Eigen::MatrixXcd u = Propagator(dev.model, synthesize_gate(g), Frame::Dressed).unitary();
    const double err = (u.adjoint() * u - Eigen::MatrixXcd::Identity(kSpaceDim, kSpaceDim)).norm();
    check("norm", err < 1e-6, "unitarity error " + num(err));
  }
  // trace and Hermiticity of the density matrix under decoherence
  {
    const SingleQubitCalibration& sq = calibrated_single(dev, cal);
    const Propagator p(dev.model, single_qubit_slot(sq, 1, 2), Frame::Dressed, {}, dev.decoherence.value_or(DecoherenceParams{}));
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(kSpaceDim, kSpaceDim);
    rho(basis::gg, basis::gg) = rho(basis::ee, basis::ee) = 0.5;
    rho(basis::gg, basis::ee) = rho(basis::ee, basis::gg) = 0.5;
    const Eigen::MatrixXcd r = p.evolve_density(rho, 0.0, p.duration());
    const double tr = std::abs(r.trace() - 1.0);
    const double herm = (r - r.adjoint()).norm();
    check("trace", tr < 1e-8, "trace error " + num(tr));
    check("density_hermiticity", herm < 1e-10, "rho - rho^dagger = " + num(herm));
  }
  // Hamiltonian Hermiticity
  {
    const TruncatedHamiltonian h = build_truncated_hamiltonian(dev.bare);
    const ChargeBasisModel m = build_charge_model(dev.full_circuit, dev.charge_cutoff);
    const double e1 = (h.matrix - h.matrix.transpose()).norm();
    const double e2 = (m.hamiltonian - m.hamiltonian.adjoint()).norm();
    check("hamiltonian_hermiticity", e1 == 0.0 && e2 < 1e-12, "asymmetry " + num(e1) + ", " + num(e2));
  }
  // parity: no three-wave term at zero flux
  {
    const SnailParams s0 = SnailParams::with_flux_quanta(dev.single_phase, 0.0);
    const double b_single = std::abs(single_phase_modes(find_potential_minimum(s0), s0).beta_c0);
    const double b_full =
        full_circuit_modes(SnailParams::with_flux_quanta(dev.full_circuit, 0.0), dev.charge_cutoff).abs_beta_c0;
    check("parity", b_single < 1e-12 && b_full < 1e-6, "beta at zero flux " + num(b_single) + ", " + num(b_full));
  }
  // Clifford closure and inverses
  {
    const CliffordGroup one(1), two(2);
    bool ok = one.size() == 24 && two.size() == 11520;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, two.size() - 1);
    for (int k = 0; k < 2000 && ok; ++k) ok = two.find(two.matrix(pick(rng)) * two.matrix(pick(rng))) >= 0;
    for (const CliffordGroup* g : {&one, &two})
      for (int i = 0; i < g->size() && ok; ++i) ok = g->compose(g->inverse(i), i) == CliffordGroup::identity();
    check("clifford", ok, "closure or inverse failed");
  }
  // seed determinism of sequences and RB
  {
    const CliffordGroup g(1);
    RbConfig rc;
    rc.lengths = {1, 5, 10};
    rc.randomizations = 5;
    rc.seed = seed;
    rc.shots = 100;
    const SlotChannels ideal = SlotChannels::ideal();
    const RbResult a = run_rb(g, ideal, rc), b = run_rb(g, ideal, rc);
    bool ok = generate_sequence(g, rc, 10, 3) == generate_sequence(g, rc, 10, 3);
    for (size_t i = 0; i < a.points.size(); ++i) ok = ok && a.points[i].mean == b.points[i].mean && a.points[i].sem == b.points[i].sem;
    RbConfig other = rc;
    other.seed = seed + 1;
    ok = ok && generate_sequence(g, rc, 10, 3) != generate_sequence(g, other, 10, 3);
    check("seed_determinism", ok, "repeated runs differ");
  }
  return out;
}

}  // namespace

std::string format_criterion(const Criterion& c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "criterion %d: %s (%.1f s) ", c.id, c.pass ? "PASS" : "FAIL", c.seconds);
  return buf + c.detail;
}

std::vector<Criterion> cmd_reproduce(Run& run, const Device& dev, bool check) {
  const Config& c = run.config();
  std::vector<Criterion> table;
  Calibrations cal;
  auto add = [&](int id, bool pass, const std::string& detail, double seconds) {
    table.push_back({id, pass, detail, seconds});
  };

  // 1. circuit models
  {
    Stopwatch sw;
    cmd_spectrum(run);
    const std::vector<FluxRow> rows = cmd_sweep_flux(run);
    const double seconds = sw.seconds();
    double worst = 0.0, beta0 = 0.0;
    bool flagged = false, covered = false;
    for (size_t i = 0; i + 1 < rows.size(); i += 2) {
      const FluxRow &a = rows[i], &b = rows[i + 1];
      if (a.flux_quanta > 0.3 + 1e-12) continue;
      if (!a.flag.empty() || !b.flag.empty()) {
        flagged = true;
        continue;
      }
      worst = std::max(worst, std::abs(b.omega_c0 / a.omega_c0 - 1.0));
      if (a.flux_quanta == 0.0) {
        covered = true;
        beta0 = std::max(a.abs_beta_c0, b.abs_beta_c0);
      }
    }
    const bool pass = !flagged && covered && worst < 0.02 && beta0 < 1e-6 && seconds < 120.0;
    add(1, pass,
        "max |omega_full/omega_single - 1| = " + fmt("%.4f", worst) + " (< 0.02), |beta_c0(0)| = " + fmt("%.1e", beta0) +
            " GHz, " + std::to_string(rows.size() / 2) + " flux points",
        seconds);
  }

  // 2. effective parameters
  {
    Stopwatch sw;
    cmd_effective(run, dev);
    const EffectiveParams& e = dev.effective;
    const double beta = dev.circuit_modes.beta_c0;
    const bool pass = within(e.g, -0.014, 0.15) && within(e.eta, 0.022, 0.15) && within(std::abs(e.j_zz), 0.005, 0.20) &&
                      within(beta, -0.195, 0.15);
    add(2, pass,
        "g = " + fmt("%.2f", 1e3 * e.g) + " MHz, eta = " + fmt("%.4f", e.eta) + ", |J_ZZ| = " +
            fmt("%.2f", 1e3 * std::abs(e.j_zz)) + " MHz, beta_c0 = " + fmt("%.1f", 1e3 * beta) + " MHz",
        sw.seconds());
  }

  // 3. oracle equivalence
  {
    Stopwatch sw;
    const OracleCheck o = oracle_sets(run, c.integer("reproduce.random_sets"));
    const double seconds = sw.seconds();
    add(3, o.worst_frequency < 0.02 && o.worst_zz < 0.10 && seconds < 60.0,
        "worst dressed-frequency error " + fmt("%.2e", o.worst_frequency) + " (< 0.02), worst ZZ error " +
            fmt("%.3f", o.worst_zz) + " (< 0.10), " + std::to_string(c.integer("reproduce.random_sets")) +
            " sets per family from " + std::to_string(o.drawn) + " draws",
        seconds);
  }

  // 4. chevron
  {
    Stopwatch sw;
    const json ch = cmd_chevron(run, dev);
    const double seconds = sw.seconds();
    const double res = ch["resonance_ghz"].is_null() ? ch["resonance_grid_ghz"].get<double>()
                                                      : ch["resonance_ghz"].get<double>();
    const double r2 = ch["rabi"]["r_squared"], max_rate = ch["rabi"]["max_rate_ghz"];
    add(4, std::abs(res - 0.846) <= 0.002 && r2 > 0.999 && max_rate >= 0.030 && seconds < 180.0,
        "resonance " + fmt("%.4f", res) + " GHz (846 +- 2 MHz), Rabi R^2 = " + fmt("%.6f", r2) + ", max rate " +
            fmt("%.2f", 1e3 * max_rate) + " MHz",
        seconds);
  }

  // 5. ZZ nulling
  {
    Stopwatch sw;
    try {
      const json z = cmd_zznull(run, dev);
      const double r0 = z["residual_at_zero_ghz"], cross = z["crossing_amplitude_ghz"];
      // simulated Ramsey fringes as the second extraction method
      const double f = z["cw_frequency_ghz"];
      const double q0 = zz_point(dev.model, f, 0.0, ZzMethod::Ramsey).residual;
      const double qx = zz_point(dev.model, f, cross, ZzMethod::Ramsey).residual;
      const double seconds = sw.seconds();
      add(5, within(r0, dev.effective.j_zz, 0.20) && seconds < 180.0,
          "crossing at " + fmt("%.4f", cross) + " GHz, residual(0) = " + fmt("%.3f", 1e3 * r0) + " MHz vs J_ZZ " +
              fmt("%.3f", 1e3 * dev.effective.j_zz) + " MHz; Ramsey fringes give " + fmt("%.3f", 1e3 * q0) +
              " MHz at zero and " + fmt("%.3f", 1e3 * qx) + " MHz at the crossing",
          seconds);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoCrossing) throw;
      add(5, false, e.what(), sw.seconds());
    }
  }

  // 6. gates
  {
    Stopwatch sw;
    const int n = c.integer("reproduce.fsim_grid");
    GridCheck grid;
    if (n >= 2) grid = fsim_grid(run, dev, cal, n);
    const json r = cmd_ramsey(run, dev, cal);
    double worst_phase = 0.0, worst_leak = 0.0;
    int found = 0;
    for (const json& g : r["gates"]) {
      const std::string name = g["gate"];
      if (name != "cz" && name != "iswap" && name != "swap") continue;
      ++found;
      worst_phase = std::max(worst_phase, std::abs(g["error_rad"].get<double>()));
      worst_leak = std::max(worst_leak, g["leakage"].get<double>());
    }
    const double seconds = sw.seconds();
    add(6, found == 3 && n >= 2 && worst_phase < 1e-2 && worst_leak < 1e-3 && grid.worst < 2e-2 && seconds < 300.0,
        "Ramsey conditional-phase error " + fmt("%.1e", worst_phase) + " rad, leakage " + fmt("%.1e", worst_leak) +
            ", FSim " + std::to_string(n) + "x" + std::to_string(n) + " worst " + fmt("%.1e", grid.worst) + " rad at " +
            grid.worst_point,
        seconds);
  }

  // 7. randomized benchmarking
  if (c.flag("reproduce.rb")) {
    Stopwatch sw;
    const json two = rb_pipeline(run, dev, cal, "two_qubit", {"cz", "iswap", "swap"}, "rb_two_qubit");
    const json cubic = rb_pipeline(run, dev, cal, "cubic", {}, "rb_cubic");
    const json transmon = rb_pipeline(run, dev, cal, "transmon", {}, "rb_transmon");
    const double seconds = sw.seconds();
    struct Item {
      const char* name;
      double value, target;
    };
    std::vector<Item> items{{"2Q", two["reference"]["fidelity"], 0.950},
                            {"CZ", two["interleaved"][0]["gate_fidelity"], 0.971},
                            {"iSWAP", two["interleaved"][1]["gate_fidelity"], 0.958},
                            {"SWAP", two["interleaved"][2]["gate_fidelity"], 0.962},
                            {"cubic", cubic["reference"]["fidelity"], 0.963},
                            {"transmon", transmon["reference"]["fidelity"], 0.977}};
    bool pass = seconds < 900.0;
    std::string detail;
    for (const Item& it : items) {
      const bool ok = std::abs(it.value - it.target) <= 0.02;
      pass = pass && ok;
      detail += std::string(it.name) + " " + fmt("%.3f", it.value) + "/" + fmt("%.3f", it.target) + (ok ? "" : "!") + " ";
    }
    if (!two["coherence_limit"].is_null())
      detail += "(2Q coherence limit " + fmt("%.3f", two["coherence_limit"]["per_clifford"].get<double>()) + ")";
    add(7, pass, detail, seconds);
  } else {
    add(7, false, "skipped (reproduce.rb = false)", 0.0);
  }

  // 8. Raman artifact
  {
    Stopwatch sw;
    const json on = cmd_spectroscopy(run, dev, true, "spectroscopy_cw_on");
    const json off = cmd_spectroscopy(run, dev, false, "spectroscopy_cw_off");
    const double seconds = sw.seconds();
    const bool has_on = !on["peak"].is_null();
    const double offset = has_on ? on["peak"]["offset_from_omega_t_ghz"].get<double>() : NAN;
    add(8, has_on && std::abs(offset - 0.084) <= 0.002 && off["peak"].is_null() && seconds < 120.0,
        std::string("CW on: ") + (has_on ? "peak at omega_t + " + fmt("%.2f", 1e3 * offset) + " MHz" : "no peak") +
            "; CW off: " + (off["peak"].is_null() ? "no peak" : "peak found"),
        seconds);
  }

  // 9. properties
  {
    Stopwatch sw;
    const auto props = property_checks(dev, cal, run.seed());
    bool pass = true;
    std::string detail;
    for (const auto& [name, why] : props) {
      pass = pass && why.empty();
      detail += name + (why.empty() ? " ok " : " FAILED(" + why + ") ");
    }
    add(9, pass, detail, sw.seconds());
  }

  json doc;
  json rows = json::array();
  bool all = true;
  for (const Criterion& k : table) {
    rows.push_back({{"criterion", k.id}, {"pass", k.pass}, {"detail", k.detail}});
    all = all && k.pass;
  }
  doc["checked"] = check;
  doc["criteria"] = check ? rows : json::array();
  doc["all_passed"] = check ? json(all) : json(nullptr);
  run.write_json("reproduce", "snailsim.reproduce", doc);
  return check ? table : std::vector<Criterion>{};
}

}  // namespace snail::cli
