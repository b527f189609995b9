#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "snail/errors.hpp"
#include "snail/parallel.hpp"

namespace snail::cli {

namespace {

const std::vector<std::pair<std::string, std::string>> kSubcommands = {
    {"spectrum", "charge-basis levels and single-phase expansion at circuit.flux_quanta"},
    {"sweep-flux", "omega_c0, alpha_c0, |beta_c0| versus flux for both circuit models"},
    {"effective", "dressed two-qubit parameters (closed form, numeric SW, exact)"},
    {"chevron", "sideband chevron and Rabi-rate linearity"},
    {"zznull", "residual ZZ versus CW amplitude"},
    {"ramsey", "conditional Ramsey phases of calibrated gates"},
    {"spectroscopy", "pulsed transmon spectroscopy with the CW tone"},
    {"gate", "calibrate one FSim gate and emit its schedule"},
    {"rb", "standard and interleaved randomized benchmarking"},
    {"reproduce", "full figure-data pipeline; --check evaluates the acceptance table"},
};

// "cz", "custom(1.57,3.14)" -> config overrides
void apply_target(Config& c, const std::string& target) {
  const auto open = target.find('(');
  if (open == std::string::npos) {
    c.set("gate.target=" + target);
    return;
  }
  const auto comma = target.find(',', open);
  const auto close = target.find(')', open);
  if (target.substr(0, open) != "custom" || comma == std::string::npos || close == std::string::npos || close < comma)
    throw Error(ErrorKind::Config, "--target must be cz, iswap, swap, identity or custom(swap,phase), got " + target);
  c.set("gate.target=\"custom\"");
  c.set("gate.swap_angle=" + target.substr(open + 1, comma - open - 1));
  c.set("gate.conditional_phase=" + target.substr(comma + 1, close - comma - 1));
}

}  // namespace

int main_entry(int argc, char** argv) {
  CLI::App app{"snailsim: cubic-transmon two-qubit simulator"};
  app.set_version_flag("--version", std::string(SNAIL_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  std::vector<std::string> configs, sets;
  std::string out_dir;
  std::uint64_t seed = 1234;
  int threads = default_threads();
  bool check = false;
  std::string target, rb_mode, rb_interleaved;
  std::vector<int> rb_lengths;
  int rb_randomizations = -1, rb_shots = -1;

  app.add_option("--config", configs, "JSON config file; repeatable, later files win")->check(CLI::ExistingFile);
  app.add_option("--set", sets, "override key=value; repeatable, applied after config files");
  app.add_option("--out", out_dir, "output directory (default: $SNAILSIM_OUT, else ./snailsim_out/<subcommand>)");
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--check", check, "reproduce: evaluate the acceptance criteria");

  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : kSubcommands) subs[name] = app.add_subcommand(name, help);
  subs["gate"]->add_option("--target", target, "cz | iswap | swap | identity | custom(swap_angle,conditional_phase)");
  CLI::App* rb = subs["rb"];
  rb->add_option("--mode", rb_mode, "two_qubit | cubic | transmon");
  rb->add_option("--lengths", rb_lengths, "sequence lengths")->delimiter(',');
  rb->add_option("--randomizations", rb_randomizations, "sequences per length");
  rb->add_option("--interleaved", rb_interleaved, "none | cz | iswap | swap | all");
  rb->add_option("--shots", rb_shots, "0 = exact expectation values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  std::string subcommand;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) subcommand = name;

  try {
    Config config = Config::defaults();
    for (const auto& path : configs) config.merge_file(path);
    for (const auto& s : sets) config.set(s);
    if (!target.empty()) apply_target(config, target);
    if (!rb_mode.empty()) config.set("rb.mode=\"" + rb_mode + "\"");
    if (!rb_interleaved.empty()) config.set("rb.interleaved=\"" + rb_interleaved + "\"");
    if (!rb_lengths.empty()) config.set("rb.lengths=" + nlohmann::json(rb_lengths).dump());
    if (rb_randomizations >= 0) config.set("rb.randomizations=" + std::to_string(rb_randomizations));
    if (rb_shots >= 0) config.set("rb.shots=" + std::to_string(rb_shots));
    if (check && subcommand != "reproduce") throw Error(ErrorKind::Config, "--check is only valid with reproduce");

    if (out_dir.empty()) {
      const char* env = std::getenv(kOutputEnv);
      out_dir = env && *env ? env : "snailsim_out";
      out_dir += "/" + subcommand;
    }
    Run run(subcommand, config, out_dir, seed, threads);

    int status = kOk;
    if (subcommand == "spectrum") {
      cmd_spectrum(run);
    } else if (subcommand == "sweep-flux") {
      cmd_sweep_flux(run);
    } else {
      const Device dev = build_device(run.config(), threads);
      Calibrations cal;
      if (subcommand == "effective") {
        cmd_effective(run, dev);
      } else if (subcommand == "chevron") {
        cmd_chevron(run, dev);
      } else if (subcommand == "zznull") {
        cmd_zznull(run, dev);
      } else if (subcommand == "ramsey") {
        cmd_ramsey(run, dev, cal);
      } else if (subcommand == "spectroscopy") {
        cmd_spectroscopy(run, dev, run.config().flag("spectroscopy.cw_on"), "spectroscopy");
      } else if (subcommand == "gate") {
        const Config& c = run.config();
        cmd_gate(run, dev,
                 parse_gate_target(c.text("gate.target"), c.number("gate.swap_angle"), c.number("gate.conditional_phase")),
                 "gate");
      } else if (subcommand == "rb") {
        cmd_rb(run, dev, cal);
      } else if (subcommand == "reproduce") {
        const std::vector<Criterion> table = cmd_reproduce(run, dev, check);
        for (const Criterion& k : table) {
          std::cout << format_criterion(k) << "\n";
          if (!k.pass) status = kCheckFailed;
        }
      }
    }
    run.finish();
    std::cerr << "snailsim " << subcommand << ": wrote " << run.out_dir().string() << "\n";
    return status;
  } catch (const Error& e) {
    std::cerr << "snailsim: " << e.what() << "\n";
    return e.kind() == ErrorKind::Config ? kConfigError : kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "snailsim: ConfigError: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "snailsim: numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace snail::cli

int main(int argc, char** argv) { return snail::cli::main_entry(argc, argv); }
