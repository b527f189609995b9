#pragma once

// snailsim command layer: run bookkeeping, output writers and the subcommands.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "snail/clifford.hpp"
#include "snail/config.hpp"
#include "snail/device.hpp"
#include "snail/rb.hpp"

namespace snail::cli {

using nlohmann::json;

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kCheckFailed = 4 };

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kOutputEnv = "SNAILSIM_OUT";

/// Output directory and the files written so far; finish() adds the manifest.
class Run {
 public:
  Run(std::string subcommand, Config config, std::filesystem::path out_dir, std::uint64_t seed, int threads);

  const std::string& subcommand() const { return subcommand_; }
  const Config& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  int threads() const { return threads_; }
  const std::filesystem::path& out_dir() const { return out_dir_; }

  /// Adds "schema" and "schema_version" and writes <name>.json.
  void write_json(const std::string& name, const std::string& schema, json document);
  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

  json manifest() const;
  void finish();

 private:
  void record(const std::string& file);

  std::string subcommand_;
  Config config_;
  std::filesystem::path out_dir_;
  std::uint64_t seed_;
  int threads_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

/// Shortest round-trip decimal form.
std::string num(double x);
std::string sha256_hex(const std::string& data);

json schedule_to_json(const PulseSchedule& s);
PulseSchedule schedule_from_json(const json& j);

std::vector<double> linspace(double a, double b, int n);

/// Calibrations shared by gate, ramsey, rb and reproduce.
struct Calibrations {
  std::map<Entangler, GateCalibration> gates;
  std::optional<SingleQubitCalibration> single;
};

// Subcommands. Each writes its files into the run directory.
void cmd_spectrum(Run& run);
std::vector<FluxRow> cmd_sweep_flux(Run& run);
json cmd_effective(Run& run, const Device& dev);
json cmd_chevron(Run& run, const Device& dev);
json cmd_zznull(Run& run, const Device& dev);
json cmd_ramsey(Run& run, const Device& dev, Calibrations& cal);
json cmd_spectroscopy(Run& run, const Device& dev, bool cw_on, const std::string& name);
json cmd_gate(Run& run, const Device& dev, const FsimTarget& target, const std::string& name);
json cmd_rb(Run& run, const Device& dev, Calibrations& cal);
/// RB in `mode` (two_qubit | cubic | transmon) with optional interleaved gates;
/// files are named <prefix>.json, <prefix>_reference.csv, <prefix>_interleaved_<gate>.csv.
json rb_pipeline(Run& run, const Device& dev, Calibrations& cal, const std::string& mode,
                 const std::vector<std::string>& interleaved, const std::string& prefix);

GateCalibration calibrated_entangler(const Device& dev, Calibrations& cal, Entangler e);
const SingleQubitCalibration& calibrated_single(const Device& dev, Calibrations& cal);

struct Criterion {
  int id = 0;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Full figure-data pipeline; with `check` the acceptance table is evaluated,
/// written to reproduce.json and returned.
std::vector<Criterion> cmd_reproduce(Run& run, const Device& dev, bool check);

std::string format_criterion(const Criterion& c);

/// Parses argv and runs; returns the process exit code.
int main_entry(int argc, char** argv);

}  // namespace snail::cli
