#pragma once

// Everything the experiments need, built once from a Config: circuit rows,
// bare and dressed two-qubit parameters, the dynamics model, the ZZ-nulling CW
// setting, decoherence and slot layout.

#include <optional>
#include <string>

#include "snail/circuit.hpp"
#include "snail/config.hpp"
#include "snail/effective.hpp"
#include "snail/experiments.hpp"
#include "snail/gates.hpp"

namespace snail {

struct Device {
  SnailParams single_phase;  ///< at circuit.flux_quanta
  SnailParams full_circuit;
  int charge_cutoff = 12;
  BareCubicModes circuit_modes;  ///< single-phase values at the operating flux
  DeviceParams bare;
  EffectiveParams effective;
  TwoModeModel model;
  CwSetting cw;
  std::optional<ZzSweep> null_sweep;  ///< set when the CW amplitude was found by nulling
  std::optional<DecoherenceParams> decoherence;
  GateLayout layout;
};

SnailParams single_phase_params(const Config& c);
SnailParams full_circuit_params(const Config& c);
DecoherenceParams decoherence_params(const Config& c);
GateLayout gate_layout(const Config& c);
ZzMethod zz_method(const Config& c);
std::vector<double> null_amplitudes(const Config& c);

/// Throws ConfigError for invalid enumerations, numerical errors otherwise.
Device build_device(const Config& c, int threads = 1);

/// "cz", "iswap", "swap", "identity", or "custom" with gate.swap_angle / gate.conditional_phase.
FsimTarget parse_gate_target(const std::string& name, double swap_angle = 0.0, double conditional_phase = 0.0);

}  // namespace snail
