#include "snail/config.hpp"

#include <fstream>
#include <sstream>

#include "snail/errors.hpp"

namespace snail {

using nlohmann::json;

namespace {

const std::vector<std::pair<std::string, json>>& default_table() {
  static const std::vector<std::pair<std::string, json>> table = {
      // single-phase circuit row; also the default for the full model
      {"circuit.charging_energy_ghz", 0.21},
      {"circuit.junction_scale_ghz", 84.0},
      {"circuit.k1", 0.07},
      {"circuit.k2", 0.2},
      {"circuit.k3", 0.2},
      {"circuit.flux_quanta", 0.34},
      {"circuit.charge_cutoff", 12},
      // adjusted full-circuit row
      {"circuit.full.charging_energy_ghz", 0.18},
      {"circuit.full.junction_scale_ghz", 103.0},
      {"circuit.full.k1", 0.07},
      {"circuit.full.k2", 0.2},
      {"circuit.full.k3", 0.2},

      {"sweep.flux_min", 0.0},
      {"sweep.flux_max", 0.3},
      {"sweep.points", 21},
      {"spectrum.levels", 6},

      // "reconstruct": bare values solved from dressed targets; "bare": given directly
      {"device.mode", "reconstruct"},
      {"device.target.omega_c_ghz", 3.633},
      {"device.target.omega_t_ghz", 4.479},
      {"device.target.alpha_c_ghz", -0.132},
      {"device.target.alpha_t_ghz", -0.168},
      {"device.g0_ghz", 0.075},
      // "circuit": single-phase beta_c0 at circuit.flux_quanta; "value": device.beta_c0_ghz
      {"device.beta_source", "circuit"},
      {"device.beta_c0_ghz", -0.1996},
      {"device.bare.omega_c0_ghz", 3.66209},
      {"device.bare.alpha_c0_ghz", -0.064168},
      {"device.bare.omega_t0_ghz", 4.47206},
      {"device.bare.alpha_t0_ghz", -0.171737},

      {"cw.frequency_ghz", 0.93},
      {"cw.auto_null", true},
      {"cw.amplitude_ghz", 0.0},

      {"zznull.amplitude_max_ghz", 1.0},
      {"zznull.points", 21},
      {"zznull.method", "eigen"},
      {"zznull.ramp_hwhm_ns", 20.0},
      {"zznull.window_ns", 400.0},

      {"decoherence.enabled", true},
      {"decoherence.t1_cubic_us", 3.9},
      {"decoherence.t2_star_cubic_us", 0.6},
      {"decoherence.t1_transmon_us", 4.0},
      {"decoherence.t2_star_transmon_us", 2.3},

      {"layout.slot_ns", 50.0},
      {"layout.swap_flat_ns", 32.0},
      {"layout.swap_edge_hwhm_ns", 3.0},
      {"layout.cp_flat_ns", 16.0},
      {"layout.cp_edge_hwhm_ns", 1.5},
      {"layout.single_qubit_fwhm_ns", 18.6},

      {"chevron.freq_min_ghz", 0.826},
      {"chevron.freq_max_ghz", 0.866},
      {"chevron.freq_points", 21},
      {"chevron.time_max_ns", 200.0},
      {"chevron.time_points", 41},
      {"chevron.amplitude_ghz", 0.2308},
      {"chevron.rabi_amplitudes_ghz", json::array({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7})},

      {"ramsey.gates", json::array({"cz", "iswap", "swap"})},
      {"ramsey.phase_points", 25},

      {"spectroscopy.detuning_min_ghz", 0.054},
      {"spectroscopy.detuning_max_ghz", 0.114},
      {"spectroscopy.points", 61},
      {"spectroscopy.probe_amplitude_ghz", 0.02},
      {"spectroscopy.probe_fwhm_ns", 60.0},
      {"spectroscopy.cw_on", true},

      // cz | iswap | swap | identity | custom (uses the two angles)
      {"gate.target", "cz"},
      {"gate.swap_angle", 0.0},
      {"gate.conditional_phase", 0.0},

      // two_qubit | cubic | transmon
      {"rb.mode", "two_qubit"},
      {"rb.lengths", json::array({1, 3, 6, 10, 15, 20, 25, 30})},
      {"rb.randomizations", 20},
      {"rb.shots", 0},
      // none | cz | iswap | swap | all
      {"rb.interleaved", "none"},
      {"rb.readout", "transmon"},
      {"rb.subintervals", 10},

      {"reproduce.fsim_grid", 5},
      {"reproduce.random_sets", 100},
      {"reproduce.rb", true},
  };
  return table;
}

enum class Kind { Number, Integer, Boolean, String, NumberList, IntegerList, StringList };

Kind kind_of(const json& v) {
  if (v.is_boolean()) return Kind::Boolean;
  if (v.is_number_integer()) return Kind::Integer;
  if (v.is_number()) return Kind::Number;
  if (v.is_string()) return Kind::String;
  if (v.is_array() && !v.empty()) {
    if (v[0].is_number_integer()) return Kind::IntegerList;
    if (v[0].is_number()) return Kind::NumberList;
    return Kind::StringList;
  }
  throw std::logic_error("unsupported default type");
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Number: return "number";
    case Kind::Integer: return "integer";
    case Kind::Boolean: return "boolean";
    case Kind::String: return "string";
    case Kind::NumberList: return "array of numbers";
    case Kind::IntegerList: return "array of integers";
    case Kind::StringList: return "array of strings";
  }
  return "?";
}

bool matches(Kind k, const json& v) {
  auto all = [&](auto pred) {
    if (!v.is_array()) return false;
    for (const auto& x : v)
      if (!pred(x)) return false;
    return true;
  };
  switch (k) {
    case Kind::Number: return v.is_number();
    case Kind::Integer: return v.is_number_integer();
    case Kind::Boolean: return v.is_boolean();
    case Kind::String: return v.is_string();
    case Kind::NumberList: return all([](const json& x) { return x.is_number(); });
    case Kind::IntegerList: return all([](const json& x) { return x.is_number_integer(); });
    case Kind::StringList: return all([](const json& x) { return x.is_string(); });
  }
  return false;
}

void flatten(const json& node, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object())
      flatten(*it, key, out);
    else
      out.emplace_back(key, *it);
  }
}

Error config_error(const std::string& what) { return Error(ErrorKind::Config, what); }

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, v] : default_table()) keys.push_back(k);
  return keys;
}

Config Config::defaults() {
  Config c;
  for (const auto& [k, v] : default_table()) c.values_[k] = v;
  return c;
}

void Config::assign(const std::string& key, const json& value, const std::string& origin) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw config_error("unknown key '" + key + "' in " + origin);
  const Kind k = kind_of(it->second);
  if (!matches(k, value))
    throw config_error("key '" + key + "' in " + origin + " expects " + kind_name(k) + ", got " + value.dump());
  // keep floats as floats so the snapshot is stable under 1 vs 1.0
  if (k == Kind::Number)
    it->second = value.get<double>();
  else if (k == Kind::NumberList)
    it->second = value.get<std::vector<double>>();
  else
    it->second = value;
}

void Config::merge(const json& document, const std::string& origin) {
  if (!document.is_object()) throw config_error(origin + " is not a JSON object");
  std::vector<std::pair<std::string, json>> flat;
  flatten(document, "", flat);
  for (const auto& [key, value] : flat) {
    if (key == "schema_version") {
      if (value != kConfigSchemaVersion)
        throw config_error("key 'schema_version' in " + origin + " must be " + std::to_string(kConfigSchemaVersion));
      continue;
    }
    if (key == "description") continue;
    assign(key, value, origin);
  }
}

void Config::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error("cannot parse " + path + ": " + e.what());
  }
  merge(doc, path);
}

void Config::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw config_error("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  assign(key, value, "--set");
}

const json& Config::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw std::logic_error("undeclared config key " + key);
  return it->second;
}

double Config::number(const std::string& key) const { return at(key).get<double>(); }
int Config::integer(const std::string& key) const { return at(key).get<int>(); }
bool Config::flag(const std::string& key) const { return at(key).get<bool>(); }
std::string Config::text(const std::string& key) const { return at(key).get<std::string>(); }
std::vector<double> Config::numbers(const std::string& key) const { return at(key).get<std::vector<double>>(); }
std::vector<int> Config::integers(const std::string& key) const { return at(key).get<std::vector<int>>(); }
std::vector<std::string> Config::texts(const std::string& key) const {
  return at(key).get<std::vector<std::string>>();
}

json Config::snapshot() const {
  json root = json::object();
  for (const auto& [key, value] : values_) {
    json* node = &root;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
    (*node)[parts.back()] = value;
  }
  root["schema_version"] = kConfigSchemaVersion;
  return root;
}

std::string Config::canonical() const { return snapshot().dump(); }

}  // namespace snail
