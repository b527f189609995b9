#pragma once

// Drive waveforms. Times in ns, frequencies and amplitudes in GHz.

#include <optional>
#include <string>
#include <vector>

namespace snail {

enum class EnvelopeKind { Gaussian, FlatTop, Constant };

/// Truncated envelope, lifted so it is continuous and vanishes at the support edges.
/// `window` (ns, 0 = unlimited) caps the support; Gaussian tails are cut at the window
/// edge when the threshold crossing lies outside it.
struct PulseEnvelope {
  EnvelopeKind kind = EnvelopeKind::Gaussian;
  double amplitude = 0.0;
  double fwhm = 18.6;           ///< gaussian
  double flat_duration = 0.0;   ///< flat_top
  double edge_hwhm = 0.0;       ///< flat_top
  double constant_duration = 0.0;  ///< constant
  double truncation = 1e-3;
  double window = 0.0;

  static PulseEnvelope gaussian(double amplitude, double fwhm, double window = 0.0);
  static PulseEnvelope flat_top(double amplitude, double flat_duration, double edge_hwhm, double window = 0.0);
  static PulseEnvelope constant(double amplitude, double duration);

  double sigma() const;         ///< gaussian sigma of the pulse or its edges
  double edge_duration() const; ///< length of one edge (half of gaussian support)
  double duration() const;      ///< support length
  double value(double t) const; ///< t relative to support start
  double unit_area() const;     ///< integral of value() / amplitude
};

enum class Port { Cubic, Transmon };

/// Which operator a cubic-port tone couples to. Auto picks every channel
/// whose transitions lie within the RWA cutoff of the carrier.
enum class Channel { Auto, Direct, Sideband };

struct DriveTone {
  double frequency = 0.0;
  double phase = 0.0;
  PulseEnvelope envelope;
  double start = 0.0;
  Port target = Port::Cubic;
  Channel channel = Channel::Auto;
  std::string label;

  double end() const { return start + envelope.duration(); }
  double amplitude_at(double t) const;
};

/// Always-on tone on the cubic port (ZZ-nulling drive). A positive `ramp`
/// switches it on with a gaussian edge of that HWHM starting at t = 0.
struct ContinuousTone {
  double frequency = 0.93;
  double amplitude = 0.0;
  double ramp = 0.0;

  double amplitude_at(double t) const;
  double ramp_duration() const;
};

struct PulseSchedule {
  std::vector<DriveTone> tones;
  std::optional<ContinuousTone> cw;
  double duration = 0.0;  ///< explicit length; the support of every tone must fit

  double end() const;
};

struct DecoherenceParams {
  double t1_cubic = 3.9;          ///< us
  double t2_star_cubic = 0.6;     ///< us
  double t2_echo_cubic = 1.5;     ///< us, informational
  double t1_transmon = 4.0;
  double t2_star_transmon = 2.3;
  double t2_echo_transmon = 0.0;  ///< us, informational (0 = not given)

  double t_phi_cubic() const;
  double t_phi_transmon() const;
  void validate() const;
};

}  // namespace snail
