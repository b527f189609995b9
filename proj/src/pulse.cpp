#include "snail/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace snail {

namespace {

const double kFwhmToSigma = 1.0 / (2.0 * std::sqrt(2.0 * std::log(2.0)));
const double kHwhmToSigma = 1.0 / std::sqrt(2.0 * std::log(2.0));

// Lifted half-gaussian rise on [0, h] reaching 1 at t = h.
double rise(double t, double h, double sigma) {
  const double edge = std::exp(-h * h / (2.0 * sigma * sigma));
  const double x = t - h;
  return (std::exp(-x * x / (2.0 * sigma * sigma)) - edge) / (1.0 - edge);
}

double rise_area(double h, double sigma) {
  const double edge = std::exp(-h * h / (2.0 * sigma * sigma));
  const double full = sigma * std::sqrt(std::numbers::pi / 2.0) * std::erf(h / (sigma * std::sqrt(2.0)));
  return (full - edge * h) / (1.0 - edge);
}

}  // namespace

PulseEnvelope PulseEnvelope::gaussian(double amplitude, double fwhm, double window) {
  PulseEnvelope e;
  e.kind = EnvelopeKind::Gaussian;
  e.amplitude = amplitude;
  e.fwhm = fwhm;
  e.window = window;
  return e;
}

PulseEnvelope PulseEnvelope::flat_top(double amplitude, double flat_duration, double edge_hwhm, double window) {
  PulseEnvelope e;
  e.kind = EnvelopeKind::FlatTop;
  e.amplitude = amplitude;
  e.flat_duration = flat_duration;
  e.edge_hwhm = edge_hwhm;
  e.window = window;
  return e;
}

PulseEnvelope PulseEnvelope::constant(double amplitude, double duration) {
  PulseEnvelope e;
  e.kind = EnvelopeKind::Constant;
  e.amplitude = amplitude;
  e.constant_duration = duration;
  return e;
}

double PulseEnvelope::sigma() const {
  switch (kind) {
    case EnvelopeKind::Gaussian: return fwhm * kFwhmToSigma;
    case EnvelopeKind::FlatTop: return edge_hwhm * kHwhmToSigma;
    case EnvelopeKind::Constant: return 0.0;
  }
  return 0.0;
}

double PulseEnvelope::edge_duration() const {
  if (kind == EnvelopeKind::Constant) return 0.0;
  const double natural = sigma() * std::sqrt(2.0 * std::log(1.0 / truncation));
  if (window <= 0.0) return natural;
  const double room = kind == EnvelopeKind::Gaussian ? 0.5 * window : 0.5 * (window - flat_duration);
  if (room <= 0.0) throw std::invalid_argument("pulse window shorter than its flat part");
  return std::min(natural, room);
}

double PulseEnvelope::duration() const {
  switch (kind) {
    case EnvelopeKind::Gaussian: return 2.0 * edge_duration();
    case EnvelopeKind::FlatTop: return 2.0 * edge_duration() + flat_duration;
    case EnvelopeKind::Constant: return constant_duration;
  }
  return 0.0;
}

double PulseEnvelope::value(double t) const {
  const double len = duration();
  if (t < 0.0 || t > len || amplitude == 0.0) return 0.0;
  if (kind == EnvelopeKind::Constant) return amplitude;
  const double h = edge_duration();
  const double s = sigma();
  if (t < h) return amplitude * rise(t, h, s);
  if (t > len - h) return amplitude * rise(len - t, h, s);
  return amplitude;
}

double PulseEnvelope::unit_area() const {
  switch (kind) {
    case EnvelopeKind::Gaussian: return 2.0 * rise_area(edge_duration(), sigma());
    case EnvelopeKind::FlatTop: return flat_duration + 2.0 * rise_area(edge_duration(), sigma());
    case EnvelopeKind::Constant: return constant_duration;
  }
  return 0.0;
}

double DriveTone::amplitude_at(double t) const { return envelope.value(t - start); }

double ContinuousTone::ramp_duration() const {
  if (ramp <= 0.0) return 0.0;
  return ramp * kHwhmToSigma * std::sqrt(2.0 * std::log(1e3));
}

double ContinuousTone::amplitude_at(double t) const {
  if (t < 0.0) return 0.0;
  const double h = ramp_duration();
  if (h == 0.0 || t >= h) return amplitude;
  return amplitude * rise(t, h, ramp * kHwhmToSigma);
}

double PulseSchedule::end() const {
  double e = duration;
  for (const auto& t : tones) e = std::max(e, t.end());
  return e;
}

double DecoherenceParams::t_phi_cubic() const { return 1.0 / (1.0 / t2_star_cubic - 1.0 / (2.0 * t1_cubic)); }

double DecoherenceParams::t_phi_transmon() const {
  return 1.0 / (1.0 / t2_star_transmon - 1.0 / (2.0 * t1_transmon));
}

void DecoherenceParams::validate() const {
  if (!(t1_cubic > 0 && t1_transmon > 0 && t2_star_cubic > 0 && t2_star_transmon > 0))
    throw std::invalid_argument("coherence times must be positive");
  if (t2_star_cubic >= 2.0 * t1_cubic || t2_star_transmon >= 2.0 * t1_transmon)
    throw std::invalid_argument("T2* must be below 2 T1 so that the pure dephasing time is finite and positive");
}

}  // namespace snail
