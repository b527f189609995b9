#include "snail/rb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "snail/errors.hpp"
#include "snail/parallel.hpp"
#include "snail/units.hpp"

namespace snail {

namespace {

constexpr int kComp[4] = {basis::gg, basis::ge, basis::eg, basis::ee};

Eigen::MatrixXcd dissipator(const Eigen::MatrixXcd& l) {
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(kSpaceDim, kSpaceDim);
  const Eigen::MatrixXcd ll = l.adjoint() * l;
  Eigen::MatrixXcd d = Eigen::kroneckerProduct(l.conjugate(), l);
  d -= 0.5 * Eigen::kroneckerProduct(id, ll);
  d -= 0.5 * Eigen::kroneckerProduct(ll.transpose(), id);
  return d;
}

// Ad_{Z(after)} S Ad_{Z(before)} with diagonal unitaries given as phase vectors.
void dress(Eigen::MatrixXcd& s, const Eigen::VectorXcd& after, const Eigen::VectorXcd& before) {
  Eigen::VectorXcd left(kSuperDim), right(kSuperDim);
  for (int j = 0; j < kSpaceDim; ++j)
    for (int i = 0; i < kSpaceDim; ++i) {
      left(i + kSpaceDim * j) = after(i) * std::conj(after(j));
      right(i + kSpaceDim * j) = before(i) * std::conj(before(j));
    }
  s = left.asDiagonal() * s * right.asDiagonal();
}

Eigen::MatrixXcd embed(const Eigen::Matrix4cd& u4) {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(kSpaceDim, kSpaceDim);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) u(kComp[i], kComp[j]) = u4(i, j);
  return u;
}

int level(int index, Port q) { return q == Port::Cubic ? index / kModeLevels : index % kModeLevels; }

double ground_population(const Eigen::VectorXcd& rho, Port q) {
  double p = 0.0;
  for (int i = 0; i < kSpaceDim; ++i)
    if (level(i, q) == 0) p += rho(i + kSpaceDim * i).real();
  return p;
}

}  // namespace

Eigen::MatrixXcd unitary_superoperator(const Eigen::MatrixXcd& u) {
  return Eigen::kroneckerProduct(u.conjugate(), u);
}

Eigen::MatrixXcd slot_superoperator(const TwoModeModel& model, const PulseSchedule& schedule,
                                    const std::optional<DecoherenceParams>& decoherence, int subintervals,
                                    const DynamicsOptions& options) {
  if (subintervals < 1) throw std::invalid_argument("subintervals must be positive");
  const Propagator prop(model, schedule, Frame::Dressed, options, decoherence);
  const double total = schedule.duration;
  const double h = total / subintervals;
  static const double node[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double weight[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  std::vector<double> times;
  for (int k = 0; k < subintervals; ++k)
    for (int j = 0; j < 3; ++j) times.push_back(k * h + 0.5 * h * (1.0 + node[j]));
  times.push_back(total);
  const std::vector<Eigen::MatrixXcd> us = prop.unitary_sampled(times);
  const Eigen::MatrixXcd ad = unitary_superoperator(us.back());
  if (!decoherence) return ad;

  Eigen::MatrixXcd e = Eigen::MatrixXcd::Identity(kSuperDim, kSuperDim);
  for (int k = 0; k < subintervals; ++k) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(kSuperDim, kSuperDim);
    for (int j = 0; j < 3; ++j) {
      const int n = 3 * k + j;
      const Eigen::MatrixXcd& u = us[n];
      for (const Eigen::MatrixXcd& l : prop.collapse_operators(times[n]))
        g += (0.5 * h * weight[j]) * dissipator(u.adjoint() * l * u);
    }
    e = g.exp() * e;
  }
  return ad * e;
}

SlotChannels SlotChannels::ideal() {
  SlotChannels c;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (a == 0 && b == 0) continue;
      const Eigen::Matrix4cd u = ideal_unitary(CliffordOp{CliffordOp::Kind::Pulses, {a, b}, Entangler::CZ}, 2);
      c.pulses_[{a, b}] = unitary_superoperator(embed(u));
      c.info_.push_back({"pulse " + std::to_string(a) + std::to_string(b), 0.0, 0.0});
    }
  for (Entangler e : {Entangler::CZ, Entangler::ISwap, Entangler::Swap}) {
    c.entanglers_[e] = unitary_superoperator(embed(fsim_matrix(entangler_target(e))));
    c.info_.push_back({entangler_name(e), 0.0, 0.0});
  }
  return c;
}

SlotChannels SlotChannels::simulate(const TwoModeModel& model, const SingleQubitCalibration& single,
                                    const std::vector<std::array<int, 2>>& pulses,
                                    const std::map<Entangler, GateCalibration>& gates,
                                    const std::optional<DecoherenceParams>& decoherence, int threads,
                                    int subintervals, std::optional<Port> idle) {
  Eigen::Matrix4d weights = Eigen::Matrix4d::Ones();
  if (idle) {
    // computational index 2 * cubic + transmon
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const bool excited = *idle == Port::Cubic ? (i >= 2 || j >= 2) : (i % 2 || j % 2);
        if (excited) weights(i, j) = 0.0;
      }
  }
  struct Job {
    std::string label;
    PulseSchedule schedule;
    Eigen::Matrix4cd ideal;
    std::array<int, 2> pulse{0, 0};
    std::optional<Entangler> gate;
  };
  std::vector<Job> jobs;
  for (const auto& p : pulses) {
    if (p[0] == 0 && p[1] == 0) continue;
    Job j;
    j.label = "pulse " + std::to_string(p[0]) + std::to_string(p[1]);
    j.schedule = single_qubit_slot(single, p[0], p[1]);
    j.ideal = ideal_unitary(CliffordOp{CliffordOp::Kind::Pulses, p, Entangler::CZ}, 2);
    j.pulse = p;
    jobs.push_back(j);
  }
  for (const auto& [e, cal] : gates) {
    Job j;
    j.label = entangler_name(e);
    j.schedule = synthesize_gate(cal);
    j.ideal = fsim_matrix(entangler_target(e));
    j.gate = e;
    jobs.push_back(j);
  }

  std::vector<Eigen::MatrixXcd> out(jobs.size());
  std::vector<SlotInfo> info(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), threads, [&](int k) {
    const Job& j = jobs[k];
    // gauge from the coherent evolution, applied to the noisy channel
    const Propagator prop(model, j.schedule, Frame::Dressed);
    const Eigen::MatrixXcd u = prop.unitary();
    const Eigen::Matrix4cd block = computational_block(u);
    const ZGaugeFit g = fit_z_gauge(block, j.ideal, weights);
    Eigen::MatrixXcd s = slot_superoperator(model, j.schedule, decoherence, subintervals);
    dress(s, z_phases(-g.after[0], -g.after[1]), z_phases(-g.before[0], -g.before[1]));
    out[k] = std::move(s);
    info[k] = {j.label, g.deviation, std::max(0.0, 1.0 - block.squaredNorm() / 4.0)};
  });

  SlotChannels c;
  c.slot_duration_ = single.layout.slot;
  for (size_t k = 0; k < jobs.size(); ++k) {
    if (jobs[k].gate) c.entanglers_[*jobs[k].gate] = std::move(out[k]);
    else c.pulses_[jobs[k].pulse] = std::move(out[k]);
  }
  c.info_ = std::move(info);
  return c;
}

const Eigen::MatrixXcd& SlotChannels::pulses(int cubic_quarter_turns, int transmon_quarter_turns) const {
  const auto it = pulses_.find({cubic_quarter_turns, transmon_quarter_turns});
  if (it == pulses_.end()) throw std::out_of_range("slot channel for this pulse pair was not built");
  return it->second;
}

const Eigen::MatrixXcd& SlotChannels::entangler(Entangler e) const {
  const auto it = entanglers_.find(e);
  if (it == entanglers_.end()) throw std::out_of_range("slot channel for " + entangler_name(e) + " was not built");
  return it->second;
}

std::vector<std::array<int, 2>> required_pulses(const CliffordGroup& group, Port qubit) {
  std::set<std::array<int, 2>> out;
  for (int i = 0; i < group.size(); ++i)
    for (const CliffordOp& op : group.decomposition(i).ops) {
      if (op.kind != CliffordOp::Kind::Pulses) continue;
      if (group.n_qubits() == 2) out.insert(op.quarter_turns);
      else if (qubit == Port::Cubic) out.insert({op.quarter_turns[0], 0});
      else out.insert({0, op.quarter_turns[0]});
    }
  return {out.begin(), out.end()};
}

void RbConfig::validate() const {
  if (lengths.empty()) throw std::invalid_argument("RB needs at least one sequence length");
  for (int n : lengths)
    if (n < 1) throw std::invalid_argument("RB sequence lengths must be >= 1");
  if (randomizations < 2) throw std::invalid_argument("RB needs at least two randomizations");
  if (shots < 0) throw std::invalid_argument("shots must be >= 0");
}

std::vector<int> generate_sequence(const CliffordGroup& group, const RbConfig& config, int length,
                                   int randomization) {
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(length), static_cast<std::uint32_t>(randomization)};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<int> pick(0, group.size() - 1);
  int gate = -1;
  if (config.interleaved) {
    if (group.n_qubits() != 2) throw std::invalid_argument("interleaved RB needs the two-qubit group");
    gate = group.find(fsim_matrix(entangler_target(*config.interleaved)));
  }
  std::vector<int> out;
  int net = CliffordGroup::identity();
  for (int k = 0; k < length - 1; ++k) {
    const int c = pick(rng);
    out.push_back(c);
    net = group.compose(c, net);
    if (gate >= 0) {
      out.push_back(gate);
      net = group.compose(gate, net);
    }
  }
  out.push_back(group.inverse(net));
  return out;
}

double rb_fidelity(double p, int n_qubits) {
  const double d = std::pow(2.0, n_qubits);
  return 1.0 - (1.0 - p) * (d - 1.0) / d;
}

double interleaved_fidelity(double p_reference, double p_interleaved, int n_qubits) {
  return rb_fidelity(p_interleaved / p_reference, n_qubits);
}

RbResult run_rb(const CliffordGroup& group, const SlotChannels& channels, const RbConfig& config) {
  config.validate();
  const int nq = group.n_qubits();
  const Port readout = nq == 1 ? config.qubit : config.readout;

  // virtual Z phase factors on the column-stacked density matrix
  auto phase_vector = [&](int qc, int qt) {
    const Eigen::VectorXcd z = z_phases(0.5 * std::numbers::pi * qc, 0.5 * std::numbers::pi * qt);
    Eigen::VectorXcd v(kSuperDim);
    for (int j = 0; j < kSpaceDim; ++j)
      for (int i = 0; i < kSpaceDim; ++i) v(i + kSpaceDim * j) = z(i) * std::conj(z(j));
    return v;
  };
  std::map<std::array<int, 2>, Eigen::VectorXcd> phases;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) phases[{a, b}] = phase_vector(a, b);
  auto physical = [&](const std::array<int, 2>& q) -> std::array<int, 2> {
    if (nq == 2) return q;
    return config.qubit == Port::Cubic ? std::array<int, 2>{q[0], 0} : std::array<int, 2>{0, q[0]};
  };

  const int n_len = static_cast<int>(config.lengths.size());
  const int n_rand = config.randomizations;
  std::vector<double> values(static_cast<size_t>(n_len) * n_rand);
  parallel_for(n_len * n_rand, config.threads, [&](int job) {
    const int li = job / n_rand, r = job % n_rand;
    const int length = config.lengths[li];
    Eigen::VectorXcd rho = Eigen::VectorXcd::Zero(kSuperDim);
    rho(basis::gg + kSpaceDim * basis::gg) = 1.0;
    Eigen::VectorXcd tmp(kSuperDim);
    for (int c : generate_sequence(group, config, length, r))
      for (const CliffordOp& op : group.decomposition(c).ops) {
        const std::array<int, 2> q = physical(op.quarter_turns);
        switch (op.kind) {
          case CliffordOp::Kind::Phase: rho = rho.cwiseProduct(phases.at({q[0] & 3, q[1] & 3})); break;
          case CliffordOp::Kind::Pulses: tmp.noalias() = channels.pulses(q[0], q[1]) * rho; rho.swap(tmp); break;
          case CliffordOp::Kind::Entangle: tmp.noalias() = channels.entangler(op.entangler) * rho; rho.swap(tmp); break;
        }
      }
    double p = std::clamp(ground_population(rho, readout), 0.0, 1.0);
    if (config.shots > 0) {
      std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                        static_cast<std::uint32_t>(length), static_cast<std::uint32_t>(r), 0x5eedu};
      std::mt19937_64 rng(seq);
      std::binomial_distribution<int> shots(config.shots, p);
      p = static_cast<double>(shots(rng)) / config.shots;
    }
    values[job] = p;
  });

  RbResult res;
  res.n_qubits = nq;
  std::vector<double> n, y, sigma;
  for (int li = 0; li < n_len; ++li) {
    double mean = 0.0;
    for (int r = 0; r < n_rand; ++r) mean += values[li * n_rand + r];
    mean /= n_rand;
    double var = 0.0;
    for (int r = 0; r < n_rand; ++r) var += std::pow(values[li * n_rand + r] - mean, 2);
    var /= (n_rand - 1);
    const double sem = std::sqrt(var / n_rand);
    res.points.push_back({config.lengths[li], mean, sem});
    n.push_back(config.lengths[li]);
    y.push_back(mean);
    sigma.push_back(sem);
  }
  // lengths whose sequences are all identical (sem = 0) get the smallest nonzero sem
  double smallest = 0.0;
  for (double s : sigma)
    if (s > 0.0 && (smallest == 0.0 || s < smallest)) smallest = s;
  for (double& s : sigma)
    if (s <= 0.0) s = smallest > 0.0 ? smallest : 1.0;

  res.trend = mann_kendall(y);
  if (res.trend.z > 0.0 && res.trend.p_value < 0.05)
    throw Error(ErrorKind::FitFailed, "RB mean rises with sequence length");
  res.fit = fit_decay(n, y, sigma);
  // an unresolved decay leaves B unidentified; the depolarized readout qubit sits at 1/2
  if (res.fit.b < 0.25 || res.fit.b > 0.75) res.fit = fit_decay(n, y, sigma, 0.5);
  res.fidelity = rb_fidelity(res.fit.p, nq);
  res.fidelity_stderr = res.fit.p_stderr * (std::pow(2.0, nq) - 1.0) / std::pow(2.0, nq);
  res.mean_slots = group.mean_slots() + (config.interleaved ? 1.0 : 0.0);
  return res;
}

InterleavedResult combine_interleaved(RbResult reference, RbResult interleaved, int n_qubits) {
  InterleavedResult out;
  out.reference = std::move(reference);
  out.interleaved = std::move(interleaved);
  const double pr = out.reference.fit.p, pi = out.interleaved.fit.p;
  out.gate_fidelity = interleaved_fidelity(pr, pi, n_qubits);
  const double d = std::pow(2.0, n_qubits);
  const double ratio_err = (pi / pr) * std::hypot(out.reference.fit.p_stderr / pr, out.interleaved.fit.p_stderr / pi);
  out.gate_fidelity_stderr = ratio_err * (d - 1.0) / d;
  return out;
}

InterleavedResult run_interleaved_rb(const CliffordGroup& group, const SlotChannels& channels, RbConfig config,
                                     Entangler gate) {
  config.interleaved.reset();
  RbResult reference = run_rb(group, channels, config);
  config.interleaved = gate;
  return combine_interleaved(std::move(reference), run_rb(group, channels, config), group.n_qubits());
}

double coherence_limit(const DecoherenceParams& d, double duration_ns, const std::vector<Port>& qubits) {
  double process = 1.0;
  for (Port q : qubits) {
    const double t1 = 1e3 * (q == Port::Cubic ? d.t1_cubic : d.t1_transmon);
    const double t2 = 1e3 * (q == Port::Cubic ? d.t2_star_cubic : d.t2_star_transmon);
    process *= (1.0 + std::exp(-duration_ns / t1) + 2.0 * std::exp(-duration_ns / t2)) / 4.0;
  }
  const double dim = std::pow(2.0, static_cast<double>(qubits.size()));
  return (dim * process + 1.0) / (dim + 1.0);
}

}  // namespace snail
