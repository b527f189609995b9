#include "snail/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "snail/labeling.hpp"
#include "snail/units.hpp"

namespace snail {

namespace {

Eigen::MatrixXcd lowering(int levels) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
  Eigen::MatrixXcd out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

Eigen::VectorXd transmon_numbers() {
  Eigen::VectorXd n(kSpaceDim);
  for (int k = 0; k < kSpaceDim; ++k) n(k) = transmon_number(k);
  return n;
}

}  // namespace

TwoModeModel::TwoModeModel(const EffectiveParams& p) : params(p) {
  energies.resize(kSpaceDim);
  for (int i = 0; i < kModeLevels; ++i)
    for (int j = 0; j < kModeLevels; ++j)
      energies(fock_index(i, j)) = i * p.omega_c + 0.5 * p.alpha_c * i * (i - 1) + j * p.omega_t +
                                   0.5 * p.alpha_t * j * (j - 1) + p.j_zz * i * j;
  const Eigen::MatrixXcd low = lowering(kModeLevels);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(kModeLevels, kModeLevels);
  a = kron(low, id);
  b = kron(id, low);
  sideband = Eigen::MatrixXcd::Zero(kSpaceDim, kSpaceDim);
  for (int i = 0; i + 1 < kModeLevels; ++i)
    for (int j = 1; j < kModeLevels; ++j) {
      // <i+1, j-1| P |i, j>; the j >= 2 rungs carry the CZ-transition strength
      const double rung = j == 1 ? p.eta : p.eta_cz / std::sqrt(2.0);
      sideband(fock_index(i + 1, j - 1), fock_index(i, j)) = rung * std::sqrt((i + 1.0) * j);
    }
}

double DressedFrame::cubic_frequency() const { return energies(basis::eg) - energies(basis::gg); }

double DressedFrame::transmon_frequency() const {
  return energies(basis::ge) - energies(basis::gg) + cw_frequency;
}

double DressedFrame::conditional_transmon_frequency(int cubic_level) const {
  return energies(fock_index(cubic_level, 1)) - energies(fock_index(cubic_level, 0)) + cw_frequency;
}

double DressedFrame::residual_zz() const {
  return energies(basis::ee) - energies(basis::eg) - energies(basis::ge) + energies(basis::gg);
}

double DressedFrame::sideband_resonance(int from, int to) const {
  return cw_frequency + energies(from) - energies(to);
}

DressedFrame make_dressed_frame(const TwoModeModel& m, double cw_frequency, double cw_amplitude) {
  DressedFrame f;
  f.cw_frequency = cw_frequency;
  f.cw_amplitude = cw_amplitude;
  const Eigen::VectorXd diag = m.energies - cw_frequency * transmon_numbers();
  if (cw_amplitude == 0.0) {
    f.vectors = Eigen::MatrixXcd::Identity(kSpaceDim, kSpaceDim);
    f.energies = diag;
    return f;
  }
  Eigen::MatrixXcd h = diag.cast<cd>().asDiagonal();
  h += cw_amplitude * (m.sideband + m.sideband.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const std::vector<int> label = greedy_labels(es.eigenvectors(), 0.5);
  f.vectors.resize(kSpaceDim, kSpaceDim);
  f.energies.resize(kSpaceDim);
  for (int k = 0; k < kSpaceDim; ++k) {
    Eigen::VectorXcd v = es.eigenvectors().col(label[k]);
    const cd pivot = v(k);
    v *= std::abs(pivot) / pivot;
    f.vectors.col(k) = v;
    f.energies(k) = es.eigenvalues()(label[k]);
  }
  return f;
}

ChannelChoice select_channels(const TwoModeModel& m, double frequency, double cutoff) {
  ChannelChoice c;
  for (int i = 0; i + 1 < kModeLevels; ++i)
    for (int j = 0; j < kModeLevels; ++j) {
      const double direct = m.energies(fock_index(i + 1, j)) - m.energies(fock_index(i, j));
      if (std::abs(frequency - direct) < cutoff) c.direct = true;
      if (j >= 1) {
        const double sb = m.energies(fock_index(i, j)) - m.energies(fock_index(i + 1, j - 1));
        if (std::abs(frequency - sb) < cutoff) c.sideband = true;
      }
    }
  return c;
}

Propagator::Propagator(const TwoModeModel& model, const PulseSchedule& schedule, Frame frame,
                       const DynamicsOptions& options, std::optional<DecoherenceParams> decoherence)
    : model_(model), schedule_(schedule), frame_(frame), options_(options), decoherence_(decoherence) {
  duration_ = schedule.end();
  const double cw_f = schedule.cw ? schedule.cw->frequency : 0.0;
  const double cw_a = schedule.cw ? schedule.cw->amplitude : 0.0;
  if (schedule.cw) duration_ = std::max(duration_, schedule.cw->ramp_duration());

  if (frame == Frame::Dressed) {
    if (schedule.cw && schedule.cw->ramp > 0.0)
      throw std::invalid_argument("the dressed frame needs a CW tone without ramp");
    dressed_ = make_dressed_frame(model, cw_f, cw_a);
    frame_energies_ = dressed_.energies;
  } else {
    dressed_ = make_dressed_frame(model, cw_f, 0.0);
    frame_energies_ = model.energies;
  }
  if (frame == Frame::Lab) static_diagonal_ = model.energies;

  const Eigen::MatrixXcd adag = model.a.adjoint();
  const Eigen::MatrixXcd bdag = model.b.adjoint();
  for (int k = 0; k < static_cast<int>(schedule.tones.size()); ++k) {
    const DriveTone& tone = schedule.tones[k];
    terms_.push_back({Term::Tone, k});
    const int term = static_cast<int>(terms_.size()) - 1;
    if (tone.target == Port::Transmon) {
      add_channel(term, bdag, +1, +1, tone.frequency, tone.phase);
      continue;
    }
    ChannelChoice use;
    switch (tone.channel) {
      case Channel::Direct: use.direct = true; break;
      case Channel::Sideband: use.sideband = true; break;
      case Channel::Auto: use = select_channels(model, tone.frequency, options.rwa_cutoff); break;
    }
    if (use.direct) add_channel(term, adag, +1, 0, tone.frequency, tone.phase);
    if (use.sideband) add_channel(term, model.sideband, -1, -1, tone.frequency, tone.phase);
  }
  if (schedule.cw && frame != Frame::Dressed && cw_a != 0.0) {
    terms_.push_back({Term::Cw, -1});
    add_channel(static_cast<int>(terms_.size()) - 1, model.sideband, -1, -1, cw_f, 0.0);
  }

  if (decoherence) {
    decoherence->validate();
    const double g1c = units::rate_per_ns(decoherence->t1_cubic);
    const double gpc = units::rate_per_ns(decoherence->t_phi_cubic());
    const double g1t = units::rate_per_ns(decoherence->t1_transmon);
    const double gpt = units::rate_per_ns(decoherence->t_phi_transmon());
    const std::vector<Eigen::MatrixXcd> ops = {
        std::sqrt(g1c) * model.a, std::sqrt(2.0 * gpc) * (adag * model.a), std::sqrt(g1t) * model.b,
        std::sqrt(2.0 * gpt) * (bdag * model.b)};
    for (const auto& op : ops) {
      const Eigen::MatrixXcd x = frame == Frame::Dressed ? Eigen::MatrixXcd(dressed_.vectors.adjoint() * op * dressed_.vectors) : op;
      std::vector<Element> list;
      for (int m = 0; m < kSpaceDim; ++m)
        for (int n = 0; n < kSpaceDim; ++n) {
          if (std::abs(x(m, n)) < 1e-14) continue;
          const double rate = frame == Frame::Lab ? 0.0 : frame_energies_(m) - frame_energies_(n);
          list.push_back({m, n, x(m, n), rate, -1});
        }
      collapse_.push_back(std::move(list));
    }
  }
}

void Propagator::add_channel(int term, const Eigen::MatrixXcd& raise, int s, int q, double frequency, double phase) {
  if (frame_ == Frame::Lab) {
    const Eigen::MatrixXcd y = raise + raise.adjoint();
    const cd up = std::polar(1.0, phase), down = std::polar(1.0, -phase);
    for (int m = 0; m < kSpaceDim; ++m)
      for (int n = 0; n < kSpaceDim; ++n) {
        if (std::abs(y(m, n)) < 1e-14) continue;
        elements_.push_back({m, n, y(m, n) * up, frequency, term});
        elements_.push_back({m, n, y(m, n) * down, -frequency, term});
      }
    return;
  }
  Eigen::MatrixXcd x = raise;
  double shift = 0.0;
  if (frame_ == Frame::Dressed) {
    x = dressed_.vectors.adjoint() * raise * dressed_.vectors;
    shift = q * dressed_.cw_frequency;
  }
  const Eigen::MatrixXcd xd = x.adjoint();
  const cd fwd = std::polar(1.0, -s * phase), back = std::polar(1.0, s * phase);
  for (int m = 0; m < kSpaceDim; ++m)
    for (int n = 0; n < kSpaceDim; ++n) {
      const double gap = frame_energies_(m) - frame_energies_(n);
      if (std::abs(x(m, n)) > 1e-14) {
        const double rate = gap - s * frequency + shift;
        if (std::abs(rate) < options_.rwa_cutoff) elements_.push_back({m, n, x(m, n) * fwd, rate, term});
      }
      if (std::abs(xd(m, n)) > 1e-14) {
        const double rate = gap + s * frequency - shift;
        if (std::abs(rate) < options_.rwa_cutoff) elements_.push_back({m, n, xd(m, n) * back, rate, term});
      }
    }
}

double Propagator::term_amplitude(int term, double t) const {
  const Term& tm = terms_[term];
  if (tm.kind == Term::Cw) return schedule_.cw->amplitude_at(t);
  return schedule_.tones[tm.tone].amplitude_at(t);
}

void Propagator::hamiltonian(double t, Eigen::MatrixXcd& h) const {
  h.setZero(kSpaceDim, kSpaceDim);
  if (frame_ == Frame::Lab) h.diagonal() = static_diagonal_.cast<cd>();
  std::vector<double> amp(terms_.size());
  for (size_t k = 0; k < terms_.size(); ++k) amp[k] = term_amplitude(static_cast<int>(k), t);
  for (const Element& e : elements_) {
    const double s = amp[e.term];
    if (s == 0.0) continue;
    h(e.m, e.n) += s * e.coeff * std::polar(1.0, units::phase(e.rate, t));
  }
}

std::vector<Eigen::MatrixXcd> Propagator::collapse_operators(double t) const {
  std::vector<Eigen::MatrixXcd> out;
  for (const auto& list : collapse_) {
    Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(kSpaceDim, kSpaceDim);
    for (const Element& e : list) l(e.m, e.n) += e.coeff * std::polar(1.0, units::phase(e.rate, t));
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<double> Propagator::breakpoints(double t0, double t1) const {
  std::set<double> pts;
  auto add = [&](double x) {
    if (x > t0 && x < t1) pts.insert(x);
  };
  for (const auto& tone : schedule_.tones) {
    add(tone.start);
    add(tone.end());
  }
  if (schedule_.cw) add(schedule_.cw->ramp_duration());
  pts.insert(t1);
  return {pts.begin(), pts.end()};
}

std::vector<int> Propagator::reachable(const std::vector<int>& seeds) const {
  std::vector<std::vector<int>> adj(kSpaceDim);
  for (const Element& e : elements_)
    if (e.m != e.n) {
      adj[e.m].push_back(e.n);
      adj[e.n].push_back(e.m);
    }
  std::vector<char> seen(kSpaceDim, 0);
  std::vector<int> stack = seeds;
  for (int s : seeds) seen[s] = 1;
  while (!stack.empty()) {
    const int k = stack.back();
    stack.pop_back();
    for (int n : adj[k])
      if (!seen[n]) {
        seen[n] = 1;
        stack.push_back(n);
      }
  }
  std::vector<int> out;
  for (int k = 0; k < kSpaceDim; ++k)
    if (seen[k]) out.push_back(k);
  return out;
}

std::vector<Eigen::MatrixXcd> Propagator::evolve_sampled(const Eigen::MatrixXcd& psi, double t0,
                                                         const std::vector<double>& times) const {
  if (psi.rows() != kSpaceDim) throw std::invalid_argument("state dimension must be 16");
  std::vector<int> seeds;
  for (int k = 0; k < kSpaceDim; ++k)
    if (psi.row(k).norm() > 0.0) seeds.push_back(k);
  const std::vector<int> sub = reachable(seeds);
  const int d = static_cast<int>(sub.size());
  std::vector<int> local(kSpaceDim, -1);
  for (int i = 0; i < d; ++i) local[sub[i]] = i;

  std::vector<Element> elems;
  for (const Element& e : elements_)
    if (local[e.m] >= 0 && local[e.n] >= 0) elems.push_back({local[e.m], local[e.n], e.coeff, e.rate, e.term});
  Eigen::VectorXd diag(d);
  for (int i = 0; i < d; ++i) diag(i) = frame_ == Frame::Lab ? static_diagonal_(sub[i]) : 0.0;

  Eigen::MatrixXcd y(d, psi.cols());
  for (int i = 0; i < d; ++i) y.row(i) = psi.row(sub[i]);

  std::vector<double> amp(terms_.size());
  Eigen::MatrixXcd h(d, d);
  auto rhs = [&](double t, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& dx) {
    h.setZero();
    if (frame_ == Frame::Lab) h.diagonal() = diag.cast<cd>();
    for (size_t k = 0; k < terms_.size(); ++k) amp[k] = term_amplitude(static_cast<int>(k), t);
    for (const Element& e : elems) {
      const double s = amp[e.term];
      if (s != 0.0) h(e.m, e.n) += s * e.coeff * std::polar(1.0, units::phase(e.rate, t));
    }
    dx.noalias() = cd(0.0, -units::two_pi) * (h * x);
  };

  OdeOptions opt;
  opt.rtol = options_.rtol_unitary;
  opt.atol = options_.atol;
  opt.max_step = options_.max_step;
  Dopri5<Eigen::MatrixXcd> ode(opt);

  std::vector<Eigen::MatrixXcd> out;
  double t = t0;
  for (double target : times) {
    if (target < t) throw std::invalid_argument("sample times must be ascending and >= t0");
    for (double bp : breakpoints(t, target)) {
      ode.integrate(y, t, bp, rhs);
      ode.reset();
    }
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(kSpaceDim, psi.cols());
    for (int i = 0; i < d; ++i) full.row(sub[i]) = y.row(i);
    out.push_back(std::move(full));
  }
  last_steps_ = ode.stats().accepted;
  return out;
}

Eigen::MatrixXcd Propagator::evolve(const Eigen::MatrixXcd& psi, double t0, double t1) const {
  return evolve_sampled(psi, t0, {t1}).front();
}

std::vector<Eigen::MatrixXcd> Propagator::evolve_density_sampled(const Eigen::MatrixXcd& rho, double t0,
                                                                 const std::vector<double>& times) const {
  if (rho.rows() != kSpaceDim || rho.cols() != kSpaceDim) throw std::invalid_argument("density matrix must be 16x16");
  std::vector<double> amp(terms_.size());
  Eigen::MatrixXcd h(kSpaceDim, kSpaceDim), l(kSpaceDim, kSpaceDim), lr(kSpaceDim, kSpaceDim);
  auto rhs = [&](double t, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& dx) {
    h.setZero();
    if (frame_ == Frame::Lab) h.diagonal() = static_diagonal_.cast<cd>();
    for (size_t k = 0; k < terms_.size(); ++k) amp[k] = term_amplitude(static_cast<int>(k), t);
    for (const Element& e : elements_) {
      const double s = amp[e.term];
      if (s != 0.0) h(e.m, e.n) += s * e.coeff * std::polar(1.0, units::phase(e.rate, t));
    }
    lr.noalias() = h * x;
    dx = cd(0.0, -units::two_pi) * (lr - lr.adjoint());  // h and x Hermitian
    for (const auto& list : collapse_) {
      l.setZero();
      for (const Element& e : list) l(e.m, e.n) += e.coeff * std::polar(1.0, units::phase(e.rate, t));
      lr.noalias() = l * x;
      dx.noalias() += lr * l.adjoint();
      h.noalias() = l.adjoint() * lr;  // L^dag L rho, reuse buffer
      dx -= 0.5 * (h + h.adjoint());
    }
  };
  OdeOptions opt;
  opt.rtol = options_.rtol_lindblad;
  opt.atol = options_.atol;
  opt.max_step = options_.max_step;
  Dopri5<Eigen::MatrixXcd> ode(opt);
  Eigen::MatrixXcd y = rho;
  std::vector<Eigen::MatrixXcd> out;
  double t = t0;
  for (double target : times) {
    if (target < t) throw std::invalid_argument("sample times must be ascending and >= t0");
    for (double bp : breakpoints(t, target)) {
      ode.integrate(y, t, bp, rhs);
      ode.reset();
    }
    out.push_back(y);
  }
  last_steps_ = ode.stats().accepted;
  return out;
}

Eigen::MatrixXcd Propagator::evolve_density(const Eigen::MatrixXcd& rho, double t0, double t1) const {
  return evolve_density_sampled(rho, t0, {t1}).front();
}

Eigen::MatrixXcd Propagator::unitary() const {
  return evolve(Eigen::MatrixXcd::Identity(kSpaceDim, kSpaceDim), 0.0, duration_);
}

std::vector<Eigen::MatrixXcd> Propagator::unitary_sampled(const std::vector<double>& times) const {
  return evolve_sampled(Eigen::MatrixXcd::Identity(kSpaceDim, kSpaceDim), 0.0, times);
}

Eigen::VectorXcd Propagator::to_bare(const Eigen::VectorXcd& psi, double t) const {
  switch (frame_) {
    case Frame::Lab: return psi;
    case Frame::Rotating: {
      Eigen::VectorXcd out(kSpaceDim);
      for (int k = 0; k < kSpaceDim; ++k) out(k) = std::polar(1.0, -units::phase(frame_energies_(k), t)) * psi(k);
      return out;
    }
    case Frame::Dressed: {
      Eigen::VectorXcd rot(kSpaceDim);
      for (int k = 0; k < kSpaceDim; ++k) rot(k) = std::polar(1.0, -units::phase(frame_energies_(k), t)) * psi(k);
      Eigen::VectorXcd out = dressed_.vectors * rot;
      for (int k = 0; k < kSpaceDim; ++k)
        out(k) *= std::polar(1.0, -units::phase(dressed_.cw_frequency * transmon_number(k), t));
      return out;
    }
  }
  return psi;
}

Eigen::VectorXcd Propagator::from_bare(const Eigen::VectorXcd& psi, double t) const {
  switch (frame_) {
    case Frame::Lab: return psi;
    case Frame::Rotating: {
      Eigen::VectorXcd out(kSpaceDim);
      for (int k = 0; k < kSpaceDim; ++k) out(k) = std::polar(1.0, units::phase(frame_energies_(k), t)) * psi(k);
      return out;
    }
    case Frame::Dressed: {
      Eigen::VectorXcd r = psi;
      for (int k = 0; k < kSpaceDim; ++k)
        r(k) *= std::polar(1.0, units::phase(dressed_.cw_frequency * transmon_number(k), t));
      Eigen::VectorXcd out = dressed_.vectors.adjoint() * r;
      for (int k = 0; k < kSpaceDim; ++k) out(k) *= std::polar(1.0, units::phase(frame_energies_(k), t));
      return out;
    }
  }
  return psi;
}

}  // namespace snail
