#include "snail/clifford.hpp"

#include <cmath>
#include <complex>
#include <deque>
#include <numbers>
#include <stdexcept>
#include <unsupported/Eigen/KroneckerProduct>

namespace snail {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix2cd rz(int quarter) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = std::polar(1.0, 0.5 * kPi * quarter);
  return m;
}

Eigen::Matrix2cd rx(int quarter) {
  const double h = 0.25 * kPi * quarter;
  Eigen::Matrix2cd m;
  m << std::cos(h), cd(0, -std::sin(h)), cd(0, -std::sin(h)), std::cos(h);
  return m;
}

struct OneQubitForm {
  int pre = 0, angle = 0, post = 0;
};

void push_layer(std::vector<CliffordOp>& ops, const OneQubitForm& a, const OneQubitForm& b) {
  if (a.pre || b.pre) ops.push_back({CliffordOp::Kind::Phase, {a.pre, b.pre}, Entangler::CZ});
  if (a.angle || b.angle) ops.push_back({CliffordOp::Kind::Pulses, {a.angle, b.angle}, Entangler::CZ});
  if (a.post || b.post) ops.push_back({CliffordOp::Kind::Phase, {a.post, b.post}, Entangler::CZ});
}

// Rz(post) X(angle) Rz(pre), fewest pulses first.
std::vector<OneQubitForm> one_qubit_forms() {
  std::vector<OneQubitForm> forms;
  std::unordered_map<std::string, int> seen;
  for (int angle = 0; angle < 3; ++angle)
    for (int post = 0; post < 4; ++post)
      for (int pre = 0; pre < 4; ++pre) {
        const Eigen::MatrixXcd m = rz(post) * rx(angle) * rz(pre);
        if (seen.emplace(clifford_key(m), static_cast<int>(forms.size())).second) forms.push_back({pre, angle, post});
      }
  return forms;
}

}  // namespace

FsimTarget entangler_target(Entangler e) {
  switch (e) {
    case Entangler::CZ: return FsimTarget::cz();
    case Entangler::ISwap: return FsimTarget::iswap();
    case Entangler::Swap: return FsimTarget::swap();
  }
  return FsimTarget::identity();
}

std::string entangler_name(Entangler e) {
  switch (e) {
    case Entangler::CZ: return "cz";
    case Entangler::ISwap: return "iswap";
    case Entangler::Swap: return "swap";
  }
  return "?";
}

std::string clifford_key(const Eigen::MatrixXcd& u) {
  cd ref = 1.0;
  for (Eigen::Index k = 0; k < u.size(); ++k)
    if (std::abs(u.data()[k]) > 0.1) {
      ref = std::conj(u.data()[k]) / std::abs(u.data()[k]);
      break;
    }
  std::string key;
  key.reserve(4 * u.size());
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const cd z = u.data()[k] * ref;
    for (double part : {z.real(), z.imag()}) {
      const auto q = static_cast<int16_t>(std::lround(part * 1000.0));
      key.push_back(static_cast<char>(q & 0xff));
      key.push_back(static_cast<char>((q >> 8) & 0xff));
    }
  }
  return key;
}

Eigen::MatrixXcd ideal_unitary(const CliffordOp& op, int n_qubits) {
  if (op.kind == CliffordOp::Kind::Entangle) {
    if (n_qubits != 2) throw std::invalid_argument("entangler needs two qubits");
    return fsim_matrix(entangler_target(op.entangler));
  }
  auto single = [&](int q) { return op.kind == CliffordOp::Kind::Phase ? rz(q) : rx(q); };
  if (n_qubits == 1) return single(op.quarter_turns[0]);
  return Eigen::kroneckerProduct(single(op.quarter_turns[0]), single(op.quarter_turns[1])).eval();
}

Eigen::MatrixXcd ideal_unitary(const Decomposition& d, int n_qubits) {
  const int dim = 1 << n_qubits;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const CliffordOp& op : d.ops) u = ideal_unitary(op, n_qubits) * u;
  return u;
}

CliffordGroup::CliffordGroup(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits != 1 && n_qubits != 2) throw std::invalid_argument("Clifford group needs 1 or 2 qubits");
  const int dim = 1 << n_qubits;

  // closure over H, S (per qubit) and CZ
  Eigen::Matrix2cd h;
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  const Eigen::Matrix2cd s = rz(1);
  const Eigen::Matrix2cd id2 = Eigen::Matrix2cd::Identity();
  std::vector<Eigen::MatrixXcd> generators;
  if (n_qubits == 1) {
    generators = {h, s};
  } else {
    generators = {Eigen::kroneckerProduct(h, id2).eval(), Eigen::kroneckerProduct(id2, h).eval(),
                  Eigen::kroneckerProduct(s, id2).eval(), Eigen::kroneckerProduct(id2, s).eval(),
                  fsim_matrix(FsimTarget::cz())};
  }
  add(Eigen::MatrixXcd::Identity(dim, dim));
  for (size_t next = 0; next < matrices_.size(); ++next)
    for (const auto& g : generators) {
      const Eigen::MatrixXcd m = g * matrices_[next];
      if (find(m) < 0) add(m);
    }

  // decompositions with the fewest physical slots
  decompositions_.assign(matrices_.size(), Decomposition{{}, -1});
  auto offer = [&](const Eigen::MatrixXcd& m, std::vector<CliffordOp>&& ops, int slots) {
    const int i = find(m);
    if (i < 0) throw std::logic_error("decomposition left the Clifford group");
    Decomposition& d = decompositions_[i];
    if (d.slots < 0 || slots < d.slots) d = Decomposition{std::move(ops), slots};
  };
  const std::vector<OneQubitForm> forms = one_qubit_forms();
  if (forms.size() != 24) throw std::logic_error("single-qubit Clifford enumeration is incomplete");
  if (n_qubits == 1) {
    for (const auto& f : forms) {
      std::vector<CliffordOp> ops;
      push_layer(ops, f, OneQubitForm{});
      for (auto& op : ops) op.quarter_turns[1] = 0;
      offer(rz(f.post) * rx(f.angle) * rz(f.pre), std::move(ops), f.angle ? 1 : 0);
    }
  } else {
    std::vector<Eigen::Matrix4cd> layers;
    std::vector<std::pair<int, int>> layer_forms;
    for (int a = 0; a < 24; ++a)
      for (int b = 0; b < 24; ++b) {
        const auto& fa = forms[a];
        const auto& fb = forms[b];
        layers.push_back(Eigen::kroneckerProduct(Eigen::Matrix2cd(rz(fa.post) * rx(fa.angle) * rz(fa.pre)),
                                                 Eigen::Matrix2cd(rz(fb.post) * rx(fb.angle) * rz(fb.pre))));
        layer_forms.emplace_back(a, b);
      }
    auto pulses = [&](size_t k) { return forms[layer_forms[k].first].angle || forms[layer_forms[k].second].angle ? 1 : 0; };
    for (size_t k = 0; k < layers.size(); ++k) {
      std::vector<CliffordOp> ops;
      push_layer(ops, forms[layer_forms[k].first], forms[layer_forms[k].second]);
      offer(layers[k], std::move(ops), pulses(k));
    }
    for (Entangler e : {Entangler::CZ, Entangler::ISwap, Entangler::Swap}) {
      const Eigen::Matrix4cd g = fsim_matrix(entangler_target(e));
      for (size_t r = 0; r < layers.size(); ++r) {
        const Eigen::Matrix4cd gr = g * layers[r];
        for (size_t l = 0; l < layers.size(); ++l) {
          const int slots = pulses(r) + 1 + pulses(l);
          const Eigen::MatrixXcd m = layers[l] * gr;
          const int i = find(m);
          if (i < 0) throw std::logic_error("decomposition left the Clifford group");
          if (decompositions_[i].slots >= 0 && decompositions_[i].slots <= slots) continue;
          std::vector<CliffordOp> ops;
          push_layer(ops, forms[layer_forms[r].first], forms[layer_forms[r].second]);
          ops.push_back({CliffordOp::Kind::Entangle, {0, 0}, e});
          push_layer(ops, forms[layer_forms[l].first], forms[layer_forms[l].second]);
          decompositions_[i] = Decomposition{std::move(ops), slots};
        }
      }
    }
  }
  for (const auto& d : decompositions_)
    if (d.slots < 0) throw std::logic_error("Clifford element without decomposition");

  inverses_.resize(matrices_.size());
  for (size_t i = 0; i < matrices_.size(); ++i) {
    inverses_[i] = find(matrices_[i].adjoint());
    if (inverses_[i] < 0) throw std::logic_error("Clifford inverse not found");
  }
}

int CliffordGroup::add(const Eigen::MatrixXcd& u) {
  const int i = static_cast<int>(matrices_.size());
  index_.emplace(clifford_key(u), i);
  matrices_.push_back(u);
  return i;
}

int CliffordGroup::find(const Eigen::MatrixXcd& u) const {
  const auto it = index_.find(clifford_key(u));
  return it == index_.end() ? -1 : it->second;
}

int CliffordGroup::compose(int later, int earlier) const {
  const int i = find(matrices_.at(later) * matrices_.at(earlier));
  if (i < 0) throw std::logic_error("Clifford product not in group");
  return i;
}

double CliffordGroup::mean_slots() const {
  double s = 0.0;
  for (const auto& d : decompositions_) s += d.slots;
  return s / static_cast<double>(decompositions_.size());
}

}  // namespace snail
