#include "qsk/symrep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsk::symrep {

TorusMonomial TorusMonomial::row_weight(int n, int r) {
  TorusMonomial m = one(n);
  int j = n - r + 1;
  if (j == n) {
    for (auto& x : m.e) x -= 1;  // t_n = conj(t_1)...conj(t_{n-1})
  } else {
    m.e[j - 1] += 1;
  }
  return m;
}

TorusMonomial TorusMonomial::times(const TorusMonomial& o) const {
  if (e.size() != o.e.size()) throw std::invalid_argument("monomial degree mismatch");
  TorusMonomial r = *this;
  for (std::size_t i = 0; i < e.size(); ++i) r.e[i] += o.e[i];
  return r;
}

TorusMonomial TorusMonomial::conj() const {
  TorusMonomial r = *this;
  for (auto& x : r.e) x = -x;
  return r;
}

bool TorusMonomial::trivial() const {
  return std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
}

cplx TorusMonomial::eval(const std::vector<cplx>& t) const {
  if (t.size() < e.size()) throw std::invalid_argument("t sample too short");
  cplx v = 1.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    int p = e[i];
    cplx b = p >= 0 ? t[i] : std::conj(t[i]);  // unit scalars: inverse = conjugate
    for (int k = 0; k < std::abs(p); ++k) v *= b;
  }
  return v;
}

PathSum PathSum::zero(int n, int slots) {
  PathSum p;
  p.degree = n;
  p.slots = slots;
  return p;
}

PathSum PathSum::scalar_term(int n, const TorusMonomial& m, Coeff c) {
  PathSum p = zero(n, 0);
  p.add_term({}, m, c);
  return p;
}

void PathSum::add_term(const std::vector<AtomKind>& atoms, const TorusMonomial& m, Coeff c) {
  if (static_cast<int>(atoms.size()) != slots) throw std::invalid_argument("slot count mismatch");
  for (AtomKind a : atoms)
    if (a == AtomKind::Zero) return;  // pruned
  if (c.zero()) return;
  Key k{atoms, m};
  auto it = terms.find(k);
  if (it == terms.end()) {
    terms.emplace(std::move(k), c);
  } else {
    if (it->second.q_power != c.q_power)
      throw std::runtime_error("path sum addition with mixed q powers");
    it->second.z += c.z;
    if (it->second.zero()) terms.erase(it);
  }
}

PathSum PathSum::tensor(const PathSum& o) const {
  if (degree != o.degree) throw std::invalid_argument("degree mismatch");
  PathSum r = zero(degree, slots + o.slots);
  for (const auto& [ka, ca] : terms)
    for (const auto& [kb, cb] : o.terms) {
      std::vector<AtomKind> atoms = ka.first;
      atoms.insert(atoms.end(), kb.first.begin(), kb.first.end());
      r.add_term(atoms, ka.second.times(kb.second), ca.times(cb));
    }
  return r;
}

PathSum PathSum::plus(const PathSum& o) const {
  if (degree != o.degree || slots != o.slots) throw std::invalid_argument("shape mismatch");
  PathSum r = *this;
  for (const auto& [k, c] : o.terms) r.add_term(k.first, k.second, c);
  return r;
}

PathSum PathSum::scaled(Coeff c) const {
  PathSum r = zero(degree, slots);
  for (const auto& [k, v] : terms) r.add_term(k.first, k.second, v.times(c));
  return r;
}

static AtomKind atom_adjoint(AtomKind a) {
  switch (a) {
    case AtomKind::A: return AtomKind::Astar;
    case AtomKind::Astar: return AtomKind::A;
    case AtomKind::Shift: return AtomKind::ShiftStar;
    case AtomKind::ShiftStar: return AtomKind::Shift;
    case AtomKind::TorusGen: return AtomKind::TorusGenConj;
    case AtomKind::TorusGenConj: return AtomKind::TorusGen;
    default: return a;  // One, B, C, P are self-adjoint, Zero is Zero
  }
}

PathSum PathSum::adjoint_formula() const {
  PathSum r = zero(degree, slots);
  for (const auto& [k, c] : terms) {
    std::vector<AtomKind> atoms = k.first;
    for (auto& a : atoms) a = atom_adjoint(a);
    r.add_term(atoms, k.second.conj(), c.conj());
  }
  return r;
}

bool PathSum::operator==(const PathSum& o) const {
  if (degree != o.degree || slots != o.slots || terms.size() != o.terms.size()) return false;
  auto it = terms.begin();
  auto jt = o.terms.begin();
  for (; it != terms.end(); ++it, ++jt) {
    if (it->first != jt->first) return false;
    if (it->second.q_power != jt->second.q_power) return false;
    if (std::abs(it->second.z - jt->second.z) > 1e-12) return false;
  }
  return true;
}

bool PathSum::atom_tuples_unique() const {
  std::vector<std::vector<AtomKind>> tuples;
  tuples.reserve(terms.size());
  for (const auto& [k, c] : terms) tuples.push_back(k.first);
  std::sort(tuples.begin(), tuples.end());
  return std::adjacent_find(tuples.begin(), tuples.end()) == tuples.end();
}

AtomKind elementary_entry(int i, int r, int s, int n) {
  if (i < 1 || i > n - 1 || r < 1 || r > n || s < 1 || s > n)
    throw std::out_of_range("elementary_entry index out of range");
  if (r == i && s == i) return AtomKind::A;
  if (r == i && s == i + 1) return AtomKind::B;
  if (r == i + 1 && s == i) return AtomKind::C;
  if (r == i + 1 && s == i + 1) return AtomKind::Astar;
  return r == s ? AtomKind::One : AtomKind::Zero;
}

RepMatrix torus_rep(int n, int m, TorusMode mode) {
  RepMatrix rm;
  rm.n = n;
  rm.m = m;
  rm.mode = mode;
  rm.word.n = n;
  rm.entries.assign(static_cast<std::size_t>(n) * n, PathSum::zero(n, 0));
  for (int r = 1; r <= n; ++r) {
    TorusMonomial w =
        mode == TorusMode::Plain ? TorusMonomial::one(n) : TorusMonomial::row_weight(n, r);
    rm.at(r, r) = PathSum::scalar_term(n, w, Coeff{});
  }
  return rm;
}

static RepMatrix elementary_rep(int i, int n, int m, TorusMode mode) {
  RepMatrix rm;
  rm.n = n;
  rm.m = m;
  rm.mode = mode;
  rm.word.n = n;
  rm.word.letters = {i};
  rm.entries.assign(static_cast<std::size_t>(n) * n, PathSum::zero(n, 1));
  for (int r = 1; r <= n; ++r)
    for (int s = 1; s <= n; ++s) {
      AtomKind a = elementary_entry(i, r, s, n);
      if (a != AtomKind::Zero) rm.at(r, s).add_term({a}, TorusMonomial::one(n), Coeff{});
    }
  return rm;
}

RepMatrix convolve(const RepMatrix& phi, const RepMatrix& xi) {
  if (phi.n != xi.n) throw std::invalid_argument("degree mismatch");
  int n = phi.n;
  RepMatrix rm;
  rm.n = n;
  rm.m = phi.m;
  rm.mode = phi.mode;
  rm.word.n = n;
  rm.word.letters = phi.word.letters;
  rm.word.letters.insert(rm.word.letters.end(), xi.word.letters.begin(), xi.word.letters.end());
  int slots = phi.slots() + xi.slots();
  rm.entries.assign(static_cast<std::size_t>(n) * n, PathSum::zero(n, slots));
  for (int r = 1; r <= n; ++r)
    for (int s = 1; s <= n; ++s) {
      PathSum acc = PathSum::zero(n, slots);
      for (int j = 1; j <= n; ++j) {
        if (phi.at(r, j).is_zero() || xi.at(j, s).is_zero()) continue;
        acc = acc.plus(phi.at(r, j).tensor(xi.at(j, s)));
      }
      rm.at(r, s) = acc;
    }
  return rm;
}

RepMatrix build_rep(const coxeter::ReducedWord& word, int n, int m, TorusMode mode) {
  RepMatrix rm = torus_rep(n, m, mode);
  for (int letter : word.letters) {
    if (letter < 1 || letter >= n) throw std::out_of_range("word letter out of range");
    rm = convolve(rm, elementary_rep(letter, n, m, mode));
  }
  return rm;
}

static bool sigma_value(AtomKind a) {
  switch (a) {
    case AtomKind::One:
    case AtomKind::A:
    case AtomKind::Astar:
    case AtomKind::Shift:
    case AtomKind::ShiftStar:
      return true;  // sigma = 1
    case AtomKind::B:
    case AtomKind::C:
    case AtomKind::P:
      return false;  // sigma = 0
    default:
      throw std::invalid_argument("sigma undefined for torus atoms");
  }
}

PathSum sigma_contract(const PathSum& ps, int slot) {
  if (slot < 0 || slot >= ps.slots) throw std::out_of_range("slot out of range");
  PathSum r = PathSum::zero(ps.degree, ps.slots - 1);
  for (const auto& [k, c] : ps.terms) {
    if (!sigma_value(k.first[slot])) continue;
    std::vector<AtomKind> atoms = k.first;
    atoms.erase(atoms.begin() + slot);
    r.add_term(atoms, k.second, c);
  }
  return r;
}

RepMatrix sigma_contract(const RepMatrix& rm, int slot) {
  RepMatrix out = rm;
  if (slot < 0 || slot >= rm.slots()) throw std::out_of_range("slot out of range");
  out.word.letters.erase(out.word.letters.begin() + slot);
  for (auto& e : out.entries) e = sigma_contract(e, slot);
  return out;
}

std::vector<PathSum> stiefel_generators(const RepMatrix& rm, int m) {
  if (m < 1 || m > rm.n - 1) throw std::invalid_argument("m out of range");
  std::vector<PathSum> out;
  for (int r = rm.n - m + 1; r <= rm.n; ++r)
    for (int s = 1; s <= rm.n; ++s) out.push_back(rm.at(r, s));
  return out;
}

TensorSumOp materialize_lazy(const PathSum& ps, double q, const std::vector<FactorSpace>& shape,
                             int n_torus, const std::vector<cplx>* t_sample) {
  if (static_cast<int>(shape.size()) != n_torus + ps.slots)
    throw std::invalid_argument("shape length does not match slot count");
  TensorSumOp op;
  op.shape = shape;
  for (const auto& [k, c] : ps.terms) {
    TensorSumOp::Term term;
    term.coeff = c.eval(q);
    const TorusMonomial& mono = k.second;
    if (n_torus == 0) {
      if (!mono.trivial()) {
        if (!t_sample) throw std::invalid_argument("t sample required for sampled mode");
        term.coeff *= mono.eval(*t_sample);
      }
    } else {
      for (std::size_t j = 0; j < mono.e.size(); ++j)
        if (static_cast<int>(j) >= n_torus && mono.e[j] != 0)
          throw std::invalid_argument("monomial uses a torus generator outside the embedding");
      for (int j = 0; j < n_torus; ++j)
        term.mats.push_back(fock::torus_power(shape[j], mono.e[j]));
    }
    for (int s = 0; s < ps.slots; ++s)
      term.mats.push_back(fock::factor_matrix(k.first[s], q, shape[n_torus + s]));
    op.terms.push_back(std::move(term));
  }
  return op;
}

SparseOp materialize(const PathSum& ps, double q, const std::vector<FactorSpace>& shape,
                     int n_torus, const std::vector<cplx>* t_sample) {
  return materialize_lazy(ps, q, shape, n_torus, t_sample).materialize();
}

nlohmann::ordered_json pathsum_to_json(const PathSum& ps) {
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const auto& [k, c] : ps.terms) {
    nlohmann::ordered_json atoms = nlohmann::ordered_json::array();
    for (AtomKind a : k.first) atoms.push_back(fock::atom_name(a));
    int sign = c.z.real() < 0 ? -1 : 1;
    cplx scalar = c.z / static_cast<double>(sign);
    terms.push_back({{"atoms", atoms},
                     {"t_exponents", k.second.e},
                     {"coeff",
                      {{"q_power", c.q_power},
                       {"sign", sign},
                       {"scalar", {scalar.real(), scalar.imag()}}}}});
  }
  return terms;
}

std::vector<FactorSpace> rep_shape(int n_torus, int M, int slots, int D) {
  std::vector<FactorSpace> shape;
  for (int i = 0; i < n_torus; ++i) shape.push_back(FactorSpace::zcyclic(M));
  for (int i = 0; i < slots; ++i) shape.push_back(FactorSpace::fock(D));
  return shape;
}

}  // namespace qsk::symrep
