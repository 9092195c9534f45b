#ifndef QSK_SYMREP_HPP
#define QSK_SYMREP_HPP

// Symbolic representation engine.
//
// A representation of C(SU_q(n)) attached to a word w = s_{i_1}...s_{i_k}
// sends each generator u_{rs} to a path sum
//
//   psi_{t,w}(u_{rs}) = t_{n-r+1} * sum over paths r=j_0 -> j_1 -> ... -> j_k=s
//                        of  pi_{s_{i_1}}(u_{j_0 j_1}) x ... x pi_{s_{i_k}}(u_{j_{k-1} j_k})
//
// where every slot holds a single atom from the five-operator table of the
// elementary representation.  Terms carrying a Zero atom are pruned.  Torus
// content is kept as a monomial in t_1..t_{n-1}; t_n is eliminated through
// t_n = conj(t_1)...conj(t_{n-1}).

#include "qsk/coxeter.hpp"
#include "qsk/fock.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace qsk::symrep {

using fock::AtomKind;
using fock::cplx;
using fock::FactorSpace;
using fock::SparseOp;
using fock::TensorSumOp;

// Monomial in t_1..t_{n-1}; exponent vector, t_n already eliminated.
struct TorusMonomial {
  std::vector<int> e;

  static TorusMonomial one(int n) { return TorusMonomial{std::vector<int>(n - 1, 0)}; }
  // the weight t_{n-r+1} of row r under the diagonal torus character
  static TorusMonomial row_weight(int n, int r);

  TorusMonomial times(const TorusMonomial& o) const;
  TorusMonomial conj() const;
  bool operator==(const TorusMonomial& o) const { return e == o.e; }
  bool operator<(const TorusMonomial& o) const { return e < o.e; }
  bool trivial() const;
  // evaluate at unit scalars t_1..t_{n-1}
  cplx eval(const std::vector<cplx>& t) const;
};

// Exact coefficient q^{q_power} * z; additions require matching q_power
// (mixed powers do not arise in the constructions here).
struct Coeff {
  long q_power = 0;
  cplx z = 1.0;

  Coeff times(const Coeff& o) const { return {q_power + o.q_power, z * o.z}; }
  Coeff conj() const { return {q_power, std::conj(z)}; }
  cplx eval(double q) const { return std::pow(q, static_cast<double>(q_power)) * z; }
  bool zero() const { return std::abs(z) <= 1e-15; }
};

struct PathSum {
  int degree = 0;  // n
  int slots = 0;
  using Key = std::pair<std::vector<AtomKind>, TorusMonomial>;
  std::map<Key, Coeff> terms;

  static PathSum zero(int n, int slots);
  static PathSum scalar_term(int n, const TorusMonomial& m, Coeff c);  // 0 slots

  void add_term(const std::vector<AtomKind>& atoms, const TorusMonomial& m, Coeff c);
  bool is_zero() const { return terms.empty(); }
  PathSum tensor(const PathSum& o) const;  // concatenate slots, multiply weights
  PathSum plus(const PathSum& o) const;
  PathSum scaled(Coeff c) const;
  PathSum adjoint_formula() const;  // slotwise atom adjoints (diagonal atoms fixed)
  bool operator==(const PathSum& o) const;

  // every term's atom tuple determines its coefficient uniquely
  bool atom_tuples_unique() const;
};

enum class TorusMode { Symbolic, Sampled, Plain };

struct RepMatrix {
  int n = 0;
  int m = 0;  // Stiefel parameter (rows n-m+1..n generate the quotient)
  TorusMode mode = TorusMode::Symbolic;
  coxeter::ReducedWord word;
  std::vector<PathSum> entries;  // n*n, row major

  PathSum& at(int r, int s) { return entries[(r - 1) * n + (s - 1)]; }
  const PathSum& at(int r, int s) const { return entries[(r - 1) * n + (s - 1)]; }
  int slots() const { return word.length(); }
};

// The slot atom of the elementary representation pi_{s_i} at entry (r, s).
AtomKind elementary_entry(int i, int r, int s, int n);

// tau_t as a zero-slot representation matrix (diagonal torus monomials).
RepMatrix torus_rep(int n, int m, TorusMode mode);

// (phi * xi)(u_{rs}) = sum_j phi(u_{rj}) x xi(u_{js})
RepMatrix convolve(const RepMatrix& phi, const RepMatrix& xi);

// Fold of convolve over the word letters, prefixed by tau_t unless Plain.
RepMatrix build_rep(const coxeter::ReducedWord& word, int n, int m, TorusMode mode);

// Delete one slot from every term of every entry, multiplying coefficients
// by sigma(atom): sigma is 1 on {One, A, Astar, Shift, ShiftStar} and 0 on
// {B, C, P}.  slot is zero-based.
PathSum sigma_contract(const PathSum& ps, int slot);
RepMatrix sigma_contract(const RepMatrix& rm, int slot);

// The generator images {u_{ij} : n-m+1 <= i <= n, 1 <= j <= n}, row major.
std::vector<PathSum> stiefel_generators(const RepMatrix& rm, int m);

// Materialization.  The shape must contain n_torus leading torus factors
// followed by one factor per slot; torus monomials become shift powers on
// the torus factors (only exponents of t_1..t_{n_torus} may be nonzero).
// With n_torus == 0 a sample vector for t_1..t_{n-1} must be given and
// monomials are evaluated to scalars.
SparseOp materialize(const PathSum& ps, double q, const std::vector<FactorSpace>& shape,
                     int n_torus, const std::vector<cplx>* t_sample = nullptr);

TensorSumOp materialize_lazy(const PathSum& ps, double q, const std::vector<FactorSpace>& shape,
                             int n_torus, const std::vector<cplx>* t_sample = nullptr);

nlohmann::ordered_json pathsum_to_json(const PathSum& ps);

// Shape helpers: n_torus torus factors (cyclic of size M each) + k Fock
// factors of size D.
std::vector<FactorSpace> rep_shape(int n_torus, int M, int slots, int D);

}  // namespace qsk::symrep

#endif
