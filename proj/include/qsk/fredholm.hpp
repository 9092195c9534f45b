#ifndef QSK_FREDHOLM_HPP
#define QSK_FREDHOLM_HPP

// The odd Fredholm module for C(SU_q(2)) on l2(Z) x l2(N) and its integer
// index pairings.
//
// P_k projects onto span{ e_{n,m} : n + m <= k }; F_k = 2 P_k - 1.  The
// pairing convention is
//
//   < [w], F_k > := Index( P_k w P_k : P_k H -> P_k H ).
//
// Numerically the compression is taken from the interior window basis
// (|n| <= L-2, m <= D-2) into the full truncated P_k range, which removes
// every window-boundary artifact: kernel vectors come from the n+m = k edge
// only.  Kernel and cokernel dimensions are read off as small singular
// values of the compression and of its adjoint.

#include "qsk/symrep.hpp"

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace qsk::fredholm {

using fock::cplx;
using fock::FactorSpace;
using fock::SparseOp;

struct FredholmSpec {
  int L = 24;  // Z-window half-width
  int D = 24;  // N-truncation
  int k = 0;   // half-space level
  int block = 1;

  void validate() const;  // requires |k| <= L-4 and k <= D-4
  std::vector<FactorSpace> shape() const;
};

struct IndexResult {
  std::string unitary;
  double q = 0.0;
  int index = 0;
  int kernel_dim = 0;
  int cokernel_dim = 0;
  double smallest_retained_sv = 0.0;
  double largest_discarded_sv = 0.0;
  double rank_tol = 1e-6;
  bool stable = false;
  std::string error;
  nlohmann::ordered_json sweep;  // per-point results

  nlohmann::ordered_json to_json() const;
};

// Diagonal 0/1 projection onto {n + m <= k} (per block).
SparseOp half_space_projection(const FredholmSpec& spec);

// Number of lattice points with n + m = k inside the truncated window.
std::int64_t level_line_count(const FredholmSpec& spec);

// The limit unitary [[t x S, 0], [t* x p, t* x S*]]; q-independent.
SparseOp su2_limit_unitary(const FredholmSpec& spec);

// The materialized fundamental 2x2 matrix of C(SU_q(2)) in the window
// picture, rows weighted (t, t*) so that the half-space grading is
// respected; converges in norm to the limit unitary as q -> 0.
SparseOp su2_fundamental(double q, const FredholmSpec& spec);

// t* x p + 1 - 1 x p; the bilateral-shift orientation is the one in the
// K1 class of the limit unitary (the conjugate orientation pairs to +1).
SparseOp tp_witness(const FredholmSpec& spec);

// block-diagonal (u_q, 1): the image of the fundamental 3x3 matrix of
// C(SU_q(3)) under the quotient-to-subgroup map, materialized.
SparseOp su3_phi_image(double q, const FredholmSpec& spec);

// Index of P_k u P_k on range(P_k), by singular-value counting at rank_tol,
// with a sweep over k-1, k, k+1 and two window sizes; the stability flag
// requires one integer across the sweep.  Singular values within a factor
// 10 of rank_tol abort with an error field rather than guessing the rank.
IndexResult index_pairing(const std::string& name, double q, const FredholmSpec& spec,
                          double rank_tol = 1e-6);

// Single-point index computation for a concrete operator.
struct PointIndex {
  int index = 0, kernel_dim = 0, cokernel_dim = 0;
  double smallest_retained_sv = 0.0, largest_discarded_sv = 0.0;
  double trace_formula = 0.0;  // HS-difference estimate of the same index
  bool ambiguous = false;
};
PointIndex point_index(const SparseOp& u, const FredholmSpec& spec, double rank_tol);

// Builds the named unitary on the given spec: su2-limit | t-p |
// su3-fundamental | su2-fundamental | identity.
SparseOp named_unitary(const std::string& name, double q, const FredholmSpec& spec);

// The symbolic quotient map on the chi_{omega_3} picture: contract the two
// trailing slots, then evaluate the first torus coordinate at 1.  Returns
// the contracted representation matrix (one slot, t_2 monomials only).
symrep::RepMatrix phi_su3(const symrep::RepMatrix& rm);

// Checks phi( fundamental ) = diag(u, 1) entry by entry at the symbolic
// level; returns an empty string on success, else a description.
std::string phi_su3_verify(const symrep::RepMatrix& contracted);

// Nontriviality of the fundamental unitary: pairs the phi-image with F_k.
IndexResult su3_nontriviality(double q, const FredholmSpec& spec, double rank_tol = 1e-6);

}  // namespace qsk::fredholm

#endif
