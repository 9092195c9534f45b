#ifndef QSK_KTHEORY_HPP
#define QSK_KTHEORY_HPP

// K-theory witness operators for the quantum Stiefel quotients with m = 2:
// the unitaries U_k, V_k, u_k, v_k with their algebra-internal membership
// formulas, the isometry Y_n and its partial isometry Z_n, the explicit
// coisometry in the alternative word picture, the commuting pair S_n, T_n
// with its compactness certificate, the two-torus Bott projection e(U, V),
// and the boundary witness X(1 - Y Y*) + Y Y*.
//
// All operators here live on the representation space of chi_{omega_k},
// with two cyclic torus factors followed by the Fock slots; direct tensor
// formulas are kept as symbolic path data so that slot contractions can be
// checked exactly.

#include "qsk/relations.hpp"
#include "qsk/symrep.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qsk::ktheory {

using fock::AtomKind;
using fock::cplx;
using fock::SparseOp;
using symrep::PathSum;
using symrep::TorusMonomial;

enum class WitnessKind { Unitary, Isometry, Coisometry, Projection };

const char* witness_kind_name(WitnessKind k);

struct KWitness {
  std::string name;
  WitnessKind kind = WitnessKind::Unitary;
  std::string provenance;  // direct-formula | algebra-internal
  SparseOp op;
  PathSum formula;  // symbolic tensor data when built from a direct formula
  std::vector<std::pair<std::string, double>> residuals;

  double max_residual() const;
  nlohmann::ordered_json to_json() const;
};

// Layout of the chi_{omega_k} representation space for m = 2: two cyclic
// torus factors, n-2 Fock slots from the leading blocks, k-1 from the last.
struct WitnessSpace {
  int n = 3;
  int k = 3;
  double q = 0.5;
  int D = 12;
  int M = 8;

  int lead_slots() const { return n - 2; }
  int tail_slots() const { return k - 1; }
  int slots() const { return lead_slots() + tail_slots(); }
  std::vector<fock::FactorSpace> shape() const;
};

// Direct tensor formulas as path data (t_1 exponent, t_2 exponent, atoms).
PathSum formula_term(int n, int e1, int e2, const std::vector<AtomKind>& atoms, double sign = 1.0);

// g + 1 - e, where g is a single-term generator datum and e its support
// projection datum; the common pattern of the witness unitaries.
PathSum witness_formula(const PathSum& g, const PathSum& e);

// U_k, V_k, u_k, v_k as symbolic direct formulas on the omega_k layout.
PathSum formula_U(const WitnessSpace& ws);
PathSum formula_V(const WitnessSpace& ws);
PathSum formula_u(const WitnessSpace& ws);
PathSum formula_v(const WitnessSpace& ws);

struct KUnitaryResult {
  std::vector<KWitness> witnesses;  // direct builds with dual-agreement residuals
  // membership formulas that the functional calculus rejects (k = n cases)
  std::vector<std::pair<std::string, std::string>> rejected;
  bool pass = false;
  nlohmann::ordered_json to_json() const;
};

// Builds the four unitaries two ways on chi_{omega_k} and records the
// entrywise interior agreement.  The membership formulas for V, u, v are
// only meaningful for k < n; at k = n the spectral projection at 1 has no
// gap and the rejection is recorded rather than forced.
KUnitaryResult build_k_unitaries(const WitnessSpace& ws, double agree_tol = 1e-9);

struct ZnYnResult {
  KWitness Z, Y;
  std::vector<std::pair<std::string, double>> residuals;
  bool pass = false;
  nlohmann::ordered_json to_json() const;
};

// Z_n = t1 x 1_{n-2} x p_{n-2} x S* and Y_n = Z_n + 1 - Z_n* Z_n, checked
// against the functional-calculus construction from chi_{omega_n}(u_{n2}).
ZnYnResult build_Zn_Yn(const WitnessSpace& ws, double tol = 1e-9);

struct CoisometryResult {
  KWitness X;  // the explicit coisometry in the alternative word picture
  std::vector<std::pair<std::string, double>> residuals;
  bool pass = false;
  nlohmann::ordered_json to_json() const;
};

// Works in the picture chi_{w(n-1,1)} * pi_{w(n-1,2)} where the coisometry
// is an explicit shift formula; verifies the intermediate operator identity
//   chi~(u_{n-1,1}* u_{n-1,1} + u_{n1}* u_{n1}) = 1 x 1 x q^{2N}_{n-2} x 1_{n-2}
// exactly, the compressed generator identity, both defect projections, and
// the slot contraction back to V_{n-1}.
CoisometryResult build_coisometry_X(const WitnessSpace& ws, double tol = 1e-10);

struct SnTnResult {
  KWitness S, T, R;
  std::vector<std::pair<std::string, double>> residuals;
  // per-Fock-level certificate: max |entry| of R_n minus the compressed
  // generator product at level j, against the bound q^{2j+2}
  std::vector<double> certificate_excess;  // entry - bound per level (<= 0 passes)
  bool pass = false;
  nlohmann::ordered_json to_json() const;
};

// R_n, S_n, T_n with the compactness certificate relating R_n to the
// generator product chi_{omega_n}(u_{n-1,1}) Z_n.
SnTnResult build_Sn_Tn(const WitnessSpace& ws, double tol = 1e-10);

// The two-torus Bott projection: for commuting unitaries U, V the 2x2 block
//   [[ f(U), g(U) + h(U) V ], [ g(U) + V* h(U), 1 - f(U) ]]
// with f the tent map on the circle, g = sqrt(f - f^2) on the first half,
// h = sqrt(f - f^2) on the second; idempotent whenever U and V commute.
SparseOp bott_projection(const SparseOp& U, const SparseOp& V);

// e_0 = diag(1, 0) over the same base space.
SparseOp bott_e0(const SparseOp& U);

// Rank of a projection by eigenvalue counting (dense; oracle use).
int projection_rank(const SparseOp& e, double tol = 1e-6);

// X(1 - Y Y*) + Y Y* for a unitary-or-coisometry X and an isometry Y that
// commute on the asserted region.
SparseOp corollary_witness(const SparseOp& X, const SparseOp& Y, double pre_tol = 1e-10);

}  // namespace qsk::ktheory

#endif
