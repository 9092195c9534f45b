#ifndef QSK_RELATIONS_HPP
#define QSK_RELATIONS_HPP

// Verification of the defining relations of C(SU_q(n)) and of the
// compact-ideal and killing identities for the word representations.
//
// Residuals are measured on the interior compression, where truncation
// effects vanish; the expected scale is bounded by 10 q^{2D} + 1e-12.

#include "qsk/symrep.hpp"

#include <string>
#include <vector>

#include "json.hpp"

namespace qsk::relations {

using fock::cplx;
using fock::SparseOp;
using symrep::RepMatrix;

// Signed q-power tensor: 0 on repeated indices, (-q)^{inversions} otherwise.
struct ETensor {
  int n;
  double q;

  // inversion count of the index tuple, or -1 if indices repeat
  static int tuple_length(const std::vector<int>& idx);
  double value(const std::vector<int>& idx) const;
};

struct ResidualReport {
  std::string check_name;
  nlohmann::ordered_json params;
  std::vector<std::pair<std::string, double>> residuals;
  double tolerance = 0.0;
  bool pass = false;
  std::string error;

  double max_residual() const;
  void finish();  // sets pass from residuals vs tolerance
  nlohmann::ordered_json to_json() const;
};

// Materialization plan for a representation matrix: either cyclic torus
// factors (m of them, size M) or a sampled torus point.
struct MaterializePlan {
  double q = 0.5;
  int D = 12;
  int n_torus = 0;  // 0 means sampled
  int M = 8;
  std::vector<cplx> t_sample;  // used when n_torus == 0

  std::vector<fock::FactorSpace> shape_for(int slots) const;
};

// Fixed deterministic torus samples: an 8th-roots point plus three seeded
// pseudo-random unit points.
std::vector<std::vector<cplx>> torus_samples(int n, std::uint64_t seed);

// Row and column unitarity sums of Eq-(1) type for every (i, j), evaluated
// matrix-free on the interior compression.
ResidualReport check_unitarity(const RepMatrix& rm, const MaterializePlan& plan,
                               double tolerance);

// q-determinant relation: sum over index tuples of E_{i...} u_{j1 i1} ...
// u_{jn in} = E_{j...} 1, for all distinct target tuples plus a sample of
// repeating ones.  Materializes entries flat, so intended for modest shapes.
ResidualReport check_determinant(const RepMatrix& rm, const MaterializePlan& plan,
                                 double tolerance);

// (1 x p x 1) chi_{w(n-1,n-k)}(u_{ns}) = t_1 x p x pi_{w(n-2,n-k)}(v_{n-1,s})
// for 1 <= s <= n-1, both sides built from their own path sums.
ResidualReport check_compact_lemma(int n, int k, double q, int D, int M, double tolerance);

// The compact pair (x_i, y_i) attached to a diagonal slot atom z_i, with
// x_i z_i y_i = p:
//   z = 1  -> (p, p)
//   z = A  -> (p, (1-q^2)^{-1/2} S* p)
//   z = A* -> ((1-q^2)^{-1/2} p S, p)
struct KillingPair {
  SparseOp x, y;
};
KillingPair build_killing_pair_slot(fock::AtomKind z, double q, int D);

// x_s pi_{w(n-1,n-k)}(u_{js}) y_s = delta_{js} p^{(x) k} for the rows the
// representation moves.
ResidualReport check_killing(int n, int k, int s, double q, int D, double tolerance);

// Poincare polynomial identity: sum over S_n of q^{2 l(sigma)} equals
// prod_{i=1..n} (1 + q^2 + ... + q^{2(i-1)}).
bool etensor_poincare_check(int n, double q, double* lhs_out = nullptr,
                            double* rhs_out = nullptr);

}  // namespace qsk::relations

#endif
