#ifndef QSK_FOCK_HPP
#define QSK_FOCK_HPP

// Truncated Hilbert-space operator kernel.
//
// Operators live on tensor products of factor spaces:
//   FockTrunc(D)  truncated l2(N), indices 0..D-1
//   ZWindow(L)    truncated l2(Z), indices -L..L (stored 0..2L)
//   ZCyclic(M)    l2(Z/M), an exactly unitary torus generator
//   Scalar        a one-dimensional factor
//
// The shift S on l2(N) is the backward shift (S e_0 = 0, S e_n = e_{n-1});
// this is forced by unitarity of the elementary representation blocks and
// by p = 1 - S*S being the rank-one projection onto e_0.  The five atoms
//   A  = sqrt(1-q^{2N+2}) S        A e_n = sqrt(1-q^{2n}) e_{n-1}
//   A* = S* sqrt(1-q^{2N+2})       A* e_n = sqrt(1-q^{2n+2}) e_{n+1}
//   B  = -q^{N+1},  C = q^N,  p = 1 - S*S
// are the only operators that occur in representation slots.
//
// Truncation drops exactly the matrix element that would leave the space;
// relation residuals are therefore measured on the interior compression
// (every FockTrunc index <= D-2, every ZWindow index with |n| <= L-2).

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsk::fock {

using cplx = std::complex<double>;

constexpr double kEntryFloor = 1e-14;  // magnitude floor for sparse storage

enum class SpaceKind : std::uint32_t { FockTrunc = 0, ZWindow = 1, ZCyclic = 2, Scalar = 3 };

struct FactorSpace {
  SpaceKind kind = SpaceKind::Scalar;
  int param = 0;  // D, L or M; unused for Scalar

  std::int64_t dim() const;
  bool interior(std::int64_t idx) const;

  static FactorSpace fock(int D);
  static FactorSpace zwindow(int L);
  static FactorSpace zcyclic(int M);
  static FactorSpace scalar();

  bool operator==(const FactorSpace& o) const { return kind == o.kind && param == o.param; }
};

std::int64_t shape_dim(const std::vector<FactorSpace>& shape);

// Slot operators.  Shift/ShiftStar are the bare truncated shifts (sigma
// sends both to 1); TorusGen/TorusGenConj act on ZWindow/ZCyclic factors.
enum class AtomKind : std::uint8_t {
  One,
  A,
  Astar,
  B,
  C,
  P,
  Zero,
  Shift,
  ShiftStar,
  TorusGen,
  TorusGenConj
};

const char* atom_name(AtomKind a);

// Small dense factor matrix, row major.
struct FactorMat {
  int rows = 0, cols = 0;
  std::vector<cplx> a;

  FactorMat() = default;
  FactorMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}
  cplx& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  const cplx& at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

FactorMat factor_matrix(AtomKind a, double q, const FactorSpace& f);
FactorMat factor_identity(const FactorSpace& f);
// Integer power of the torus generator on a ZCyclic or ZWindow factor
// (negative powers use the adjoint).
FactorMat torus_power(const FactorSpace& f, int e);

// Sparse complex matrix tagged with its factor-space shape.  block > 1
// means a block x block matrix of operators over the base space; indices
// are global (block_row * base_dim + base_index).
struct SparseOp {
  struct Ent {
    std::int64_t r, c;
    cplx v;
  };

  std::vector<FactorSpace> shape;
  int block = 1;
  std::vector<Ent> ents;  // sorted by (r, c), no duplicates, no entries below floor

  std::int64_t base_dim() const { return shape_dim(shape); }
  std::int64_t dim() const { return base_dim() * block; }

  static SparseOp zero(std::vector<FactorSpace> shape, int block = 1);
  static SparseOp identity(std::vector<FactorSpace> shape, int block = 1);
  static SparseOp from_entries(std::vector<FactorSpace> shape, std::vector<Ent> e, int block = 1);
  static SparseOp from_factor(const FactorSpace& f, const FactorMat& m);

  void canonicalize();  // sort, merge duplicates, purge below floor
  bool is_diagonal() const;

  SparseOp adjoint() const;
  SparseOp scaled(cplx s) const;
  double max_abs_entry() const;
  cplx entry(std::int64_t r, std::int64_t c) const;
};

SparseOp add(const SparseOp& a, const SparseOp& b);
SparseOp sub(const SparseOp& a, const SparseOp& b);
SparseOp mul(const SparseOp& a, const SparseOp& b);
SparseOp kron(const std::vector<SparseOp>& ops);

// Block matrix of base-space operators; entries indexed [row][col], all on
// the same shape with block == 1.
SparseOp block_matrix(const std::vector<std::vector<SparseOp>>& blocks);

// atom_matrix materializes a single atom on a single factor space.
SparseOp atom_matrix(AtomKind a, double q, const FactorSpace& f);

// Zero out all rows and columns with a non-interior index in any factor.
SparseOp compress_interior(const SparseOp& a);

// Abstract operator for matrix-free norm estimation.
struct LinOp {
  virtual ~LinOp() = default;
  virtual std::int64_t dim() const = 0;
  virtual void apply(const cplx* x, cplx* y) const = 0;          // y = A x
  virtual void apply_adjoint(const cplx* x, cplx* y) const = 0;  // y = A* x
};

struct SparseLinOp final : LinOp {
  const SparseOp* op;
  explicit SparseLinOp(const SparseOp& a) : op(&a) {}
  std::int64_t dim() const override { return op->dim(); }
  void apply(const cplx* x, cplx* y) const override;
  void apply_adjoint(const cplx* x, cplx* y) const override;
};

// Sum of elementary tensors coeff * (M_0 x M_1 x ... ), applied mode by
// mode without materializing the Kronecker product.
struct TensorSumOp final : LinOp {
  struct Term {
    cplx coeff;
    std::vector<FactorMat> mats;  // one square matrix per factor
  };
  std::vector<FactorSpace> shape;
  std::vector<Term> terms;

  std::int64_t dim() const override { return shape_dim(shape); }
  void apply(const cplx* x, cplx* y) const override;
  void apply_adjoint(const cplx* x, cplx* y) const override;

  SparseOp materialize() const;
};

// Combinators over non-owned operands (callers keep them alive).
struct OpSum final : LinOp {
  std::vector<const LinOp*> parts;
  std::vector<cplx> weights;
  std::int64_t d = 0;
  void add_part(const LinOp& p, cplx w = 1.0);
  std::int64_t dim() const override { return d; }
  void apply(const cplx* x, cplx* y) const override;
  void apply_adjoint(const cplx* x, cplx* y) const override;
};

// (a . b): apply b first.
struct OpChain final : LinOp {
  const LinOp* a = nullptr;
  const LinOp* b = nullptr;
  OpChain() = default;
  OpChain(const LinOp& a_, const LinOp& b_) : a(&a_), b(&b_) {}
  std::int64_t dim() const override { return a->dim(); }
  void apply(const cplx* x, cplx* y) const override;
  void apply_adjoint(const cplx* x, cplx* y) const override;
};

struct OpAdjoint final : LinOp {
  const LinOp* a = nullptr;
  explicit OpAdjoint(const LinOp& a_) : a(&a_) {}
  std::int64_t dim() const override { return a->dim(); }
  void apply(const cplx* x, cplx* y) const override { a->apply_adjoint(x, y); }
  void apply_adjoint(const cplx* x, cplx* y) const override { a->apply(x, y); }
};

struct OpShift final : LinOp {  // A + s * I
  const LinOp* a = nullptr;
  cplx s = 0.0;
  OpShift(const LinOp& a_, cplx s_) : a(&a_), s(s_) {}
  std::int64_t dim() const override { return a->dim(); }
  void apply(const cplx* x, cplx* y) const override;
  void apply_adjoint(const cplx* x, cplx* y) const override;
};

// Interior compression Pi A Pi via a 0/1 mask over basis indices.
struct MaskedOp final : LinOp {
  const LinOp* a = nullptr;
  std::vector<char> mask;  // dim entries
  MaskedOp(const LinOp& a_, std::vector<char> m) : a(&a_), mask(std::move(m)) {}
  std::int64_t dim() const override { return a->dim(); }
  void apply(const cplx* x, cplx* y) const override;
  void apply_adjoint(const cplx* x, cplx* y) const override;
};

std::vector<char> interior_mask(const std::vector<FactorSpace>& shape, int block = 1);

// Largest singular value within tol, by power iteration on A*A with the
// deterministic all-ones start vector.  Throws on non-convergence.  Small
// operators (dimension <= 512) are resolved exactly by a dense solve.
double op_norm(const LinOp& a, double tol = 1e-10, int max_iter = 500);
double op_norm(const SparseOp& a, double tol = 1e-10, int max_iter = 500);

// Fast norm estimate for residual checks: power iteration with a loose
// relative stop; accurate to a few percent, which is ample for values that
// are either near zero or far above their tolerance.  Never throws.
double residual_norm(const LinOp& a);
double residual_norm(const SparseOp& a);

// Residual norm of (a - b) on the interior compression.
double interior_diff_norm(const SparseOp& a, const SparseOp& b);

struct GapViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Orthogonal projection onto the eigenspaces of a self-adjoint operator
// with eigenvalue within gap/2 of 1.  The caller asserts that the spectrum
// has no point in (1-gap, 1-gap/2); a detected eigenvalue there throws
// GapViolation, a non-self-adjoint input throws std::invalid_argument.
// Diagonal inputs are handled exactly; otherwise a dense solve is used
// (dimension <= 4096).
SparseOp spectral_projection_one(const SparseOp& a, double gap);

// Rank of a dense-able operator via singular values (oracle use).
int dense_rank(const SparseOp& a, double tol = 1e-9);

// Binary dump: header with shape descriptor, then (row, col, re, im)
// records, little endian, 64-bit floats.
void dump_binary(const SparseOp& a, std::ostream& os);
SparseOp load_binary(std::istream& is);

}  // namespace qsk::fock

#endif
