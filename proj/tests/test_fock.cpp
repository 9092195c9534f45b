#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qsk/fock.hpp"

#include <cmath>
#include <sstream>

using namespace qsk::fock;

namespace {

SparseOp atom(AtomKind a, double q, int D) { return atom_matrix(a, q, FactorSpace::fock(D)); }

}  // namespace

TEST_CASE("atom C is diag(1, q, q^2, ...)") {
  auto c = atom(AtomKind::C, 0.5, 3);
  CHECK(c.ents.size() == 3);
  CHECK(std::abs(c.entry(0, 0) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(c.entry(1, 1) - cplx(0.5)) < 1e-15);
  CHECK(std::abs(c.entry(2, 2) - cplx(0.25)) < 1e-15);
}

TEST_CASE("p equals 1 - S*S exactly at truncation") {
  for (int D : {2, 5, 9}) {
    auto S = atom(AtomKind::Shift, 0.5, D);
    auto SsS = mul(S.adjoint(), S);
    auto p = sub(SparseOp::identity({FactorSpace::fock(D)}), SsS);
    auto P = atom(AtomKind::P, 0.5, D);
    CHECK(sub(p, P).ents.empty());
    CHECK(P.ents.size() == 1);  // rank one
  }
}

TEST_CASE("atom A has the forced matrix elements") {
  double q = 0.5;
  auto a = atom(AtomKind::A, q, 4);
  CHECK(a.ents.size() == 3);
  for (int n = 1; n <= 3; ++n)
    CHECK(std::abs(a.entry(n - 1, n) - cplx(std::sqrt(1 - std::pow(q, 2 * n)))) < 1e-15);
}

TEST_CASE("elementary 2x2 block is unitary on the interior") {
  // the block [[A, B], [C, A*]] satisfies row/column relations after
  // interior compression
  for (double q : {0.3, 0.5, 0.8}) {
    int D = 16;
    auto A = atom(AtomKind::A, q, D);
    auto B = atom(AtomKind::B, q, D);
    auto C = atom(AtomKind::C, q, D);
    auto As = atom(AtomKind::Astar, q, D);
    auto I = SparseOp::identity({FactorSpace::fock(D)});
    auto row1 = sub(add(mul(A, A.adjoint()), mul(B, B.adjoint())), I);
    auto row2 = sub(add(mul(C, C.adjoint()), mul(As, As.adjoint())), I);
    auto cross = add(mul(A, C.adjoint()), mul(B, As.adjoint()));
    auto col1 = sub(add(mul(A.adjoint(), A), mul(C.adjoint(), C)), I);
    auto col2 = sub(add(mul(B.adjoint(), B), mul(As.adjoint(), As)), I);
    double bound = 10 * std::pow(q, 2 * D) + 1e-12;
    CHECK(op_norm(compress_interior(row1)) <= bound);
    CHECK(op_norm(compress_interior(row2)) <= bound);
    CHECK(op_norm(compress_interior(cross)) <= bound);
    CHECK(op_norm(compress_interior(col1)) <= bound);
    CHECK(op_norm(compress_interior(col2)) <= bound);
  }
}

TEST_CASE("adjoint is an exact involution") {
  auto a = atom(AtomKind::A, 0.7, 6);
  auto aa = a.adjoint().adjoint();
  CHECK(sub(a, aa).ents.empty());
}

TEST_CASE("kron basics") {
  auto I2 = SparseOp::identity({FactorSpace::fock(2)});
  auto II = kron({I2, I2});
  CHECK(II.ents.size() == 4);
  CHECK(II.shape.size() == 2);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(II.entry(i, i) - cplx(1.0)) < 1e-15);

  auto P = atom(AtomKind::P, 0.5, 2);
  auto PP = kron({P, P});
  CHECK(PP.ents.size() == 1);
  CHECK(std::abs(PP.entry(0, 0) - cplx(1.0)) < 1e-15);
}

TEST_CASE("kron associativity is exact entrywise") {
  auto A = atom(AtomKind::A, 0.5, 3);
  auto C = atom(AtomKind::C, 0.5, 4);
  auto B = atom(AtomKind::B, 0.5, 2);
  auto left = kron({kron({A, C}), B});
  auto flat = kron({A, C, B});
  CHECK(left.ents.size() == flat.ents.size());
  for (std::size_t i = 0; i < flat.ents.size(); ++i) {
    CHECK(left.ents[i].r == flat.ents[i].r);
    CHECK(left.ents[i].c == flat.ents[i].c);
    CHECK(left.ents[i].v == flat.ents[i].v);
  }
}

TEST_CASE("operator norm examples") {
  auto Z = SparseOp::zero({FactorSpace::fock(4)});
  CHECK(op_norm(Z) == 0.0);

  auto t = atom_matrix(AtomKind::TorusGen, 0.5, FactorSpace::zcyclic(8));
  CHECK(op_norm(t) == doctest::Approx(1.0).epsilon(1e-9));

  double q = 0.5;
  int D = 16;
  auto A = atom(AtomKind::A, q, D);
  CHECK(op_norm(A) == doctest::Approx(std::sqrt(1 - std::pow(q, 30))).epsilon(1e-9));
}

TEST_CASE("norm is multiplicative under kron") {
  double q = 0.5;
  int D = 8;
  auto A = atom(AtomKind::A, q, D);
  auto C = atom(AtomKind::C, q, D);
  double lhs = op_norm(kron({A, C}));
  double rhs = op_norm(A) * op_norm(C);
  CHECK(std::abs(lhs - rhs) < 1e-10);
}

TEST_CASE("spectral projection onto eigenvalue one") {
  double q = 0.5;
  auto P = atom(AtomKind::P, q, 6);
  auto QP = spectral_projection_one(P, 0.5);
  CHECK(sub(QP, P).ents.empty());

  // diag(q^{2n}): only q^0 = 1 survives
  int D = 8;
  SparseOp d = SparseOp::zero({FactorSpace::fock(D)});
  for (int n = 0; n < D; ++n) d.ents.push_back({n, n, std::pow(q, 2 * n)});
  auto Q = spectral_projection_one(d, 0.5);
  CHECK(Q.ents.size() == 1);
  CHECK(std::abs(Q.entry(0, 0) - cplx(1.0)) < 1e-15);
}

TEST_CASE("spectral projection postconditions and dense path") {
  // non-diagonal self-adjoint input: conjugate a diagonal by a rotation
  int D = 6;
  SparseOp d = SparseOp::zero({FactorSpace::fock(D)});
  for (int n = 0; n < D; ++n) d.ents.push_back({n, n, n < 2 ? 1.0 : 0.2});
  // rotate basis vectors 0 and 2 by 45 degrees
  SparseOp u = SparseOp::identity({FactorSpace::fock(D)});
  u.ents[0].v = std::sqrt(0.5);
  u.ents[2].v = std::sqrt(0.5);
  u.ents.push_back({0, 2, std::sqrt(0.5)});
  u.ents.push_back({2, 0, -std::sqrt(0.5)});
  u.canonicalize();
  auto a = mul(mul(u, d), u.adjoint());
  auto Q = spectral_projection_one(a, 0.5);
  CHECK(op_norm(sub(mul(Q, Q), Q)) <= 1e-10);
  CHECK(op_norm(sub(Q, Q.adjoint())) <= 1e-10);
  CHECK(op_norm(sub(mul(Q, a), mul(a, Q))) <= 1e-9);
  CHECK(dense_rank(Q) == 2);
}

TEST_CASE("spectral projection error paths") {
  int D = 6;
  SparseOp d = SparseOp::zero({FactorSpace::fock(D)});
  for (int n = 0; n < D; ++n) d.ents.push_back({n, n, n == 0 ? 1.0 : 0.9});
  CHECK_THROWS_AS(spectral_projection_one(d, 0.5), GapViolation);

  auto s = atom(AtomKind::Shift, 0.5, D);
  CHECK_THROWS_AS(spectral_projection_one(s, 0.5), std::invalid_argument);
}

TEST_CASE("interior mask for window and fock factors") {
  std::vector<FactorSpace> shape{FactorSpace::zwindow(3), FactorSpace::fock(3)};
  auto mask = interior_mask(shape);
  // window indices 0..6 store n = -3..3; interior needs |n| <= 1, fock <= 1
  auto at = [&](int w, int f) { return mask[static_cast<std::size_t>(w) * 3 + f]; };
  CHECK(at(3, 0) == 1);   // n = 0, m = 0
  CHECK(at(3, 2) == 0);   // fock boundary
  CHECK(at(0, 0) == 0);   // n = -3
  CHECK(at(6, 0) == 0);   // n = +3
  CHECK(at(2, 1) == 1);   // n = -1, m = 1
}

TEST_CASE("TensorSumOp matches its materialization") {
  double q = 0.5;
  std::vector<FactorSpace> shape{FactorSpace::zcyclic(4), FactorSpace::fock(5)};
  TensorSumOp op;
  op.shape = shape;
  op.terms.push_back({cplx(1.0),
                      {torus_power(shape[0], 1), factor_matrix(AtomKind::A, q, shape[1])}});
  op.terms.push_back({cplx(0.0, -2.0),
                      {torus_power(shape[0], -1), factor_matrix(AtomKind::C, q, shape[1])}});
  auto flat = op.materialize();

  std::vector<cplx> x(op.dim()), y1(op.dim()), y2(op.dim());
  for (std::int64_t i = 0; i < op.dim(); ++i) x[i] = cplx(std::sin(i + 1.0), std::cos(2.0 * i));
  op.apply(x.data(), y1.data());
  SparseLinOp sl(flat);
  sl.apply(x.data(), y2.data());
  for (std::int64_t i = 0; i < op.dim(); ++i) CHECK(std::abs(y1[i] - y2[i]) < 1e-12);

  op.apply_adjoint(x.data(), y1.data());
  sl.apply_adjoint(x.data(), y2.data());
  for (std::int64_t i = 0; i < op.dim(); ++i) CHECK(std::abs(y1[i] - y2[i]) < 1e-12);
}

TEST_CASE("binary dump round trip") {
  auto a = kron({atom(AtomKind::A, 0.37, 5), atom(AtomKind::B, 0.37, 4)});
  std::stringstream ss;
  dump_binary(a, ss);
  auto b = load_binary(ss);
  CHECK(b.shape == a.shape);
  CHECK(b.block == a.block);
  REQUIRE(b.ents.size() == a.ents.size());
  for (std::size_t i = 0; i < a.ents.size(); ++i) {
    CHECK(a.ents[i].r == b.ents[i].r);
    CHECK(a.ents[i].c == b.ents[i].c);
    CHECK(a.ents[i].v == b.ents[i].v);
  }
}

TEST_CASE("block matrix assembly") {
  auto S = atom(AtomKind::Shift, 0.5, 3);
  auto P = atom(AtomKind::P, 0.5, 3);
  auto Z = SparseOp::zero({FactorSpace::fock(3)});
  auto u = block_matrix({{S, Z}, {P, S.adjoint()}});
  CHECK(u.block == 2);
  CHECK(u.dim() == 6);
  CHECK(std::abs(u.entry(3, 0) - cplx(1.0)) < 1e-15);  // P block at (1,0)
}
