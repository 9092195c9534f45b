#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qsk/fredholm.hpp"

#include <cmath>

using namespace qsk;
using namespace qsk::fredholm;
using fock::AtomKind;

TEST_CASE("half space projection counts lattice points") {
  // k below the window: empty projection
  {
    FredholmSpec s{8, 8, -12, 1};
    CHECK_THROWS(s.validate());  // out of the stability margin
    // still enumerable directly
    auto p = half_space_projection(s);
    CHECK(p.ents.empty());
  }
  // k = 0, L = 2, D = 2: points with n + m <= 0, |n| <= 2, m <= 1
  {
    FredholmSpec s{2, 2, 0, 1};
    auto p = half_space_projection(s);
    CHECK(p.ents.size() == 5);  // (-2,0), (-2,1), (-1,0), (-1,1), (0,0)
  }
  // rank increments count the points on the level line
  {
    FredholmSpec s{10, 10, 2, 1};
    FredholmSpec s_prev = s;
    s_prev.k = 1;
    auto pk = half_space_projection(s);
    auto pk1 = half_space_projection(s_prev);
    CHECK(static_cast<std::int64_t>(pk.ents.size() - pk1.ents.size()) == level_line_count(s));
  }
}

TEST_CASE("limit unitary structure") {
  FredholmSpec spec{12, 12, 0, 2};
  auto u = su2_limit_unitary(spec);

  // column-1 isometry: S*S + p = 1 exactly at truncation
  auto f = fock::FactorSpace::fock(12);
  auto S = fock::atom_matrix(AtomKind::Shift, 0.5, f);
  auto p = fock::atom_matrix(AtomKind::P, 0.5, f);
  auto col = fock::add(fock::mul(S.adjoint(), S), p);
  CHECK(fock::sub(col, fock::SparseOp::identity({f})).ents.empty());

  // unitary on the interior
  auto id = fock::SparseOp::identity(spec.shape(), 2);
  CHECK(fock::interior_diff_norm(fock::mul(u, u.adjoint()), id) <= 1e-12);
  CHECK(fock::interior_diff_norm(fock::mul(u.adjoint(), u), id) <= 1e-12);
}

TEST_CASE("commutators with the half-space projection") {
  FredholmSpec spec{12, 12, 0, 1};
  auto P = half_space_projection(spec);
  double q = 0.5;
  // [t x S, P_k] = 0 exactly on the whole truncated space
  auto tS = fock::kron({fock::SparseOp::from_factor(spec.shape()[0],
                                                    fock::factor_matrix(AtomKind::TorusGen, q,
                                                                        spec.shape()[0])),
                        fock::atom_matrix(AtomKind::Shift, q, spec.shape()[1])});
  tS.shape = spec.shape();
  auto comm = fock::sub(fock::mul(tS, P), fock::mul(P, tS));
  CHECK(comm.ents.empty());

  // [t* x p, P_k] has rank one on the interior
  auto tp = fock::kron({fock::SparseOp::from_factor(spec.shape()[0],
                                                    fock::factor_matrix(AtomKind::TorusGenConj, q,
                                                                        spec.shape()[0])),
                        fock::atom_matrix(AtomKind::P, q, spec.shape()[1])});
  tp.shape = spec.shape();
  auto comm2 = fock::compress_interior(fock::sub(fock::mul(tp, P), fock::mul(P, tp)));
  CHECK(fock::dense_rank(comm2, 1e-9) == 1);
}

TEST_CASE("index pairing point values") {
  FredholmSpec spec{16, 16, 0, 1};
  // identity pairs to zero
  auto id = fock::SparseOp::identity(spec.shape());
  auto pt = point_index(id, spec, 1e-6);
  CHECK(pt.index == 0);
  CHECK(pt.kernel_dim == 0);
  CHECK(pt.cokernel_dim == 0);

  // the limit unitary pairs to -1 with kernel 0, cokernel 1
  FredholmSpec spec2{16, 16, 0, 2};
  auto u = su2_limit_unitary(spec2);
  auto pu = point_index(u, spec2, 1e-6);
  CHECK(pu.index == -1);
  CHECK(pu.kernel_dim == 0);
  CHECK(pu.cokernel_dim == 1);
  CHECK(pu.smallest_retained_sv >= 0.1);
  CHECK(pu.trace_formula == doctest::Approx(-1.0).epsilon(1e-9));

  // the t-p witness pairs to -1; its adjoint pairs to +1
  auto w = tp_witness(spec);
  auto pw = point_index(w, spec, 1e-6);
  CHECK(pw.index == -1);
  auto pwa = point_index(w.adjoint(), spec, 1e-6);
  CHECK(pwa.index == +1);
}

TEST_CASE("fundamental matrix pairs to -1 for several q") {
  FredholmSpec spec{16, 16, 0, 2};
  for (double q : {0.1, 0.3, 0.5}) {
    auto u = su2_fundamental(q, spec);
    auto pt = point_index(u, spec, 1e-6);
    CHECK(pt.index == -1);
    CHECK(pt.kernel_dim == 0);
    CHECK(pt.cokernel_dim == 1);
  }
}

TEST_CASE("fundamental matrix converges in norm to the limit unitary") {
  FredholmSpec spec{12, 12, 0, 2};
  auto u = su2_limit_unitary(spec);
  double prev = 2.0;
  for (double q : {0.5, 0.3, 0.1}) {
    auto d = fock::sub(su2_fundamental(q, spec), u);
    double norm = fock::residual_norm(d);
    CHECK(norm < prev);
    prev = norm;
  }
  CHECK(prev < 0.2);  // at q = 0.1 the distance is already small
}

TEST_CASE("index sweep stability") {
  FredholmSpec spec{16, 16, 0, 1};
  auto res = index_pairing("t-p", 0.5, spec, 1e-6);
  INFO(res.to_json().dump());
  CHECK(res.stable);
  CHECK(res.index == -1);
  CHECK(res.error.empty());

  auto res2 = index_pairing("su2-limit", 0.5, spec, 1e-6);
  CHECK(res2.stable);
  CHECK(res2.index == -1);
}

TEST_CASE("symbolic quotient map on the fundamental matrix") {
  auto rm = symrep::build_rep(coxeter::omega_word(3, 2, 3), 3, 2, symrep::TorusMode::Symbolic);
  auto con = phi_su3(rm);
  CHECK(phi_su3_verify(con).empty());

  // phi(u_33) = 1
  const auto& e33 = con.at(3, 3);
  REQUIRE(e33.terms.size() == 1);
  CHECK(e33.terms.begin()->first.first == std::vector<AtomKind>{AtomKind::One});
  CHECK(e33.terms.begin()->first.second.trivial());

  // wrong word shape is rejected
  coxeter::ReducedWord w;
  w.n = 3;
  w.letters = {2, 1, 2};
  auto other = symrep::build_rep(w, 3, 2, symrep::TorusMode::Symbolic);
  CHECK_THROWS_AS(phi_su3(other), std::invalid_argument);
}

TEST_CASE("the quotient image of the p-tensor unitary is the identity") {
  // U_3 = t1 x p x p + 1 - 1 x p x p: both p slots die under the contraction
  using symrep::PathSum;
  using symrep::TorusMonomial;
  PathSum u3 = PathSum::zero(3, 2);
  TorusMonomial t1 = TorusMonomial::one(3);
  t1.e[0] = 1;
  u3.add_term({AtomKind::P, AtomKind::P}, t1, symrep::Coeff{});
  u3.add_term({AtomKind::One, AtomKind::One}, TorusMonomial::one(3), symrep::Coeff{});
  u3.add_term({AtomKind::P, AtomKind::P}, TorusMonomial::one(3), symrep::Coeff{0, -1.0});
  auto c = symrep::sigma_contract(symrep::sigma_contract(u3, 1), 0);
  REQUIRE(c.terms.size() == 1);
  CHECK(c.terms.begin()->first.first.empty());
  CHECK(std::abs(c.terms.begin()->second.z - fock::cplx(1.0)) < 1e-15);

  // and the identity pairs to zero
  FredholmSpec spec{12, 12, 0, 1};
  auto pt = point_index(fock::SparseOp::identity(spec.shape()), spec, 1e-6);
  CHECK(pt.index == 0);
}

TEST_CASE("su3 nontriviality witness") {
  FredholmSpec spec{16, 16, 0, 3};
  auto res = su3_nontriviality(0.5, spec, 1e-6);
  INFO(res.to_json().dump());
  CHECK(res.error.empty());
  CHECK(res.stable);
  CHECK(res.index == -1);
}

TEST_CASE("spec validation") {
  FredholmSpec bad{10, 10, 8, 1};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  FredholmSpec good{10, 10, 6, 1};
  CHECK_NOTHROW(good.validate());
}
