#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qsk/relations.hpp"

#include <cmath>

using namespace qsk;
using namespace qsk::relations;
using coxeter::ReducedWord;
using fock::AtomKind;
using symrep::TorusMode;

namespace {

ReducedWord make_word(std::vector<int> letters, int n) {
  ReducedWord w;
  w.letters = std::move(letters);
  w.n = n;
  return w;
}

MaterializePlan sampled_plan(int n, double q, int D) {
  MaterializePlan p;
  p.q = q;
  p.D = D;
  p.n_torus = 0;
  p.t_sample = torus_samples(n, 99)[1];
  return p;
}

}  // namespace

TEST_CASE("E tensor values") {
  ETensor E{3, 0.5};
  CHECK(E.value({1, 2, 3}) == 1.0);                   // identity tuple
  CHECK(E.value({2, 1, 3}) == -0.5);                  // one inversion
  CHECK(E.value({3, 2, 1}) == doctest::Approx(-0.125));  // three inversions
  CHECK(E.value({1, 1, 2}) == 0.0);                   // repeated index
}

TEST_CASE("E tensor adjacent-swap consistency") {
  // swapping two adjacent distinct entries changes length by exactly one
  std::vector<int> base{2, 4, 1, 3};
  for (int pos = 0; pos + 1 < 4; ++pos) {
    auto sw = base;
    std::swap(sw[pos], sw[pos + 1]);
    int l1 = ETensor::tuple_length(base), l2 = ETensor::tuple_length(sw);
    CHECK(std::abs(l1 - l2) == 1);
  }
}

TEST_CASE("Poincare polynomial of S_n at q^2") {
  for (int n = 2; n <= 4; ++n)
    for (double q : {0.3, 0.5, 0.8}) CHECK(etensor_poincare_check(n, q));
}

TEST_CASE("unitarity of the diagonal torus character is exact") {
  auto tau = symrep::build_rep(make_word({}, 3), 3, 2, TorusMode::Symbolic);
  auto plan = sampled_plan(3, 0.5, 4);
  auto rep = check_unitarity(tau, plan, 1e-14);
  CHECK(rep.pass);
  CHECK(rep.max_residual() <= 1e-14);
}

TEST_CASE("unitarity of the elementary representation, n = 2") {
  double q = 0.5;
  int D = 16;
  auto rm = symrep::build_rep(make_word({1}, 2), 2, 1, TorusMode::Symbolic);
  auto plan = sampled_plan(2, q, D);
  auto rep = check_unitarity(rm, plan, 1e-10);
  INFO(rep.to_json().dump());
  CHECK(rep.pass);
}

TEST_CASE("unitarity of chi_{omega_3} on cyclic torus factors") {
  double q = 0.5;
  int D = 12;
  auto rm = symrep::build_rep(coxeter::omega_word(3, 2, 3), 3, 2, TorusMode::Symbolic);
  MaterializePlan plan;
  plan.q = q;
  plan.D = D;
  plan.n_torus = 2;
  plan.M = 8;
  auto rep = check_unitarity(rm, plan, 1e-9);
  INFO(rep.to_json().dump());
  CHECK(rep.pass);
}

TEST_CASE("q-determinant for n = 2 elementary representation") {
  auto rm = symrep::build_rep(make_word({1}, 2), 2, 1, TorusMode::Symbolic);
  auto plan = sampled_plan(2, 0.5, 16);
  auto rep = check_determinant(rm, plan, 1e-10);
  INFO(rep.to_json().dump());
  CHECK(rep.pass);
  // repeated target tuples are among the residual labels (zero case)
  bool saw_repeat = false;
  for (const auto& [k, v] : rep.residuals)
    if (k == "target:11") saw_repeat = true;
  CHECK(saw_repeat);
}

TEST_CASE("q-determinant for chi_{omega_3}") {
  auto rm = symrep::build_rep(coxeter::omega_word(3, 2, 3), 3, 2, TorusMode::Symbolic);
  auto plan = sampled_plan(3, 0.5, 10);
  auto rep = check_determinant(rm, plan, 1e-8);
  INFO(rep.to_json().dump());
  CHECK(rep.pass);
}

TEST_CASE("compact-ideal lemma instances") {
  for (auto [n, k, D] : std::vector<std::tuple<int, int, int>>{{3, 1, 8}, {3, 2, 8}, {4, 2, 6}, {4, 3, 6}}) {
    auto rep = check_compact_lemma(n, k, 0.5, D, 8, 1e-12);
    INFO(rep.to_json().dump());
    CHECK(rep.pass);
  }
}

TEST_CASE("killing pair slot identities: x z y = p for all three atoms") {
  double q = 0.5;
  int D = 8;
  auto f = fock::FactorSpace::fock(D);
  auto p = fock::atom_matrix(AtomKind::P, q, f);
  for (AtomKind z : {AtomKind::One, AtomKind::A, AtomKind::Astar}) {
    auto pr = build_killing_pair_slot(z, q, D);
    auto zm = fock::atom_matrix(z, q, f);
    auto prod = fock::mul(fock::mul(pr.x, zm), pr.y);
    CHECK(fock::sub(prod, p).max_abs_entry() <= 1e-12);
  }
  CHECK_THROWS_AS(build_killing_pair_slot(AtomKind::B, q, D), std::invalid_argument);
}

TEST_CASE("killing pair table values") {
  double q = 0.5;
  int D = 6;
  auto pr1 = build_killing_pair_slot(AtomKind::One, q, D);
  CHECK(pr1.x.ents.size() == 1);
  CHECK(pr1.y.ents.size() == 1);
  // z = A: y = (1-q^2)^{-1/2} S* p, a single entry e_0 -> e_1
  auto prA = build_killing_pair_slot(AtomKind::A, q, D);
  CHECK(prA.y.ents.size() == 1);
  CHECK(prA.y.ents[0].r == 1);
  CHECK(prA.y.ents[0].c == 0);
  CHECK(std::abs(prA.y.ents[0].v - fock::cplx(1.0 / std::sqrt(1 - q * q))) < 1e-14);
}

TEST_CASE("killing identity for word representations") {
  // n = 3, k = 2: the lemma holds for every row the representation moves
  for (int s = 1; s <= 3; ++s) {
    auto rep = check_killing(3, 2, s, 0.5, 8, 1e-12);
    INFO(rep.to_json().dump());
    CHECK(rep.pass);
  }
  // n = 4, k = 3, all (j, s) pairs at q = 0.3
  for (int s = 1; s <= 4; ++s) {
    auto rep = check_killing(4, 3, s, 0.3, 6, 1e-12);
    CHECK(rep.pass);
  }
}

TEST_CASE("unitarity follows the truncation-scale bound across q") {
  for (double q : {0.3, 0.5, 0.8}) {
    int D = 12;
    auto rm = symrep::build_rep(make_word({1, 2}, 3), 3, 2, TorusMode::Symbolic);
    auto plan = sampled_plan(3, q, D);
    double bound = 10.0 * std::pow(q, 2 * D) + 1e-12;
    auto rep = check_unitarity(rm, plan, bound);
    INFO(rep.to_json().dump());
    CHECK(rep.pass);
  }
}
