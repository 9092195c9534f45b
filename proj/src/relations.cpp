#include "qsk/relations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace qsk::relations {

using fock::AtomKind;
using fock::FactorSpace;
using fock::TensorSumOp;
using symrep::PathSum;
using symrep::TorusMode;

int ETensor::tuple_length(const std::vector<int>& idx) {
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      if (idx[a] == idx[b]) return -1;
  int inv = 0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      if (idx[a] > idx[b]) ++inv;
  return inv;
}

double ETensor::value(const std::vector<int>& idx) const {
  int l = tuple_length(idx);
  if (l < 0) return 0.0;
  return std::pow(-q, l);
}

double ResidualReport::max_residual() const {
  double m = 0.0;
  for (const auto& [k, v] : residuals) m = std::max(m, v);
  return m;
}

void ResidualReport::finish() { pass = error.empty() && max_residual() <= tolerance; }

nlohmann::ordered_json ResidualReport::to_json() const {
  nlohmann::ordered_json res = nlohmann::ordered_json::object();
  for (const auto& [k, v] : residuals) res[k] = v;
  nlohmann::ordered_json j{{"check", check_name},
                           {"params", params},
                           {"residuals", res},
                           {"tolerance", tolerance},
                           {"pass", pass}};
  if (!error.empty()) j["error"] = error;
  return j;
}

std::vector<FactorSpace> MaterializePlan::shape_for(int slots) const {
  std::vector<FactorSpace> shape;
  for (int i = 0; i < n_torus; ++i) shape.push_back(FactorSpace::zcyclic(M));
  for (int i = 0; i < slots; ++i) shape.push_back(FactorSpace::fock(D));
  return shape;
}

std::vector<std::vector<cplx>> torus_samples(int n, std::uint64_t seed) {
  std::vector<std::vector<cplx>> out;
  const double pi = 3.14159265358979323846;
  // one 8th-roots grid point
  std::vector<cplx> grid(n - 1);
  for (int j = 0; j < n - 1; ++j) {
    double th = 2.0 * pi * ((j % 8) + 1) / 8.0;
    grid[j] = {std::cos(th), std::sin(th)};
  }
  out.push_back(grid);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * pi);
  for (int k = 0; k < 3; ++k) {
    std::vector<cplx> t(n - 1);
    for (int j = 0; j < n - 1; ++j) {
      double th = uni(rng);
      t[j] = {std::cos(th), std::sin(th)};
    }
    out.push_back(t);
  }
  return out;
}

namespace {

struct LazyEntries {
  std::vector<TensorSumOp> ops;  // n*n, row major; empty shape ok
  int n = 0;
  const TensorSumOp& at(int r, int s) const { return ops[(r - 1) * n + (s - 1)]; }
};

LazyEntries materialize_all_lazy(const RepMatrix& rm, const MaterializePlan& plan) {
  LazyEntries le;
  le.n = rm.n;
  auto shape = plan.shape_for(rm.slots());
  const std::vector<cplx>* ts = plan.n_torus == 0 ? &plan.t_sample : nullptr;
  for (int r = 1; r <= rm.n; ++r)
    for (int s = 1; s <= rm.n; ++s)
      le.ops.push_back(symrep::materialize_lazy(rm.at(r, s), plan.q, shape, plan.n_torus, ts));
  return le;
}

}  // namespace

ResidualReport check_unitarity(const RepMatrix& rm, const MaterializePlan& plan,
                               double tolerance) {
  ResidualReport rep;
  rep.check_name = "unitarity";
  rep.params = {{"n", rm.n},
                {"q", plan.q},
                {"D", plan.D},
                {"word", coxeter::word_to_string(rm.word)},
                {"torus", plan.n_torus > 0 ? "cyclic" : "sampled"}};
  rep.tolerance = tolerance;

  int n = rm.n;
  auto le = materialize_all_lazy(rm, plan);
  auto shape = plan.shape_for(rm.slots());
  auto mask = fock::interior_mask(shape);

  for (int i = 1; i <= n; ++i)
    for (int j = i; j <= n; ++j) {
      // rows: sum_k U_{ik} U_{jk}* - delta_{ij}
      {
        std::vector<fock::OpAdjoint> adj;
        std::vector<fock::OpChain> prods;
        adj.reserve(n);
        prods.reserve(n);
        for (int k = 1; k <= n; ++k) adj.emplace_back(le.at(j, k));
        for (int k = 1; k <= n; ++k) prods.emplace_back(le.at(i, k), adj[k - 1]);
        fock::OpSum sum;
        for (int k = 0; k < n; ++k) sum.add_part(prods[k]);
        fock::OpShift shifted(sum, i == j ? cplx(-1.0) : cplx(0.0));
        fock::MaskedOp masked(shifted, mask);
        rep.residuals.emplace_back(
            "row:" + std::to_string(i) + "," + std::to_string(j), fock::residual_norm(masked));
      }
      // columns: sum_k U_{ki}* U_{kj} - delta_{ij}
      {
        std::vector<fock::OpAdjoint> adj;
        std::vector<fock::OpChain> prods;
        adj.reserve(n);
        prods.reserve(n);
        for (int k = 1; k <= n; ++k) adj.emplace_back(le.at(k, i));
        for (int k = 1; k <= n; ++k) prods.emplace_back(adj[k - 1], le.at(k, j));
        fock::OpSum sum;
        for (int k = 0; k < n; ++k) sum.add_part(prods[k]);
        fock::OpShift shifted(sum, i == j ? cplx(-1.0) : cplx(0.0));
        fock::MaskedOp masked(shifted, mask);
        rep.residuals.emplace_back(
            "col:" + std::to_string(i) + "," + std::to_string(j), fock::residual_norm(masked));
      }
    }
  rep.finish();
  return rep;
}

ResidualReport check_determinant(const RepMatrix& rm, const MaterializePlan& plan,
                                 double tolerance) {
  ResidualReport rep;
  rep.check_name = "q-determinant";
  rep.params = {{"n", rm.n},
                {"q", plan.q},
                {"D", plan.D},
                {"word", coxeter::word_to_string(rm.word)},
                {"torus", plan.n_torus > 0 ? "cyclic" : "sampled"}};
  rep.tolerance = tolerance;

  int n = rm.n;
  if (n > 4) {
    rep.error = "q-determinant check limited to n <= 4";
    rep.finish();
    return rep;
  }
  ETensor E{n, plan.q};
  auto shape = plan.shape_for(rm.slots());
  const std::vector<cplx>* ts = plan.n_torus == 0 ? &plan.t_sample : nullptr;
  std::vector<SparseOp> mats(static_cast<std::size_t>(n) * n);
  for (int r = 1; r <= n; ++r)
    for (int s = 1; s <= n; ++s)
      mats[(r - 1) * n + (s - 1)] =
          symrep::materialize(rm.at(r, s), plan.q, shape, plan.n_torus, ts);
  auto id = SparseOp::identity(shape);

  // all distinct target tuples plus a fixed sample of repeating ones
  std::vector<std::vector<int>> targets;
  {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 1);
    do targets.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));
    std::vector<int> rep1(n, 1);
    targets.push_back(rep1);
    if (n >= 2) {
      std::vector<int> rep2(n, 2);
      rep2[0] = 1;
      rep2[1] = 2;
      for (int i = 2; i < n; ++i) rep2[i] = 2;
      targets.push_back(rep2);
    }
  }

  for (const auto& jt : targets) {
    SparseOp acc = SparseOp::zero(shape);
    std::vector<int> it(n, 1);
    while (true) {
      double e = E.value(it);
      if (e != 0.0) {
        SparseOp prod = mats[(jt[0] - 1) * n + (it[0] - 1)];
        bool dead = prod.ents.empty();
        for (int a = 1; a < n && !dead; ++a) {
          prod = fock::mul(prod, mats[(jt[a] - 1) * n + (it[a] - 1)]);
          dead = prod.ents.empty();
        }
        if (!dead) acc = fock::add(acc, prod.scaled(e));
      }
      int carry = n - 1;
      while (carry >= 0 && ++it[carry] > n) it[carry--] = 1;
      if (carry < 0) break;
    }
    SparseOp expect = id.scaled(E.value(jt));
    std::string label;
    for (int a = 0; a < n; ++a) label += std::to_string(jt[a]);
    rep.residuals.emplace_back("target:" + label, fock::interior_diff_norm(acc, expect));
  }
  rep.finish();
  return rep;
}

ResidualReport check_compact_lemma(int n, int k, double q, int D, int M, double tolerance) {
  ResidualReport rep;
  rep.check_name = "compact-ideal";
  rep.params = {{"n", n}, {"k", k}, {"q", q}, {"D", D}, {"M", M}};
  rep.tolerance = tolerance;
  if (n < 3 || k < 1 || k > n - 1) {
    rep.error = "parameter out of range";
    rep.finish();
    return rep;
  }

  // chi_{w(n-1,n-k)} for the m = 1 quotient
  auto w = coxeter::omega_range_word(n, n - 1, n - k);
  auto chi = symrep::build_rep(w, n, 1, TorusMode::Symbolic);
  std::vector<FactorSpace> lshape;
  lshape.push_back(FactorSpace::zcyclic(M));
  for (int i = 0; i < k; ++i) lshape.push_back(FactorSpace::fock(D));

  // pi_{w(n-2,n-k)} over degree n-1 (plain, no torus weight)
  coxeter::ReducedWord w2;
  w2.n = n - 1;
  for (int l = n - 2; l >= n - k; --l) w2.letters.push_back(l);
  auto pi2 = symrep::build_rep(w2, n - 1, 1, TorusMode::Plain);
  std::vector<FactorSpace> rshape(lshape.begin() + 2, lshape.end());  // k-1 fock factors

  auto t1 = SparseOp::from_factor(lshape[0], fock::torus_power(lshape[0], 1));
  auto pmat = fock::atom_matrix(AtomKind::P, q, FactorSpace::fock(D));

  // 1 x p x 1...1 on the left-hand shape
  std::vector<SparseOp> projf{SparseOp::identity({lshape[0]}), pmat};
  for (int i = 0; i < k - 1; ++i) projf.push_back(SparseOp::identity({FactorSpace::fock(D)}));
  auto proj = fock::kron(projf);
  proj.shape = lshape;

  for (int s = 1; s <= n - 1; ++s) {
    auto lhs = fock::mul(proj, symrep::materialize(chi.at(n, s), q, lshape, 1));
    SparseOp rhs;
    if (k == 1) {
      // the remaining factor is the scalar delta_{n-1,s}
      rhs = fock::kron({t1, pmat}).scaled(s == n - 1 ? 1.0 : 0.0);
    } else {
      auto right = symrep::materialize(pi2.at(n - 1, s), q, rshape, 0);
      if (right.ents.empty()) {
        rhs = SparseOp::zero(lshape);
      } else {
        rhs = fock::kron({t1, pmat, right});
      }
    }
    rhs.shape = lshape;
    auto diff = fock::sub(lhs, rhs);
    rep.residuals.emplace_back("s:" + std::to_string(s), diff.max_abs_entry());
  }
  rep.finish();
  return rep;
}

KillingPair build_killing_pair_slot(AtomKind z, double q, int D) {
  auto f = FactorSpace::fock(D);
  auto p = fock::atom_matrix(AtomKind::P, q, f);
  auto S = fock::atom_matrix(AtomKind::Shift, q, f);
  double c = 1.0 / std::sqrt(1.0 - q * q);
  switch (z) {
    case AtomKind::One:
      return {p, p};
    case AtomKind::A:
      return {p, fock::mul(S.adjoint(), p).scaled(c)};
    case AtomKind::Astar:
      return {fock::mul(p, S).scaled(c), p};
    default:
      throw std::invalid_argument("diagonal slot atom not in {1, A, A*}");
  }
}

ResidualReport check_killing(int n, int k, int s, double q, int D, double tolerance) {
  ResidualReport rep;
  rep.check_name = "killing";
  rep.params = {{"n", n}, {"k", k}, {"s", s}, {"q", q}, {"D", D}};
  rep.tolerance = tolerance;
  if (n < 2 || k < 1 || k > n - 1 || s < 1 || s > n) {
    rep.error = "parameter out of range";
    rep.finish();
    return rep;
  }

  auto w = coxeter::omega_range_word(n, n - 1, n - k);
  auto pi = symrep::build_rep(w, n, 1, TorusMode::Plain);
  auto shape = std::vector<FactorSpace>(k, FactorSpace::fock(D));

  // diagonal decomposition z_1 x ... x z_k of pi(u_ss)
  const PathSum& diag = pi.at(s, s);
  if (diag.terms.size() != 1) {
    rep.error = "diagonal entry is not a single elementary tensor";
    rep.finish();
    return rep;
  }
  const auto& z = diag.terms.begin()->first.first;
  std::vector<SparseOp> xs, ys;
  for (AtomKind a : z) {
    auto pr = build_killing_pair_slot(a, q, D);
    xs.push_back(pr.x);
    ys.push_back(pr.y);
  }
  auto x = fock::kron(xs);
  auto y = fock::kron(ys);
  x.shape = shape;
  y.shape = shape;

  std::vector<SparseOp> ps(k, fock::atom_matrix(AtomKind::P, q, FactorSpace::fock(D)));
  auto ptensor = fock::kron(ps);
  ptensor.shape = shape;

  for (int j = std::max(1, n - k); j <= n; ++j) {
    auto u = symrep::materialize(pi.at(j, s), q, shape, 0);
    auto lhs = fock::mul(fock::mul(x, u), y);
    auto rhs = j == s ? ptensor : SparseOp::zero(shape);
    auto diffop = fock::compress_interior(fock::sub(lhs, rhs));
    rep.residuals.emplace_back("j:" + std::to_string(j), diffop.max_abs_entry());
  }
  rep.finish();
  return rep;
}

bool etensor_poincare_check(int n, double q, double* lhs_out, double* rhs_out) {
  double lhs = 0.0;
  for (const auto& p : coxeter::all_perms(n))
    lhs += std::pow(q, 2 * coxeter::perm_length(p));
  double rhs = 1.0;
  for (int i = 1; i <= n; ++i) {
    double geo = 0.0;
    for (int j = 0; j < i; ++j) geo += std::pow(q, 2 * j);
    rhs *= geo;
  }
  if (lhs_out) *lhs_out = lhs;
  if (rhs_out) *rhs_out = rhs;
  return std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs));
}

}  // namespace qsk::relations
