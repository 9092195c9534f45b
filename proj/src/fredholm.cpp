#include "qsk/fredholm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace qsk::fredholm {

using fock::AtomKind;

void FredholmSpec::validate() const {
  if (L < 5 || D < 5) throw std::invalid_argument("window too small");
  if (std::abs(k) > L - 4 || k > D - 4)
    throw std::invalid_argument("level k too close to the truncation boundary");
}

std::vector<FactorSpace> FredholmSpec::shape() const {
  return {FactorSpace::zwindow(L), FactorSpace::fock(D)};
}

nlohmann::ordered_json IndexResult::to_json() const {
  nlohmann::ordered_json j{{"unitary", unitary},
                           {"q", q},
                           {"index", index},
                           {"kernel_dim", kernel_dim},
                           {"cokernel_dim", cokernel_dim},
                           {"smallest_retained_sv", smallest_retained_sv},
                           {"largest_discarded_sv", largest_discarded_sv},
                           {"rank_tol", rank_tol},
                           {"stable", stable}};
  if (!error.empty()) j["error"] = error;
  j["sweep"] = sweep;
  return j;
}

namespace {

// window storage index i = n + L
inline int window_n(int i, int L) { return i - L; }

}  // namespace

SparseOp half_space_projection(const FredholmSpec& spec) {
  auto shape = spec.shape();
  SparseOp p = SparseOp::zero(shape, spec.block);
  std::int64_t base = fock::shape_dim(shape);
  for (int i = 0; i <= 2 * spec.L; ++i)
    for (int m = 0; m < spec.D; ++m) {
      if (window_n(i, spec.L) + m <= spec.k) {
        std::int64_t idx = static_cast<std::int64_t>(i) * spec.D + m;
        for (int b = 0; b < spec.block; ++b) p.ents.push_back({b * base + idx, b * base + idx, 1.0});
      }
    }
  p.canonicalize();
  return p;
}

std::int64_t level_line_count(const FredholmSpec& spec) {
  std::int64_t count = 0;
  for (int i = 0; i <= 2 * spec.L; ++i)
    for (int m = 0; m < spec.D; ++m)
      if (window_n(i, spec.L) + m == spec.k) ++count;
  return count;
}

namespace {

SparseOp window_op(const FredholmSpec& spec, AtomKind torus, AtomKind fockatom, double q) {
  auto shape = spec.shape();
  auto t = fock::SparseOp::from_factor(shape[0], fock::factor_matrix(torus, q, shape[0]));
  auto f = fock::SparseOp::from_factor(shape[1], fock::factor_matrix(fockatom, q, shape[1]));
  auto r = fock::kron({t, f});
  r.shape = shape;
  return r;
}

}  // namespace

SparseOp su2_limit_unitary(const FredholmSpec& spec) {
  double q = 0.5;  // unused by these atoms
  auto a11 = window_op(spec, AtomKind::TorusGen, AtomKind::Shift, q);
  auto a21 = window_op(spec, AtomKind::TorusGenConj, AtomKind::P, q);
  auto a22 = window_op(spec, AtomKind::TorusGenConj, AtomKind::ShiftStar, q);
  auto z = SparseOp::zero(spec.shape());
  return fock::block_matrix({{a11, z}, {a21, a22}});
}

SparseOp su2_fundamental(double q, const FredholmSpec& spec) {
  auto a11 = window_op(spec, AtomKind::TorusGen, AtomKind::A, q);
  auto a12 = window_op(spec, AtomKind::TorusGen, AtomKind::B, q);
  auto a21 = window_op(spec, AtomKind::TorusGenConj, AtomKind::C, q);
  auto a22 = window_op(spec, AtomKind::TorusGenConj, AtomKind::Astar, q);
  return fock::block_matrix({{a11, a12}, {a21, a22}});
}

SparseOp tp_witness(const FredholmSpec& spec) {
  auto tp = window_op(spec, AtomKind::TorusGenConj, AtomKind::P, 0.5);
  auto onep = window_op(spec, AtomKind::One, AtomKind::P, 0.5);
  auto id = SparseOp::identity(spec.shape());
  return fock::add(tp, fock::sub(id, onep));
}

SparseOp su3_phi_image(double q, const FredholmSpec& spec) {
  auto a11 = window_op(spec, AtomKind::TorusGen, AtomKind::A, q);
  auto a12 = window_op(spec, AtomKind::TorusGen, AtomKind::B, q);
  auto a21 = window_op(spec, AtomKind::TorusGenConj, AtomKind::C, q);
  auto a22 = window_op(spec, AtomKind::TorusGenConj, AtomKind::Astar, q);
  auto id = SparseOp::identity(spec.shape());
  auto z = SparseOp::zero(spec.shape());
  return fock::block_matrix({{a11, a12, z}, {a21, a22, z}, {z, z, id}});
}

SparseOp named_unitary(const std::string& name, double q, const FredholmSpec& spec) {
  if (name == "su2-limit") return su2_limit_unitary(spec);
  if (name == "su2-fundamental") return su2_fundamental(q, spec);
  if (name == "t-p") return tp_witness(spec);
  if (name == "su3-fundamental") return su3_phi_image(q, spec);
  if (name == "identity") return SparseOp::identity(spec.shape());
  throw std::invalid_argument("unknown unitary name: " + name);
}

PointIndex point_index(const SparseOp& u, const FredholmSpec& spec, double rank_tol) {
  spec.validate();
  auto shape = spec.shape();
  std::int64_t base = fock::shape_dim(shape);
  if (u.base_dim() != base) throw std::invalid_argument("operator does not live on the spec space");
  int B = u.block;

  // domain: interior window basis inside the half space; codomain: full
  // truncated half-space basis
  std::vector<std::int64_t> dom, cod;
  std::vector<std::int64_t> cod_pos(static_cast<std::size_t>(base) * B, -1);
  for (int i = 0; i <= 2 * spec.L; ++i)
    for (int m = 0; m < spec.D; ++m) {
      int n = window_n(i, spec.L);
      if (n + m > spec.k) continue;
      std::int64_t idx = static_cast<std::int64_t>(i) * spec.D + m;
      for (int b = 0; b < B; ++b) {
        std::int64_t g = b * base + idx;
        cod_pos[g] = static_cast<std::int64_t>(cod.size());
        cod.push_back(g);
      }
      if (std::abs(n) <= spec.L - 2 && m <= spec.D - 2)
        for (int b = 0; b < B; ++b) dom.push_back(b * base + idx);
    }

  auto compress = [&](const SparseOp& w) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(cod.size()),
                                                static_cast<Eigen::Index>(dom.size()));
    std::vector<std::int64_t> dom_pos(static_cast<std::size_t>(base) * B, -1);
    for (std::size_t j = 0; j < dom.size(); ++j) dom_pos[dom[j]] = static_cast<std::int64_t>(j);
    for (const auto& e : w.ents) {
      if (dom_pos[e.c] >= 0 && cod_pos[e.r] >= 0) m(cod_pos[e.r], dom_pos[e.c]) = e.v;
    }
    return m;
  };

  auto small_sv_count = [&](const Eigen::MatrixXcd& m, double* smallest_retained,
                            double* largest_discarded, bool* ambiguous) {
    Eigen::MatrixXcd g = m.adjoint() * m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
    int null_count = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      double sv = std::sqrt(std::max(0.0, es.eigenvalues()[i]));
      if (sv < rank_tol) {
        ++null_count;
        *largest_discarded = std::max(*largest_discarded, sv);
      } else {
        *smallest_retained = std::min(*smallest_retained, sv);
      }
      if (sv > rank_tol / 10.0 && sv < rank_tol * 10.0) *ambiguous = true;
    }
    return null_count;
  };

  PointIndex out;
  out.smallest_retained_sv = 1e300;
  auto m1 = compress(u);
  auto m2 = compress(u.adjoint());
  bool amb = false;
  out.kernel_dim = small_sv_count(m1, &out.smallest_retained_sv, &out.largest_discarded_sv, &amb);
  out.cokernel_dim = small_sv_count(m2, &out.smallest_retained_sv, &out.largest_discarded_sv, &amb);
  out.ambiguous = amb;
  out.index = out.kernel_dim - out.cokernel_dim;
  if (out.smallest_retained_sv > 1e299) out.smallest_retained_sv = 0.0;

  // Fedosov-style cross-check: ||(1-P)uP||_HS^2 - ||(1-P)u*P||_HS^2
  {
    FredholmSpec pspec = spec;
    pspec.block = B;
    auto Pb = half_space_projection(pspec);  // block-diagonal already
    auto up = fock::mul(u, Pb);
    auto cross1 = fock::sub(up, fock::mul(Pb, up));          // (1-P) u P
    auto up2 = fock::mul(u.adjoint(), Pb);
    auto cross2 = fock::sub(up2, fock::mul(Pb, up2));        // (1-P) u* P
    double h1 = 0.0, h2 = 0.0;
    for (const auto& e : cross1.ents) h1 += std::norm(e.v);
    for (const auto& e : cross2.ents) h2 += std::norm(e.v);
    out.trace_formula = h1 - h2;
  }
  return out;
}

IndexResult index_pairing(const std::string& name, double q, const FredholmSpec& spec,
                          double rank_tol) {
  IndexResult out;
  out.unitary = name;
  out.q = q;
  out.rank_tol = rank_tol;
  out.sweep = nlohmann::ordered_json::array();

  std::vector<int> windows{spec.L, spec.L - 4};
  std::vector<int> levels{spec.k - 1, spec.k, spec.k + 1};
  bool first = true;
  bool all_same = true;
  try {
    for (int L : windows)
      for (int k : levels) {
        FredholmSpec s = spec;
        s.L = L;
        s.D = spec.D - (spec.L - L);
        s.k = k;
        s.validate();
        auto u = named_unitary(name, q, s);
        auto pt = point_index(u, s, rank_tol);
        if (pt.ambiguous) {
          out.error = "singular value within a factor 10 of the rank tolerance";
          out.stable = false;
        }
        nlohmann::ordered_json rec{{"L", s.L},
                                   {"D", s.D},
                                   {"k", s.k},
                                   {"index", pt.index},
                                   {"kernel_dim", pt.kernel_dim},
                                   {"cokernel_dim", pt.cokernel_dim},
                                   {"smallest_retained_sv", pt.smallest_retained_sv},
                                   {"largest_discarded_sv", pt.largest_discarded_sv},
                                   {"trace_formula", pt.trace_formula}};
        out.sweep.push_back(rec);
        if (first) {
          out.index = pt.index;
          out.kernel_dim = pt.kernel_dim;
          out.cokernel_dim = pt.cokernel_dim;
          out.smallest_retained_sv = pt.smallest_retained_sv;
          out.largest_discarded_sv = pt.largest_discarded_sv;
          first = false;
        } else if (pt.index != out.index) {
          all_same = false;
        }
        if (s.L == spec.L && s.k == spec.k) {
          out.kernel_dim = pt.kernel_dim;
          out.cokernel_dim = pt.cokernel_dim;
          out.smallest_retained_sv = pt.smallest_retained_sv;
          out.largest_discarded_sv = pt.largest_discarded_sv;
        }
      }
  } catch (const std::exception& ex) {
    out.error = ex.what();
    out.stable = false;
    return out;
  }
  out.stable = out.error.empty() && all_same;
  return out;
}

symrep::RepMatrix phi_su3(const symrep::RepMatrix& rm) {
  if (rm.n != 3 || rm.slots() != 3)
    throw std::invalid_argument("phi_su3 expects the three-slot representation of degree 3");
  if (!(rm.word.letters == std::vector<int>{1, 2, 1}))
    throw std::invalid_argument("phi_su3 expects the word (1,2,1)");
  auto c1 = symrep::sigma_contract(rm, 2);
  auto c2 = symrep::sigma_contract(c1, 1);
  // evaluate the first torus coordinate at 1
  symrep::RepMatrix out = c2;
  for (auto& ps : out.entries) {
    symrep::PathSum next = symrep::PathSum::zero(ps.degree, ps.slots);
    for (const auto& [key, c] : ps.terms) {
      symrep::TorusMonomial m = key.second;
      m.e[0] = 0;
      next.add_term(key.first, m, c);
    }
    ps = next;
  }
  return out;
}

std::string phi_su3_verify(const symrep::RepMatrix& con) {
  auto expect_atom = [&](int r, int s) -> AtomKind {
    if (r <= 2 && s <= 2) {
      if (r == 1 && s == 1) return AtomKind::A;
      if (r == 1 && s == 2) return AtomKind::B;
      if (r == 2 && s == 1) return AtomKind::C;
      return AtomKind::Astar;
    }
    return r == s ? AtomKind::One : AtomKind::Zero;
  };
  auto expect_t2 = [&](int r) { return r == 1 ? -1 : (r == 2 ? 1 : 0); };
  for (int r = 1; r <= 3; ++r)
    for (int s = 1; s <= 3; ++s) {
      const auto& ps = con.at(r, s);
      AtomKind ea = expect_atom(r, s);
      if (ea == AtomKind::Zero) {
        if (!ps.is_zero()) return "unexpected nonzero entry";
        continue;
      }
      if (ps.terms.size() != 1) return "entry is not a single term";
      const auto& [key, c] = *ps.terms.begin();
      if (key.first != std::vector<AtomKind>{ea}) return "wrong atom";
      if (key.second.e[0] != 0) return "first torus coordinate not evaluated";
      if (r <= 2 && key.second.e[1] != expect_t2(r)) return "wrong torus weight";
      if (r == 3 && key.second.e[1] != 0) return "wrong torus weight on the fixed row";
      if (std::abs(c.z - cplx(1.0)) > 1e-14 || c.q_power != 0) return "wrong coefficient";
    }
  return "";
}

IndexResult su3_nontriviality(double q, const FredholmSpec& spec, double rank_tol) {
  // verify the symbolic contraction before pairing the materialized image
  auto w = coxeter::omega_word(3, 2, 3);
  auto rm = symrep::build_rep(w, 3, 2, symrep::TorusMode::Symbolic);
  auto con = phi_su3(rm);
  auto why = phi_su3_verify(con);
  IndexResult out;
  if (!why.empty()) {
    out.unitary = "su3-fundamental";
    out.q = q;
    out.error = "symbolic quotient image mismatch: " + why;
    out.stable = false;
    return out;
  }
  out = index_pairing("su3-fundamental", q, spec, rank_tol);
  return out;
}

}  // namespace qsk::fredholm
