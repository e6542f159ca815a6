#pragma once

// Derived-level invariants of resolved complexes: base change against the
// small test modules, induced maps on homology, HKh, and the exact GF(2)
// homotopy solver used for every homotopy-level certification.

#include "khb/resolution.hpp"

namespace khb {

enum class TestModule {
  trivial_f,   // R_X /({x}) = F: kill every color
  fx_mod_x2,   // F[X]/X^2 with every color acting as X
  r_itself     // identity base change
};

// A collapsed resolved complex. Generators: (base gen, s, xi) where s is
// absent for trivial_f (always 0) and s in {1 = 0, X = 1} for fx_mod_x2.
struct CollapsedComplex {
  TestModule mod;
  std::shared_ptr<const ResolvedComplex> rc;
  BigradedComplex cx;
  std::size_t s_count = 1;

  std::size_t index(std::size_t cgen, std::size_t s, std::size_t xi) const {
    return (cgen * s_count + s) * rc->n_xi() + xi;
  }
  struct Parts {
    std::size_t cgen, s, xi;
  };
  Parts parts(std::size_t idx) const {
    Parts p;
    p.xi = idx % rc->n_xi();
    idx /= rc->n_xi();
    p.s = idx % s_count;
    p.cgen = idx / s_count;
    return p;
  }
  int weight(std::size_t idx) const {
    int w = 0;
    for (int v : rc->xi_monomials[parts(idx).xi]) w += v;
    return w;
  }
};

// image of a square-free monomial under the collapse: returns the s-value
// or nothing when the monomial dies.
inline std::optional<std::size_t> collapse_monomial(TestModule mod, std::size_t rmask,
                                                    std::size_t s) {
  int deg = __builtin_popcountll(rmask);
  switch (mod) {
    case TestModule::trivial_f:
      return deg == 0 ? std::optional<std::size_t>(0) : std::nullopt;
    case TestModule::fx_mod_x2: {
      std::size_t total = deg + s;
      return total <= 1 ? std::optional<std::size_t>(total) : std::nullopt;
    }
    case TestModule::r_itself:
      throw std::logic_error("collapse_monomial: identity collapse handled elsewhere");
  }
  return std::nullopt;
}

inline CollapsedComplex collapse(std::shared_ptr<const ResolvedComplex> rc,
                                 TestModule mod) {
  if (mod == TestModule::r_itself)
    throw std::invalid_argument("collapse: use the resolved complex directly");
  CollapsedComplex cc;
  cc.mod = mod;
  cc.rc = rc;
  cc.s_count = mod == TestModule::fx_mod_x2 ? 2 : 1;
  const std::size_t total = rc->base->dim() * cc.s_count * rc->n_xi();
  cc.cx.gens.resize(total);
  for (std::size_t g = 0; g < rc->base->dim(); ++g)
    for (std::size_t s = 0; s < cc.s_count; ++s)
      for (std::size_t x = 0; x < rc->n_xi(); ++x) {
        int w = 0;
        for (int v : rc->xi_monomials[x]) w += v;
        const Bidegree& bg = rc->base->base.gens[g];
        cc.cx.gens[cc.index(g, s, x)] =
            Bidegree{bg.h - w, bg.q - 2 * int(s) - 2 * w};
      }
  cc.cx.d = F2Matrix(total, total);
  // base-change the differential through its values on the r = 1 slab
  F2Matrix dt = rc->cx.d.transposed();
  for (std::size_t g = 0; g < rc->base->dim(); ++g)
    for (std::size_t x = 0; x < rc->n_xi(); ++x) {
      std::size_t src_res = rc->index(g, 0, x);
      for (Index t : dt.row(src_res)) {
        auto p = rc->parts(t);
        for (std::size_t s = 0; s < cc.s_count; ++s) {
          auto s2 = collapse_monomial(mod, p.rmask, s);
          if (!s2) continue;
          cc.cx.d.toggle(cc.index(p.cgen, *s2, p.xi), cc.index(g, s, x));
        }
      }
    }
  return cc;
}

// base change of an R_X-linear map between resolutions (same colors).
inline ChainMap collapse_map(const CollapsedComplex& ca, const CollapsedComplex& cb,
                             const ChainMap& f) {
  const ResolvedComplex& ra = *ca.rc;
  ChainMap out = ChainMap::zero(ca.cx, cb.cx, f.deg);
  F2Matrix ft = f.matrix.transposed();
  for (std::size_t g = 0; g < ra.base->dim(); ++g)
    for (std::size_t x = 0; x < ra.n_xi(); ++x) {
      std::size_t src_res = ra.index(g, 0, x);
      for (Index t : ft.row(src_res)) {
        auto p = cb.rc->parts(t);
        for (std::size_t s = 0; s < ca.s_count; ++s) {
          auto s2 = collapse_monomial(ca.mod, p.rmask, s);
          if (!s2) continue;
          out.matrix.toggle(cb.index(p.cgen, *s2, p.xi), ca.index(g, s, x));
        }
      }
    }
  return out;
}

// ranks of the map induced on homology, keyed by source bigrading.
struct InducedMap {
  std::map<std::pair<int, int>, F2Matrix> blocks;
  RankTable source_table, target_table;

  std::size_t rank_at(std::pair<int, int> hq) const {
    auto it = blocks.find(hq);
    return it == blocks.end() ? 0 : rank(it->second);
  }
  bool is_zero() const {
    for (auto& [hq, m] : blocks)
      if (!m.is_zero()) return false;
    return true;
  }
};

inline InducedMap induced_map(const CollapsedComplex& ca, const CollapsedComplex& cb,
                              const ChainMap& f_resolved) {
  ChainMap g = collapse_map(ca, cb, f_resolved);
  if (!g.check_chain_map())
    throw std::logic_error("induced_map: collapsed map is not a chain map");
  HomologyBasis hs(ca.cx), ht(cb.cx);
  InducedMap out;
  out.blocks = induced_on_homology(g, hs, ht);
  out.source_table = hs.table();
  out.target_table = ht.table();
  return out;
}

// --- HKh -----------------------------------------------------------------

// entry keyed by (h, q, xi-weight)
using HkhTable = std::map<std::tuple<int, int, int>, std::size_t>;

// split a weight-homogeneous collapsed complex into per-weight complexes.
inline std::map<int, std::pair<BigradedComplex, std::vector<Index>>> split_by_weight(
    const CollapsedComplex& cc) {
  std::map<int, std::vector<Index>> slabs;
  for (std::size_t i = 0; i < cc.cx.dim(); ++i) slabs[cc.weight(i)].push_back(Index(i));
  std::map<int, std::pair<BigradedComplex, std::vector<Index>>> out;
  for (auto& [w, idx] : slabs) {
    BigradedComplex sub;
    std::map<Index, Index> pos;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      sub.gens.push_back(cc.cx.gens[idx[k]]);
      pos[idx[k]] = Index(k);
    }
    sub.d = F2Matrix(idx.size(), idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k)
      for (Index j : cc.cx.d.row(idx[k])) {
        auto it = pos.find(j);
        if (it == pos.end())
          throw std::logic_error("split_by_weight: differential mixes weights");
        sub.d.toggle(k, it->second);
      }
    out[w] = {std::move(sub), idx};
  }
  return out;
}

// HKh of a basepoint-free diagram: ranks of Kh (x) Xi per xi-weight on the
// truncation. The collapsed differential is weight-preserving here, so the
// table is exact for every weight <= depth.
inline HkhTable hkh(const PointedDiagram& d, int depth,
                    const std::string& color = "x") {
  if (!d.basepoints.empty())
    throw std::invalid_argument("hkh: diagram has basepoints");
  PointedDiagram dd = d;
  dd.colors = {color};
  auto cube = std::make_shared<CubeComplex>(build_cube(dd));
  auto rc = std::make_shared<ResolvedComplex>(resolve_cube(cube, depth));
  CollapsedComplex cc = collapse(rc, TestModule::trivial_f);
  HkhTable table;
  for (auto& [w, sub] : split_by_weight(cc))
    for (auto& [hq, dim] : homology(sub.first))
      table[{hq.first, hq.second, w}] = dim;
  return table;
}

// --- the homotopy solver ---------------------------------------------------

struct HomotopyCertificate {
  F2Matrix h;       // d h + h d = f + g
  bool rx_linear;   // h commutes with every color action
};

// Solve d_t h + h d_s = f + g for h of bidegree (f.deg.h - 1, f.deg.q),
// optionally demanding R_X-linearity of h. The system is finite and exact,
// so absence of a certificate disproves the homotopy relation (for the
// R_X-linear variant: disproves R_X-linear homotopy).
inline std::optional<HomotopyCertificate> homotopy_solver(
    const BigradedComplex& src, const BigradedComplex& tgt, const ChainMap& f,
    const ChainMap& g, const std::vector<const F2Matrix*>& rho_src = {},
    const std::vector<const F2Matrix*>& rho_tgt = {}) {
  if (!(f.deg == g.deg)) throw std::invalid_argument("homotopy_solver: degree mismatch");
  bool want_linear = !rho_src.empty();
  if (rho_src.size() != rho_tgt.size())
    throw std::invalid_argument("homotopy_solver: action count mismatch");
  Bidegree hdeg{f.deg.h - 1, f.deg.q};
  // unknowns: entries (t, s) with tgt[t].deg = src[s].deg + hdeg
  std::map<std::pair<Index, Index>, std::size_t> var;
  std::vector<std::pair<Index, Index>> vars;
  for (std::size_t t = 0; t < tgt.dim(); ++t)
    for (std::size_t s = 0; s < src.dim(); ++s)
      if (tgt.gens[t].h == src.gens[s].h + hdeg.h &&
          tgt.gens[t].q == src.gens[s].q + hdeg.q) {
        var[{Index(t), Index(s)}] = vars.size();
        vars.push_back({Index(t), Index(s)});
      }
  std::vector<std::vector<Index>> rows;
  std::vector<Index> rhs_rows;  // rows of the augmented system with rhs 1
  F2Matrix fg = f.matrix + g.matrix;
  F2Matrix dt_t = tgt.d.transposed();
  F2Matrix ds = src.d;
  // equation block (T,S): sum_t d_t[T][t] h[t][S] + sum_s h[T][s] d_s[s][S]
  auto add_equations = [&](const F2Matrix& left, const F2Matrix& right,
                           const F2Matrix* rhs, Bidegree eqdeg) {
    // left: tgt x tgt acting after h; right: src x src acting before h.
    // Equations indexed by (T, S) with tgt[T].deg = src[S].deg + eqdeg.
    F2Matrix leftT = left.transposed();
    F2Matrix rightT = right.transposed();
    for (std::size_t T = 0; T < tgt.dim(); ++T)
      for (std::size_t S = 0; S < src.dim(); ++S) {
        if (tgt.gens[T].h != src.gens[S].h + eqdeg.h ||
            tgt.gens[T].q != src.gens[S].q + eqdeg.q)
          continue;
        std::vector<Index> row;
        for (Index t : left.row(T)) {
          auto it = var.find({t, Index(S)});
          if (it != var.end()) row.push_back(Index(it->second));
        }
        for (Index s : rightT.row(S)) {
          auto it = var.find({Index(T), s});
          if (it != var.end()) row.push_back(Index(it->second));
        }
        std::sort(row.begin(), row.end());
        // cancel duplicates mod 2
        std::vector<Index> red;
        for (std::size_t i = 0; i < row.size();) {
          std::size_t j = i;
          while (j < row.size() && row[j] == row[i]) ++j;
          if ((j - i) & 1) red.push_back(row[i]);
          i = j;
        }
        bool rv = rhs && rhs->get(T, S);
        if (red.empty() && !rv) continue;
        rows.push_back(std::move(red));
        if (rv) rhs_rows.push_back(Index(rows.size() - 1));
      }
  };
  add_equations(tgt.d, src.d, &fg, f.deg);
  if (want_linear)
    for (std::size_t k = 0; k < rho_src.size(); ++k)
      add_equations(*rho_tgt[k], *rho_src[k], nullptr, {hdeg.h, hdeg.q - 2});
  F2Matrix a(rows.size(), vars.size());
  F2Matrix b(rows.size(), 1);
  for (std::size_t r = 0; r < rows.size(); ++r) a.set_row(r, std::move(rows[r]));
  for (Index r : rhs_rows) b.toggle(r, 0);
  auto sol = solve(a, b);
  if (!sol) return std::nullopt;
  HomotopyCertificate cert;
  cert.h = F2Matrix(tgt.dim(), src.dim());
  for (std::size_t v = 0; v < vars.size(); ++v)
    if (sol->get(v, 0)) cert.h.toggle(vars[v].first, vars[v].second);
  cert.rx_linear = want_linear;
  // exact re-check
  if (!(tgt.d * cert.h + cert.h * src.d == fg))
    throw std::logic_error("homotopy_solver: certificate re-check failed");
  return cert;
}

inline std::optional<HomotopyCertificate> homotopic_resolved(
    const ResolvedComplex& ra, const ResolvedComplex& rb, const ChainMap& f,
    const ChainMap& g, bool rx_linear) {
  std::vector<const F2Matrix*> rs, rt;
  if (rx_linear)
    for (std::size_t i = 0; i < ra.colors.size(); ++i) {
      rs.push_back(&ra.color_ops[i].matrix);
      rt.push_back(&rb.color_ops[i].matrix);
    }
  return homotopy_solver(ra.cx, rb.cx, f, g, rs, rt);
}

// Search for a two-sided homotopy inverse of an R-linear chain map
// F: A -> B: unknown G: B -> A (R-linear chain map) and homotopies hA, hB
// (R-linear when rx_linear) with GF + id = [d,hA], FG + id = [d,hB].
// All constraints are linear over GF(2), so this is one exact solve.
struct EquivalenceCertificate {
  F2Matrix g, ha, hb;
};

inline std::optional<EquivalenceCertificate> homotopy_inverse_search(
    const BigradedComplex& A, const BigradedComplex& B, const F2Matrix& F,
    const std::vector<const F2Matrix*>& rho_a, const std::vector<const F2Matrix*>& rho_b,
    Bidegree fdeg = {0, 0}) {
  // unknowns: G entries (B->A, bidegree -fdeg), hA (A->A, (-1,0)-fdeg...)
  // Assemble one big sparse system by brute enumeration.
  struct Var {
    int kind;  // 0 = G, 1 = hA, 2 = hB
    Index t, s;
  };
  std::vector<Var> vars;
  std::map<std::tuple<int, Index, Index>, std::size_t> vindex;
  auto add_vars = [&](int kind, const BigradedComplex& tgt, const BigradedComplex& src,
                      Bidegree deg) {
    for (std::size_t t = 0; t < tgt.dim(); ++t)
      for (std::size_t s = 0; s < src.dim(); ++s)
        if (tgt.gens[t].h == src.gens[s].h + deg.h &&
            tgt.gens[t].q == src.gens[s].q + deg.q) {
          vindex[{kind, Index(t), Index(s)}] = vars.size();
          vars.push_back({kind, Index(t), Index(s)});
        }
  };
  Bidegree gdeg{-fdeg.h, -fdeg.q};
  add_vars(0, A, B, gdeg);
  add_vars(1, A, A, {-1, 0});
  add_vars(2, B, B, {-1, 0});
  std::vector<std::vector<Index>> rows;
  std::vector<bool> rhs;
  auto push_row = [&](std::vector<Index> row, bool r) {
    std::sort(row.begin(), row.end());
    std::vector<Index> red;
    for (std::size_t i = 0; i < row.size();) {
      std::size_t j = i;
      while (j < row.size() && row[j] == row[i]) ++j;
      if ((j - i) & 1) red.push_back(row[i]);
      i = j;
    }
    if (red.empty() && !r) return;
    rows.push_back(std::move(red));
    rhs.push_back(r);
  };
  auto var_of = [&](int kind, Index t, Index s) -> std::optional<std::size_t> {
    auto it = vindex.find({kind, t, s});
    if (it == vindex.end()) return std::nullopt;
    return it->second;
  };
  F2Matrix dAt = A.d.transposed(), dBt = B.d.transposed(), Ft = F.transposed();
  // (1) G chain map: dA G + G dB = 0 : block (T in A, S in B)
  for (std::size_t T = 0; T < A.dim(); ++T)
    for (std::size_t S = 0; S < B.dim(); ++S) {
      if (A.gens[T].h != B.gens[S].h + gdeg.h + 1 ||
          A.gens[T].q != B.gens[S].q + gdeg.q)
        continue;
      std::vector<Index> row;
      for (Index t : A.d.row(T))
        if (auto v = var_of(0, t, Index(S))) row.push_back(Index(*v));
      for (Index s : dBt.row(S))
        if (auto v = var_of(0, Index(T), s)) row.push_back(Index(*v));
      push_row(std::move(row), false);
    }
  // (2) G R-linear: rhoA G + G rhoB = 0
  for (std::size_t k = 0; k < rho_a.size(); ++k) {
    F2Matrix rbT = rho_b[k]->transposed();
    for (std::size_t T = 0; T < A.dim(); ++T)
      for (std::size_t S = 0; S < B.dim(); ++S) {
        if (A.gens[T].h != B.gens[S].h + gdeg.h ||
            A.gens[T].q != B.gens[S].q + gdeg.q - 2)
          continue;
        std::vector<Index> row;
        for (Index t : rho_a[k]->row(T))
          if (auto v = var_of(0, t, Index(S))) row.push_back(Index(*v));
        for (Index s : rbT.row(S))
          if (auto v = var_of(0, Index(T), s)) row.push_back(Index(*v));
        push_row(std::move(row), false);
      }
  }
  // (3) GF + id = dA hA + hA dA : block (T, S in A)
  for (std::size_t T = 0; T < A.dim(); ++T)
    for (std::size_t S = 0; S < A.dim(); ++S) {
      if (A.gens[T].h != A.gens[S].h || A.gens[T].q != A.gens[S].q) continue;
      std::vector<Index> row;
      // G F: sum over m in B of G[T][m] F[m][S]
      for (std::size_t m = 0; m < B.dim(); ++m)
        if (F.get(m, S))
          if (auto v = var_of(0, Index(T), Index(m))) row.push_back(Index(*v));
      for (Index t : A.d.row(T))
        if (auto v = var_of(1, t, Index(S))) row.push_back(Index(*v));
      for (Index s : dAt.row(S))
        if (auto v = var_of(1, Index(T), s)) row.push_back(Index(*v));
      push_row(std::move(row), T == S);
    }
  // (4) FG + id = dB hB + hB dB : block (T, S in B)
  for (std::size_t T = 0; T < B.dim(); ++T)
    for (std::size_t S = 0; S < B.dim(); ++S) {
      if (B.gens[T].h != B.gens[S].h || B.gens[T].q != B.gens[S].q) continue;
      std::vector<Index> row;
      for (Index m : F.row(T))  // F[T][m] G[m][S]
        if (auto v = var_of(0, m, Index(S))) row.push_back(Index(*v));
      for (Index t : B.d.row(T))
        if (auto v = var_of(2, t, Index(S))) row.push_back(Index(*v));
      for (Index s : dBt.row(S))
        if (auto v = var_of(2, Index(T), s)) row.push_back(Index(*v));
      push_row(std::move(row), T == S);
    }
  // (5) homotopies R-linear
  for (std::size_t k = 0; k < rho_a.size(); ++k) {
    F2Matrix raT = rho_a[k]->transposed(), rbT = rho_b[k]->transposed();
    for (std::size_t T = 0; T < A.dim(); ++T)
      for (std::size_t S = 0; S < A.dim(); ++S) {
        if (A.gens[T].h != A.gens[S].h - 1 || A.gens[T].q != A.gens[S].q - 2) continue;
        std::vector<Index> row;
        for (Index t : rho_a[k]->row(T))
          if (auto v = var_of(1, t, Index(S))) row.push_back(Index(*v));
        for (Index s : raT.row(S))
          if (auto v = var_of(1, Index(T), s)) row.push_back(Index(*v));
        push_row(std::move(row), false);
      }
    for (std::size_t T = 0; T < B.dim(); ++T)
      for (std::size_t S = 0; S < B.dim(); ++S) {
        if (B.gens[T].h != B.gens[S].h - 1 || B.gens[T].q != B.gens[S].q - 2) continue;
        std::vector<Index> row;
        for (Index t : rho_b[k]->row(T))
          if (auto v = var_of(2, t, Index(S))) row.push_back(Index(*v));
        for (Index s : rbT.row(S))
          if (auto v = var_of(2, Index(T), s)) row.push_back(Index(*v));
        push_row(std::move(row), false);
      }
  }
  F2Matrix a(rows.size(), vars.size());
  F2Matrix b(rows.size(), 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    a.set_row(r, std::move(rows[r]));
    if (rhs[r]) b.toggle(r, 0);
  }
  auto sol = solve(a, b);
  if (!sol) return std::nullopt;
  EquivalenceCertificate cert;
  cert.g = F2Matrix(A.dim(), B.dim());
  cert.ha = F2Matrix(A.dim(), A.dim());
  cert.hb = F2Matrix(B.dim(), B.dim());
  for (std::size_t v = 0; v < vars.size(); ++v) {
    if (!sol->get(v, 0)) continue;
    if (vars[v].kind == 0) cert.g.toggle(vars[v].t, vars[v].s);
    if (vars[v].kind == 1) cert.ha.toggle(vars[v].t, vars[v].s);
    if (vars[v].kind == 2) cert.hb.toggle(vars[v].t, vars[v].s);
  }
  // exact re-checks
  if (!(A.d * cert.g + cert.g * B.d).is_zero())
    throw std::logic_error("homotopy_inverse_search: G is not a chain map");
  if (!(cert.g * F + F2Matrix::identity(A.dim()) ==
        A.d * cert.ha + cert.ha * A.d))
    throw std::logic_error("homotopy_inverse_search: GF homotopy fails");
  if (!(F * cert.g + F2Matrix::identity(B.dim()) ==
        B.d * cert.hb + cert.hb * B.d))
    throw std::logic_error("homotopy_inverse_search: FG homotopy fails");
  return cert;
}

// Enumerate every R-linear chain map A -> B of the given bidegree. Returns
// the basis of the solution space (each element a matrix).
inline std::vector<F2Matrix> all_rlinear_chain_maps(
    const BigradedComplex& A, const BigradedComplex& B,
    const std::vector<const F2Matrix*>& rho_a, const std::vector<const F2Matrix*>& rho_b,
    Bidegree deg = {0, 0}) {
  std::map<std::pair<Index, Index>, std::size_t> var;
  std::vector<std::pair<Index, Index>> vars;
  for (std::size_t t = 0; t < B.dim(); ++t)
    for (std::size_t s = 0; s < A.dim(); ++s)
      if (B.gens[t].h == A.gens[s].h + deg.h && B.gens[t].q == A.gens[s].q + deg.q) {
        var[{Index(t), Index(s)}] = vars.size();
        vars.push_back({Index(t), Index(s)});
      }
  std::vector<std::vector<Index>> rows;
  auto add_block = [&](const F2Matrix& lb, const F2Matrix& ra, Bidegree eqdeg) {
    F2Matrix raT = ra.transposed();
    for (std::size_t T = 0; T < B.dim(); ++T)
      for (std::size_t S = 0; S < A.dim(); ++S) {
        if (B.gens[T].h != A.gens[S].h + eqdeg.h || B.gens[T].q != A.gens[S].q + eqdeg.q)
          continue;
        std::vector<Index> row;
        for (Index t : lb.row(T)) {
          auto it = var.find({t, Index(S)});
          if (it != var.end()) row.push_back(Index(it->second));
        }
        for (Index s : raT.row(S)) {
          auto it = var.find({Index(T), s});
          if (it != var.end()) row.push_back(Index(it->second));
        }
        std::sort(row.begin(), row.end());
        std::vector<Index> red;
        for (std::size_t i = 0; i < row.size();) {
          std::size_t j = i;
          while (j < row.size() && row[j] == row[i]) ++j;
          if ((j - i) & 1) red.push_back(row[i]);
          i = j;
        }
        if (!red.empty()) rows.push_back(std::move(red));
      }
  };
  add_block(B.d, A.d, {deg.h + 1, deg.q});
  for (std::size_t k = 0; k < rho_a.size(); ++k)
    add_block(*rho_b[k], *rho_a[k], {deg.h, deg.q - 2});
  F2Matrix a(rows.size(), vars.size());
  for (std::size_t r = 0; r < rows.size(); ++r) a.set_row(r, std::move(rows[r]));
  std::vector<F2Matrix> basis;
  for (auto& kb : kernel_basis(a)) {
    F2Matrix m(B.dim(), A.dim());
    for (Index v : kb) m.toggle(vars[v].first, vars[v].second);
    basis.push_back(std::move(m));
  }
  return basis;
}

}  // namespace khb
