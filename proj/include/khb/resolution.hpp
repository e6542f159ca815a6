#pragma once

// Preferred free R_X-resolutions of Khovanov cubes, truncated in xi-weight,
// together with the structure maps q (to the base), f (the GF(2)-linear
// section), lifted movie-event maps, and their ordered composition.
//
// A resolved generator is a triple (c, r, n): a base cube generator, a
// square-free monomial r over the colors (a subset bitmask), and an
// exponent vector n recording the xi-monomial prod_x xi_x^{-n_x} with
// total weight sum(n) <= depth. Bigrading: (h(c) - |n|, q(c) - 2|r| - 2|n|).
//
// The differential is
//   d(c (x) r (x) xi) = (dc) (x) r (x) xi
//     + sum_x [ (rho(x) c) (x) r + c (x) (x r) ] (x) (xi_x xi),
// where multiplication by xi_x lowers n_x by one and kills n_x = 0.
// Weights only decrease, so the truncation is closed under everything.

#include "khb/movie.hpp"

namespace khb {

struct ResolvedComplex {
  std::shared_ptr<const CubeComplex> base;
  std::vector<std::string> colors;
  int depth = 0;
  BigradedComplex cx;
  std::vector<ChainMap> color_ops;  // rho-bar per color, on cx

  std::size_t n_colors() const { return colors.size(); }
  std::size_t n_xi() const { return xi_monomials.size(); }
  // enumeration of exponent vectors with sum <= depth, lexicographic
  std::vector<std::vector<int>> xi_monomials;
  std::map<std::vector<int>, std::size_t> xi_index;

  std::size_t index(std::size_t cgen, std::size_t rmask, std::size_t xi) const {
    return (cgen * (std::size_t(1) << colors.size()) + rmask) * n_xi() + xi;
  }
  struct Parts {
    std::size_t cgen, rmask, xi;
  };
  Parts parts(std::size_t idx) const {
    Parts p;
    p.xi = idx % n_xi();
    idx /= n_xi();
    p.rmask = idx & ((std::size_t(1) << colors.size()) - 1);
    p.cgen = idx >> colors.size();
    return p;
  }
};

namespace detail {
inline void enumerate_exponents(int ncolors, int depth, std::vector<int>& cur,
                                std::vector<std::vector<int>>& out, int used) {
  if (int(cur.size()) == ncolors) {
    out.push_back(cur);
    return;
  }
  for (int k = 0; k + used <= depth; ++k) {
    cur.push_back(k);
    enumerate_exponents(ncolors, depth, cur, out, used + k);
    cur.pop_back();
  }
}
}  // namespace detail

inline ResolvedComplex resolve_cube(std::shared_ptr<const CubeComplex> base, int depth) {
  if (depth < 0) throw std::invalid_argument("resolve_cube: negative depth");
  ResolvedComplex rc;
  rc.base = base;
  rc.colors = base->diagram.colors;
  rc.depth = depth;
  std::vector<int> cur;
  detail::enumerate_exponents(int(rc.colors.size()), depth, cur, rc.xi_monomials, 0);
  for (std::size_t i = 0; i < rc.xi_monomials.size(); ++i)
    rc.xi_index[rc.xi_monomials[i]] = i;
  const std::size_t nr = std::size_t(1) << rc.colors.size();
  const std::size_t total = base->dim() * nr * rc.n_xi();
  rc.cx.gens.resize(total);
  for (std::size_t g = 0; g < base->dim(); ++g) {
    const Bidegree& bg = base->base.gens[g];
    for (std::size_t r = 0; r < nr; ++r) {
      int rdeg = __builtin_popcountll(r);
      for (std::size_t x = 0; x < rc.n_xi(); ++x) {
        int w = 0;
        for (int v : rc.xi_monomials[x]) w += v;
        rc.cx.gens[rc.index(g, r, x)] =
            Bidegree{bg.h - w, bg.q - 2 * rdeg - 2 * w};
      }
    }
  }
  // color actions on the base cube
  std::vector<F2Matrix> rho;
  for (auto& x : rc.colors) rho.push_back(color_action(*base, x).matrix);
  // differential
  rc.cx.d = F2Matrix(total, total);
  for (std::size_t g = 0; g < base->dim(); ++g) {
    auto dg = base->base.d.transposed().row(g);  // targets of d(gen g)
    for (std::size_t r = 0; r < nr; ++r) {
      for (std::size_t x = 0; x < rc.n_xi(); ++x) {
        std::size_t src = rc.index(g, r, x);
        for (Index t : dg) rc.cx.d.toggle(rc.index(t, r, x), src);
        for (std::size_t ci = 0; ci < rc.colors.size(); ++ci) {
          if (rc.xi_monomials[x][ci] == 0) continue;  // xi_x kills weight 0
          auto xm = rc.xi_monomials[x];
          xm[ci] -= 1;
          std::size_t x2 = rc.xi_index.at(xm);
          for (Index t : rho[ci].transposed().row(g))
            rc.cx.d.toggle(rc.index(t, r, x2), src);
          if (!((r >> ci) & 1))
            rc.cx.d.toggle(rc.index(g, r | (std::size_t(1) << ci), x2), src);
        }
      }
    }
  }
  // rho-bar: multiplication by x on the middle factor
  for (std::size_t ci = 0; ci < rc.colors.size(); ++ci) {
    ChainMap op = ChainMap::zero(rc.cx, rc.cx, {0, -2});
    for (std::size_t g = 0; g < base->dim(); ++g)
      for (std::size_t r = 0; r < nr; ++r) {
        if ((r >> ci) & 1) continue;
        for (std::size_t x = 0; x < rc.n_xi(); ++x)
          op.matrix.toggle(rc.index(g, r | (std::size_t(1) << ci), x),
                           rc.index(g, r, x));
      }
    rc.color_ops.push_back(std::move(op));
  }
  return rc;
}

inline const ChainMap& rho_bar(const ResolvedComplex& rc, const std::string& color) {
  for (std::size_t i = 0; i < rc.colors.size(); ++i)
    if (rc.colors[i] == color) return rc.color_ops[i];
  throw std::invalid_argument("rho_bar: unknown color " + color);
}

inline bool is_rx_linear(const ResolvedComplex& rc, const F2Matrix& m) {
  for (auto& op : rc.color_ops)
    if (!(m * op.matrix == op.matrix * m)) return false;
  return true;
}

// q: c (x) r (x) 1 -> rho(r) c, zero on xi != 1. R_X-linear chain map.
inline ChainMap q_map(const ResolvedComplex& rc) {
  std::vector<F2Matrix> rho;
  for (auto& x : rc.colors) rho.push_back(color_action(*rc.base, x).matrix);
  ChainMap f = ChainMap::zero(rc.cx, rc.base->base, {0, 0});
  std::vector<int> zero(rc.colors.size(), 0);
  std::size_t xi0 = rc.xi_index.at(zero);
  const std::size_t nr = std::size_t(1) << rc.colors.size();
  for (std::size_t g = 0; g < rc.base->dim(); ++g)
    for (std::size_t r = 0; r < nr; ++r) {
      // rho(r) applied to gen g
      F2Matrix v(rc.base->dim(), 1);
      v.toggle(g, 0);
      for (std::size_t ci = 0; ci < rc.colors.size(); ++ci)
        if ((r >> ci) & 1) v = rho[ci] * v;
      for (std::size_t t = 0; t < rc.base->dim(); ++t)
        if (v.get(t, 0)) f.matrix.toggle(t, rc.index(g, r, xi0));
    }
  return f;
}

// f: c -> c (x) 1 (x) 1, a GF(2)-linear chain map with q o f = id.
inline ChainMap f_map(const ResolvedComplex& rc) {
  ChainMap f = ChainMap::zero(rc.base->base, rc.cx, {0, 0});
  std::vector<int> zero(rc.colors.size(), 0);
  std::size_t xi0 = rc.xi_index.at(zero);
  for (std::size_t g = 0; g < rc.base->dim(); ++g)
    f.matrix.toggle(rc.index(g, 0, xi0), g);
  return f;
}

// Certified homological window of a truncated resolution: degrees h with
// h > hmax(base) - depth are unaffected by the truncation (the dropped
// generators all sit in degrees <= hmax - depth - 1, so the long exact
// sequence of the weight truncation is an isomorphism above).
struct ValidityWindow {
  int min_certified_h;  // certified for h >= this value
  bool certifies(int h) const { return h >= min_certified_h; }
};

inline ValidityWindow validity_window(const ResolvedComplex& rc) {
  int hmax = 0;
  bool any = false;
  for (auto& g : rc.base->base.gens) {
    hmax = any ? std::max(hmax, g.h) : g.h;
    any = true;
  }
  return ValidityWindow{hmax - rc.depth + 1};
}

// Lift one event map to the resolutions: non-slide events act as the
// plain map tensored with the identity of R_X (x) Xi_X; a slide of a
// color-y basepoint across crossing c acts as Id + H_c (x) Id (x) xi_y.
inline ChainMap lift_event(const ResolvedComplex& ra, const ResolvedComplex& rb,
                           const ChainMap& plain, const Rewrite& rw,
                           const MovieEvent& ev) {
  if (ra.colors != rb.colors || ra.depth != rb.depth)
    throw std::invalid_argument("lift_event: mismatched resolutions");
  const std::size_t nr = std::size_t(1) << ra.colors.size();
  ChainMap f = ChainMap::zero(ra.cx, rb.cx, plain.deg);
  // plain (x) id part
  F2Matrix pt = plain.matrix.transposed();
  for (std::size_t g = 0; g < ra.base->dim(); ++g)
    for (Index t : pt.row(g))
      for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t x = 0; x < ra.n_xi(); ++x)
          f.matrix.toggle(rb.index(t, r, x), ra.index(g, r, x));
  if (ev.kind == EventKind::slide) {
    std::size_t ci = ra.colors.size();
    for (std::size_t i = 0; i < ra.colors.size(); ++i)
      if (ra.colors[i] == rw.slide_color) ci = i;
    if (ci == ra.colors.size())
      throw std::invalid_argument("lift_event: slide color not in color set");
    ChainMap H = sliding_homotopy(*ra.base, rw.slide_crossing);
    F2Matrix Ht = H.matrix.transposed();
    for (std::size_t g = 0; g < ra.base->dim(); ++g) {
      auto row = Ht.row(g);
      if (row.empty()) continue;
      for (std::size_t x = 0; x < ra.n_xi(); ++x) {
        if (ra.xi_monomials[x][ci] == 0) continue;
        auto xm = ra.xi_monomials[x];
        xm[ci] -= 1;
        std::size_t x2 = rb.xi_index.at(xm);
        for (Index t : row)
          for (std::size_t r = 0; r < nr; ++r)
            f.matrix.toggle(rb.index(t, r, x2), ra.index(g, r, x));
      }
    }
  }
  return f;
}

// A movie compiled on the resolutions.
struct CompiledResolvedMovie {
  CompiledMovie plain;
  std::vector<std::shared_ptr<ResolvedComplex>> resolved;  // events+1
  std::vector<ChainMap> maps;
  ChainMap total;

  const ResolvedComplex& front() const { return *resolved.front(); }
  const ResolvedComplex& back() const { return *resolved.back(); }
};

// R_X-linearity of a map between two resolutions with the same colors.
inline bool is_rx_linear_map(const ResolvedComplex& ra, const ResolvedComplex& rb,
                             const F2Matrix& m) {
  for (std::size_t i = 0; i < ra.colors.size(); ++i)
    if (!(m * ra.color_ops[i].matrix == rb.color_ops[i].matrix * m)) return false;
  return true;
}

inline CompiledResolvedMovie compile_resolved(const MovieScript& s, int depth) {
  CompiledResolvedMovie m;
  m.plain = compile_plain(s);
  for (auto& cube : m.plain.cubes)
    m.resolved.push_back(std::make_shared<ResolvedComplex>(resolve_cube(cube, depth)));
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    ChainMap lf = lift_event(*m.resolved[i], *m.resolved[i + 1], m.plain.maps[i],
                             m.plain.rewrites[i], s.events[i]);
    if (!lf.check_homogeneous())
      throw EventError("lifted event map not homogeneous [" + s.events[i].text + "]");
    if (!lf.check_chain_map())
      throw EventError("lifted event map not a chain map [" + s.events[i].text + "]");
    if (!is_rx_linear_map(*m.resolved[i], *m.resolved[i + 1], lf.matrix))
      throw EventError("lifted event map not R_X-linear [" + s.events[i].text + "]");
    m.maps.push_back(std::move(lf));
  }
  m.total = ChainMap::id(m.resolved.front()->cx);
  for (auto& f : m.maps) m.total = f * m.total;
  return m;
}

}  // namespace khb
