#pragma once

// Bigraded chain complexes over GF(2) and bigraded chain maps.
//
// Grading conventions: the differential has bidegree (1,0) and bigradings
// are written (h,q). A ChainMap carries its (h,q)-bidegree as explicit
// data; chain maps need not preserve the homological grading.

#include <map>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "khb/f2.hpp"
#include "khb/laurent.hpp"

namespace khb {

struct Bidegree {
  int h = 0;
  int q = 0;
  friend bool operator==(const Bidegree&, const Bidegree&) = default;
  friend auto operator<=>(const Bidegree&, const Bidegree&) = default;
  Bidegree operator+(const Bidegree& o) const { return {h + o.h, q + o.q}; }
};

struct BigradedComplex {
  std::vector<Bidegree> gens;
  // d[i] lists sources j with <d(gen_j), gen_i> = 1, i.e. matrix rows are
  // targets, columns are sources.
  F2Matrix d;

  std::size_t dim() const { return gens.size(); }

  void check_valid() const {
    if (d.rows() != gens.size() || d.cols() != gens.size())
      throw std::logic_error("complex: differential shape mismatch");
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (Index j : d.row(i))
        if (gens[i].h != gens[j].h + 1 || gens[i].q != gens[j].q)
          throw std::logic_error("complex: differential not bidegree (1,0)");
    if (!(d * d).is_zero())
      throw std::logic_error("complex: d^2 != 0");
  }
};

// Table of homology dimensions keyed by bigrading.
using RankTable = std::map<std::pair<int, int>, std::size_t>;

namespace detail {

// Indices of generators in each (h,q) slice, in increasing index order.
inline std::map<std::pair<int, int>, std::vector<Index>> slices(
    const BigradedComplex& c) {
  std::map<std::pair<int, int>, std::vector<Index>> out;
  for (std::size_t i = 0; i < c.gens.size(); ++i)
    out[{c.gens[i].h, c.gens[i].q}].push_back(Index(i));
  return out;
}

inline F2Matrix block(const F2Matrix& m, const std::vector<Index>& rows,
                      const std::vector<Index>& cols) {
  std::map<Index, Index> colpos;
  for (std::size_t k = 0; k < cols.size(); ++k) colpos[cols[k]] = Index(k);
  F2Matrix out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<Index> row;
    for (Index c : m.row(rows[r])) {
      auto it = colpos.find(c);
      if (it != colpos.end()) row.push_back(it->second);
    }
    std::sort(row.begin(), row.end());
    out.set_row(r, std::move(row));
  }
  return out;
}

}  // namespace detail

// Homology dimensions per bigrading, computed slice by slice (the
// differential preserves q and raises h by one, so slices are disjoint).
inline RankTable homology(const BigradedComplex& c) {
  c.check_valid();
  auto sl = detail::slices(c);
  // rank of d restricted to slice (h,q) -> (h+1,q)
  std::map<std::pair<int, int>, std::size_t> out_rank;
  for (auto& [hq, cols] : sl) {
    auto it = sl.find({hq.first + 1, hq.second});
    if (it == sl.end()) continue;
    out_rank[hq] = rank(detail::block(c.d, it->second, cols));
  }
  RankTable table;
  for (auto& [hq, cols] : sl) {
    std::size_t r_out = out_rank.count(hq) ? out_rank[hq] : 0;
    auto prev = out_rank.find({hq.first - 1, hq.second});
    std::size_t r_in = prev == out_rank.end() ? 0 : prev->second;
    std::size_t dim_h = cols.size() - r_out - r_in;
    if (dim_h) table[hq] = dim_h;
  }
  return table;
}

inline std::size_t total_rank(const RankTable& t) {
  std::size_t n = 0;
  for (auto& [hq, d] : t) n += d;
  return n;
}

inline Laurent graded_euler_characteristic(const BigradedComplex& c) {
  Laurent p;
  for (auto& g : c.gens) p.add(g.q, (g.h & 1) ? -1 : 1);
  return p;
}

inline Laurent graded_euler_characteristic(const RankTable& t) {
  Laurent p;
  for (auto& [hq, d] : t) p.add(hq.second, (hq.first & 1) ? -static_cast<long long>(d) : static_cast<long long>(d));
  return p;
}

// Permute generators by perm (new index i holds old generator perm[i]).
inline BigradedComplex permuted(const BigradedComplex& c,
                                const std::vector<Index>& perm) {
  std::vector<Index> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = Index(i);
  BigradedComplex out;
  out.gens.resize(c.gens.size());
  out.d = F2Matrix(c.dim(), c.dim());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out.gens[i] = c.gens[perm[i]];
    std::vector<Index> row;
    for (Index j : c.d.row(perm[i])) row.push_back(inv[j]);
    std::sort(row.begin(), row.end());
    out.d.set_row(i, std::move(row));
  }
  return out;
}

// A bigraded map between complexes. `matrix` rows index target generators,
// columns index source generators. `is_chain_map` records whether the map
// is expected to satisfy d∘f = f∘d (homotopies carry false).
struct ChainMap {
  const BigradedComplex* source = nullptr;
  const BigradedComplex* target = nullptr;
  Bidegree deg{0, 0};
  F2Matrix matrix;
  bool is_chain_map = true;

  static ChainMap zero(const BigradedComplex& s, const BigradedComplex& t,
                       Bidegree deg = {0, 0}) {
    return ChainMap{&s, &t, deg, F2Matrix(t.dim(), s.dim()), true};
  }
  static ChainMap id(const BigradedComplex& c) {
    return ChainMap{&c, &c, {0, 0}, F2Matrix::identity(c.dim()), true};
  }

  bool check_homogeneous() const {
    for (std::size_t i = 0; i < matrix.rows(); ++i)
      for (Index j : matrix.row(i))
        if (target->gens[i].h != source->gens[j].h + deg.h ||
            target->gens[i].q != source->gens[j].q + deg.q)
          return false;
    return true;
  }
  bool check_chain_map() const {
    return (target->d * matrix + matrix * source->d).is_zero();
  }

  ChainMap operator*(const ChainMap& inner) const {  // this ∘ inner
    if (inner.target != source)
      throw std::invalid_argument("ChainMap: composition mismatch");
    return ChainMap{inner.source, target,
                    {deg.h + inner.deg.h, deg.q + inner.deg.q},
                    matrix * inner.matrix, is_chain_map && inner.is_chain_map};
  }
  ChainMap operator+(const ChainMap& o) const {
    if (o.source != source || o.target != target || !(o.deg == deg))
      throw std::invalid_argument("ChainMap: sum mismatch");
    return ChainMap{source, target, deg, matrix + o.matrix,
                    is_chain_map && o.is_chain_map};
  }
};

// Cycle representatives and coordinates for homology of one complex:
// supports computing maps induced on homology.
class HomologyBasis {
public:
  explicit HomologyBasis(const BigradedComplex& c) : c_(&c) {
    auto sl = detail::slices(c);
    for (auto& [hq, idx] : sl) {
      Slice s;
      s.gens = idx;
      auto up = sl.find({hq.first + 1, hq.second});
      F2Matrix out =
          up == sl.end() ? F2Matrix(0, idx.size())
                         : detail::block(c.d, up->second, idx);
      auto ker = kernel_basis(out);
      auto dn = sl.find({hq.first - 1, hq.second});
      F2Matrix in = dn == sl.end() ? F2Matrix(idx.size(), 0)
                                   : detail::block(c.d, idx, dn->second);
      // columns of `reps`: image basis followed by a maximal independent
      // set of kernel vectors mod the image.
      BitRows scratch(idx.size(), in.cols() + ker.size());
      F2Matrix int_ = in.transposed();
      std::vector<std::vector<Index>> img_cols;
      {
        BitRows e(in.cols(), idx.size());
        for (std::size_t r = 0; r < in.rows(); ++r)
          for (Index cidx : in.row(r)) e.set(cidx, r);
        auto piv = echelonize(e);
        for (std::size_t r = 0; r < piv.size(); ++r) {
          std::vector<Index> v;
          for (std::size_t cc = 0; cc < idx.size(); ++cc)
            if (e.get(r, cc)) v.push_back(Index(cc));
          img_cols.push_back(std::move(v));
        }
      }
      s.img_rank = img_cols.size();
      // extend image basis by kernel vectors (lowest index first)
      std::vector<std::vector<Index>> chosen = img_cols;
      for (auto& kv : ker) {
        std::vector<std::vector<Index>> trial = chosen;
        trial.push_back(kv);
        F2Matrix m(idx.size(), trial.size());
        for (std::size_t cc = 0; cc < trial.size(); ++cc)
          for (Index rr : trial[cc]) m.toggle(rr, cc);
        if (rank(m) == trial.size()) {
          chosen.push_back(kv);
          s.h_reps.push_back(kv);
        }
      }
      // basis matrix for coordinate solves: [image | homology reps]
      s.basis = F2Matrix(idx.size(), chosen.size());
      for (std::size_t cc = 0; cc < chosen.size(); ++cc)
        for (Index rr : chosen[cc]) s.basis.toggle(rr, cc);
      slices_[hq] = std::move(s);
    }
  }

  const BigradedComplex& complex() const { return *c_; }

  RankTable table() const {
    RankTable t;
    for (auto& [hq, s] : slices_)
      if (!s.h_reps.empty()) t[hq] = s.h_reps.size();
    return t;
  }

  // Homology coordinates of a cycle (given as global index set restricted
  // to slice hq). Throws if the vector is not a cycle in the slice span.
  std::vector<Index> coords(std::pair<int, int> hq,
                            const std::vector<Index>& global_vec) const {
    auto it = slices_.find(hq);
    if (it == slices_.end()) {
      if (!global_vec.empty())
        throw std::logic_error("HomologyBasis: vector outside slices");
      return {};
    }
    const Slice& s = it->second;
    std::map<Index, Index> pos;
    for (std::size_t k = 0; k < s.gens.size(); ++k) pos[s.gens[k]] = Index(k);
    F2Matrix v(s.gens.size(), 1);
    for (Index g : global_vec) v.toggle(pos.at(g), 0);
    auto sol = solve(s.basis, v);
    if (!sol) throw std::logic_error("HomologyBasis: not in cycle span");
    std::vector<Index> out;
    for (std::size_t k = 0; k < s.h_reps.size(); ++k)
      if (sol->get(s.img_rank + k, 0)) out.push_back(Index(k));
    return out;
  }

  // Representative cycle (global index set) of homology class k in slice hq.
  std::vector<Index> rep(std::pair<int, int> hq, std::size_t k) const {
    const Slice& s = slices_.at(hq);
    std::vector<Index> out;
    for (Index local : s.h_reps[k]) out.push_back(s.gens[local]);
    return out;
  }

  std::size_t dim(std::pair<int, int> hq) const {
    auto it = slices_.find(hq);
    return it == slices_.end() ? 0 : it->second.h_reps.size();
  }

private:
  struct Slice {
    std::vector<Index> gens;
    std::size_t img_rank = 0;
    std::vector<std::vector<Index>> h_reps;  // local coordinates
    F2Matrix basis;                          // [image | reps], local rows
  };
  const BigradedComplex* c_;
  std::map<std::pair<int, int>, Slice> slices_;
};

// The map induced on homology by a chain map, reported as per-bidegree
// blocks keyed by source bigrading.
inline std::map<std::pair<int, int>, F2Matrix> induced_on_homology(
    const ChainMap& f, const HomologyBasis& src, const HomologyBasis& tgt) {
  if (!f.check_chain_map())
    throw std::invalid_argument("induced_on_homology: not a chain map");
  std::map<std::pair<int, int>, F2Matrix> out;
  for (auto& [hq, d] : src.table()) {
    std::pair<int, int> thq{hq.first + f.deg.h, hq.second + f.deg.q};
    F2Matrix m(tgt.dim(thq), d);
    for (std::size_t k = 0; k < d; ++k) {
      auto img = f.matrix.apply(src.rep(hq, k));
      for (Index cls : tgt.coords(thq, img)) m.toggle(cls, k);
    }
    out[hq] = std::move(m);
  }
  return out;
}

}  // namespace khb
