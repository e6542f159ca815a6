#pragma once

// Chain maps of elementary movie events on the plain Khovanov cubes.
//
// Morse maps are the unit/counit/saddle TQFT maps. Reidemeister maps are
// fixed local formulas: R1 uses inclusion/projection with a dotted
// correction term, R2 the four-term strong deformation retract, R3 the
// map obtained by transporting the cone over the distinguished crossing
// through the R2-reduced cones (the categorified Kauffman trick). Every
// constructed map is checked to be a homogeneous chain map.

#include "khb/cube.hpp"
#include "khb/events.hpp"

namespace khb {

namespace emaps {

// --- generator transport helpers -------------------------------------

// circle matching between two resolutions through an edge translation.
// Returns circleA -> circleB, or -1 where no edge of the circle maps.
// Throws if a circle maps into two different target circles.
inline std::vector<int> match_circles(const ResolutionState& ra,
                                      const ResolutionState& rb,
                                      const std::map<std::string, std::string>& emap) {
  std::vector<int> out(ra.circles.size(), -1);
  for (std::size_t k = 0; k < ra.circles.size(); ++k) {
    for (auto& e : ra.circles[k]) {
      auto it = emap.find(e);
      if (it == emap.end()) continue;
      auto jt = rb.circle_of_edge.find(it->second);
      if (jt == rb.circle_of_edge.end()) continue;
      if (out[k] >= 0 && out[k] != jt->second)
        throw std::logic_error("match_circles: circle image not unique");
      out[k] = jt->second;
    }
  }
  return out;
}

// eps translation: position of each source crossing in the target cube.
inline std::vector<int> crossing_positions(const PointedDiagram& a,
                                           const PointedDiagram& b,
                                           const std::map<std::string, std::string>& cmap) {
  std::vector<int> pos(a.crossings.size(), -1);
  for (std::size_t i = 0; i < a.crossings.size(); ++i) {
    std::string id = a.crossings[i].id;
    auto it = cmap.find(id);
    if (it != cmap.end()) id = it->second;
    if (b.has_crossing(id)) pos[i] = int(b.crossing_index(id));
  }
  return pos;
}

inline std::size_t translate_eps(std::size_t eps, const std::vector<int>& pos,
                                 std::size_t extra_bits = 0) {
  std::size_t out = extra_bits;
  for (std::size_t i = 0; i < pos.size(); ++i)
    if ((eps >> i) & 1) {
      if (pos[i] < 0) throw std::logic_error("translate_eps: crossing has no image");
      out |= std::size_t(1) << pos[i];
    }
  return out;
}

// transport labels through a circle matching; requires every X-labeled
// circle to be matched. all_circles requires a full matching.
inline std::size_t transport_labels(std::size_t lab, const std::vector<int>& cm,
                                    bool all_circles = true) {
  std::size_t out = 0;
  for (std::size_t k = 0; k < cm.size(); ++k) {
    bool x = (lab >> k) & 1;
    if (cm[k] < 0) {
      if (x || all_circles) throw std::logic_error("transport_labels: unmatched circle");
      continue;
    }
    if (x) out |= std::size_t(1) << cm[k];
  }
  return out;
}

// The identity-shaped transport map between cubes of equal shape (used
// for renames and basepoint-only events).
inline ChainMap transport_iso(const CubeComplex& A, const CubeComplex& B,
                              const std::map<std::string, std::string>& emap,
                              const std::map<std::string, std::string>& cmap) {
  auto pos = crossing_positions(A.diagram, B.diagram, cmap);
  ChainMap f = ChainMap::zero(A.base, B.base, {0, 0});
  for (std::size_t eps = 0; eps < A.res.size(); ++eps) {
    std::size_t eps2 = translate_eps(eps, pos);
    auto cm = match_circles(A.res[eps], B.res[eps2], emap);
    std::size_t ncirc = A.res[eps].circles.size();
    for (std::size_t lab = 0; lab < (std::size_t(1) << ncirc); ++lab)
      f.matrix.toggle(B.index(eps2, transport_labels(lab, cm)), A.index(eps, lab));
  }
  // identity transports preserve bigradings exactly
  if (!f.check_homogeneous()) throw std::logic_error("transport_iso: degree shift");
  return f;
}

// --- Morse maps -------------------------------------------------------

inline ChainMap birth_map(const CubeComplex& A, const CubeComplex& B, const Rewrite& rw) {
  auto pos = crossing_positions(A.diagram, B.diagram, {});
  ChainMap f = ChainMap::zero(A.base, B.base, {0, 1});
  for (std::size_t eps = 0; eps < A.res.size(); ++eps) {
    std::size_t eps2 = translate_eps(eps, pos);
    auto cm = match_circles(A.res[eps], B.res[eps2], rw.edge_map);
    std::size_t ncirc = A.res[eps].circles.size();
    for (std::size_t lab = 0; lab < (std::size_t(1) << ncirc); ++lab)
      f.matrix.toggle(B.index(eps2, transport_labels(lab, cm)), A.index(eps, lab));
  }
  return f;
}

inline ChainMap death_map(const CubeComplex& A, const CubeComplex& B, const Rewrite& rw) {
  auto pos = crossing_positions(A.diagram, B.diagram, {});
  ChainMap f = ChainMap::zero(A.base, B.base, {0, 1});
  for (std::size_t eps = 0; eps < A.res.size(); ++eps) {
    std::size_t eps2 = translate_eps(eps, pos);
    auto cm = match_circles(A.res[eps], B.res[eps2], rw.edge_map);
    int dead = A.res[eps].circle_of_edge.at(rw.loop_edge);
    std::size_t ncirc = A.res[eps].circles.size();
    for (std::size_t lab = 0; lab < (std::size_t(1) << ncirc); ++lab) {
      if (!((lab >> dead) & 1)) continue;  // counit kills 1
      std::size_t rest = lab & ~(std::size_t(1) << dead);
      f.matrix.toggle(B.index(eps2, transport_labels(rest, cm, false)), A.index(eps, lab));
    }
  }
  return f;
}

inline ChainMap saddle_map(const CubeComplex& A, const CubeComplex& B, const Rewrite& rw,
                           const std::string& e1, const std::string& e2) {
  auto pos = crossing_positions(A.diagram, B.diagram, {});
  // bidegree: computed from one transported generator below
  ChainMap f = ChainMap::zero(A.base, B.base, {0, -1});
  bool deg_set = false;
  for (std::size_t eps = 0; eps < A.res.size(); ++eps) {
    std::size_t eps2 = translate_eps(eps, pos);
    const ResolutionState& ra = A.res[eps];
    const ResolutionState& rb = B.res[eps2];
    int sa = ra.circle_of_edge.at(e1), sb = ra.circle_of_edge.at(e2);
    int ta = rb.circle_of_edge.at(e1), tb = rb.circle_of_edge.at(e2);
    std::map<std::string, std::string> emap;
    for (auto& [k, v] : rw.edge_map)
      if (k != e1 && k != e2) emap[k] = v;
    auto cm = match_circles(ra, rb, emap);
    std::size_t ncirc = ra.circles.size();
    for (std::size_t lab = 0; lab < (std::size_t(1) << ncirc); ++lab) {
      std::size_t rest = 0;
      bool ok = true;
      for (std::size_t k = 0; k < ncirc; ++k) {
        if (int(k) == sa || int(k) == sb) continue;
        if (!((lab >> k) & 1)) continue;
        if (cm[k] < 0) { ok = false; break; }
        rest |= std::size_t(1) << cm[k];
      }
      if (!ok) throw std::logic_error("saddle_map: unmatched labeled circle");
      std::vector<std::size_t> outs;
      if (sa != sb) {
        if (ta != tb) throw std::logic_error("saddle_map: merge target mismatch");
        bool xa = (lab >> sa) & 1, xb = (lab >> sb) & 1;
        if (xa && xb) continue;
        outs.push_back(rest | ((xa || xb) ? (std::size_t(1) << ta) : 0));
      } else {
        if (ta == tb) throw std::logic_error("saddle_map: split target mismatch");
        if ((lab >> sa) & 1) {
          outs.push_back(rest | (std::size_t(1) << ta) | (std::size_t(1) << tb));
        } else {
          outs.push_back(rest | (std::size_t(1) << ta));
          outs.push_back(rest | (std::size_t(1) << tb));
        }
      }
      for (std::size_t o : outs) {
        f.matrix.toggle(B.index(eps2, o), A.index(eps, lab));
        if (!deg_set) {
          const Bidegree& gs = A.base.gens[A.index(eps, lab)];
          const Bidegree& gt = B.base.gens[B.index(eps2, o)];
          f.deg = {gt.h - gs.h, gt.q - gs.q};
          deg_set = true;
        }
      }
    }
  }
  return f;
}

// --- Reidemeister I ----------------------------------------------------

// Insertion map C(D) -> C(K): for a positive kink
//   y |-> y (x) X_circle + (dot y) (x) 1_circle      into the 0-block;
// for a negative kink
//   y |-> y (x) 1_circle                              into the 1-block.
inline ChainMap r1_insert_map(const CubeComplex& A, const CubeComplex& B,
                              const Rewrite& rw, int sign) {
  auto pos = crossing_positions(A.diagram, B.diagram, {});
  std::size_t nc = B.diagram.crossing_index(rw.crossing1);
  ChainMap f = ChainMap::zero(A.base, B.base, {0, 0});
  for (std::size_t eps = 0; eps < A.res.size(); ++eps) {
    std::size_t eps2 = translate_eps(eps, pos) |
                       (sign > 0 ? 0 : (std::size_t(1) << nc));
    const ResolutionState& rb = B.res[eps2];
    auto cm = match_circles(A.res[eps], rb, rw.edge_map);
    int ring = rb.circle_of_edge.at(rw.loop_edge);
    int strand = rb.circle_of_edge.at(rw.strand_edge);
    std::size_t ncirc = A.res[eps].circles.size();
    for (std::size_t lab = 0; lab < (std::size_t(1) << ncirc); ++lab) {
      std::size_t base = transport_labels(lab, cm);
      std::size_t src = A.index(eps, lab);
      if (sign > 0) {
        f.matrix.toggle(B.index(eps2, base | (std::size_t(1) << ring)), src);
        if (!((base >> strand) & 1))
          f.matrix.toggle(B.index(eps2, base | (std::size_t(1) << strand)), src);
      } else {
        f.matrix.toggle(B.index(eps2, base), src);
      }
    }
  }
  return f;
}

// Removal map C(K) -> C(D), the retraction matching r1_insert_map.
inline ChainMap r1_remove_map(const CubeComplex& A, const CubeComplex& B,
                              const Rewrite& rw, int sign) {
  std::size_t nc = A.diagram.crossing_index(rw.crossing1);
  // eps translation: drop the kink bit
  std::vector<int> pos(A.diagram.crossings.size(), -1);
  for (std::size_t i = 0; i < A.diagram.crossings.size(); ++i) {
    if (i == nc) continue;
    pos[i] = int(B.diagram.crossing_index(A.diagram.crossings[i].id));
  }
  ChainMap f = ChainMap::zero(A.base, B.base, {0, 0});
  for (std::size_t eps = 0; eps < A.res.size(); ++eps) {
    bool bit = (eps >> nc) & 1;
    if ((sign > 0) == bit) continue;  // block without the split circle maps to 0
    const ResolutionState& ra = A.res[eps];
    int ring = ra.circle_of_edge.at(rw.loop_edge);
    std::map<std::string, std::string> emap = rw.edge_map;
    emap.erase(rw.loop_edge);
    auto cm = match_circles(ra, B.res[translate_eps(eps & ~(std::size_t(1) << nc), pos)],
                            emap);
    std::size_t eps2 = translate_eps(eps & ~(std::size_t(1) << nc), pos);
    const ResolutionState& rb = B.res[eps2];
    int strand_b = rb.circle_of_edge.at(rw.edge_map.at(rw.loop_edge));
    std::size_t ncirc = ra.circles.size();
    for (std::size_t lab = 0; lab < (std::size_t(1) << ncirc); ++lab) {
      bool ring_x = (lab >> ring) & 1;
      std::size_t rest = lab & ~(std::size_t(1) << ring);
      std::size_t src = A.index(eps, lab);
      if (sign > 0) {
        // positive kink: project the X-on-ring part
        if (!ring_x) continue;
        f.matrix.toggle(B.index(eps2, transport_labels(rest, cm)), src);
      } else {
        // negative kink: 1-on-ring maps straight, X-on-ring maps to dot
        std::size_t base = transport_labels(rest, cm);
        if (!ring_x) {
          f.matrix.toggle(B.index(eps2, base), src);
        } else if (!((base >> strand_b) & 1)) {
          f.matrix.toggle(B.index(eps2, base | (std::size_t(1) << strand_b)), src);
        }
      }
    }
  }
  return f;
}

// --- Reidemeister II ---------------------------------------------------

struct R2Blocks {
  std::size_t pa, pb;       // crossing bit positions of cA, cB in the big cube
  std::size_t vert;         // vertical combination (bits at pa, pb)
  std::size_t ring;         // circle combination
  int ring_circle(const CubeComplex& big, std::size_t eps_full) const {
    return big.res[eps_full].circle_of_edge.at(mid_under);
  }
  std::string mid_under, mid_over;
};

// Identify the vertical and circle middle combinations of an R2 bigon.
inline R2Blocks r2_blocks(const CubeComplex& big, const std::string& cA,
                          const std::string& cB, const std::string& mid_under,
                          const std::string& mid_over) {
  R2Blocks bl;
  bl.pa = big.diagram.crossing_index(cA);
  bl.pb = big.diagram.crossing_index(cB);
  bl.mid_under = mid_under;
  bl.mid_over = mid_over;
  auto ring_like = [&](std::size_t bits) {
    // eps with all other crossings 0; the middle circle must be exactly
    // {mid_under, mid_over}
    const ResolutionState& r = big.res[bits];
    int k = r.circle_of_edge.at(mid_under);
    return r.circle_of_edge.at(mid_over) == k && r.circles[k].size() == 2;
  };
  std::size_t m1 = std::size_t(1) << bl.pa;
  std::size_t m2 = std::size_t(1) << bl.pb;
  bool ring_10 = ring_like(m1);
  bool ring_01 = ring_like(m2);
  if (ring_10 == ring_01)
    throw std::logic_error("r2_blocks: cannot identify the circle resolution");
  bl.ring = ring_10 ? m1 : m2;
  bl.vert = ring_10 ? m2 : m1;
  return bl;
}

// circle matching between two resolutions of the SAME diagram that agree
// away from the given middle edges (used for the (1,1) <-> ring and
// (0,0) <-> ring identifications in the R2 retraction).
inline std::vector<int> match_same_diagram(const ResolutionState& ra,
                                           const ResolutionState& rb,
                                           const std::set<std::string>& skip_edges,
                                           int skip_circle_a = -1) {
  std::vector<int> out(ra.circles.size(), -1);
  for (std::size_t k = 0; k < ra.circles.size(); ++k) {
    if (int(k) == skip_circle_a) continue;
    for (auto& e : ra.circles[k]) {
      if (skip_edges.count(e)) continue;
      int t = rb.circle_of_edge.at(e);
      if (out[k] >= 0 && out[k] != t)
        throw std::logic_error("match_same_diagram: image not unique");
      out[k] = t;
    }
  }
  return out;
}

// Strong deformation retract data of an R2 bigon: small = C(reduced),
// big = C(with bigon). include: small -> big, project: big -> small,
// homotopy on big with project*include = id and include*project + id = dH + Hd.
struct R2Sdr {
  ChainMap include, project, homotopy;
};

inline R2Sdr r2_sdr(const CubeComplex& small, const CubeComplex& big,
                    const Rewrite& rw_remove) {
  // rw_remove comes from rewrites::r2_remove applied to big.diagram.
  R2Blocks bl = r2_blocks(big, rw_remove.crossing1, rw_remove.crossing2,
                          rw_remove.mid_under, rw_remove.mid_over);
  std::set<std::string> mids{rw_remove.mid_under, rw_remove.mid_over};
  std::size_t both = (std::size_t(1) << bl.pa) | (std::size_t(1) << bl.pb);
  // eps translation big <-> small over the shared crossings
  std::vector<int> pos_big_small(big.diagram.crossings.size(), -1);
  for (std::size_t i = 0; i < big.diagram.crossings.size(); ++i) {
    if (i == bl.pa || i == bl.pb) continue;
    pos_big_small[i] = int(small.diagram.crossing_index(big.diagram.crossings[i].id));
  }
  std::vector<int> pos_small_big(small.diagram.crossings.size(), -1);
  for (std::size_t i = 0; i < small.diagram.crossings.size(); ++i)
    pos_small_big[i] = int(big.diagram.crossing_index(small.diagram.crossings[i].id));

  ChainMap inc = ChainMap::zero(small.base, big.base, {0, 0});
  ChainMap prj = ChainMap::zero(big.base, small.base, {0, 0});
  ChainMap hom = ChainMap::zero(big.base, big.base, {-1, 0});
  hom.is_chain_map = false;

  for (std::size_t eps = 0; eps < small.res.size(); ++eps) {
    // ---- include: small -> vertical block, plus d-component into ring
    std::size_t eps_vert = translate_eps(eps, pos_small_big, bl.vert);
    const ResolutionState& rv = big.res[eps_vert];
    auto cm = match_circles(small.res[eps],  rv, [&] {
      std::map<std::string, std::string> inv;
      for (auto& [k, v] : rw_remove.edge_map) inv[v] = k;  // small edge -> big edge
      return inv;
    }());
    std::size_t nsm = small.res[eps].circles.size();
    // d-component from the vertical block to the (1,1) block, then carried
    // to the ring block with the ring circle labeled 1.
    std::size_t eps_11 = translate_eps(eps, pos_small_big, both);
    std::size_t eps_ring = translate_eps(eps, pos_small_big, bl.ring);
    const ResolutionState& r11 = big.res[eps_11];
    const ResolutionState& rring = big.res[eps_ring];
    int ringc = rring.circle_of_edge.at(rw_remove.mid_under);
    auto cm_11_ring = match_same_diagram(r11, rring, mids);
    for (std::size_t lab = 0; lab < (std::size_t(1) << nsm); ++lab) {
      std::size_t src = small.index(eps, lab);
      std::size_t vlab = transport_labels(lab, cm);
      std::size_t vidx = big.index(eps_vert, vlab);
      inc.matrix.toggle(vidx, src);
      // saddle component vert -> (1,1)
      for (Index t : big.base.d.transposed().row(vidx)) {
        auto [teps, tlab] = big.eps_labels(t);
        if (teps != eps_11) continue;
        std::size_t rl = transport_labels(tlab, cm_11_ring);
        inc.matrix.toggle(big.index(eps_ring, rl), src);
      }
    }
    // ---- project: vertical block -> small; ring block (X on ring) -> via (0,0)
    std::size_t eps_00 = translate_eps(eps, pos_small_big, 0);
    const ResolutionState& r00 = big.res[eps_00];
    auto cm_ring_00 = match_same_diagram(rring, r00, mids, ringc);
    auto cm_v_small = match_circles(rv, small.res[eps], rw_remove.edge_map);
    std::size_t nv = rv.circles.size();
    for (std::size_t lab = 0; lab < (std::size_t(1) << nv); ++lab)
      prj.matrix.toggle(small.index(eps, transport_labels(lab, cm_v_small)),
                        big.index(eps_vert, lab));
    std::size_t nring = rring.circles.size();
    for (std::size_t lab = 0; lab < (std::size_t(1) << nring); ++lab) {
      if (!((lab >> ringc) & 1)) continue;  // only X on the ring maps
      std::size_t l00 = transport_labels(lab & ~(std::size_t(1) << ringc), cm_ring_00);
      std::size_t i00 = big.index(eps_00, l00);
      // saddle component (0,0) -> vertical, then to small
      for (Index t : big.base.d.transposed().row(i00)) {
        auto [teps, tlab] = big.eps_labels(t);
        if (teps != eps_vert) continue;
        prj.matrix.toggle(small.index(eps, transport_labels(tlab, cm_v_small)),
                          big.index(eps_ring, lab));
      }
    }
    // ---- homotopy: (1,1) -> ring (ring labeled 1); ring (X on ring) -> (0,0)
    std::size_t n11 = r11.circles.size();
    auto cm_11_ring2 = cm_11_ring;
    for (std::size_t lab = 0; lab < (std::size_t(1) << n11); ++lab) {
      std::size_t rl = transport_labels(lab, cm_11_ring2);
      hom.matrix.toggle(big.index(eps_ring, rl), big.index(eps_11, lab));
    }
    for (std::size_t lab = 0; lab < (std::size_t(1) << nring); ++lab) {
      if (!((lab >> ringc) & 1)) continue;
      std::size_t l00 = transport_labels(lab & ~(std::size_t(1) << ringc), cm_ring_00);
      hom.matrix.toggle(big.index(eps_00, l00), big.index(eps_ring, lab));
    }
  }
  // exactness checks: these identities pin the construction
  if (!inc.check_chain_map() || !prj.check_chain_map())
    throw std::logic_error("r2_sdr: retraction maps are not chain maps");
  if (!(prj.matrix * inc.matrix == F2Matrix::identity(small.dim())))
    throw std::logic_error("r2_sdr: projection * inclusion != id");
  F2Matrix gf = inc.matrix * prj.matrix + F2Matrix::identity(big.dim());
  if (!(gf == big.base.d * hom.matrix + hom.matrix * big.base.d))
    throw std::logic_error("r2_sdr: homotopy identity fails");
  return R2Sdr{inc, prj, hom};
}

// --- diagram isomorphism search -----------------------------------------

// Match diagrams A and B given a crossing-id correspondence (identity on
// ids absent from cmap). Allows per-crossing slot rotation by two (the
// relabeling that re-orienting the under-strand causes). Returns the edge
// bijection. Throws when no consistent matching exists.
inline std::map<std::string, std::string> match_diagrams(
    const PointedDiagram& A, const PointedDiagram& B,
    std::map<std::string, std::string> cmap) {
  for (auto& c : A.crossings)
    if (!cmap.count(c.id)) cmap[c.id] = c.id;
  for (auto& [a, b] : cmap)
    if (!B.has_crossing(b)) throw std::logic_error("match_diagrams: missing crossing " + b);
  using Attach = std::pair<std::string, int>;
  auto attachments = [](const PointedDiagram& d) {
    std::map<std::string, std::vector<Attach>> at;
    for (auto& c : d.crossings)
      for (int s = 0; s < 4; ++s) at[c.slots[s]].push_back({c.id, s});
    return at;
  };
  auto atA = attachments(A), atB = attachments(B);
  std::map<std::string, int> rot;  // A-crossing -> 0 or 2
  std::map<std::string, std::string> emap;
  auto try_component = [&](const std::string& root, int r0) -> bool {
    std::map<std::string, int> trot{{root, r0}};
    std::map<std::string, std::string> temap;
    std::vector<std::string> stack{root};
    while (!stack.empty()) {
      std::string cid = stack.back();
      stack.pop_back();
      int r = trot.at(cid);
      const Crossing& ca = A.crossing(cid);
      const Crossing& cb = B.crossing(cmap.at(cid));
      for (int s = 0; s < 4; ++s) {
        std::string ea = ca.slots[s];
        std::string eb = cb.slots[(s + r) % 4];
        auto it = temap.find(ea);
        if (it != temap.end()) {
          if (it->second != eb) return false;
        } else if (emap.count(ea)) {
          if (emap[ea] != eb) return false;
        } else {
          temap[ea] = eb;
        }
        // propagate through the other end of ea
        const auto& aa = atA.at(ea);
        const auto& bb = atB.at(eb);
        if (aa.size() != bb.size()) return false;
        Attach cur{cid, s};
        Attach curB{cmap.at(cid), (s + r) % 4};
        Attach othA = (aa[0] == cur) ? aa[1] : aa[0];
        Attach othB = (bb[0] == curB) ? bb[1] : bb[0];
        if (aa.size() == 2 && aa[0] == aa[1]) othA = aa[0];
        if (cmap.at(othA.first) != othB.first) return false;
        int need = ((othB.second - othA.second) % 4 + 4) % 4;
        if (need != 0 && need != 2) return false;
        auto jt = trot.find(othA.first);
        if (jt == trot.end() && !rot.count(othA.first)) {
          trot[othA.first] = need;
          stack.push_back(othA.first);
        } else {
          int have = jt != trot.end() ? jt->second : rot.at(othA.first);
          if (have != need) return false;
        }
      }
    }
    for (auto& [k, v] : trot) rot[k] = v;
    for (auto& [k, v] : temap) emap[k] = v;
    return true;
  };
  for (auto& c : A.crossings) {
    if (rot.count(c.id)) continue;
    if (!try_component(c.id, 0) && !try_component(c.id, 2))
      throw std::logic_error("match_diagrams: no consistent matching at " + c.id);
  }
  for (auto& e : A.edges) {
    if (emap.count(e.id)) continue;
    if (!e.loop())
      throw std::logic_error("match_diagrams: unmatched non-loop edge " + e.id);
    const DiagEdge& be = B.edge(e.id);  // loops must agree by name
    if (!be.loop()) throw std::logic_error("match_diagrams: loop mismatch " + e.id);
    emap[e.id] = e.id;
  }
  // bijectivity
  std::set<std::string> vals;
  for (auto& [k, v] : emap)
    if (!vals.insert(v).second) throw std::logic_error("match_diagrams: not injective");
  if (vals.size() != B.edges.size())
    throw std::logic_error("match_diagrams: not surjective");
  return emap;
}

// Like transport_iso but tolerating a uniform bidegree shift (from
// re-orientation during splices).
inline ChainMap transport_iso_shifted(const CubeComplex& A, const CubeComplex& B,
                                      const std::map<std::string, std::string>& emap,
                                      const std::map<std::string, std::string>& cmap) {
  auto pos = crossing_positions(A.diagram, B.diagram, cmap);
  ChainMap f = ChainMap::zero(A.base, B.base, {0, 0});
  bool deg_set = false;
  for (std::size_t eps = 0; eps < A.res.size(); ++eps) {
    std::size_t eps2 = translate_eps(eps, pos);
    auto cm = match_circles(A.res[eps], B.res[eps2], emap);
    std::size_t ncirc = A.res[eps].circles.size();
    for (std::size_t lab = 0; lab < (std::size_t(1) << ncirc); ++lab) {
      std::size_t tgt = B.index(eps2, transport_labels(lab, cm));
      f.matrix.toggle(tgt, A.index(eps, lab));
      if (!deg_set) {
        f.deg = {B.base.gens[tgt].h - A.base.gens[A.index(eps, lab)].h,
                 B.base.gens[tgt].q - A.base.gens[A.index(eps, lab)].q};
        deg_set = true;
      }
    }
  }
  if (!f.check_homogeneous())
    throw std::logic_error("transport_iso_shifted: not a uniform shift");
  return f;
}

// --- cone decomposition over one crossing --------------------------------

struct ConeSide {
  SmoothResult sm;
  CubeComplex cube;
  F2Matrix to_small;  // block of the big cube -> smoothed cube
  F2Matrix to_big;
};

inline ConeSide cone_side(const CubeComplex& big, const std::string& cid, int bit) {
  ConeSide side;
  side.sm = smooth_crossing(big.diagram, cid, bit);
  side.cube = build_cube(side.sm.diagram);
  std::size_t cpos = big.diagram.crossing_index(cid);
  std::vector<int> pos(big.diagram.crossings.size(), -1);
  for (std::size_t i = 0; i < big.diagram.crossings.size(); ++i) {
    if (i == cpos) continue;
    pos[i] = int(side.cube.diagram.crossing_index(big.diagram.crossings[i].id));
  }
  side.to_small = F2Matrix(side.cube.dim(), big.dim());
  side.to_big = F2Matrix(big.dim(), side.cube.dim());
  for (std::size_t eps = 0; eps < big.res.size(); ++eps) {
    if (int((eps >> cpos) & 1) != bit) continue;
    std::size_t eps2 = translate_eps(eps & ~(std::size_t(1) << cpos), pos);
    auto cm = match_circles(big.res[eps], side.cube.res[eps2], side.sm.edge_image);
    std::size_t ncirc = big.res[eps].circles.size();
    for (std::size_t lab = 0; lab < (std::size_t(1) << ncirc); ++lab) {
      std::size_t sidx = side.cube.index(eps2, transport_labels(lab, cm));
      side.to_small.toggle(sidx, big.index(eps, lab));
      side.to_big.toggle(big.index(eps, lab), sidx);
    }
  }
  return side;
}

// --- Reidemeister III via the categorified Kauffman trick ----------------

inline ChainMap r3_map(const CubeComplex& A, const CubeComplex& B, const Rewrite& rw) {
  const std::string& c = rw.r3_static;
  // old moving crossings in A; new ones in B (paired by strand)
  const std::string c1 = rw.crossing1, c2 = rw.crossing2;
  const std::string n2 = rw.mid_under, n1 = rw.mid_over;
  std::string e_old;
  for (auto& [k, v] : rw.edge_map)
    if (v == rw.strand_edge) e_old = k;
  if (e_old.empty()) throw std::logic_error("r3_map: moving edge not found");

  ConeSide a0 = cone_side(A, c, 0), a1 = cone_side(A, c, 1);
  ConeSide b0 = cone_side(B, c, 0), b1 = cone_side(B, c, 1);
  // the c-saddle components in smoothed coordinates
  F2Matrix uA = a1.to_small * (A.base.d * a0.to_big);
  F2Matrix uB = b1.to_small * (B.base.d * b0.to_big);

  // locate the bigon side: the moving edge must be one of the middles
  auto has_bigon = [&](const PointedDiagram& d, const std::string& x,
                       const std::string& y, const std::string& mover) {
    try {
      auto bi = rewrites::detect_bigon(d, x, y);
      return bi.mid_under == mover || bi.mid_over == mover;
    } catch (...) {
      return false;
    }
  };
  int sb = -1;
  if (has_bigon(a0.sm.diagram, c1, c2, e_old)) sb = 0;
  if (has_bigon(a1.sm.diagram, c1, c2, e_old)) {
    if (sb == 0) throw std::logic_error("r3_map: bigon on both sides");
    sb = 1;
  }
  if (sb < 0) throw std::logic_error("r3_map: no bigon side found");
  if (!has_bigon((sb ? b1 : b0).sm.diagram, n1, n2, rw.strand_edge))
    throw std::logic_error("r3_map: bigon sides disagree");

  ConeSide& Ab = sb ? a1 : a0;
  ConeSide& Bb = sb ? b1 : b0;
  ConeSide& Af = sb ? a0 : a1;
  ConeSide& Bf = sb ? b0 : b1;

  Rewrite redA = rewrites::r2_remove(Ab.sm.diagram, c1, c2);
  Rewrite redB = rewrites::r2_remove(Bb.sm.diagram, n1, n2);
  CubeComplex redAc = build_cube(redA.after);
  CubeComplex redBc = build_cube(redB.after);
  R2Sdr sdrA = r2_sdr(redAc, Ab.cube, redA);
  R2Sdr sdrB = r2_sdr(redBc, Bb.cube, redB);

  // identifications
  std::map<std::string, std::string> cross_free{{c1, n2}, {c2, n1}};
  auto em_free = match_diagrams(Af.sm.diagram, Bf.sm.diagram, cross_free);
  ChainMap isoF = transport_iso_shifted(Af.cube, Bf.cube, em_free, cross_free);
  auto em_red = match_diagrams(redA.after, redB.after, {});
  ChainMap isoR = transport_iso_shifted(redAc, redBc, em_red, {});

  F2Matrix total(B.dim(), A.dim());
  if (sb == 1) {
    // cones over (free -> reduced)
    F2Matrix vA = sdrA.project.matrix * uA;
    F2Matrix vB = sdrB.project.matrix * uB;
    if (!(isoR.matrix * vA == vB * isoF.matrix))
      throw std::logic_error("r3_map: reduced cones do not match");
    total = b0.to_big * (isoF.matrix * a0.to_small) +
            b1.to_big * (sdrB.include.matrix * isoR.matrix * sdrA.project.matrix) *
                a1.to_small +
            b1.to_big * (sdrB.homotopy.matrix * uB * isoF.matrix) * a0.to_small;
  } else {
    // cones over (reduced -> free)
    F2Matrix vA = uA * sdrA.include.matrix;
    F2Matrix vB = uB * sdrB.include.matrix;
    if (!(isoF.matrix * vA == vB * isoR.matrix))
      throw std::logic_error("r3_map: reduced cones do not match");
    total = b0.to_big * (sdrB.include.matrix * isoR.matrix * sdrA.project.matrix) *
                a0.to_small +
            b1.to_big * (isoF.matrix * a1.to_small) +
            b1.to_big * (isoF.matrix * uA * sdrA.homotopy.matrix) * a0.to_small;
  }
  ChainMap f{&A.base, &B.base, {0, 0}, std::move(total), true};
  if (!f.check_homogeneous() || !f.check_chain_map())
    throw std::logic_error("r3_map: result is not a (0,0) chain map");
  return f;
}

// --- dispatch -------------------------------------------------------------

inline ChainMap event_chain_map(const CubeComplex& A, const CubeComplex& B,
                                const Rewrite& rw, const MovieEvent& ev) {
  ChainMap f = ChainMap::zero(A.base, B.base);
  switch (ev.kind) {
    case EventKind::planar:
      f = transport_iso(A, B, rw.edge_map, rw.crossing_map);
      break;
    case EventKind::cap:
    case EventKind::cup:
    case EventKind::swap_points:
    case EventKind::slide: {
      if (A.dim() != B.dim())
        throw std::logic_error("basepoint event changed the complex");
      f = ChainMap{&A.base, &B.base, {0, 0}, F2Matrix::identity(A.dim()), true};
      break;
    }
    case EventKind::birth:
      f = birth_map(A, B, rw);
      break;
    case EventKind::death:
      f = death_map(A, B, rw);
      break;
    case EventKind::saddle: {
      auto strip = [](std::string s) {
        auto k = s.find('@');
        return k == std::string::npos ? s : s.substr(0, k);
      };
      f = saddle_map(A, B, rw, strip(ev.args[0]), strip(ev.args[1]));
      break;
    }
    case EventKind::r1_plus:
    case EventKind::r1_minus: {
      int sign = ev.kind == EventKind::r1_plus ? +1 : -1;
      bool removal = detail::id_is(ev.args[0], 'c') && !A.diagram.has_edge(ev.args[0]);
      f = removal ? r1_remove_map(A, B, rw, sign) : r1_insert_map(A, B, rw, sign);
      break;
    }
    case EventKind::r2: {
      bool removal = A.diagram.has_crossing(ev.args[0]);
      if (removal) {
        R2Sdr sdr = r2_sdr(B, A, rw);
        f = sdr.project;
      } else {
        // build the removal rewrite of the bigger diagram to feed the SDR
        Rewrite back = rewrites::r2_remove(B.diagram, rw.crossing1, rw.crossing2);
        if (back.after == A.diagram) {
          R2Sdr sdr = r2_sdr(A, B, back);
          f = sdr.include;
        } else {
          // the reconstructed small diagram may use different edge ids
          CubeComplex backc = build_cube(back.after);
          R2Sdr sdr = r2_sdr(backc, B, back);
          auto em = match_diagrams(A.diagram, back.after, {});
          ChainMap iso = transport_iso_shifted(A, backc, em, {});
          f = ChainMap{&A.base, &B.base, iso.deg, sdr.include.matrix * iso.matrix, true};
        }
      }
      break;
    }
    case EventKind::r3:
      f = r3_map(A, B, rw);
      break;
  }
  if (!f.check_homogeneous())
    throw std::logic_error("event map not homogeneous [" + ev.text + "]");
  if (!f.check_chain_map())
    throw std::logic_error("event map not a chain map [" + ev.text + "]");
  return f;
}

}  // namespace emaps

}  // namespace khb
