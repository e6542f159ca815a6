#pragma once

// Elementary decorated movie events and their effect on pointed diagrams.
//
// Script syntax (one event per line, comments start with '#'):
//   planar [old=new ...]          relabel edge/crossing/basepoint ids
//   r1+ e5 [from|to]              insert positive kink at an end of e5
//   r1+ c3                        remove the positive kink at c3
//   r1- ...                       same for negative kinks
//   r2 eb ea [from|to] [from|to] [par|anti] [+|-]
//                                 push eb over ea (bigon at chosen ends;
//                                 relative direction; sign of the first
//                                 crossing along ea)
//   r2 c1 c2                      remove the bigon formed by c1, c2
//   r3 e c                        slide the strand piece e across crossing c
//   birth e9                      new crossingless loop edge e9
//   death e9                      remove crossingless basepoint-free loop
//   saddle e1@k e2@m [rev]        band between e1 and e2, attached after
//                                 basepoint position k resp. m
//   cup x e4:0 e4:1               two new x-basepoints at adjacent spots
//   cap p4 p5                     remove two adjacent same-colored points
//   swap p1 p3                    exchange two adjacent basepoints
//   slide p2 c1 [from|to]         slide basepoint across a crossing

#include <optional>
#include <sstream>

#include "khb/diagram.hpp"

namespace khb {

enum class EventKind {
  planar,
  r1_plus,
  r1_minus,
  r2,
  r3,
  birth,
  death,
  saddle,
  cap,
  cup,
  swap_points,
  slide
};

struct MovieEvent {
  EventKind kind;
  std::vector<std::string> args;
  std::string text;  // original line, for error messages
};

struct EventError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline MovieEvent parse_event(const std::string& line) {
  std::istringstream is(line);
  std::string kw;
  is >> kw;
  MovieEvent e;
  e.text = line;
  if (kw == "planar") e.kind = EventKind::planar;
  else if (kw == "r1+") e.kind = EventKind::r1_plus;
  else if (kw == "r1-") e.kind = EventKind::r1_minus;
  else if (kw == "r2") e.kind = EventKind::r2;
  else if (kw == "r3") e.kind = EventKind::r3;
  else if (kw == "birth") e.kind = EventKind::birth;
  else if (kw == "death") e.kind = EventKind::death;
  else if (kw == "saddle") e.kind = EventKind::saddle;
  else if (kw == "cap") e.kind = EventKind::cap;
  else if (kw == "cup") e.kind = EventKind::cup;
  else if (kw == "swap") e.kind = EventKind::swap_points;
  else if (kw == "slide") e.kind = EventKind::slide;
  else throw EventError("unknown event: " + line);
  std::string tok;
  while (is >> tok) e.args.push_back(tok);
  return e;
}

// Result of applying an event: the successor diagram plus provenance.
// edge_map sends each surviving edge of the predecessor to the edge of the
// successor containing (a piece of) it; edges consumed entirely by the
// event are absent.
struct Rewrite {
  PointedDiagram after;
  std::map<std::string, std::string> edge_map;

  std::map<std::string, std::string> crossing_map;  // planar renames

  // event-specific handles (empty when unused)
  std::string crossing1, crossing2;  // created or removed crossings
  std::string loop_edge;             // kink loop / birth / death circle
  std::string strand_edge;           // r1: surviving strand piece at the kink
  std::string mid_under, mid_over;   // r2: bigon middles (in the bigger diagram)
  std::string r3_static;             // r3: the fixed crossing
  std::string slide_crossing, slide_color;
};

namespace detail {

inline bool id_is(const std::string& s, char prefix) {
  return !s.empty() && s[0] == prefix;
}

inline int end_arg(const std::vector<std::string>& args, std::size_t i,
                   int deflt = 1) {
  if (args.size() <= i) return deflt;
  if (args[i] == "from") return 0;
  if (args[i] == "to") return 1;
  throw EventError("expected from|to, got " + args[i]);
}

// Split edge `eid` at `count` interior points. Returns the pieces in order
// along the edge direction; the piece farthest from `end` keeps the id.
// Attachment crossings are named later by the caller; here the cut ends
// are left referring to placeholder names out[i] -> cut_i.
struct SplitPieces {
  std::vector<std::string> ids;  // #count+1 pieces in direction order
};

}  // namespace detail

// Forward declarations of the rewrite appliers.
inline Rewrite apply_event(const PointedDiagram& d, const MovieEvent& e);

namespace rewrites {

inline Rewrite planar_rename(const PointedDiagram& d, const MovieEvent& ev) {
  Rewrite rw;
  rw.after = d;
  std::map<std::string, std::string> ren;
  for (auto& a : ev.args) {
    auto eq = a.find('=');
    if (eq == std::string::npos) throw EventError("planar: expected old=new, got " + a);
    ren[a.substr(0, eq)] = a.substr(eq + 1);
  }
  auto rename = [&](std::string& s) {
    auto it = ren.find(s);
    if (it != ren.end()) s = it->second;
  };
  // injectivity on the touched ids
  {
    std::set<std::string> vals;
    for (auto& [k, v] : ren)
      if (!vals.insert(v).second) throw EventError("planar: duplicate target " + v);
  }
  for (auto& e : rw.after.edges) {
    rename(e.id);
    rename(e.from);
    rename(e.to);
  }
  for (auto& c : rw.after.crossings) {
    rename(c.id);
    for (auto& s : c.slots) rename(s);
  }
  for (auto& p : rw.after.basepoints) {
    rename(p.id);
    rename(p.edge);
  }
  rw.after.normalize();
  rw.after.validate();
  for (auto& e : d.edges) {
    std::string img = e.id;
    auto it = ren.find(img);
    if (it != ren.end()) img = it->second;
    rw.edge_map[e.id] = img;
  }
  for (auto& c : d.crossings) {
    auto it = ren.find(c.id);
    if (it != ren.end()) rw.crossing_map[c.id] = it->second;
  }
  return rw;
}

// Insert a kink on edge `eid` at the chosen end (0 = from, 1 = to).
inline Rewrite r1_insert(const PointedDiagram& d, const std::string& eid, int end,
                         int sign) {
  Rewrite rw;
  rw.after = d;
  auto& nd = rw.after;
  DiagEdge& e = nd.edge(eid);
  std::string nc = nd.fresh_crossing_id();
  std::string lid = nd.fresh_edge_id();
  bool was_loop = e.loop();
  std::string piece = eid;  // id of the new short piece (far side keeps eid)
  if (!was_loop) {
    piece = nd.fresh_edge_id();
    // order along direction: [eid] -> nc -> [piece] (end==to), else
    // [piece] -> nc -> [eid]
  }
  std::string in_piece, out_piece;  // strand arriving at / leaving the kink
  if (was_loop) {
    e.from = nc;
    e.to = nc;
    in_piece = out_piece = eid;
  } else if (end == 1) {
    std::string old_to = e.to;
    e.to = nc;
    DiagEdge np{piece, nc, old_to};
    nd.edges.push_back(np);
    in_piece = eid;
    out_piece = piece;
  } else {
    std::string old_from = e.from;
    e.from = nc;
    DiagEdge np{piece, old_from, nc};
    // basepoints stay on the kept far piece; reattach np before e
    nd.edges.push_back(np);
    in_piece = piece;
    out_piece = eid;
  }
  nd.edges.push_back({lid, nc, nc});
  Crossing cr;
  cr.id = nc;
  cr.sign = sign;
  if (sign > 0) {
    // strand passes under first: [in, loop(over-in), loop(under-out), out]
    cr.slots = {in_piece, lid, lid, out_piece};
  } else {
    // loop enters over at slot 3
    cr.slots = {in_piece, out_piece, lid, lid};
  }
  nd.crossings.push_back(cr);
  nd.normalize();
  nd.validate();
  for (auto& oe : d.edges) rw.edge_map[oe.id] = oe.id;
  rw.crossing1 = nc;
  rw.loop_edge = lid;
  rw.strand_edge = in_piece;
  return rw;
}

// Remove the kink at crossing `cid`. The crossing must have a loop edge on
// two adjacent slots with the stated sign.
inline Rewrite r1_remove(const PointedDiagram& d, const std::string& cid, int sign) {
  const Crossing& c = d.crossing(cid);
  if (c.sign != sign) throw EventError("r1 removal: crossing " + cid + " has wrong sign");
  // find the loop edge: occupies two slots
  std::string lid;
  for (int s = 0; s < 4; ++s)
    if (c.slots[s] == c.slots[(s + 1) % 4]) lid = c.slots[s];
  if (lid.empty()) throw EventError("r1 removal: " + cid + " is not a kink");
  // strand pieces: the edges at the other two slots, in strand order
  std::string in_piece, out_piece;
  for (int s = 0; s < 4; ++s) {
    if (c.slots[s] == lid) continue;
    (c.slot_incoming(s) ? in_piece : out_piece) = c.slots[s];
  }
  Rewrite rw;
  rw.after = d;
  auto& nd = rw.after;
  nd.crossings.erase(nd.crossings.begin() + nd.crossing_index(cid));
  // merge in_piece + loop + out_piece in strand order, keeping in_piece id
  auto pts_of = [&](const std::string& eid) {
    std::vector<Basepoint> out;
    for (auto& p : nd.basepoints)
      if (p.edge == eid) out.push_back(p);
    std::sort(out.begin(), out.end(),
              [](const Basepoint& a, const Basepoint& b) { return a.pos < b.pos; });
    return out;
  };
  if (in_piece == out_piece) {
    // kink on a closed circle: result is a free loop with the loop's points
    DiagEdge& e = nd.edge(in_piece);
    e.from.clear();
    e.to.clear();
    int base = 0;
    for (auto& p : pts_of(in_piece)) nd.basepoints[[&] {
      for (std::size_t i = 0; i < nd.basepoints.size(); ++i)
        if (nd.basepoints[i].id == p.id) return i;
      throw EventError("r1 removal: lost basepoint");
    }()].pos = base++;
    for (auto& p : pts_of(lid)) {
      for (auto& q : nd.basepoints)
        if (q.id == p.id) {
          q.edge = in_piece;
          q.pos = base++;
        }
    }
    nd.edges.erase(nd.edges.begin() + nd.edge_index(lid));
  } else {
    DiagEdge& ein = nd.edge(in_piece);
    const DiagEdge eout = nd.edge(out_piece);
    ein.to = eout.to;
    if (ein.from == cid) ein.from = eout.to;  // cannot happen; guard
    int base = int(pts_of(in_piece).size());
    for (auto& p : pts_of(lid))
      for (auto& q : nd.basepoints)
        if (q.id == p.id) {
          q.edge = in_piece;
          q.pos = base++;
        }
    for (auto& p : pts_of(out_piece))
      for (auto& q : nd.basepoints)
        if (q.id == p.id) {
          q.edge = in_piece;
          q.pos = base++;
        }
    // reattach out_piece's far end
    for (auto& cr : nd.crossings)
      for (auto& s : cr.slots)
        if (s == out_piece) s = in_piece;
    nd.edges.erase(nd.edges.begin() + nd.edge_index(out_piece));
    if (ein.to == cid) {
      // strand closed through the kink only: free loop
      ein.from.clear();
      ein.to.clear();
    }
  }
  nd.normalize();
  nd.validate();
  for (auto& oe : d.edges) {
    if (oe.id == lid) rw.edge_map[oe.id] = in_piece;
    else if (oe.id == out_piece) rw.edge_map[oe.id] = in_piece;
    else rw.edge_map[oe.id] = oe.id;
  }
  rw.crossing1 = cid;
  rw.loop_edge = lid;
  rw.strand_edge = in_piece;
  return rw;
}

// Insert an R2 bigon: `eb` passes over `ea`.
inline Rewrite r2_insert(const PointedDiagram& d, const std::string& eb_id, int eb_end,
                         const std::string& ea_id, int ea_end, bool parallel,
                         int first_sign) {
  if (eb_id == ea_id) throw EventError("r2: need two distinct edges");
  Rewrite rw;
  rw.after = d;
  auto& nd = rw.after;
  std::string cA = nd.fresh_crossing_id();
  std::string cB;
  {
    // need two fresh ids
    Crossing tmp;
    tmp.id = cA;
    tmp.slots = {"", "", "", ""};
    nd.crossings.push_back(tmp);
    cB = nd.fresh_crossing_id();
    nd.crossings.pop_back();
  }
  // split ea into [A0, eam, A1] along its direction; cA sits after A0.
  std::string eam = nd.fresh_edge_id();
  std::string ea_new = nd.fresh_edge_id("e");
  if (ea_new == eam) ea_new = eam + "a";
  std::string A0, A1;
  {
    DiagEdge& ea = nd.edge(ea_id);
    if (ea.loop()) {
      A0 = ea_id;
      A1 = ea_id;  // circle: one outer piece
      ea.from = cB;
      ea.to = cA;
      nd.edges.push_back({eam, cA, cB});
    } else if (ea_end == 1) {
      A0 = ea_id;
      A1 = ea_new;
      std::string old_to = ea.to;
      ea.to = cA;
      nd.edges.push_back({eam, cA, cB});
      nd.edges.push_back({ea_new, cB, old_to});
    } else {
      A0 = ea_new;
      A1 = ea_id;
      std::string old_from = ea.from;
      ea.from = cB;
      nd.edges.push_back({eam, cA, cB});
      nd.edges.push_back({ea_new, old_from, cA});
    }
  }
  // split eb into [B0, ebm, B1]; B0 reaches the bigon first along eb.
  std::string ebm = nd.fresh_edge_id();
  std::string eb_new = nd.fresh_edge_id();
  std::string B0, B1;
  std::string b_first = parallel ? cA : cB;   // crossing met first along eb
  std::string b_second = parallel ? cB : cA;
  {
    DiagEdge& eb = nd.edge(eb_id);
    if (eb.loop()) {
      B0 = eb_id;
      B1 = eb_id;
      eb.from = b_second;
      eb.to = b_first;
      nd.edges.push_back({ebm, b_first, b_second});
    } else if (eb_end == 1) {
      B0 = eb_id;
      B1 = eb_new;
      std::string old_to = eb.to;
      eb.to = b_first;
      nd.edges.push_back({ebm, b_first, b_second});
      nd.edges.push_back({eb_new, b_second, old_to});
    } else {
      B0 = eb_new;
      B1 = eb_id;
      std::string old_from = eb.from;
      eb.from = b_first;
      nd.edges.push_back({ebm, b_first, b_second});
      nd.edges.push_back({eb_new, old_from, b_first});
    }
  }
  auto make_crossing = [&](const std::string& id, int sign, const std::string& uin,
                           const std::string& uout, const std::string& oin,
                           const std::string& oout) {
    Crossing cr;
    cr.id = id;
    cr.sign = sign;
    if (sign > 0) cr.slots = {uin, oin, uout, oout};
    else cr.slots = {uin, oout, uout, oin};
    nd.crossings.push_back(cr);
  };
  if (parallel) {
    make_crossing(cA, first_sign, A0, eam, B0, ebm);
    make_crossing(cB, -first_sign, eam, A1, ebm, B1);
  } else {
    make_crossing(cA, first_sign, A0, eam, ebm, B1);
    make_crossing(cB, -first_sign, eam, A1, B0, ebm);
  }
  nd.normalize();
  nd.validate();
  for (auto& oe : d.edges) rw.edge_map[oe.id] = oe.id;
  rw.crossing1 = cA;
  rw.crossing2 = cB;
  rw.mid_under = eam;
  rw.mid_over = ebm;
  return rw;
}

// Detect the bigon structure between two crossings: the two middle edges
// (under/over), the four outer strand pieces.
struct BigonInfo {
  std::string cA, cB;        // cA = the crossing where the under strand enters
  std::string mid_under, mid_over;
  std::string under_in, under_out, over_in, over_out;
};

inline BigonInfo detect_bigon(const PointedDiagram& d, const std::string& c1,
                              const std::string& c2) {
  const Crossing& x1 = d.crossing(c1);
  const Crossing& x2 = d.crossing(c2);
  if (x1.sign + x2.sign != 0) throw EventError("r2 removal: signs not opposite");
  // middles: edges attached to both crossings, under at both / over at both
  auto under_edges = [&](const Crossing& c) {
    return std::set<std::string>{c.slots[0], c.slots[2]};
  };
  auto over_edges = [&](const Crossing& c) {
    return std::set<std::string>{c.slots[c.over_in()], c.slots[c.over_out()]};
  };
  std::string mu, mo;
  for (auto& e : under_edges(x1))
    if (under_edges(x2).count(e)) mu = e;
  for (auto& e : over_edges(x1))
    if (over_edges(x2).count(e)) mo = e;
  if (mu.empty() || mo.empty())
    throw EventError("r2 removal: " + c1 + "," + c2 + " do not bound a bigon");
  if (mu == mo) throw EventError("r2 removal: degenerate bigon");
  const DiagEdge& emu = d.edge(mu);
  const DiagEdge& emo = d.edge(mo);
  auto ends_ok = [&](const DiagEdge& e) {
    return (e.from == c1 && e.to == c2) || (e.from == c2 && e.to == c1);
  };
  if (!ends_ok(emu) || !ends_ok(emo))
    throw EventError("r2 removal: middles not between the crossings");
  BigonInfo bi;
  bi.mid_under = mu;
  bi.mid_over = mo;
  bi.cA = emu.from;  // under strand runs cA -> cB
  bi.cB = emu.to;
  const Crossing& xa = d.crossing(bi.cA);
  const Crossing& xb = d.crossing(bi.cB);
  bi.under_in = xa.slots[0];
  bi.under_out = xb.slots[2];
  if (xa.slots[2] != mu || xb.slots[0] != mu)
    throw EventError("r2 removal: middle not the under strand between crossings");
  bi.over_in = (xa.slots[xa.over_in()] == mo) ? xb.slots[xb.over_in()]
                                              : xa.slots[xa.over_in()];
  bi.over_out = (xa.slots[xa.over_out()] == mo) ? xb.slots[xb.over_out()]
                                                : xa.slots[xa.over_out()];
  return bi;
}

inline Rewrite r2_remove(const PointedDiagram& d, const std::string& c1,
                         const std::string& c2) {
  BigonInfo bi = detect_bigon(d, c1, c2);
  Rewrite rw;
  rw.after = d;
  auto& nd = rw.after;
  nd.crossings.erase(nd.crossings.begin() + nd.crossing_index(bi.cA));
  nd.crossings.erase(nd.crossings.begin() + nd.crossing_index(bi.cB));
  std::map<std::string, std::string> cur;
  for (auto& e : d.edges) cur[e.id] = e.id;
  auto merge_chain = [&](std::vector<std::string> chain) {
    // merge chain[0] <- chain[1] <- ... keeping chain[0]'s id; pieces are in
    // strand order, so basepoint positions concatenate.
    std::string keep = cur[chain[0]];
    int base = 0;
    for (auto& p : nd.basepoints)
      if (p.edge == keep) base = std::max(base, p.pos + 1);
    for (std::size_t i = 1; i < chain.size(); ++i) {
      std::string piece = cur[chain[i]];
      if (piece == keep) continue;
      DiagEdge& ek = nd.edge(keep);
      DiagEdge& ep = nd.edge(piece);
      ek.to = ep.to;
      std::vector<Basepoint*> pts;
      for (auto& p : nd.basepoints)
        if (p.edge == piece) pts.push_back(&p);
      std::sort(pts.begin(), pts.end(),
                [](auto* a, auto* b) { return a->pos < b->pos; });
      for (auto* p : pts) {
        p->edge = keep;
        p->pos = base++;
      }
      for (auto& cr : nd.crossings)
        for (auto& s : cr.slots)
          if (s == piece) s = keep;
      nd.edges.erase(nd.edges.begin() + nd.edge_index(piece));
      for (auto& [k, v] : cur)
        if (v == piece) v = keep;
    }
    DiagEdge& ek = nd.edge(keep);
    if (ek.from == bi.cA || ek.from == bi.cB || ek.to == bi.cA || ek.to == bi.cB) {
      // the chain closed up through the removed crossings only
      ek.from.clear();
      ek.to.clear();
    }
  };
  merge_chain({bi.under_in, bi.mid_under, bi.under_out});
  merge_chain({bi.over_in, bi.mid_over, bi.over_out});
  nd.normalize();
  nd.validate();
  for (auto& e : d.edges)
    if (cur.count(e.id) && nd.has_edge(cur[e.id])) rw.edge_map[e.id] = cur[e.id];
  rw.crossing1 = bi.cA;
  rw.crossing2 = bi.cB;
  rw.mid_under = bi.mid_under;
  rw.mid_over = bi.mid_over;
  return rw;
}

inline Rewrite birth(const PointedDiagram& d, const std::string& eid) {
  if (d.has_edge(eid)) throw EventError("birth: edge id " + eid + " already used");
  Rewrite rw;
  rw.after = d;
  rw.after.edges.push_back({eid, "", ""});
  rw.after.normalize();
  rw.after.validate();
  for (auto& e : d.edges) rw.edge_map[e.id] = e.id;
  rw.loop_edge = eid;
  return rw;
}

inline Rewrite death(const PointedDiagram& d, const std::string& eid) {
  const DiagEdge& e = d.edge(eid);
  if (!e.loop()) throw EventError("death: " + eid + " is not a crossingless loop");
  for (auto& p : d.basepoints)
    if (p.edge == eid) throw EventError("death: " + eid + " carries basepoints");
  Rewrite rw;
  rw.after = d;
  rw.after.edges.erase(rw.after.edges.begin() + rw.after.edge_index(eid));
  rw.after.normalize();
  rw.after.validate();
  for (auto& oe : d.edges)
    if (oe.id != eid) rw.edge_map[oe.id] = oe.id;
  rw.loop_edge = eid;
  return rw;
}

// Saddle between e1 and e2, attached after basepoint position k1 on e1 and
// k2 on e2 (±1000 meaning before all / after all). If `rev`, the band is
// attached with a half twist: e1's head joins e2's head.
inline Rewrite saddle(const PointedDiagram& d, const std::string& e1, int k1,
                      const std::string& e2, int k2, bool rev) {
  if (e1 == e2) throw EventError("saddle: need two distinct edges");
  Rewrite rw;
  rw.after = d;
  auto& nd = rw.after;
  DiagEdge ea = nd.edge(e1);
  DiagEdge eb = nd.edge(e2);
  // pieces: e1 = [a1 | a2] cut after pos k1; e2 = [b1 | b2] cut after k2.
  // plain: n1 = a1+b2 (id e1), n2 = b1+a2 (id e2)
  // rev:   n1 = a1+rev(b1) (id e1), n2 = rev(a2)+b2 (id e2)
  auto pts = [&](const std::string& eid) {
    std::vector<Basepoint*> out;
    for (auto& p : nd.basepoints)
      if (p.edge == eid) out.push_back(&p);
    std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->pos < b->pos; });
    return out;
  };
  auto apts = pts(e1);
  auto bpts = pts(e2);
  if (!rev) {
    // n1: from = ea.from, to = eb.to; n2: from = eb.from, to = ea.to
    DiagEdge& n1 = nd.edge(e1);
    DiagEdge& n2 = nd.edge(e2);
    std::string eafrom = ea.from, eato = ea.to, ebfrom = eb.from, ebto = eb.to;
    n1.from = eafrom;
    n1.to = ebto;
    n2.from = ebfrom;
    n2.to = eato;
    int pos1 = 0, pos2 = 0;
    for (auto* p : apts)
      if (p->pos <= k1) { p->edge = e1; p->pos = pos1++; }
    for (auto* p : bpts)
      if (p->pos > k2) { p->edge = e1; p->pos = pos1++; }
    for (auto* p : bpts)
      if (p->pos <= k2) { p->edge = e2; p->pos = pos2++; }
    for (auto* p : apts)
      if (p->pos > k1 && p->edge != e1) { p->edge = e2; p->pos = pos2++; }
    // crossing attachments: ea.to side now belongs to n2, eb.to to n1
    // attachments at `to` ends swap edge identity
    // fix crossing slots: the slot previously holding e1's to-end must now
    // hold e2's id, and vice versa. Slots referencing from-ends stay.
    auto fix_to_slot = [&](const std::string& old_edge, const std::string& old_to,
                           const std::string& new_edge) {
      if (old_to.empty()) return;
      Crossing& cr = nd.crossing(old_to);
      for (int s = 0; s < 4; ++s)
        if (cr.slots[s] == old_edge && cr.slot_incoming(s)) cr.slots[s] = new_edge;
    };
    fix_to_slot(e1, eato, e2);
    fix_to_slot(e2, ebto, e1);
  } else {
    // n1 = a1 + reversed(b1): from = ea.from, to = eb.from(!); orientations
    // repaired below. n2 = reversed(a2) + b2: from = ea.to(!), to = eb.to.
    DiagEdge& n1 = nd.edge(e1);
    DiagEdge& n2 = nd.edge(e2);
    std::string eafrom = ea.from, eato = ea.to, ebfrom = eb.from, ebto = eb.to;
    n1.from = eafrom;
    n1.to = ebfrom;
    n2.from = eato;
    n2.to = ebto;
    int pos1 = 0, pos2 = 0;
    for (auto* p : apts)
      if (p->pos <= k1) { p->edge = e1; p->pos = pos1++; }
    {  // reversed b1: points with pos <= k2 in reverse order
      std::vector<Basepoint*> rev_b;
      for (auto* p : bpts)
        if (p->pos <= k2) rev_b.push_back(p);
      std::reverse(rev_b.begin(), rev_b.end());
      for (auto* p : rev_b) { p->edge = e1; p->pos = pos1++; }
    }
    {  // n2: reversed a2 then b2
      std::vector<Basepoint*> rev_a;
      for (auto* p : apts)
        if (p->pos > k1 && p->edge != e1) rev_a.push_back(p);
      std::reverse(rev_a.begin(), rev_a.end());
      for (auto* p : rev_a) { p->edge = e2; p->pos = pos2++; }
      for (auto* p : bpts)
        if (p->pos > k2 && p->edge != e1) { p->edge = e2; p->pos = pos2++; }
    }
    // slot fixes: eb.from-end now belongs to n1 (reversed piece), ea.to-end
    // to n2.
    auto fix_slot = [&](const std::string& old_edge, const std::string& at,
                        bool at_to_end, const std::string& new_edge) {
      if (at.empty()) return;
      Crossing& cr = nd.crossing(at);
      for (int s = 0; s < 4; ++s)
        if (cr.slots[s] == old_edge && cr.slot_incoming(s) == at_to_end)
          cr.slots[s] = new_edge;
    };
    fix_slot(e2, ebfrom, false, e1);
    fix_slot(e1, eato, true, e2);
  }
  // handle closures: if an edge ended up with from == to pointing at no
  // crossing attachment (i.e. it was attached to itself), repair pass will
  // recompute; loops among crossingless edges need from/to cleared.
  for (auto& e : nd.edges) {
    if (e.from.empty() != e.to.empty()) {
      // one side cleared: the other attachment vanished; make it a loop
      e.from.clear();
      e.to.clear();
    }
  }
  if (!nd.crossings.empty()) repair_orientations(nd);
  nd.normalize();
  nd.validate();
  for (auto& oe : d.edges) rw.edge_map[oe.id] = oe.id;  // e1,e2 map to both; see note
  rw.edge_map[e1] = e1;
  rw.edge_map[e2] = e2;
  return rw;
}

inline Rewrite cup(const PointedDiagram& d, const std::string& color,
                   const std::string& edge, int pos1, int pos2) {
  if (pos2 != pos1 + 1) throw EventError("cup: positions must be adjacent");
  bool has_color = false;
  for (auto& x : d.colors) has_color |= (x == color);
  if (!has_color) throw EventError("cup: unknown color " + color);
  Rewrite rw;
  rw.after = d;
  auto& nd = rw.after;
  nd.edge(edge);  // existence check
  for (auto& p : nd.basepoints)
    if (p.edge == edge && p.pos >= pos1) p.pos += 2;
  std::string p1 = nd.fresh_basepoint_id();
  nd.basepoints.push_back({p1, edge, pos1, color});
  std::string p2 = nd.fresh_basepoint_id();
  nd.basepoints.push_back({p2, edge, pos2, color});
  nd.normalize();
  nd.validate();
  for (auto& e : d.edges) rw.edge_map[e.id] = e.id;
  return rw;
}

inline Rewrite cap(const PointedDiagram& d, const std::string& p1, const std::string& p2) {
  const Basepoint& a = d.basepoint(p1);
  const Basepoint& b = d.basepoint(p2);
  if (a.color != b.color) throw EventError("cap: colors differ");
  if (a.edge != b.edge || std::abs(a.pos - b.pos) != 1)
    throw EventError("cap: basepoints not adjacent on one edge");
  Rewrite rw;
  rw.after = d;
  auto& nd = rw.after;
  std::erase_if(nd.basepoints, [&](const Basepoint& p) { return p.id == p1 || p.id == p2; });
  nd.normalize();
  nd.validate();
  for (auto& e : d.edges) rw.edge_map[e.id] = e.id;
  return rw;
}

inline Rewrite swap_points(const PointedDiagram& d, const std::string& p1,
                           const std::string& p2) {
  const Basepoint& a = d.basepoint(p1);
  const Basepoint& b = d.basepoint(p2);
  if (a.edge != b.edge || std::abs(a.pos - b.pos) != 1)
    throw EventError("swap: basepoints not adjacent on one edge");
  Rewrite rw;
  rw.after = d;
  int pa = a.pos, pb = b.pos;
  for (auto& p : rw.after.basepoints) {
    if (p.id == p1) p.pos = pb;
    if (p.id == p2) p.pos = pa;
  }
  rw.after.normalize();
  rw.after.validate();
  for (auto& e : d.edges) rw.edge_map[e.id] = e.id;
  return rw;
}

inline Rewrite slide(const PointedDiagram& d, const std::string& pid,
                     const std::string& cid, std::optional<int> end_hint) {
  const Basepoint& p = d.basepoint(pid);
  const DiagEdge& e = d.edge(p.edge);
  const Crossing& c = d.crossing(cid);
  auto points = d.basepoints_on(p.edge);
  bool at_to = e.to == cid && p.pos == points.back()->pos;
  bool at_from = e.from == cid && p.pos == points.front()->pos;
  if (end_hint) {
    at_to = at_to && *end_hint == 1;
    at_from = at_from && *end_hint == 0;
  }
  if (at_to && at_from && !end_hint)
    throw EventError("slide: ambiguous (both ends at " + cid + "); pass from|to");
  if (!at_to && !at_from)
    throw EventError("slide: " + pid + " is not adjacent to " + cid);
  bool via_to = at_to;
  // find the slot where this end attaches
  int slot = -1;
  for (int s = 0; s < 4; ++s) {
    if (c.slots[s] != p.edge) continue;
    if (c.slot_incoming(s) == via_to) slot = s;
  }
  if (slot < 0) throw EventError("slide: attachment not found");
  int tslot = Crossing::strand_partner(slot);
  std::string target = c.slots[tslot];
  bool target_to_end = c.slot_incoming(tslot);  // target's to-end sits at c
  Rewrite rw;
  rw.after = d;
  for (auto& q : rw.after.basepoints)
    if (q.id == pid) {
      q.edge = target;
      int maxpos = -1, minpos = 1;
      for (auto& r : rw.after.basepoints)
        if (r.edge == target && r.id != pid) {
          maxpos = std::max(maxpos, r.pos);
          minpos = std::min(minpos, r.pos);
        }
      q.pos = target_to_end ? maxpos + 1 : minpos - 1;
    }
  rw.after.normalize();
  rw.after.validate();
  for (auto& oe : d.edges) rw.edge_map[oe.id] = oe.id;
  rw.slide_crossing = cid;
  rw.slide_color = p.color;
  return rw;
}

// Slide the strand piece `eid` across crossing `cid`. The triangle has
// vertices c1 = eid.from, c2 = eid.to and cid; the moving strand passes
// entirely over or entirely under the two static strands. Signs are
// preserved; the moving strand afterwards crosses the static strands on
// the far side of cid, in the opposite order.
inline Rewrite r3(const PointedDiagram& d, const std::string& eid, const std::string& cid) {
  const DiagEdge& e = d.edge(eid);
  if (e.loop() || e.from == e.to) throw EventError("r3: " + eid + " is not a triangle side");
  std::string c1 = e.from, c2 = e.to;
  if (c1 == cid || c2 == cid) throw EventError("r3: " + eid + " touches " + cid);
  const Crossing& x1 = d.crossing(c1);
  const Crossing& x2 = d.crossing(c2);
  const Crossing& xc = d.crossing(cid);
  for (auto& p : d.basepoints)
    if (p.edge == eid) throw EventError("r3: basepoint on the moving edge");

  auto edge_slots = [&](const Crossing& c, const std::string& id) {
    std::vector<int> out;
    for (int s = 0; s < 4; ++s)
      if (c.slots[s] == id) out.push_back(s);
    return out;
  };
  // moving strand over or under at c1/c2
  auto is_under_at = [&](const Crossing& c, int slot) { return slot == 0 || slot == 2; };
  std::vector<int> e_at_1 = edge_slots(x1, eid), e_at_2 = edge_slots(x2, eid);
  if (e_at_1.size() != 1 || e_at_2.size() != 1)
    throw EventError("r3: moving edge attaches twice to one crossing");
  bool mover_under = is_under_at(x1, e_at_1[0]);
  if (mover_under != is_under_at(x2, e_at_2[0]))
    throw EventError("r3: moving strand must be over or under both static strands");
  // moving strand neighbours
  std::string a = x1.slots[Crossing::strand_partner(e_at_1[0])];
  std::string b = x2.slots[Crossing::strand_partner(e_at_2[0])];
  if (a == eid || b == eid) throw EventError("r3: moving strand degenerate");
  // static edges of the triangle: connect c1/c2 with cid
  auto static_to_c = [&](const Crossing& x, const std::string& skip,
                         const std::string& skip2) {
    std::vector<std::string> cands;
    for (int s = 0; s < 4; ++s) {
      const std::string& ed = x.slots[s];
      if (ed == skip || ed == skip2) continue;
      const DiagEdge& de = d.edge(ed);
      if ((de.from == x.id && de.to == cid) || (de.to == x.id && de.from == cid))
        cands.push_back(ed);
    }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    if (cands.size() != 1) throw EventError("r3: triangle side not unique at " + x.id);
    return cands[0];
  };
  std::string f = static_to_c(x1, eid, a);
  std::string g = static_to_c(x2, eid, b);
  if (f == g) throw EventError("r3: degenerate triangle");
  for (auto& p : d.basepoints)
    if (p.edge == f || p.edge == g)
      throw EventError("r3: basepoint on a triangle side");
  // far continuations at cid (slot-determined, so a shared far edge with
  // two distinct arms is fine)
  auto far_slot_of = [&](const std::string& near) {
    auto sl = edge_slots(xc, near);
    if (sl.size() != 1) throw EventError("r3: static edge attaches twice at " + cid);
    return Crossing::strand_partner(sl[0]);
  };
  int fs = far_slot_of(f), gs = far_slot_of(g);
  std::string f_opp = xc.slots[fs], g_opp = xc.slots[gs];
  if (f_opp == f || g_opp == g) throw EventError("r3: static strand kinks at " + cid);
  if (f_opp == g || g_opp == f) throw EventError("r3: static strands too short");
  // the other static edges at c1/c2 (the strand pieces away from cid)
  auto pre_of = [&](const Crossing& x, const std::string& near, const std::string& skipa) {
    auto sl = edge_slots(x, near);
    if (sl.size() != 1) throw EventError("r3: static edge attaches twice at " + x.id);
    return x.slots[Crossing::strand_partner(sl[0])];
  };
  std::string f_pre = pre_of(x1, f, a);
  std::string g_pre = pre_of(x2, g, b);
  if (f_pre == f || g_pre == g) throw EventError("r3: static strand kinks at the triangle");

  Rewrite rw;
  rw.after = d;
  auto& nd = rw.after;
  // record strand data before deleting. The far end sits at cid in slot
  // fs/gs; it is the edge's from-end exactly when that slot is outgoing.
  bool fo_from_c = !xc.slot_incoming(fs);  // f_opp directed away from cid
  bool go_from_c = !xc.slot_incoming(gs);
  bool fpre_into_c1 = d.edge(f_pre).to == c1;
  bool gpre_into_c2 = d.edge(g_pre).to == c2;
  int sign1 = x1.sign, sign2 = x2.sign;
  nd.crossings.erase(nd.crossings.begin() + nd.crossing_index(c1));
  nd.crossings.erase(nd.crossings.begin() + nd.crossing_index(c2));
  nd.edges.erase(nd.edges.begin() + nd.edge_index(eid));
  // fresh names
  std::string n1 = nd.fresh_crossing_id();
  nd.crossings.push_back({n1, {"", "", "", ""}, +1});
  std::string n2 = nd.fresh_crossing_id();
  nd.crossings.pop_back();
  std::string em = nd.fresh_edge_id();
  nd.edges.push_back({em, "", ""});
  std::string fonew = nd.fresh_edge_id();
  nd.edges.push_back({fonew, "", ""});
  std::string gonew = nd.fresh_edge_id();
  nd.edges.pop_back();
  nd.edges.pop_back();

  // merge f_pre + f into f_pre (direction along the F strand)
  auto merge_pair = [&](const std::string& keep, const std::string& drop,
                        bool keep_into) {
    DiagEdge& ek = nd.edge(keep);
    const DiagEdge ed = nd.edge(drop);
    if (keep_into) {
      // keep -> junction -> drop
      ek.to = ed.to;
    } else {
      ek.from = ed.from;
    }
    for (auto& cr : nd.crossings)
      for (auto& s : cr.slots)
        if (s == drop) s = keep;
    nd.edges.erase(nd.edges.begin() + nd.edge_index(drop));
  };
  merge_pair(f_pre, f, fpre_into_c1);
  merge_pair(g_pre, g, gpre_into_c2);
  // cut f_opp at n2 (near cid side gets the fresh id), g_opp at n1
  auto cut_near = [&](const std::string& eidc, const std::string& fresh,
                      const std::string& newc, bool dir_from_c) {
    DiagEdge& ed = nd.edge(eidc);
    if (dir_from_c) {
      // cid -> [fresh] -> newc -> [eidc] -> ...
      std::string oldfrom = ed.from;
      ed.from = newc;
      nd.edges.push_back({fresh, oldfrom, newc});
    } else {
      // ... -> [eidc] -> newc -> [fresh] -> cid
      std::string oldto = ed.to;
      ed.to = newc;
      nd.edges.push_back({fresh, newc, oldto});
    }
  };
  cut_near(f_opp, fonew, n2, fo_from_c);
  cut_near(g_opp, gonew, n1, go_from_c);
  // re-route the moving strand: a -> n1 -> em -> n2 -> b
  {
    DiagEdge& ea = nd.edge(a);
    if (ea.to == c1) ea.to = n1;
    if (ea.from == c1) ea.from = n1;  // a==b loop case handled below too
    DiagEdge& eb2 = nd.edge(b);
    if (eb2.from == c2) eb2.from = n2;
    if (eb2.to == c2) eb2.to = n2;
    nd.edges.push_back({em, n1, n2});
  }
  auto make_crossing = [&](const std::string& id, int sign, const std::string& uin,
                           const std::string& uout, const std::string& oin,
                           const std::string& oout) {
    Crossing cr;
    cr.id = id;
    cr.sign = sign;
    if (sign > 0) cr.slots = {uin, oin, uout, oout};
    else cr.slots = {uin, oout, uout, oin};
    nd.crossings.push_back(cr);
  };
  // n1: moving x G-strand. G pieces at n1: gonew/g_opp by direction.
  std::string g_in = go_from_c ? gonew : g_opp;
  std::string g_out = go_from_c ? g_opp : gonew;
  std::string f_in = fo_from_c ? fonew : f_opp;
  std::string f_out = fo_from_c ? f_opp : fonew;
  if (mover_under) {
    make_crossing(n1, sign2, a, em, g_in, g_out);
    make_crossing(n2, sign1, em, b, f_in, f_out);
  } else {
    make_crossing(n1, sign2, g_in, g_out, a, em);
    make_crossing(n2, sign1, f_in, f_out, em, b);
  }
  nd.normalize();
  nd.validate();
  for (auto& oe : d.edges) {
    if (oe.id == eid) rw.edge_map[oe.id] = em;
    else if (oe.id == f) rw.edge_map[oe.id] = f_pre;
    else if (oe.id == g) rw.edge_map[oe.id] = g_pre;
    else rw.edge_map[oe.id] = oe.id;
  }
  rw.crossing1 = c1;  // old moving crossings
  rw.crossing2 = c2;
  rw.r3_static = cid;
  rw.mid_under = n2;  // new crossing paired with c1 (same strands)
  rw.mid_over = n1;   // new crossing paired with c2
  rw.strand_edge = em;
  return rw;
}

}  // namespace rewrites

inline Rewrite apply_event(const PointedDiagram& d, const MovieEvent& ev) {
  using namespace rewrites;
  try {
    switch (ev.kind) {
      case EventKind::planar:
        return planar_rename(d, ev);
      case EventKind::r1_plus:
      case EventKind::r1_minus: {
        if (ev.args.empty()) throw EventError("r1: missing argument");
        int sign = ev.kind == EventKind::r1_plus ? +1 : -1;
        if (detail::id_is(ev.args[0], 'c') && !d.has_edge(ev.args[0]))
          return r1_remove(d, ev.args[0], sign);
        return r1_insert(d, ev.args[0], detail::end_arg(ev.args, 1), sign);
      }
      case EventKind::r2: {
        if (ev.args.size() < 2) throw EventError("r2: need two arguments");
        if (d.has_crossing(ev.args[0])) return r2_remove(d, ev.args[0], ev.args[1]);
        bool parallel = false;
        int sign = -1;
        int be = 1, ae = 1;
        std::size_t i = 2;
        if (ev.args.size() > i && (ev.args[i] == "from" || ev.args[i] == "to"))
          be = detail::end_arg(ev.args, i++);
        if (ev.args.size() > i && (ev.args[i] == "from" || ev.args[i] == "to"))
          ae = detail::end_arg(ev.args, i++);
        for (; i < ev.args.size(); ++i) {
          if (ev.args[i] == "par") parallel = true;
          else if (ev.args[i] == "anti") parallel = false;
          else if (ev.args[i] == "+") sign = +1;
          else if (ev.args[i] == "-") sign = -1;
          else throw EventError("r2: bad flag " + ev.args[i]);
        }
        return r2_insert(d, ev.args[0], be, ev.args[1], ae, parallel, sign);
      }
      case EventKind::r3:
        if (ev.args.size() != 2) throw EventError("r3: need edge and crossing");
        return r3(d, ev.args[0], ev.args[1]);
      case EventKind::birth:
        if (ev.args.size() != 1) throw EventError("birth: need one edge id");
        return birth(d, ev.args[0]);
      case EventKind::death:
        if (ev.args.size() != 1) throw EventError("death: need one edge id");
        return death(d, ev.args[0]);
      case EventKind::saddle: {
        if (ev.args.size() < 2) throw EventError("saddle: need two attachments");
        auto parse_at = [](const std::string& s) -> std::pair<std::string, int> {
          auto k = s.find('@');
          if (k == std::string::npos) return {s, 1000000};
          return {s.substr(0, k), std::stoi(s.substr(k + 1))};
        };
        auto [e1, k1] = parse_at(ev.args[0]);
        auto [e2, k2] = parse_at(ev.args[1]);
        bool rev = ev.args.size() > 2 && ev.args[2] == "rev";
        return saddle(d, e1, k1, e2, k2, rev);
      }
      case EventKind::cup: {
        if (ev.args.size() != 3) throw EventError("cup: need color and two spots");
        auto parse_spot = [](const std::string& s) -> std::pair<std::string, int> {
          auto k = s.find(':');
          if (k == std::string::npos) throw EventError("cup: spot must be edge:pos");
          return {s.substr(0, k), std::stoi(s.substr(k + 1))};
        };
        auto [ed1, q1] = parse_spot(ev.args[1]);
        auto [ed2, q2] = parse_spot(ev.args[2]);
        if (ed1 != ed2) throw EventError("cup: spots on different edges");
        return cup(d, ev.args[0], ed1, q1, q2);
      }
      case EventKind::cap:
        if (ev.args.size() != 2) throw EventError("cap: need two basepoints");
        return cap(d, ev.args[0], ev.args[1]);
      case EventKind::swap_points:
        if (ev.args.size() != 2) throw EventError("swap: need two basepoints");
        return swap_points(d, ev.args[0], ev.args[1]);
      case EventKind::slide: {
        if (ev.args.size() < 2) throw EventError("slide: need basepoint and crossing");
        std::optional<int> end;
        if (ev.args.size() > 2) end = detail::end_arg(ev.args, 2);
        return slide(d, ev.args[0], ev.args[1], end);
      }
    }
  } catch (const std::exception& ex) {
    throw EventError(std::string(ex.what()) + " [event: " + ev.text + "]");
  }
  throw EventError("unhandled event kind");
}

}  // namespace khb
