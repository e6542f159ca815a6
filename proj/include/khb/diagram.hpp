#pragma once

// Pointed link diagrams: a PD code (crossings with four incident edges in
// counterclockwise slot order, incoming under-strand in slot 0) together
// with colored basepoints sitting on edges.
//
// Slot/sign conventions:
//   slot 0: incoming under-strand        slot 2: outgoing under-strand
//   sign +: over-strand enters at slot 1 and leaves at slot 3
//   sign -: over-strand enters at slot 3 and leaves at slot 1
// The 0-smoothing joins slots (0,3) and (1,2); the 1-smoothing joins
// (0,1) and (2,3). With these choices the all-0 resolution of a positive
// diagram is its oriented (Seifert) resolution.

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "khb/laurent.hpp"

namespace khb {

struct Crossing {
  std::string id;
  std::array<std::string, 4> slots;  // edge ids, ccw, slot 0 = in-under
  int sign = +1;

  int over_in() const { return sign > 0 ? 1 : 3; }
  int over_out() const { return sign > 0 ? 3 : 1; }
  bool slot_incoming(int s) const { return s == 0 || s == over_in(); }
  static int strand_partner(int s) { return s ^ 2; }  // 0<->2, 1<->3
};

struct DiagEdge {
  std::string id;
  // Crossing ids; both empty means a crossingless free loop.
  std::string from, to;
  bool loop() const { return from.empty() && to.empty(); }
};

struct Basepoint {
  std::string id;
  std::string edge;
  int pos = 0;  // order along the edge (from -> to), low to high
  std::string color;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class PointedDiagram {
public:
  std::vector<Crossing> crossings;
  std::vector<DiagEdge> edges;
  std::vector<Basepoint> basepoints;
  std::vector<std::string> colors;

  const Crossing& crossing(const std::string& id) const {
    return crossings[crossing_index(id)];
  }
  Crossing& crossing(const std::string& id) {
    return crossings[crossing_index(id)];
  }
  const DiagEdge& edge(const std::string& id) const {
    return edges[edge_index(id)];
  }
  DiagEdge& edge(const std::string& id) { return edges[edge_index(id)]; }
  const Basepoint& basepoint(const std::string& id) const {
    for (auto& p : basepoints)
      if (p.id == id) return p;
    throw ParseError("unknown basepoint " + id);
  }
  bool has_edge(const std::string& id) const {
    for (auto& e : edges)
      if (e.id == id) return true;
    return false;
  }
  bool has_crossing(const std::string& id) const {
    for (auto& c : crossings)
      if (c.id == id) return true;
    return false;
  }
  std::size_t edge_index(const std::string& id) const {
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (edges[i].id == id) return i;
    throw ParseError("unknown edge " + id);
  }
  std::size_t crossing_index(const std::string& id) const {
    for (std::size_t i = 0; i < crossings.size(); ++i)
      if (crossings[i].id == id) return i;
    throw ParseError("unknown crossing " + id);
  }

  std::vector<const Basepoint*> basepoints_on(const std::string& edge_id) const {
    std::vector<const Basepoint*> out;
    for (auto& p : basepoints)
      if (p.edge == edge_id) out.push_back(&p);
    std::sort(out.begin(), out.end(),
              [](const Basepoint* a, const Basepoint* b) { return a->pos < b->pos; });
    return out;
  }

  std::string fresh_edge_id(const std::string& hint = "e") const {
    for (int k = 1;; ++k) {
      std::string id = hint + std::to_string(k);
      if (!has_edge(id)) return id;
    }
  }
  std::string fresh_crossing_id() const {
    for (int k = 1;; ++k) {
      std::string id = "c" + std::to_string(k);
      if (!has_crossing(id)) return id;
    }
  }
  std::string fresh_basepoint_id() const {
    for (int k = 1;; ++k) {
      std::string id = "p" + std::to_string(k);
      bool used = false;
      for (auto& p : basepoints) used |= (p.id == id);
      if (!used) return id;
    }
  }

  // Canonical form: components sorted by id, basepoint positions packed.
  void normalize() {
    std::sort(edges.begin(), edges.end(),
              [](const DiagEdge& a, const DiagEdge& b) { return a.id < b.id; });
    std::sort(crossings.begin(), crossings.end(),
              [](const Crossing& a, const Crossing& b) { return a.id < b.id; });
    std::sort(basepoints.begin(), basepoints.end(),
              [](const Basepoint& a, const Basepoint& b) { return a.id < b.id; });
    std::map<std::string, std::vector<Basepoint*>> by_edge;
    for (auto& p : basepoints) by_edge[p.edge].push_back(&p);
    for (auto& [e, ps] : by_edge) {
      std::stable_sort(ps.begin(), ps.end(), [](const Basepoint* a, const Basepoint* b) {
        return a->pos < b->pos;
      });
      for (std::size_t i = 0; i < ps.size(); ++i) ps[i]->pos = int(i);
    }
  }

  void validate() const {
    std::set<std::string> eids, cids, pids;
    for (auto& e : edges)
      if (!eids.insert(e.id).second) throw ParseError("duplicate edge id " + e.id);
    for (auto& c : crossings)
      if (!cids.insert(c.id).second) throw ParseError("duplicate crossing id " + c.id);
    for (auto& p : basepoints)
      if (!pids.insert(p.id).second) throw ParseError("duplicate basepoint id " + p.id);
    std::set<std::string> cols(colors.begin(), colors.end());
    if (cols.size() != colors.size()) throw ParseError("duplicate color");
    for (auto& p : basepoints) {
      if (!eids.count(p.edge))
        throw ParseError("unknown edge " + p.edge + " on basepoint " + p.id);
      if (!cols.count(p.color))
        throw ParseError("unknown color " + p.color + " on basepoint " + p.id);
    }
    std::map<std::string, int> uses;
    for (auto& c : crossings)
      for (auto& s : c.slots) {
        if (!eids.count(s))
          throw ParseError("crossing " + c.id + " references unknown edge " + s);
        uses[s]++;
      }
    for (auto& e : edges) {
      int n = uses.count(e.id) ? uses[e.id] : 0;
      if (e.loop()) {
        if (n != 0) throw ParseError("loop edge " + e.id + " attached to a crossing");
      } else if (n != 2) {
        throw ParseError("edge " + e.id + " has " + std::to_string(n) +
                         " crossing attachments (dangling edge)");
      }
      if (!e.loop() && (!cids.count(e.from) || !cids.count(e.to)))
        throw ParseError("edge " + e.id + " attached to unknown crossing");
    }
    for (auto& c : crossings) {
      if (c.sign != 1 && c.sign != -1) throw ParseError("crossing " + c.id + ": bad sign");
      for (int s = 0; s < 4; ++s) {
        const DiagEdge& e = edge(c.slots[s]);
        bool in = c.slot_incoming(s);
        const std::string& end = in ? e.to : e.from;
        if (end != c.id)
          throw ParseError("crossing " + c.id + ": inconsistent orientation at slot " +
                           std::to_string(s));
      }
    }
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["crossings"] = nlohmann::ordered_json::array();
    for (auto& c : crossings)
      j["crossings"].push_back(
          {{"id", c.id},
           {"edges", {c.slots[0], c.slots[1], c.slots[2], c.slots[3]}},
           {"sign", c.sign > 0 ? "+" : "-"}});
    j["edges"] = nlohmann::ordered_json::array();
    for (auto& e : edges) {
      nlohmann::ordered_json je{{"id", e.id}};
      je["from"] = e.loop() ? nlohmann::ordered_json() : nlohmann::ordered_json(e.from);
      je["to"] = e.loop() ? nlohmann::ordered_json() : nlohmann::ordered_json(e.to);
      j["edges"].push_back(je);
    }
    j["basepoints"] = nlohmann::ordered_json::array();
    for (auto& p : basepoints)
      j["basepoints"].push_back(
          {{"id", p.id}, {"edge", p.edge}, {"pos", p.pos}, {"color", p.color}});
    j["colors"] = colors;
    return j;
  }

  bool operator==(const PointedDiagram& o) const { return to_json() == o.to_json(); }
};

inline PointedDiagram parse_diagram_json(const nlohmann::json& j) {
  PointedDiagram d;
  for (auto& je : j.at("edges")) {
    DiagEdge e;
    e.id = je.at("id").get<std::string>();
    if (je.contains("from") && !je.at("from").is_null())
      e.from = je.at("from").get<std::string>();
    if (je.contains("to") && !je.at("to").is_null()) e.to = je.at("to").get<std::string>();
    if (e.from.empty() != e.to.empty())
      throw ParseError("edge " + e.id + ": from/to must both be set or both null");
    d.edges.push_back(e);
  }
  if (j.contains("crossings"))
    for (auto& jc : j.at("crossings")) {
      Crossing c;
      c.id = jc.at("id").get<std::string>();
      auto es = jc.at("edges");
      if (es.size() != 4) throw ParseError("crossing " + c.id + ": need 4 edges");
      for (int k = 0; k < 4; ++k) c.slots[k] = es[k].get<std::string>();
      std::string s = jc.at("sign").get<std::string>();
      if (s == "+")
        c.sign = 1;
      else if (s == "-")
        c.sign = -1;
      else
        throw ParseError("crossing " + c.id + ": sign must be + or -");
      d.crossings.push_back(c);
    }
  if (j.contains("colors"))
    for (auto& jx : j.at("colors")) d.colors.push_back(jx.get<std::string>());
  if (j.contains("basepoints"))
    for (auto& jp : j.at("basepoints")) {
      Basepoint p;
      p.id = jp.at("id").get<std::string>();
      p.edge = jp.at("edge").get<std::string>();
      p.pos = jp.at("pos").get<int>();
      p.color = jp.at("color").get<std::string>();
      d.basepoints.push_back(p);
    }
  d.validate();
  d.normalize();
  return d;
}

inline PointedDiagram parse_diagram(const std::string& text) {
  return parse_diagram_json(nlohmann::json::parse(text));
}

// One Kauffman resolution: a partition of the edges into circles. Circles
// are numbered by their smallest edge id, ascending, so numbering is
// deterministic for a normalized diagram.
struct ResolutionState {
  std::vector<int> eps;  // bit per crossing, in crossing order
  std::vector<std::vector<std::string>> circles;
  std::map<std::string, int> circle_of_edge;

  int n_circles() const { return int(circles.size()); }
  int circle_of_basepoint(const PointedDiagram& d, const std::string& bp) const {
    return circle_of_edge.at(d.basepoint(bp).edge);
  }
};

inline ResolutionState resolve(const PointedDiagram& d, const std::vector<int>& eps) {
  if (eps.size() != d.crossings.size())
    throw std::invalid_argument("resolve: wrong assignment length");
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < d.edges.size(); ++i) idx[d.edges[i].id] = i;
  std::vector<std::size_t> parent(d.edges.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  auto unite = [&](const std::string& x, const std::string& y) {
    std::size_t a = find(idx.at(x)), b = find(idx.at(y));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (std::size_t i = 0; i < d.crossings.size(); ++i) {
    const auto& s = d.crossings[i].slots;
    if (eps[i] == 0) {
      unite(s[0], s[3]);
      unite(s[1], s[2]);
    } else {
      unite(s[0], s[1]);
      unite(s[2], s[3]);
    }
  }
  ResolutionState rs;
  rs.eps = eps;
  std::map<std::size_t, int> root_to_circle;
  for (std::size_t i = 0; i < d.edges.size(); ++i) {
    std::size_t r = find(i);
    if (!root_to_circle.count(r)) {
      root_to_circle[r] = int(rs.circles.size());
      rs.circles.emplace_back();
    }
    rs.circles[root_to_circle[r]].push_back(d.edges[i].id);
    rs.circle_of_edge[d.edges[i].id] = root_to_circle[r];
  }
  return rs;
}

inline std::pair<int, int> writhe_shifts(const PointedDiagram& d) {
  int np = 0, nm = 0;
  for (auto& c : d.crossings) (c.sign > 0 ? np : nm)++;
  return {np, nm};
}

// Re-orient every component consistently, fixing crossing slot frames and
// signs. The walk uses only the slot adjacency (arrive at slot s, leave at
// slot s^2), so it works on diagrams whose from/to fields became
// inconsistent after a splice. Where the stored orientation is usable the
// kept direction follows it, so untouched components keep their signs.
inline void repair_orientations(PointedDiagram& d) {
  using Attach = std::pair<std::string, int>;  // (crossing id, slot)
  std::map<std::string, std::vector<Attach>> at;
  for (auto& c : d.crossings)
    for (int s = 0; s < 4; ++s) at[c.slots[s]].push_back({c.id, s});
  for (auto& [e, v] : at) std::sort(v.begin(), v.end());
  // entering[(c,s)] = strand enters the crossing at that slot (to-end of
  // the attached edge sits there).
  std::map<Attach, bool> entering;
  std::map<std::string, int> flip;
  std::set<std::string> seen;
  for (auto& e0 : d.edges) {
    if (seen.count(e0.id)) continue;
    if (e0.loop()) {
      seen.insert(e0.id);
      continue;
    }
    // Head end of the start edge: prefer the attachment matching the
    // stored `to` field (and stored incoming slot if duplicated).
    const auto& as = at.at(e0.id);
    Attach head = as[0];
    {
      std::vector<Attach> at_to;
      for (auto& a : as)
        if (a.first == e0.to) at_to.push_back(a);
      if (at_to.size() == 1) {
        head = at_to[0];
      } else if (at_to.size() == 2) {
        const Crossing& c = d.crossing(e0.to);
        for (auto& a : at_to)
          if (c.slot_incoming(a.second)) { head = a; break; }
      }
    }
    // stored to-end attachment per edge, for flip detection
    auto stored_to_attach = [&](const DiagEdge& e) -> std::optional<Attach> {
      std::vector<Attach> cand;
      for (auto& a : at.at(e.id))
        if (a.first == e.to) cand.push_back(a);
      if (cand.size() == 1) return cand[0];
      if (cand.size() == 2) {
        const Crossing& c = d.crossing(e.to);
        for (auto& a : cand)
          if (c.slot_incoming(a.second)) return a;
      }
      return std::nullopt;
    };
    std::string cur = e0.id;
    Attach cur_head = head;
    while (!seen.count(cur)) {
      seen.insert(cur);
      const auto& ats = at.at(cur);
      Attach tail = (ats[0] == cur_head) ? ats[1] : ats[0];
      entering[cur_head] = true;
      entering[tail] = false;
      auto sto = stored_to_attach(d.edge(cur));
      flip[cur] = (sto && *sto == cur_head) ? 0 : 1;
      // continue through the crossing at the head
      const Crossing& c = d.crossing(cur_head.first);
      int out_slot = Crossing::strand_partner(cur_head.second);
      std::string next = c.slots[out_slot];
      // we enter `next` at (c, out_slot): that becomes its tail; its head
      // is its other attachment.
      const auto& nats = at.at(next);
      Attach enter_at{cur_head.first, out_slot};
      cur_head = (nats[0] == enter_at) ? nats[1] : nats[0];
      cur = next;
    }
  }
  // apply edge directions from the walk
  for (auto& e : d.edges) {
    if (e.loop()) continue;
    const auto& as = at.at(e.id);
    Attach head = entering.at(as[0]) ? as[0] : as[1];
    Attach tail = entering.at(as[0]) ? as[1] : as[0];
    e.from = tail.first;
    e.to = head.first;
  }
  for (auto& p : d.basepoints)
    if (flip.count(p.edge) && flip[p.edge] == 1) p.pos = -p.pos;
  // fix crossings from the entering table (computed on old slot numbering)
  for (auto& c : d.crossings) {
    bool e0 = entering.at({c.id, 0});
    bool e1 = entering.at({c.id, 1});
    bool e3 = entering.at({c.id, 3});
    if (!e0) {
      c.slots = {c.slots[2], c.slots[3], c.slots[0], c.slots[1]};
      c.sign = e3 ? +1 : -1;  // old slot 3 is the new slot 1
    } else {
      c.sign = e1 ? +1 : -1;
    }
  }
  d.normalize();
  d.validate();
}

// Remove crossing `cid`, splicing its edges per the chosen smoothing; the
// result is re-oriented. Returns the new diagram plus the map from old
// edge ids to the id of the new edge containing them.
struct SmoothResult {
  PointedDiagram diagram;
  std::map<std::string, std::string> edge_image;
};

inline SmoothResult smooth_crossing(const PointedDiagram& d, const std::string& cid,
                                    int bit) {
  const Crossing c = d.crossing(cid);
  SmoothResult out;
  out.diagram = d;
  auto& nd = out.diagram;
  nd.crossings.erase(nd.crossings.begin() + nd.crossing_index(cid));
  for (auto& e : d.edges) out.edge_image[e.id] = e.id;
  auto cur_of = [&](const std::string& old_id) { return out.edge_image.at(old_id); };

  std::array<std::pair<int, int>, 2> pairs =
      bit == 0 ? std::array<std::pair<int, int>, 2>{{{0, 3}, {1, 2}}}
               : std::array<std::pair<int, int>, 2>{{{0, 1}, {2, 3}}};
  for (auto [sa, sb] : pairs) {
    bool a_to = c.slot_incoming(sa);  // cur A's end at cid is its to-end
    bool b_to = c.slot_incoming(sb);
    std::string ca = cur_of(c.slots[sa]), cb = cur_of(c.slots[sb]);
    if (ca == cb) {
      auto& e = nd.edge(ca);
      e.from.clear();
      e.to.clear();
      continue;
    }
    DiagEdge& eA = nd.edge(ca);
    DiagEdge& eB = nd.edge(cb);
    std::string nfrom, nto;
    if (a_to && !b_to) {
      nfrom = eA.from;
      nto = eB.to;
    } else if (!a_to && b_to) {
      nfrom = eB.from;
      nto = eA.to;
    } else if (a_to && b_to) {
      nfrom = eA.from;
      nto = eB.from;  // B reversed; repaired later
    } else {
      nfrom = eB.to;  // B reversed; repaired later
      nto = eA.to;
    }
    eA.from = nfrom;
    eA.to = nto;
    for (auto& p : nd.basepoints)
      if (p.edge == cb) p.edge = ca;
    // redirect crossing attachments of cb to ca
    for (auto& cr : nd.crossings)
      for (auto& s : cr.slots)
        if (s == cb) s = ca;
    nd.edges.erase(nd.edges.begin() + nd.edge_index(cb));
    for (auto& [k, v] : out.edge_image)
      if (v == cb) v = ca;
  }
  repair_orientations(nd);
  return out;
}

inline int count_loops(const PointedDiagram& d) {
  if (!d.crossings.empty()) throw std::logic_error("count_loops: crossings remain");
  return int(d.edges.size());
}

namespace detail {
// Unnormalized bracket B(D) = sum_eps (-1)^{|eps|} q^{|eps|} (q+1/q)^{circles}.
inline Laurent bracket(const PointedDiagram& d) {
  if (d.crossings.empty()) {
    Laurent circ = Laurent::term(1) + Laurent::term(-1);
    Laurent out = Laurent::term(0);
    for (int i = 0; i < count_loops(d); ++i) out = out * circ;
    return out;
  }
  std::string c = d.crossings.front().id;
  Laurent b0 = bracket(smooth_crossing(d, c, 0).diagram);
  Laurent b1 = bracket(smooth_crossing(d, c, 1).diagram);
  return b0 - Laurent::term(1) * b1;
}
}  // namespace detail

// Kauffman bracket by skein recursion over smoothings, normalized so it
// equals the graded Euler characteristic of the Khovanov cube.
inline Laurent kauffman_bracket(const PointedDiagram& d) {
  auto [np, nm] = writhe_shifts(d);
  Laurent b = detail::bracket(d);
  Laurent shift = Laurent::term(np - 2 * nm, (nm & 1) ? -1 : 1);
  return shift * b;
}

}  // namespace khb
