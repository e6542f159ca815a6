#pragma once

// Shared corpus builders for tests: standard small diagrams constructed
// from PD codes with the library's slot conventions.

#include <string>
#include <vector>

#include "khb/diagram.hpp"

namespace corpus {

// Build a knot diagram from a PD code: each crossing is X[a,b,c,d] with a
// the incoming under-edge and b,c,d counterclockwise. Edge labels run
// 1..2n along the knot. Works for one component only.
inline khb::PointedDiagram from_pd(const std::vector<std::array<int, 4>>& xs,
                                   std::vector<std::string> colors = {},
                                   std::vector<khb::Basepoint> bps = {}) {
  int maxe = 0;
  for (auto& x : xs)
    for (int k : x) maxe = std::max(maxe, k);
  auto succ = [&](int k) { return k % maxe + 1; };
  khb::PointedDiagram d;
  d.colors = std::move(colors);
  d.basepoints = std::move(bps);
  std::vector<std::string> from(maxe + 1), to(maxe + 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto [a, b, c, dd] = xs[i];
    khb::Crossing cr;
    cr.id = "c" + std::to_string(i + 1);
    cr.slots = {"e" + std::to_string(a), "e" + std::to_string(b),
                "e" + std::to_string(c), "e" + std::to_string(dd)};
    int over_in;
    if (succ(b) == dd) {
      over_in = b;
      cr.sign = +1;
    } else if (succ(dd) == b) {
      over_in = dd;
      cr.sign = -1;
    } else {
      throw std::invalid_argument("from_pd: cannot orient over-strand");
    }
    to[a] = cr.id;
    from[c] = cr.id;
    to[over_in] = cr.id;
    from[over_in == b ? dd : b] = cr.id;
    d.crossings.push_back(cr);
  }
  for (int k = 1; k <= maxe; ++k)
    d.edges.push_back({"e" + std::to_string(k), from[k], to[k]});
  d.normalize();
  d.validate();
  return d;
}

inline khb::PointedDiagram unknot(std::vector<std::string> colors = {},
                                  std::vector<khb::Basepoint> bps = {}) {
  khb::PointedDiagram d;
  d.edges.push_back({"e1", "", ""});
  d.colors = std::move(colors);
  d.basepoints = std::move(bps);
  d.normalize();
  d.validate();
  return d;
}

inline khb::PointedDiagram unlink2(std::vector<std::string> colors = {},
                                   std::vector<khb::Basepoint> bps = {}) {
  khb::PointedDiagram d;
  d.edges.push_back({"e1", "", ""});
  d.edges.push_back({"e2", "", ""});
  d.colors = std::move(colors);
  d.basepoints = std::move(bps);
  d.normalize();
  d.validate();
  return d;
}

// Positive Hopf link: components {a1,a2} and {b1,b2}, both crossings +.
inline khb::PointedDiagram hopf_positive(std::vector<std::string> colors = {},
                                         std::vector<khb::Basepoint> bps = {}) {
  khb::PointedDiagram d;
  d.crossings.push_back({"c1", {"a1", "b2", "a2", "b1"}, +1});
  d.crossings.push_back({"c2", {"b1", "a2", "b2", "a1"}, +1});
  d.edges.push_back({"a1", "c2", "c1"});
  d.edges.push_back({"a2", "c1", "c2"});
  d.edges.push_back({"b1", "c1", "c2"});
  d.edges.push_back({"b2", "c2", "c1"});
  d.colors = std::move(colors);
  d.basepoints = std::move(bps);
  d.normalize();
  d.validate();
  return d;
}

// Mirror (negative) Hopf link.
inline khb::PointedDiagram hopf_negative(std::vector<std::string> colors = {},
                                         std::vector<khb::Basepoint> bps = {}) {
  khb::PointedDiagram d;
  d.crossings.push_back({"c1", {"a1", "b1", "a2", "b2"}, -1});
  d.crossings.push_back({"c2", {"b1", "a1", "b2", "a2"}, -1});
  d.edges.push_back({"a1", "c2", "c1"});
  d.edges.push_back({"a2", "c1", "c2"});
  d.edges.push_back({"b1", "c1", "c2"});
  d.edges.push_back({"b2", "c2", "c1"});
  d.normalize();
  d.validate();
  d.colors = std::move(colors);
  d.basepoints = std::move(bps);
  return d;
}

inline khb::PointedDiagram trefoil(std::vector<std::string> colors = {},
                                   std::vector<khb::Basepoint> bps = {}) {
  return from_pd({{{1, 4, 2, 5}}, {{3, 6, 4, 1}}, {{5, 2, 6, 3}}},
                 std::move(colors), std::move(bps));
}

inline khb::PointedDiagram figure_eight(std::vector<std::string> colors = {},
                                        std::vector<khb::Basepoint> bps = {}) {
  return from_pd({{{4, 2, 5, 1}}, {{8, 6, 1, 5}}, {{6, 3, 7, 4}}, {{2, 7, 3, 8}}},
                 std::move(colors), std::move(bps));
}

// One-crossing unknot with a positive kink. The strand runs: e1 under the
// crossing into the loop l1, back over the crossing, out as e2... closed
// up, e1 and e2 are the same edge (the big arc), so the diagram has two
// edges: the big edge `eb` and the loop `el`.
inline khb::PointedDiagram kink_unknot_positive(std::vector<std::string> colors = {},
                                                std::vector<khb::Basepoint> bps = {}) {
  khb::PointedDiagram d;
  // slots: 0 = eb in (under), 1 = el in (over), 2 = el out (under), 3 = eb out
  d.crossings.push_back({"c1", {"eb", "el", "el", "eb"}, +1});
  d.edges.push_back({"eb", "c1", "c1"});
  d.edges.push_back({"el", "c1", "c1"});
  d.colors = std::move(colors);
  d.basepoints = std::move(bps);
  d.normalize();
  d.validate();
  return d;
}

inline khb::PointedDiagram kink_unknot_negative(std::vector<std::string> colors = {},
                                                std::vector<khb::Basepoint> bps = {}) {
  khb::PointedDiagram d;
  // negative kink: loop enters over at slot 3
  d.crossings.push_back({"c1", {"eb", "eb", "el", "el"}, -1});
  d.edges.push_back({"eb", "c1", "c1"});
  d.edges.push_back({"el", "c1", "c1"});
  d.colors = std::move(colors);
  d.basepoints = std::move(bps);
  d.normalize();
  d.validate();
  return d;
}

}  // namespace corpus
