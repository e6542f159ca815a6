#include <catch2/catch_amalgamated.hpp>

#include "corpus.hpp"
#include "khb/diagram.hpp"

using namespace khb;

TEST_CASE("parse a zero-crossing unknot with two colored basepoints") {
  auto d = parse_diagram(R"({
    "crossings": [],
    "edges": [{"id":"e1","from":null,"to":null}],
    "basepoints": [{"id":"p1","edge":"e1","pos":0,"color":"x1"},
                    {"id":"p2","edge":"e1","pos":1,"color":"x2"}],
    "colors": ["x1","x2"]
  })");
  CHECK(d.edges.size() == 1);
  CHECK(d.basepoints.size() == 2);
  auto rs = resolve(d, {});
  CHECK(rs.n_circles() == 1);
  CHECK(rs.circle_of_basepoint(d, "p1") == rs.circle_of_basepoint(d, "p2"));
}

TEST_CASE("parse rejects a basepoint on a missing edge") {
  CHECK_THROWS_WITH(parse_diagram(R"({
    "edges": [{"id":"e1","from":null,"to":null}],
    "basepoints": [{"id":"p1","edge":"e9","pos":0,"color":"x"}],
    "colors": ["x"]
  })"),
                    Catch::Matchers::ContainsSubstring("unknown edge"));
}

TEST_CASE("parse rejects dangling edges") {
  CHECK_THROWS_WITH(
      parse_diagram(R"({
    "crossings": [{"id":"c1","edges":["e1","e2","e3","e4"],"sign":"+"}],
    "edges": [{"id":"e1","from":"c1","to":"c1"},
               {"id":"e2","from":"c1","to":"c1"},
               {"id":"e3","from":"c1","to":"c1"},
               {"id":"e4","from":"c1","to":"c1"},
               {"id":"e5","from":"c1","to":"c1"}],
    "colors": []
  })"),
      Catch::Matchers::ContainsSubstring("attachments"));
}

TEST_CASE("hopf link resolves with the expected circle counts") {
  auto d = corpus::hopf_positive();
  CHECK(resolve(d, {0, 0}).n_circles() == 2);
  CHECK(resolve(d, {1, 0}).n_circles() == 1);
  CHECK(resolve(d, {0, 1}).n_circles() == 1);
  CHECK(resolve(d, {1, 1}).n_circles() == 2);
}

TEST_CASE("writhe counts") {
  CHECK(writhe_shifts(corpus::hopf_positive()) == std::pair<int, int>{2, 0});
  CHECK(writhe_shifts(corpus::hopf_negative()) == std::pair<int, int>{0, 2});
  CHECK(writhe_shifts(corpus::unknot()) == std::pair<int, int>{0, 0});
  CHECK(writhe_shifts(corpus::figure_eight()) == std::pair<int, int>{2, 2});
}

TEST_CASE("circle count changes by one under a single bit flip") {
  for (auto d : {corpus::trefoil(), corpus::figure_eight(), corpus::hopf_positive()}) {
    std::size_t n = d.crossings.size();
    for (std::size_t eps = 0; eps < (std::size_t(1) << n); ++eps) {
      std::vector<int> bits(n);
      for (std::size_t i = 0; i < n; ++i) bits[i] = int((eps >> i) & 1);
      int c0 = resolve(d, bits).n_circles();
      for (std::size_t i = 0; i < n; ++i) {
        auto b2 = bits;
        b2[i] ^= 1;
        CHECK(std::abs(resolve(d, b2).n_circles() - c0) == 1);
      }
    }
  }
}

TEST_CASE("kauffman bracket of unknots") {
  Laurent circ = Laurent::term(1) + Laurent::term(-1);
  CHECK(kauffman_bracket(corpus::unknot()) == circ);
  CHECK(kauffman_bracket(corpus::unlink2()) == circ * circ);
  CHECK(kauffman_bracket(corpus::kink_unknot_positive()) == circ);
  CHECK(kauffman_bracket(corpus::kink_unknot_negative()) == circ);
}

TEST_CASE("smoothing a kink yields the unknot") {
  auto d = corpus::kink_unknot_positive();
  auto s0 = smooth_crossing(d, "c1", 0);
  CHECK(s0.diagram.crossings.empty());
  CHECK(s0.diagram.edges.size() == 2);  // strand circle plus split-off loop
  auto s1 = smooth_crossing(d, "c1", 1);
  CHECK(s1.diagram.crossings.empty());
  CHECK(s1.diagram.edges.size() == 1);
}

TEST_CASE("smoothing the trefoil preserves validity") {
  auto d = corpus::trefoil();
  for (auto& c : {std::string("c1"), std::string("c2"), std::string("c3")})
    for (int bit : {0, 1}) {
      auto s = smooth_crossing(d, c, bit);
      s.diagram.validate();
      CHECK(s.diagram.crossings.size() == 2);
      for (auto& [old_id, new_id] : s.edge_image) CHECK(s.diagram.has_edge(new_id));
    }
}
