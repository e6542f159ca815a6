#include <catch2/catch_amalgamated.hpp>

#include "corpus.hpp"
#include "khb/cube.hpp"

using namespace khb;

TEST_CASE("unknot cube is the Frobenius algebra") {
  auto c = build_cube(corpus::unknot({"x"}, {{"p1", "e1", 0, "x"}}));
  REQUIRE(c.dim() == 2);
  c.base.check_valid();
  CHECK(c.base.d.is_zero());
  auto h = homology(c.base);
  CHECK(h == RankTable{{{0, 1}, 1}, {{0, -1}, 1}});
  auto p = basepoint_action(c, "p1");
  CHECK(p.check_homogeneous());
  CHECK((p.matrix * p.matrix).is_zero());
  CHECK(!p.matrix.is_zero());
}

TEST_CASE("hopf cube has dimension 12 and rank-4 homology at known bidegrees") {
  auto c = build_cube(corpus::hopf_positive());
  CHECK(c.dim() == 12);
  c.base.check_valid();
  auto h = homology(c.base);
  CHECK(h == RankTable{{{0, 0}, 1}, {{0, 2}, 1}, {{2, 4}, 1}, {{2, 6}, 1}});
}

TEST_CASE("trefoil cube: dimension 30, total homology rank 6 at standard bidegrees") {
  auto c = build_cube(corpus::trefoil());
  CHECK(c.dim() == 30);
  c.base.check_valid();
  auto h = homology(c.base);
  CHECK(total_rank(h) == 6);
  RankTable expect{{{0, 1}, 1}, {{0, 3}, 1}, {{2, 5}, 1},
                   {{2, 7}, 1}, {{3, 7}, 1}, {{3, 9}, 1}};
  CHECK(h == expect);
}

TEST_CASE("figure-eight homology over GF(2)") {
  auto c = build_cube(corpus::figure_eight());
  c.base.check_valid();
  auto h = homology(c.base);
  // thin knot with determinant 5: GF(2) dimension 2*5
  CHECK(total_rank(h) == 10);
  CHECK(graded_euler_characteristic(c.base) ==
        graded_euler_characteristic(h));
}

TEST_CASE("euler characteristic equals the kauffman bracket on the corpus") {
  for (auto d : {corpus::unknot(), corpus::unlink2(), corpus::hopf_positive(),
                 corpus::hopf_negative(), corpus::trefoil(), corpus::figure_eight(),
                 corpus::kink_unknot_positive(), corpus::kink_unknot_negative()}) {
    auto c = build_cube(d);
    CHECK(graded_euler_characteristic(c.base) == kauffman_bracket(d));
  }
}

TEST_CASE("homology is invariant under a generator shuffle") {
  auto c = build_cube(corpus::trefoil());
  auto h = homology(c.base);
  std::mt19937 rng(20240809);
  std::vector<Index> perm(c.dim());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = Index(i);
  std::shuffle(perm.begin(), perm.end(), rng);
  CHECK(homology(permuted(c.base, perm)) == h);
}

TEST_CASE("color actions square to zero, commute, and commute with d") {
  auto d = corpus::hopf_positive({"x1", "x2"}, {{"p1", "a1", 0, "x1"}, {"p2", "b1", 0, "x2"}});
  auto c = build_cube(d);
  auto r1 = color_action(c, "x1");
  auto r2 = color_action(c, "x2");
  CHECK((r1.matrix * r1.matrix).is_zero());
  CHECK((r2.matrix * r2.matrix).is_zero());
  CHECK(r1.matrix * r2.matrix == r2.matrix * r1.matrix);
  CHECK(r1.check_chain_map());
  CHECK(r2.check_chain_map());
}

TEST_CASE("color with no basepoints acts as zero") {
  auto d = corpus::unknot({"x", "y"}, {{"p1", "e1", 0, "x"}});
  auto c = build_cube(d);
  CHECK(color_action(c, "y").matrix.is_zero());
}

TEST_CASE("two same-colored basepoints on one circle cancel") {
  auto d = corpus::unknot({"x"}, {{"p1", "e1", 0, "x"}, {"p2", "e1", 1, "x"}});
  auto c = build_cube(d);
  CHECK(color_action(c, "x").matrix.is_zero());
  CHECK(basepoint_action(c, "p1").matrix == basepoint_action(c, "p2").matrix);
}

TEST_CASE("sliding homotopy identities on the kink diagram") {
  auto c = build_cube(corpus::kink_unknot_positive());
  auto H = sliding_homotopy(c, "c1");
  CHECK(H.check_homogeneous());
  auto rep = verify_lemma_2_3(c, "c1");
  CHECK(rep.boundary_identity);
  CHECK(rep.square_zero);
  CHECK(rep.p_exchange);
  CHECK(rep.q_exchange);
  // degenerate: p1 + p2 = 0 since both under-arcs are the same edges' circles
  auto p1 = edge_action(c, c.diagram.crossing("c1").slots[0]);
  auto p2 = edge_action(c, c.diagram.crossing("c1").slots[2]);
  CHECK((c.base.d * H.matrix + H.matrix * c.base.d) == p1.matrix + p2.matrix);
}

TEST_CASE("lemma 2.3 full suite on trefoil, figure-eight and hopf") {
  for (auto d : {corpus::trefoil(), corpus::figure_eight(), corpus::hopf_positive()}) {
    auto c = build_cube(d);
    for (auto& cr : d.crossings) {
      auto rep = verify_lemma_2_3(c, cr.id);
      INFO("crossing " << cr.id);
      CHECK(rep.all());
    }
  }
}

TEST_CASE("disjoint union is multiplicative") {
  auto a = build_cube(corpus::unknot({"x"}, {{"p1", "e1", 0, "x"}}));
  khb::PointedDiagram u2;
  u2.edges.push_back({"f1", "", ""});
  u2.colors = {"y"};
  u2.normalize();
  auto b = build_cube(u2);
  auto t = tensor_disjoint(a, b);
  CHECK(t.dim() == 4);
  CHECK(t.base.d.is_zero());
  CHECK(total_rank(homology(t.base)) == 4);
}
