#include <catch2/catch_amalgamated.hpp>

#include "khb/complex.hpp"

using namespace khb;

TEST_CASE("homology of zero differential counts generators") {
  BigradedComplex c;
  c.gens = {{0, 1}, {0, -1}};
  c.d = F2Matrix(2, 2);
  auto h = homology(c);
  CHECK(h.size() == 2);
  CHECK(h[{0, 1}] == 1);
  CHECK(h[{0, -1}] == 1);
}

TEST_CASE("acyclic cone has trivial homology and zero euler characteristic") {
  BigradedComplex c;
  c.gens = {{0, 0}, {1, 0}};
  c.d = F2Matrix(2, 2);
  c.d.toggle(1, 0);
  CHECK(homology(c).empty());
  CHECK(graded_euler_characteristic(c).is_zero());
}

TEST_CASE("euler characteristic of the two-generator unknot complex") {
  BigradedComplex c;
  c.gens = {{0, 1}, {0, -1}};
  c.d = F2Matrix(2, 2);
  auto e = graded_euler_characteristic(c);
  CHECK(e == Laurent::term(1) + Laurent::term(-1));
  CHECK(e == graded_euler_characteristic(homology(c)));
}

TEST_CASE("homology is invariant under generator permutation") {
  BigradedComplex c;
  c.gens = {{0, 0}, {1, 0}, {1, 0}, {0, 2}};
  c.d = F2Matrix(4, 4);
  c.d.toggle(1, 0);
  c.d.toggle(2, 0);
  auto h = homology(c);
  std::vector<Index> perm{2, 0, 3, 1};
  auto cp = permuted(c, perm);
  cp.check_valid();
  CHECK(homology(cp) == h);
}

TEST_CASE("induced map on homology of identity is identity") {
  BigradedComplex c;
  c.gens = {{0, 0}, {1, 0}, {1, 0}};
  c.d = F2Matrix(3, 3);
  c.d.toggle(1, 0);
  HomologyBasis hb(c);
  CHECK(hb.table() == RankTable{{{1, 0}, 1}});
  auto blocks = induced_on_homology(ChainMap::id(c), hb, hb);
  REQUIRE(blocks.count({1, 0}));
  CHECK(blocks[{1, 0}] == F2Matrix::identity(1));
}
