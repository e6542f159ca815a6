#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "khb/f2.hpp"

using namespace khb;

namespace {
F2Matrix from_rows(std::size_t rows, std::size_t cols,
                   std::vector<std::vector<int>> entries) {
  F2Matrix m(rows, cols);
  for (std::size_t r = 0; r < entries.size(); ++r)
    for (int c : entries[r]) m.toggle(r, c);
  return m;
}
}  // namespace

TEST_CASE("rank basics") {
  CHECK(rank(F2Matrix::identity(2)) == 2);
  CHECK(rank(F2Matrix(3, 5)) == 0);
  CHECK(rank(from_rows(2, 2, {{0, 1}, {0, 1}})) == 1);
}

TEST_CASE("addition is symmetric difference and involutive") {
  auto m = from_rows(2, 3, {{0, 2}, {1}});
  CHECK((m + m).is_zero());
  auto n = from_rows(2, 3, {{0}, {1, 2}});
  auto s = m + n;
  CHECK(s.get(0, 2));
  CHECK_FALSE(s.get(0, 0));
  CHECK(s.get(1, 2));
}

TEST_CASE("solve identity system") {
  auto b = from_rows(2, 2, {{0}, {0, 1}});
  auto x = solve(F2Matrix::identity(2), b);
  REQUIRE(x);
  CHECK(*x == b);
}

TEST_CASE("solve inconsistent system") {
  F2Matrix a(1, 2);  // zero map
  auto b = from_rows(1, 1, {{0}});
  CHECK_FALSE(solve(a, b));
}

TEST_CASE("solve underdetermined picks free variables zero") {
  auto a = from_rows(1, 2, {{0, 1}});
  F2Matrix b(1, 1);  // zero rhs
  auto x = solve(a, b);
  REQUIRE(x);
  CHECK(x->is_zero());
}

TEST_CASE("solve random consistent systems") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 1 + rng() % 8, m = 1 + rng() % 8, k = 1 + rng() % 3;
    F2Matrix a(m, n), x0(n, k);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < n; ++c)
        if (rng() & 1) a.toggle(r, c);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < k; ++c)
        if (rng() & 1) x0.toggle(r, c);
    auto b = a * x0;
    auto x = solve(a, b);
    REQUIRE(x);
    CHECK(a * *x == b);
  }
}

TEST_CASE("kernel basis spans the null space") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 1 + rng() % 7, m = 1 + rng() % 7;
    F2Matrix a(m, n);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < n; ++c)
        if (rng() & 1) a.toggle(r, c);
    auto kb = kernel_basis(a);
    CHECK(kb.size() == n - rank(a));
    for (auto& v : kb) {
      F2Matrix col(n, 1);
      for (Index i : v) col.toggle(i, 0);
      CHECK((a * col).is_zero());
    }
  }
}

TEST_CASE("transpose and multiply agree with dense checks") {
  auto a = from_rows(2, 3, {{0, 1}, {2}});
  auto b = from_rows(3, 2, {{0}, {1}, {0, 1}});
  auto c = a * b;
  CHECK(c.get(0, 0));
  CHECK(c.get(0, 1));
  CHECK(c.get(1, 0));
  CHECK(c.get(1, 1));
  auto at = a.transposed();
  CHECK(at.rows() == 3);
  CHECK(at.get(1, 0));
  CHECK(at.get(2, 1));
}
