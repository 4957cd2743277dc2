#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "umbramorph/tensor.hpp"

using namespace umbramorph;

TEST_CASE("at uses logical indices, including negative ones") {
  // SE 1 2 X 0 with its origin on the second entry; the gap is stored as 0.
  IntArray b({4}, {-1}, std::vector<std::int64_t>{1, 2, 0, 0});
  CHECK(b.at({-1}) == 1);
  CHECK(b.at({0}) == 2);
  CHECK(b.at({2}) == 0);
  CHECK(b.hi() == Index{2});
}

TEST_CASE("zero-filled array reads zero") {
  IntArray z({3, 4}, {-1, 5});
  z.for_each([](const Index&, std::int64_t v) { CHECK(v == 0); });
  CHECK(z.at({1, 8}) == 0);
}

TEST_CASE("at(lo + shape - 1) is the last stored element") {
  std::mt19937_64 rng(11);
  IntArray a({3, 2, 5}, {-2, 0, 7});
  for (auto& v : a.data()) v = static_cast<std::int64_t>(rng() % 1000);
  CHECK(a.at(a.hi()) == a.data().back());
  CHECK(a.at(a.lo()) == a.data().front());
}

TEST_CASE("out-of-bounds access throws") {
  IntArray a({2, 2}, {0, 0});
  CHECK_THROWS_AS(a.at({2, 0}), std::out_of_range);
  CHECK_THROWS_AS(a.at({0, -1}), std::out_of_range);
  CHECK_THROWS_AS(a.at({0}), std::out_of_range);
}

TEST_CASE("construction checks") {
  CHECK_THROWS_AS(IntArray({0}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(IntArray({2}, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(IntArray({2}, {0}, std::vector<std::int64_t>{1, 2, 3}), std::invalid_argument);
}

TEST_CASE("unravel inverts offset") {
  IntArray a({3, 4, 2}, {-1, 2, -5});
  for (std::int64_t off = 0; off < a.size(); ++off) CHECK(a.offset(a.unravel(off)) == off);
}

TEST_CASE("full_output_range") {
  CHECK(full_output_range({{-1, 7}}, {{-3, 5}}) == Box{{-4, 12}});
  CHECK(full_output_range({{0, 6}}, {{0, 9}}) == Box{{0, 15}});
  CHECK(full_output_range({{0, 0}}, {{0, 0}}) == Box{{0, 0}});
  CHECK_THROWS(full_output_range({{0, 1}}, {{0, 1}, {0, 1}}));
}

TEST_CASE("full_output_range is commutative and has extent shapeA + shapeB - 1") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::int64_t> lo(-10, 10), len(1, 12);
  for (int trial = 0; trial < 500; ++trial) {
    Box a(3), b(3);
    for (std::size_t j = 0; j < 3; ++j) {
      const auto la = lo(rng), lb = lo(rng);
      a[j] = {la, la + len(rng) - 1};
      b[j] = {lb, lb + len(rng) - 1};
    }
    const Box ab = full_output_range(a, b);
    CHECK(ab == full_output_range(b, a));
    for (std::size_t j = 0; j < 3; ++j) CHECK(ab[j].size() == a[j].size() + b[j].size() - 1);
  }
}
