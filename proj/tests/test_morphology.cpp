#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "umbramorph/fft_conv.hpp"
#include "umbramorph/io.hpp"
#include "umbramorph/morphology.hpp"

using namespace umbramorph;

namespace {

GridFunction line(std::vector<std::int64_t> v, std::int64_t lo = 0, std::int64_t l = 7) {
  const auto n = static_cast<std::int64_t>(v.size());
  return GridFunction(IntArray({n}, {lo}, std::move(v)), l);
}

GridFunction example_f() { return line({3, 0, 7, 6, 2, 7}); }

GridFunction example_b() {
  IntArray v({4}, {-1}, std::vector<std::int64_t>{1, 2, 0, 0});
  MaskArray d({4}, {-1}, std::vector<std::uint8_t>{1, 1, 0, 1});
  return GridFunction(std::move(v), std::move(d), 2);
}

GridFunction identity_se(std::size_t rank) { return GridFunction(IntArray(Index(rank, 1), Index(rank, 0)), 1); }

GridFunction flat_se(std::size_t rank, std::int64_t radius) {
  return GridFunction(IntArray(Index(rank, 2 * radius + 1), Index(rank, -radius)), 1);
}

std::vector<std::int64_t> vals(const GridFunction& g) { return g.values().values(); }

const MorphMethod kMethods[] = {MorphMethod::Naive, MorphMethod::FftUmbra};

bool leq_on(const GridFunction& a, const GridFunction& b, const Box& box) {
  bool ok = true;
  IntArray probe(box);
  probe.for_each([&](const Index& x, std::int64_t) { ok = ok && a.at(x) <= b.at(x); });
  return ok;
}

bool eq_on(const GridFunction& a, const GridFunction& b, const Box& box) { return leq_on(a, b, box) && leq_on(b, a, box); }

}  // namespace

TEST_CASE("worked example dilation") {
  for (MorphMethod m : kMethods) CHECK(vals(dilate(example_f(), example_b(), m).image) == std::vector<std::int64_t>{5, 8, 9, 8, 8, 9});
  CHECK(vals(dilate_fft(example_f(), example_b())) == vals(dilate_naive(example_f(), example_b())));
}

TEST_CASE("flat three-sample SE on the worked example image") {
  const IntArray dil = oracle::dilate(example_f(), flat_se(1, 1), Box{{0, 5}});
  const IntArray ero = oracle::erode(example_f(), flat_se(1, 1), Box{{0, 5}}, 7);
  REQUIRE(dil.values() == std::vector<std::int64_t>{3, 7, 7, 7, 7, 7});
  REQUIRE(ero.values() == std::vector<std::int64_t>{0, 0, 0, 2, 2, 2});
  for (MorphMethod m : kMethods) {
    CHECK(vals(dilate(example_f(), flat_se(1, 1), m).image) == dil.values());
    CHECK(vals(erode(example_f(), flat_se(1, 1), m).image) == ero.values());
  }
  const GridFunction e = erode_fft(example_f(), flat_se(1, 1), 7);
  const auto ev = vals(e);
  CHECK(std::vector<std::int64_t>(ev.begin() + 1, ev.begin() + 5) == std::vector<std::int64_t>{0, 0, 2, 2});
}

TEST_CASE("identity SE leaves the image unchanged") {
  std::mt19937_64 rng(1);
  const GridFunction f = oracle::random_grid(rng, {9, 7}, {0, 0}, 255);
  for (MorphMethod m : kMethods) {
    CHECK(dilate(f, identity_se(2), m).image == f);
    CHECK(erode(f, identity_se(2), m).image == f);
    CHECK(opening(f, identity_se(2), m) == f);
  }
  CHECK(erode_fft(f, identity_se(2), 255) == f);
}

TEST_CASE("constant images") {
  const GridFunction c(IntArray({8, 8}, {0, 0}, std::int64_t{5}), 7);
  const GridFunction z(IntArray({8, 8}, {0, 0}), 7);
  for (MorphMethod m : kMethods) {
    CHECK(erode(c, flat_se(2, 2), m).image == c);
    CHECK(dilate(z, flat_se(2, 1), m).image == z);
    const GridFunction g = beucher_gradient(c, flat_se(2, 2), m);
    for (auto v : g.values().data()) CHECK(v == 0);
  }
}

TEST_CASE("reflect") {
  const GridFunction r = reflect(example_b());
  CHECK(r.box() == Box{{-2, 1}});
  CHECK(vals(r) == std::vector<std::int64_t>{0, 0, 2, 1});
  CHECK(r.defined().values() == std::vector<std::uint8_t>{1, 0, 1, 1});
  CHECK(reflect(r) == example_b());
  CHECK(reflect(flat_se(2, 2)) == flat_se(2, 2));
}

TEST_CASE("negate") {
  CHECK(vals(negate(example_f(), 7)) == std::vector<std::int64_t>{4, 7, 0, 1, 5, 0});
  CHECK(negate(negate(example_f(), 7), 7) == example_f());
  for (auto v : vals(negate(line({7, 7, 7}), 7))) CHECK(v == 0);
  CHECK_THROWS_AS(negate(example_f(), 6), std::invalid_argument);
}

TEST_CASE("both methods match the pair-enumeration oracle, with gaps, in 1 to 3 dimensions") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t rank = 1 + trial % 3;
    const std::int64_t n = rank == 3 ? 5 : 9;
    const GridFunction f = oracle::random_grid(rng, Index(rank, n), Index(rank, trial % 3 - 1), 15, 0.15);
    const GridFunction b = oracle::random_grid(rng, Index(rank, 1 + trial % 4), Index(rank, -(trial % 3)), 9, 0.25);
    const IntArray d = oracle::dilate(f, b, f.box());
    const IntArray e = oracle::erode(f, b, f.box(), f.declared_max());
    for (MorphMethod m : kMethods) {
      REQUIRE(dilate(f, b, m).image.values() == d);
      REQUIRE(erode(f, b, m).image.values() == e);
    }
  }
}

TEST_CASE("pixels without any pair are 0 after dilation, l after erosion, and reported") {
  // Single-point SE: a gap in the image has no pair.
  IntArray v({1, 3}, {0, 0}, std::vector<std::int64_t>{4, 9, 6});
  MaskArray d({1, 3}, {0, 0}, std::vector<std::uint8_t>{1, 0, 1});
  const GridFunction f(std::move(v), std::move(d), 10);
  for (MorphMethod m : kMethods) {
    const MorphResult dr = dilate(f, identity_se(2), m);
    CHECK(vals(dr.image) == std::vector<std::int64_t>{4, 0, 6});
    CHECK(dr.covered.values() == std::vector<std::uint8_t>{1, 0, 1});
    const MorphResult er = erode(f, identity_se(2), m);
    CHECK(vals(er.image) == std::vector<std::int64_t>{4, 10, 6});
    CHECK(er.covered.values() == std::vector<std::uint8_t>{1, 0, 1});
  }
}

TEST_CASE("erosion through duality matches the naive rule on every pixel") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const GridFunction f = oracle::random_grid(rng, {12, 10}, {0, 0}, 255);
    const GridFunction b = oracle::random_grid(rng, {1 + trial % 5, 1 + trial % 3}, {-(trial % 3), -1}, 40);
    const GridFunction naive = erode_naive(f, b);
    const GridFunction fast = erode_fft(f, b, 255);
    REQUIRE(eq_on(naive, fast, f.box()));
  }
}

TEST_CASE("erode_fft rejects l below the image maximum") {
  CHECK_THROWS_AS(erode_fft(example_f(), flat_se(1, 1), 6), std::invalid_argument);
}

TEST_CASE("signed inputs go through the FFT path") {
  // Non-flat erosion dips below zero; dilating that must still agree.
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const GridFunction f = oracle::random_grid(rng, {10, 10}, {0, 0}, 15);
    const GridFunction b = oracle::random_grid(rng, {3, 3}, {-1, -1}, 15);
    const GridFunction e = erode_naive(f, b);
    CHECK(e.min_value() < 0);
    CHECK(dilate_fft(e, b) == dilate_naive(e, b));
  }
}

TEST_CASE("compound filters agree across methods") {
  std::mt19937_64 rng(5);
  const GridFunction f = oracle::random_grid(rng, {64, 64}, {0, 0}, 255);
  const GridFunction b = flat_se(2, 2);
  const Box inner = erosion_interior(erosion_interior(f.box(), b.box()), b.box());
  CHECK(eq_on(opening(f, b, MorphMethod::FftUmbra), opening(f, b, MorphMethod::Naive), inner));
  CHECK(eq_on(closing(f, b, MorphMethod::FftUmbra), closing(f, b, MorphMethod::Naive), inner));
  CHECK(opening(f, b, MorphMethod::FftUmbra) == opening(f, b, MorphMethod::Naive));
  CHECK(closing(f, b, MorphMethod::FftUmbra) == closing(f, b, MorphMethod::Naive));
  const GridFunction nonflat = oracle::random_grid(rng, {3, 5}, {-1, -2}, 30);
  CHECK(beucher_gradient(f, nonflat, MorphMethod::FftUmbra) == beucher_gradient(f, nonflat, MorphMethod::Naive));
}

TEST_CASE("opening <= f <= closing for a flat SE containing the origin") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const GridFunction f = oracle::random_grid(rng, {20, 20}, {0, 0}, 15);
    for (MorphMethod m : kMethods) {
      CHECK(leq_on(opening(f, flat_se(2, 2), m), f, f.box()));
      CHECK(leq_on(f, closing(f, flat_se(2, 2), m), f.box()));
    }
  }
}

TEST_CASE("dilation is monotone and extensive when the origin is in the SE") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const GridFunction f = oracle::random_grid(rng, {8, 11}, {0, 0}, 100);
    IntArray gv = f.values();
    for (auto& v : gv.data()) v += static_cast<std::int64_t>(rng() % 5);
    const GridFunction g(std::move(gv), 104);
    GridFunction b = oracle::random_grid(rng, {3, 3}, {-1, -1}, 9, 0.3);
    const GridFunction df = dilate_fft(f, b), dg = dilate_fft(g, b);
    CHECK(leq_on(df, dg, f.box()));
    if (b.is_defined(Index{0, 0})) {
      const std::int64_t b0 = b.at({0, 0});
      f.values().for_each([&](const Index& x, std::int64_t v) { CHECK(df.at(x) >= v + b0); });
    }
  }
}

TEST_CASE("shifting the SE shifts the uncropped dilation") {
  std::mt19937_64 rng(8);
  MorphOptions opts;
  opts.uncropped = true;
  for (int trial = 0; trial < 20; ++trial) {
    const GridFunction f = oracle::random_grid(rng, {7, 6}, {0, 0}, 31, 0.1);
    const GridFunction b = oracle::random_grid(rng, {3, 2}, {-1, 0}, 12, 0.2);
    const Index t{static_cast<std::int64_t>(rng() % 7) - 3, static_cast<std::int64_t>(rng() % 7) - 3};
    const GridFunction bt(IntArray(b.values().shape(), {b.box()[0].lo + t[0], b.box()[1].lo + t[1]}, b.values().values()),
                          MaskArray(b.values().shape(), {b.box()[0].lo + t[0], b.box()[1].lo + t[1]}, b.defined().values()),
                          b.declared_max());
    for (MorphMethod m : kMethods) {
      const GridFunction d = dilate(f, b, m, opts).image;
      const GridFunction dt = dilate(f, bt, m, opts).image;
      CHECK(dt.box() == Box{{d.box()[0].lo + t[0], d.box()[0].hi + t[0]}, {d.box()[1].lo + t[1], d.box()[1].hi + t[1]}});
      CHECK(dt.values().values() == d.values().values());
    }
    CHECK(dilate(f, b, MorphMethod::FftUmbra, opts).image.values() == oracle::dilate(f, b, full_output_range(f.box(), b.box())));
  }
}

TEST_CASE("histograms of FFT and naive dilations are identical") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const GridFunction f = oracle::random_grid(rng, {32, 32}, {0, 0}, 255);
    const GridFunction b = oracle::random_grid(rng, {5, 5}, {-2, -2}, 255);
    CHECK(histogram(dilate_fft(f, b)) == histogram(dilate_naive(f, b)));
  }
}

TEST_CASE("FFT path reports its rounding deviation") {
  std::mt19937_64 rng(10);
  const GridFunction f = oracle::random_grid(rng, {40, 40}, {0, 0}, 255);
  const GridFunction b = oracle::random_grid(rng, {9, 9}, {-4, -4}, 255);
  const MorphResult r = dilate(f, b, MorphMethod::FftUmbra);
  CHECK(r.max_fft_deviation >= 0.0);
  CHECK(r.max_fft_deviation < kRoundingTolerance);
}

TEST_CASE("erosion_interior") {
  CHECK(erosion_interior({{0, 63}, {0, 63}}, {{-2, 2}, {-2, 2}}) == Box{{2, 61}, {2, 61}});
  CHECK(erosion_interior({{0, 5}}, {{-1, 2}}) == Box{{1, 3}});
}
