#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "umbramorph/bench.hpp"

using namespace umbramorph;

TEST_CASE("Rng stays in range and is reproducible") {
  Rng a(5), b(5);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 5000; ++i) {
    const auto x = a.uniform(0, 15);
    CHECK(x == b.uniform(0, 15));
    CHECK(x >= 0);
    CHECK(x <= 15);
    seen.insert(x);
  }
  CHECK(seen.size() == 16);
  CHECK_THROWS(a.below(0));
}

TEST_CASE("random inputs") {
  Rng rng(9);
  const GridFunction f = random_image(32, 4, rng);
  CHECK(f.box() == Box{{0, 31}, {0, 31}});
  CHECK(f.declared_max() == 15);
  CHECK(f.max_value() <= 15);
  const GridFunction b = random_se(5, 8, rng);
  CHECK(b.box() == Box{{-2, 2}, {-2, 2}});
  CHECK(b.declared_max() == 255);
  Rng other(10);
  CHECK(input_digest(f, b) != input_digest(random_image(32, 4, other), b));
}

TEST_CASE("validate rejects bad configurations") {
  BenchConfig cfg;
  cfg.sizes = {{16, 32}};
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg.sizes = {{32, 16}};
  CHECK_NOTHROW(validate(cfg));
  cfg.repeats = 0;
  CHECK_THROWS(validate(cfg));
  cfg.repeats = 1;
  cfg.bits = {9};
  CHECK_THROWS(validate(cfg));
  cfg.bits = {8};
  cfg.sizes = {{4096, 64}};
  CHECK_THROWS(validate(cfg));
  cfg.methods = {MorphMethod::Naive};
  CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("default sweeps") {
  const auto fs = default_sizes(BenchMode::FilterSweep);
  REQUIRE(fs.size() == 6);
  CHECK(fs.front().filter_edge == 16);
  CHECK(fs.back().filter_edge == 96);
  for (const auto& s : fs) CHECK(s.image_edge == 256);
  const auto is = default_sizes(BenchMode::ImageSweep);
  CHECK(is.back().image_edge == 256);
}

TEST_CASE("bench rows: deterministic inputs, exact agreement, stable schema") {
  BenchConfig cfg;
  cfg.sizes = {{24, 3}, {32, 7}};
  cfg.bits = {4, 8};
  cfg.repeats = 2;
  cfg.seed = 1234;
  const auto r1 = run_bench(cfg);
  const auto r2 = run_bench(cfg);
  REQUIRE(r1.size() == 2 * 2 * 2 * 2);
  std::set<std::uint64_t> digests;
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].input_digest == r2[i].input_digest);
    REQUIRE(r1[i].max_abs_diff_vs_naive.has_value());
    CHECK(*r1[i].max_abs_diff_vs_naive == 0);
    digests.insert(r1[i].input_digest);
  }
  // One input pair per (size, bits, repeat), shared by both methods.
  CHECK(digests.size() == 8);

  CHECK(bench_csv_header() == "mode,bits,image_edge,filter_edge,method,repeat,seconds,max_abs_diff_vs_naive,input_digest");
  const std::string line = format_bench_row(r1[1]);
  std::vector<std::string> cols;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
  REQUIRE(cols.size() == 9);
  CHECK(cols[0] == "filter-sweep");
  CHECK(cols[4] == "fft");
  CHECK(cols[7] == "0");
  CHECK(cols[8].size() == 16);

  cfg.methods = {MorphMethod::FftUmbra};
  cfg.repeats = 1;
  const auto fft_only = run_bench(cfg);
  CHECK_FALSE(fft_only[0].max_abs_diff_vs_naive.has_value());
  CHECK(format_bench_row(fft_only[0]).find(",NA,") != std::string::npos);
  CHECK(fft_only[0].input_digest == r1[0].input_digest);
}

TEST_CASE("method and mode names") {
  CHECK(parse_method("naive") == MorphMethod::Naive);
  CHECK(parse_method(to_string(MorphMethod::FftUmbra)) == MorphMethod::FftUmbra);
  CHECK_THROWS(parse_method("scipy"));
  CHECK(parse_mode("image-sweep") == BenchMode::ImageSweep);
  CHECK_THROWS(parse_mode("sweep"));
}

TEST_CASE("diff_images") {
  const GridFunction c3(IntArray({4, 4}, {0, 0}, std::int64_t{3}), 255), c5(IntArray({4, 4}, {0, 0}, std::int64_t{5}), 255);
  const DiffReport d = diff_images(c3, c5);
  CHECK(d.max_abs == 2);
  CHECK(d.mean_abs == doctest::Approx(2.0));
  CHECK(d.negative.at({1, 1}) == 253);

  const DiffReport same = diff_images(c3, c3);
  CHECK(same.max_abs == 0);
  CHECK(same.mean_abs == 0.0);

  CHECK_THROWS(diff_images(c3, GridFunction(IntArray({4, 5}, {0, 0}), 255)));

  Rng rng(3);
  const GridFunction f = random_image(40, 8, rng);
  const GridFunction b = random_se(9, 8, rng);
  const DiffReport fv = diff_images(dilate(f, b, MorphMethod::FftUmbra).image, dilate(f, b, MorphMethod::Naive).image);
  CHECK(fv.mean_abs == 0.0);
}
