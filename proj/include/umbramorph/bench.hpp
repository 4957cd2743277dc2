#pragma once

// Benchmark harness: seeded random image/SE pairs, per-method timing of
// dilation, and exactness checks against the naive method.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "umbramorph/morphology.hpp"

namespace umbramorph {

/// Portable seeded generator: mt19937_64 (fully specified by the standard)
/// with rejection sampling for bounded integers, so a seed yields the same
/// stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Square image of uniform values in [0, 2^bits - 1], declared maximum 2^bits - 1.
GridFunction random_image(std::int64_t edge, int bits, Rng& rng);
/// Square non-flat SE of uniform values in [0, 2^bits - 1], origin at the centre.
GridFunction random_se(std::int64_t edge, int bits, Rng& rng);

/// FNV-1a over the domain boxes, masks and values.
std::uint64_t input_digest(const GridFunction& f, const GridFunction& b);

enum class BenchMode { FilterSweep, ImageSweep };

struct SizePair {
  std::int64_t image_edge = 0;
  std::int64_t filter_edge = 0;
};

struct BenchConfig {
  BenchMode mode = BenchMode::FilterSweep;
  std::vector<int> bits{4};
  std::uint64_t seed = 1;
  std::vector<SizePair> sizes;  // empty: defaults for the mode
  int repeats = 1;
  std::vector<MorphMethod> methods{MorphMethod::Naive, MorphMethod::FftUmbra};
  std::uint64_t memory_limit_bytes = std::uint64_t{4} << 30;
};

struct BenchRow {
  BenchMode mode = BenchMode::FilterSweep;
  int bits = 0;
  std::int64_t image_edge = 0;
  std::int64_t filter_edge = 0;
  MorphMethod method = MorphMethod::Naive;
  int repeat = 0;
  double seconds = 0.0;
  std::optional<std::int64_t> max_abs_diff_vs_naive;  // empty when naive was not run
  std::uint64_t input_digest = 0;
};

/// Filter sweep: 256x256 image, filter edges 16..96. Image sweep: edges
/// 64..256 with filter edge max(1, edge / 10).
std::vector<SizePair> default_sizes(BenchMode mode);

/// Rough peak memory of one FFT-umbra dilation.
std::uint64_t estimate_umbra_bytes(std::int64_t image_edge, std::int64_t filter_edge, int bits);

/// Throws std::invalid_argument describing the first violated constraint.
void validate(const BenchConfig& cfg);

std::vector<BenchRow> run_bench(const BenchConfig& cfg, const std::function<void(const BenchRow&)>& on_row = {});

std::string bench_csv_header();
std::string format_bench_row(const BenchRow& row);

std::string to_string(MorphMethod m);
std::string to_string(BenchMode m);
MorphMethod parse_method(const std::string& s);
BenchMode parse_mode(const std::string& s);

struct DiffReport {
  std::int64_t max_abs = 0;
  double mean_abs = 0.0;
  GridFunction negative;  // maxval - |a - b|
};

DiffReport diff_images(const GridFunction& a, const GridFunction& b);

}  // namespace umbramorph
