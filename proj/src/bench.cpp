#include "umbramorph/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "umbramorph/fft_conv.hpp"

namespace umbramorph {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: zero bound");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % bound;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

GridFunction random_image(std::int64_t edge, int bits, Rng& rng) {
  const std::int64_t top = (std::int64_t{1} << bits) - 1;
  IntArray v({edge, edge}, {0, 0});
  for (auto& e : v.data()) e = rng.uniform(0, top);
  return GridFunction(std::move(v), top);
}

GridFunction random_se(std::int64_t edge, int bits, Rng& rng) {
  const std::int64_t top = (std::int64_t{1} << bits) - 1;
  IntArray v({edge, edge}, {-(edge / 2), -(edge / 2)});
  for (auto& e : v.data()) e = rng.uniform(0, top);
  return GridFunction(std::move(v), top);
}

std::uint64_t input_digest(const GridFunction& f, const GridFunction& b) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const GridFunction* g : {&f, &b}) {
    for (const auto& r : g->box()) {
      mix(static_cast<std::uint64_t>(r.lo));
      mix(static_cast<std::uint64_t>(r.hi));
    }
    for (std::int64_t i = 0; i < g->values().size(); ++i) {
      mix(g->defined()[i]);
      mix(static_cast<std::uint64_t>(g->values()[i]));
    }
  }
  return h;
}

std::vector<SizePair> default_sizes(BenchMode mode) {
  std::vector<SizePair> s;
  if (mode == BenchMode::FilterSweep) {
    for (std::int64_t f = 16; f <= 96; f += 16) s.push_back({256, f});
  } else {
    for (std::int64_t n = 64; n <= 256; n += 64) s.push_back({n, std::max<std::int64_t>(1, n / 10)});
  }
  return s;
}

std::uint64_t estimate_umbra_bytes(std::int64_t image_edge, std::int64_t filter_edge, int bits) {
  const auto lr = static_cast<std::uint64_t>(2 * ((std::int64_t{1} << bits) - 1));
  const auto ni = static_cast<std::uint64_t>(image_edge * image_edge);
  const auto nf = static_cast<std::uint64_t>(filter_edge * filter_edge);
  const auto p = static_cast<std::uint64_t>(next_fast_size(image_edge + filter_edge / 2 + 1));
  const std::uint64_t padded = p * p * static_cast<std::uint64_t>(next_fast_size(static_cast<std::int64_t>(lr) + 1));
  // Two input volumes and the windowed counts (int64), then a real buffer and
  // two half spectra (double).
  return 8 * (lr + 1) * (2 * ni + nf) + 8 * 3 * padded;
}

void validate(const BenchConfig& cfg) {
  if (cfg.repeats < 1) throw std::invalid_argument("bench: repeats must be positive");
  if (cfg.bits.empty()) throw std::invalid_argument("bench: no tonal depths given");
  for (int b : cfg.bits)
    if (b < 1 || b > 8) throw std::invalid_argument("bench: bits must be in 1..8");
  if (cfg.methods.empty()) throw std::invalid_argument("bench: no methods given");
  const auto sizes = cfg.sizes.empty() ? default_sizes(cfg.mode) : cfg.sizes;
  for (const auto& s : sizes) {
    if (s.image_edge < 1 || s.filter_edge < 1) throw std::invalid_argument("bench: edges must be positive");
    if (s.filter_edge > s.image_edge)
      throw std::invalid_argument("bench: filter edge " + std::to_string(s.filter_edge) + " exceeds image edge " +
                                  std::to_string(s.image_edge));
    if (std::find(cfg.methods.begin(), cfg.methods.end(), MorphMethod::FftUmbra) != cfg.methods.end())
      for (int b : cfg.bits)
        if (estimate_umbra_bytes(s.image_edge, s.filter_edge, b) > cfg.memory_limit_bytes)
          throw std::invalid_argument("bench: umbra volume for " + std::to_string(s.image_edge) + "x" +
                                      std::to_string(s.image_edge) + " at " + std::to_string(b) +
                                      " bits exceeds the memory limit");
  }
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg, const std::function<void(const BenchRow&)>& on_row) {
  validate(cfg);
  const auto sizes = cfg.sizes.empty() ? default_sizes(cfg.mode) : cfg.sizes;
  const bool has_naive = std::find(cfg.methods.begin(), cfg.methods.end(), MorphMethod::Naive) != cfg.methods.end();

  std::vector<BenchRow> rows;
  for (const auto& size : sizes) {
    for (int bits : cfg.bits) {
      for (int rep = 0; rep < cfg.repeats; ++rep) {
        std::uint64_t key = splitmix64(cfg.seed);
        for (auto part : {static_cast<std::uint64_t>(size.image_edge), static_cast<std::uint64_t>(size.filter_edge),
                          static_cast<std::uint64_t>(bits), static_cast<std::uint64_t>(rep)})
          key = splitmix64(key ^ part);
        Rng rng(key);
        const GridFunction f = random_image(size.image_edge, bits, rng);
        const GridFunction b = random_se(size.filter_edge, bits, rng);
        const std::uint64_t digest = input_digest(f, b);

        // Naive runs first so every other method can be checked against it.
        std::vector<MorphMethod> order = cfg.methods;
        std::stable_partition(order.begin(), order.end(), [](MorphMethod m) { return m == MorphMethod::Naive; });
        std::optional<GridFunction> reference;
        for (MorphMethod m : order) {
          const auto t0 = std::chrono::steady_clock::now();
          MorphResult res = dilate(f, b, m);
          const auto t1 = std::chrono::steady_clock::now();

          BenchRow row;
          row.mode = cfg.mode;
          row.bits = bits;
          row.image_edge = size.image_edge;
          row.filter_edge = size.filter_edge;
          row.method = m;
          row.repeat = rep;
          row.seconds = std::chrono::duration<double>(t1 - t0).count();
          row.input_digest = digest;
          if (m == MorphMethod::Naive) {
            reference = res.image;
            row.max_abs_diff_vs_naive = 0;
          } else if (has_naive && reference) {
            std::int64_t d = 0;
            for (std::int64_t i = 0; i < res.image.values().size(); ++i)
              d = std::max(d, std::abs(res.image.values()[i] - reference->values()[i]));
            row.max_abs_diff_vs_naive = d;
          }
          if (on_row) on_row(row);
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

std::string bench_csv_header() {
  return "mode,bits,image_edge,filter_edge,method,repeat,seconds,max_abs_diff_vs_naive,input_digest";
}

std::string format_bench_row(const BenchRow& row) {
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(row.input_digest));
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.6f", row.seconds);
  std::ostringstream os;
  os << to_string(row.mode) << ',' << row.bits << ',' << row.image_edge << ',' << row.filter_edge << ','
     << to_string(row.method) << ',' << row.repeat << ',' << secs << ','
     << (row.max_abs_diff_vs_naive ? std::to_string(*row.max_abs_diff_vs_naive) : std::string("NA")) << ','
     << digest;
  return os.str();
}

std::string to_string(MorphMethod m) { return m == MorphMethod::Naive ? "naive" : "fft"; }

std::string to_string(BenchMode m) { return m == BenchMode::FilterSweep ? "filter-sweep" : "image-sweep"; }

MorphMethod parse_method(const std::string& s) {
  if (s == "naive") return MorphMethod::Naive;
  if (s == "fft") return MorphMethod::FftUmbra;
  throw std::invalid_argument("unknown method '" + s + "' (expected naive or fft)");
}

BenchMode parse_mode(const std::string& s) {
  if (s == "filter-sweep") return BenchMode::FilterSweep;
  if (s == "image-sweep") return BenchMode::ImageSweep;
  throw std::invalid_argument("unknown bench mode '" + s + "'");
}

DiffReport diff_images(const GridFunction& a, const GridFunction& b) {
  if (!a.values().same_layout(b.values())) throw std::invalid_argument("diff: images differ in shape");
  const std::int64_t maxval = std::min<std::int64_t>(255, std::max(a.declared_max(), b.declared_max()));
  IntArray neg(a.values().shape(), a.values().lo());
  DiffReport rep;
  long double sum = 0;
  for (std::int64_t i = 0; i < neg.size(); ++i) {
    const std::int64_t d = std::abs(a.values()[i] - b.values()[i]);
    rep.max_abs = std::max(rep.max_abs, d);
    sum += d;
    neg[i] = std::max<std::int64_t>(0, maxval - d);
  }
  rep.mean_abs = static_cast<double>(sum / neg.size());
  rep.negative = GridFunction(std::move(neg), maxval);
  return rep;
}

}  // namespace umbramorph
