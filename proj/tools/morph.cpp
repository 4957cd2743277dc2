// morph: command-line front end for umbramorph.
//
//   morph dilate|erode|open|close|gradient --image P --se P --method naive|fft --out P [--clamp] [--tonal-max N]
//   morph bench --mode filter-sweep|image-sweep --bits 4,8 --seed N --sizes 256x16,256x32 --repeats N --methods naive,fft --csv P
//   morph hist --image P --csv P
//   morph diff A B [--out P]

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "umbramorph/bench.hpp"
#include "umbramorph/fft_conv.hpp"
#include "umbramorph/io.hpp"
#include "umbramorph/morphology.hpp"

namespace um = umbramorph;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kRange = 3, kPrecision = 4 };

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct MorphArgs {
  std::string op;
  std::string image, se, method = "fft", out;
  bool clamp = false;
  std::int64_t tonal_max = -1;
};

int cmd_morph(const MorphArgs& a) {
  const um::GridFunction f = um::read_pgm(a.image);
  const um::GridFunction b = um::read_se(a.se);
  const um::MorphMethod method = um::parse_method(a.method);
  const std::int64_t l = a.tonal_max >= 0 ? a.tonal_max : f.declared_max();
  if (l < 1 || l > 255) throw std::invalid_argument("--tonal-max must be in 1..255");
  um::MorphOptions opts;
  opts.tonal_max = l;

  const auto t0 = std::chrono::steady_clock::now();
  double dev = 0.0;
  um::GridFunction result;
  if (a.op == "dilate") {
    auto r = um::dilate(f, b, method, opts);
    dev = r.max_fft_deviation;
    result = std::move(r.image);
  } else if (a.op == "erode") {
    auto r = um::erode(f, b, method, opts);
    dev = r.max_fft_deviation;
    result = std::move(r.image);
  } else if (a.op == "open") {
    result = um::opening(f, b, method);
  } else if (a.op == "close") {
    result = um::closing(f, b, method);
  } else {
    result = um::beucher_gradient(f, b, method);
  }
  const auto t1 = std::chrono::steady_clock::now();

  if (!a.clamp && result.max_value() > l) {
    std::cerr << "morph: result reaches " << result.max_value() << ", above the tonal maximum " << l
              << "; rerun with --clamp\n";
    return kRange;
  }
  // Erosion can dip below zero; negatives are always clamped on output.
  um::write_pgm(um::clamp_to(result, l), a.out);

  std::printf("elapsed_seconds: %.6f\n", std::chrono::duration<double>(t1 - t0).count());
  if (method == um::MorphMethod::FftUmbra && (a.op == "dilate" || a.op == "erode"))
    std::printf("max_fft_deviation: %.3g\n", dev);
  return kOk;
}

struct BenchArgs {
  std::string mode = "filter-sweep";
  std::string bits = "4";
  std::uint64_t seed = 1;
  std::string sizes;
  int repeats = 1;
  std::string methods = "naive,fft";
  std::string csv;
  double memory_limit_gib = 4.0;
};

int cmd_bench(const BenchArgs& a) {
  um::BenchConfig cfg;
  cfg.mode = um::parse_mode(a.mode);
  cfg.bits.clear();
  for (const auto& t : split(a.bits, ',')) cfg.bits.push_back(std::stoi(t));
  cfg.seed = a.seed;
  for (const auto& t : split(a.sizes, ',')) {
    const auto parts = split(t, 'x');
    if (parts.size() != 2) throw std::invalid_argument("--sizes entries look like 256x16");
    cfg.sizes.push_back({std::stoll(parts[0]), std::stoll(parts[1])});
  }
  cfg.repeats = a.repeats;
  cfg.methods.clear();
  for (const auto& t : split(a.methods, ',')) cfg.methods.push_back(um::parse_method(t));
  cfg.memory_limit_bytes = static_cast<std::uint64_t>(a.memory_limit_gib * static_cast<double>(std::uint64_t{1} << 30));
  um::validate(cfg);

  std::ofstream csv(a.csv);
  if (!csv) throw std::runtime_error("cannot write " + a.csv);
  csv << um::bench_csv_header() << '\n';
  std::cout << um::bench_csv_header() << '\n';
  um::run_bench(cfg, [&](const um::BenchRow& row) {
    const auto line = um::format_bench_row(row);
    csv << line << '\n' << std::flush;
    std::cout << line << '\n' << std::flush;
  });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact grey-value morphology via umbra convolution"};
  app.require_subcommand(1);

  MorphArgs margs;
  for (const char* op : {"dilate", "erode", "open", "close", "gradient"}) {
    auto* sub = app.add_subcommand(op, std::string(op) + " an image by a structuring element");
    sub->add_option("--image", margs.image, "input PGM")->required()->check(CLI::ExistingFile);
    sub->add_option("--se", margs.se, "structuring element file")->required()->check(CLI::ExistingFile);
    sub->add_option("--method", margs.method, "naive or fft")->check(CLI::IsMember({"naive", "fft"}));
    sub->add_option("--out", margs.out, "output PGM")->required();
    sub->add_flag("--clamp", margs.clamp, "clamp results to the tonal maximum");
    sub->add_option("--tonal-max", margs.tonal_max, "tonal maximum l (default: input maxval)");
    sub->callback([&margs, op] { margs.op = op; });
  }

  BenchArgs bargs;
  auto* bench = app.add_subcommand("bench", "time naive and FFT dilation on seeded random inputs");
  bench->add_option("--mode", bargs.mode)->check(CLI::IsMember({"filter-sweep", "image-sweep"}));
  bench->add_option("--bits", bargs.bits, "comma-separated tonal depths");
  bench->add_option("--seed", bargs.seed);
  bench->add_option("--sizes", bargs.sizes, "comma-separated IMAGExFILTER edges");
  bench->add_option("--repeats", bargs.repeats);
  bench->add_option("--methods", bargs.methods, "comma-separated subset of naive,fft");
  bench->add_option("--csv", bargs.csv)->required();
  bench->add_option("--memory-limit-gib", bargs.memory_limit_gib, "refuse umbra volumes above this size");

  std::string hist_image, hist_csv;
  auto* hist = app.add_subcommand("hist", "grey-value histogram as CSV");
  hist->add_option("--image", hist_image)->required()->check(CLI::ExistingFile);
  hist->add_option("--csv", hist_csv)->required();

  std::string diff_a, diff_b, diff_out;
  auto* diff = app.add_subcommand("diff", "pixelwise absolute difference of two PGMs");
  diff->add_option("a", diff_a)->required()->check(CLI::ExistingFile);
  diff->add_option("b", diff_b)->required()->check(CLI::ExistingFile);
  diff->add_option("--out", diff_out, "write maxval - |a - b| as a PGM");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (!margs.op.empty()) return cmd_morph(margs);
    if (bench->parsed()) return cmd_bench(bargs);
    if (hist->parsed()) {
      um::write_file(hist_csv, um::format_histogram_csv(um::histogram(um::read_pgm(hist_image))));
      return kOk;
    }
    if (diff->parsed()) {
      const auto rep = um::diff_images(um::read_pgm(diff_a), um::read_pgm(diff_b));
      std::printf("max_abs_diff: %lld\nmean_abs_diff: %.6f\n", static_cast<long long>(rep.max_abs), rep.mean_abs);
      if (!diff_out.empty()) um::write_pgm(rep.negative, diff_out);
      return kOk;
    }
  } catch (const um::PrecisionError& e) {
    std::cerr << "morph: " << e.what() << "\nmorph: the FFT path cannot guarantee exact integers here; use --method naive\n";
    return kPrecision;
  } catch (const um::ParseError& e) {
    std::cerr << "morph: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "morph: " << e.what() << '\n';
    return kInput;
  }
  return kUsage;
}
