#include "umbramorph/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "umbramorph/fft_conv.hpp"

namespace umbramorph {

namespace {

struct Tap {
  Index y;
  std::int64_t value;
  std::int64_t flat;  // offset of the source pixel relative to x, in f's strides
};

// Dilation reads f(x - y) + b(y) and keeps the max; erosion reads
// f(x + y) - b(y) and keeps the min.
template <bool Dilate>
MorphResult naive_sliding(const GridFunction& f, const GridFunction& b, const Box& out_box, std::int64_t empty_value) {
  if (f.rank() != b.rank()) throw std::invalid_argument("morphology: image and SE ranks differ");
  const std::size_t rank = f.rank();
  const IntArray& fv = f.values();
  const MaskArray& fd = f.defined();
  const Box fbox = f.box();
  const Box bbox = b.box();

  std::vector<Tap> taps;
  b.values().for_each([&](const Index& y, std::int64_t v) {
    if (!b.is_defined(y)) return;
    std::int64_t flat = 0;
    for (std::size_t j = 0; j < rank; ++j) flat += (Dilate ? -y[j] : y[j]) * fv.strides()[j];
    taps.push_back({y, v, flat});
  });

  // Every tap's source lies inside f's box for x in `safe`.
  Box safe(rank);
  for (std::size_t j = 0; j < rank; ++j) {
    safe[j] = Dilate ? IndexRange{fbox[j].lo + bbox[j].hi, fbox[j].hi + bbox[j].lo}
                     : IndexRange{fbox[j].lo - bbox[j].lo, fbox[j].hi - bbox[j].hi};
  }

  IntArray out(out_box);
  MaskArray covered(out_box);
  const std::int64_t init = Dilate ? std::numeric_limits<std::int64_t>::min() : std::numeric_limits<std::int64_t>::max();
  Index x = out.lo();
  Index src(rank);
  for (std::int64_t i = 0; i < out.size(); ++i) {
    std::int64_t best = init;
    bool any = false;
    auto take = [&](std::int64_t fval, std::int64_t bval) {
      const std::int64_t cand = Dilate ? fval + bval : fval - bval;
      best = Dilate ? std::max(best, cand) : std::min(best, cand);
      any = true;
    };
    bool fast = true;
    for (std::size_t j = 0; j < rank && fast; ++j) fast = safe[j].contains(x[j]);
    if (fast) {
      // x itself may sit outside f when the SE does not contain the origin.
      std::int64_t base = 0;
      for (std::size_t j = 0; j < rank; ++j) base += (x[j] - fv.lo()[j]) * fv.strides()[j];
      for (const auto& t : taps) {
        const std::int64_t s = base + t.flat;
        if (fd[s]) take(fv[s], t.value);
      }
    } else {
      for (const auto& t : taps) {
        bool inside = true;
        for (std::size_t j = 0; j < rank; ++j) {
          src[j] = Dilate ? x[j] - t.y[j] : x[j] + t.y[j];
          inside = inside && fbox[j].contains(src[j]);
        }
        if (!inside) continue;
        const std::int64_t s = fv.offset(src);
        if (fd[s]) take(fv[s], t.value);
      }
    }
    out[i] = any ? best : empty_value;
    covered[i] = any ? 1 : 0;
    out.advance(x);
  }
  return {GridFunction(std::move(out), f.declared_max()), std::move(covered), 0.0};
}

// Bounding box of the defined pixels, with the grey range as an extra last axis.
Box support_box(const GridFunction& g) {
  const std::size_t rank = g.rank();
  Box bb(rank, IndexRange{std::numeric_limits<std::int64_t>::max(), std::numeric_limits<std::int64_t>::min()});
  std::int64_t i = 0;
  g.values().for_each([&](const Index& x, std::int64_t) {
    if (g.defined()[i++])
      for (std::size_t j = 0; j < rank; ++j) bb[j] = {std::min(bb[j].lo, x[j]), std::max(bb[j].hi, x[j])};
  });
  bb.push_back({0, g.max_value() - g.min_value()});
  return bb;
}

std::int64_t floor_mod(std::int64_t v, std::int64_t m) {
  const std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

// The umbra volumes are written straight into the transform buffers and the
// projection reads the inverse in place, so no integer volume is ever built.
// Both volumes start at their own minimum grey value; offsets commute with
// dilation and are added back at the end. Counts never exceed the SE size,
// far below the precision budget.
MorphResult dilate_umbra(const GridFunction& f, const GridFunction& b, const Box& out_box) {
  if (f.rank() != b.rank()) throw std::invalid_argument("morphology: image and SE ranks differ");
  IntArray out(out_box);
  MaskArray covered(out_box);
  const auto done = [&](double dev) {
    return MorphResult{GridFunction(std::move(out), f.declared_max()), std::move(covered), dev};
  };
  if (f.defined_count() == 0 || b.defined_count() == 0) return done(0.0);

  const std::size_t rank = f.rank();
  const std::int64_t min_f = f.min_value(), min_b = b.min_value();
  const Box box_f = support_box(f), box_b = support_box(b);
  Box window = out_box;
  window.push_back({0, box_f.back().hi + box_b.back().hi});
  const auto clip = window_clip(box_f, box_b, window);
  if (!clip) return done(0.0);

  WindowConvolution conv(box_f, box_b, window);
  const Index& ps = conv.strides();
  auto put = [&](const GridFunction& g, const Box& box, std::int64_t min_g, double* buf) {
    std::int64_t i = 0;
    g.values().for_each([&](const Index& x, std::int64_t v) {
      if (!g.defined()[i++]) return;
      std::int64_t off = v - min_g;
      for (std::size_t j = 0; j < rank; ++j) off += (x[j] - box[j].lo) * ps[j];
      buf[off] = 1.0;
    });
  };
  put(f, box_f, min_f, conv.operand(0));
  put(b, box_b, min_b, conv.operand(1));
  conv.run();

  const double* res = conv.operand(0);
  const Index& padded = conv.plan().padded_shape;
  const Index origin = conv.plan().origin();
  const IndexRange tonal = clip->back();
  const std::int64_t pt = padded[rank];
  double max_dev = 0.0;
  Index x = out.lo();
  for (std::int64_t i = 0; i < out.size(); ++i, out.advance(x)) {
    std::int64_t base = 0;
    bool inside = true;
    for (std::size_t j = 0; j < rank && inside; ++j) {
      inside = (*clip)[j].contains(x[j]);
      base += floor_mod(x[j] - origin[j], padded[j]) * ps[j];
    }
    if (!inside) continue;
    // Every entry is checked against the rounding tolerance, not just the top one.
    const double* col = res + base;
    std::int64_t k = floor_mod(tonal.lo - origin[rank], pt);
    std::int64_t top = -1;
    for (std::int64_t t = tonal.lo; t <= tonal.hi; ++t) {
      const double v = col[k];
      const double r = std::floor(v + 0.5);
      max_dev = std::max(max_dev, std::abs(v - r));
      if (r >= 1.0) top = t;
      if (++k == pt) k = 0;
    }
    if (top >= 0) {
      out[i] = top + min_f + min_b;
      covered[i] = 1;
    }
  }
  if (!(max_dev < kRoundingTolerance))
    throw PrecisionError("dilate: inverse transform deviates from integers by " + std::to_string(max_dev));
  return done(max_dev);
}

Box output_box(const GridFunction& f, const Box& se_box, const MorphOptions& opts) {
  return opts.uncropped ? full_output_range(f.box(), se_box) : f.box();
}

std::int64_t erosion_tonal_max(const GridFunction& f, const MorphOptions& opts) {
  if (opts.tonal_max) {
    if (*opts.tonal_max < f.max_value())
      throw std::invalid_argument("erode: tonal maximum " + std::to_string(*opts.tonal_max) +
                                  " is below the image maximum " + std::to_string(f.max_value()));
    return *opts.tonal_max;
  }
  return std::max(f.declared_max(), f.max_value());
}

}  // namespace

MorphResult dilate(const GridFunction& f, const GridFunction& b, MorphMethod method, const MorphOptions& opts) {
  const Box out = output_box(f, b.box(), opts);
  if (method == MorphMethod::Naive) return naive_sliding<true>(f, b, out, 0);
  return dilate_umbra(f, b, out);
}

MorphResult erode(const GridFunction& f, const GridFunction& b, MorphMethod method, const MorphOptions& opts) {
  const std::int64_t l = erosion_tonal_max(f, opts);
  const GridFunction rb = reflect(b);
  const Box out = output_box(f, rb.box(), opts);
  if (method == MorphMethod::Naive) {
    MorphResult r = naive_sliding<false>(f, b, out, l);
    r.image = GridFunction(r.image.values(), std::max<std::int64_t>(l, 1));
    return r;
  }
  // f erode b = l - ((l - f) dilate reflect(b)); uncovered pixels come out as l - 0.
  MorphResult d = dilate_umbra(negate(f, l), rb, out);
  IntArray v = d.image.values();
  for (auto& e : v.data()) e = l - e;
  return {GridFunction(std::move(v), std::max<std::int64_t>(l, 1)), std::move(d.covered), d.max_fft_deviation};
}

GridFunction dilate_naive(const GridFunction& f, const GridFunction& b) { return dilate(f, b, MorphMethod::Naive).image; }

GridFunction erode_naive(const GridFunction& f, const GridFunction& b) { return erode(f, b, MorphMethod::Naive).image; }

GridFunction dilate_fft(const GridFunction& f, const GridFunction& b) { return dilate(f, b, MorphMethod::FftUmbra).image; }

GridFunction erode_fft(const GridFunction& f, const GridFunction& b, std::int64_t l) {
  MorphOptions opts;
  opts.tonal_max = l;
  return erode(f, b, MorphMethod::FftUmbra, opts).image;
}

GridFunction reflect(const GridFunction& b) {
  const Box box = b.box();
  Box rbox(box.size());
  for (std::size_t j = 0; j < box.size(); ++j) rbox[j] = {-box[j].hi, -box[j].lo};
  IntArray v(rbox);
  MaskArray d(rbox);
  Index ry(box.size());
  b.values().for_each([&](const Index& y, std::int64_t val) {
    for (std::size_t j = 0; j < y.size(); ++j) ry[j] = -y[j];
    v.at(ry) = val;
    d.at(ry) = b.defined().at(y);
  });
  return GridFunction(std::move(v), std::move(d), b.declared_max());
}

GridFunction negate(const GridFunction& f, std::int64_t l) {
  if (l < f.max_value())
    throw std::invalid_argument("negate: l = " + std::to_string(l) + " is below the maximum " +
                                std::to_string(f.max_value()));
  IntArray v = f.values();
  for (std::int64_t i = 0; i < v.size(); ++i) v[i] = f.defined()[i] ? l - v[i] : 0;
  return GridFunction(std::move(v), f.defined(), std::max<std::int64_t>(l, 1));
}

GridFunction opening(const GridFunction& f, const GridFunction& b, MorphMethod method) {
  return dilate(erode(f, b, method).image, b, method).image;
}

GridFunction closing(const GridFunction& f, const GridFunction& b, MorphMethod method) {
  return erode(dilate(f, b, method).image, b, method).image;
}

GridFunction beucher_gradient(const GridFunction& f, const GridFunction& b, MorphMethod method) {
  const GridFunction d = dilate(f, b, method).image;
  const GridFunction e = erode(f, b, method).image;
  IntArray v = d.values();
  for (std::int64_t i = 0; i < v.size(); ++i) v[i] = std::max<std::int64_t>(0, v[i] - e.values()[i]);
  return GridFunction(std::move(v), f.declared_max());
}

Box erosion_interior(const Box& image, const Box& se) {
  if (image.size() != se.size()) throw std::invalid_argument("erosion_interior: rank mismatch");
  Box in(image.size());
  for (std::size_t j = 0; j < image.size(); ++j) in[j] = {image[j].lo - se[j].lo, image[j].hi - se[j].hi};
  return in;
}

}  // namespace umbramorph
