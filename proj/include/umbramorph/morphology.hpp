#pragma once

// Grey-value dilation and erosion by arbitrary (flat or non-flat, gapped)
// structuring elements, plus the usual compound filters.
//
// Two methods produce identical results:
//   Naive    - sliding maximum/minimum over every image/SE pair.
//   FftUmbra - lift image and SE to 0/1 umbra volumes, convolve them with an
//              FFT, then read each pixel's value off as the highest tonal
//              index with a nonzero count.
// Erosion by FftUmbra goes through duality: l - dilate(l - f, reflect(b)).
//
// Gaps behave as "no pair": a gap never contributes to a max or a min. A
// pixel with no pair at all gets 0 under dilation and l under erosion, and
// is reported as uncovered.

#include <cstdint>
#include <optional>

#include "umbramorph/umbra.hpp"

namespace umbramorph {

enum class MorphMethod { Naive, FftUmbra };

struct MorphOptions {
  /// Return the Minkowski-range result instead of cropping to the image box.
  bool uncropped = false;
  /// Tonal maximum l used by erosion; defaults to max(declared, realised max).
  std::optional<std::int64_t> tonal_max;
};

struct MorphResult {
  GridFunction image;
  MaskArray covered;                  // 1 where at least one pair contributed
  double max_fft_deviation = 0.0;     // FftUmbra only
};

MorphResult dilate(const GridFunction& f, const GridFunction& b, MorphMethod method, const MorphOptions& opts = {});
MorphResult erode(const GridFunction& f, const GridFunction& b, MorphMethod method, const MorphOptions& opts = {});

GridFunction dilate_naive(const GridFunction& f, const GridFunction& b);
GridFunction erode_naive(const GridFunction& f, const GridFunction& b);
GridFunction dilate_fft(const GridFunction& f, const GridFunction& b);
GridFunction erode_fft(const GridFunction& f, const GridFunction& b, std::int64_t l);

/// y -> -y on every axis; gaps move with their values.
GridFunction reflect(const GridFunction& b);

/// l - f(x) at defined pixels.
GridFunction negate(const GridFunction& f, std::int64_t l);

GridFunction opening(const GridFunction& f, const GridFunction& b, MorphMethod method);
GridFunction closing(const GridFunction& f, const GridFunction& b, MorphMethod method);
/// dilate - erode, clamped at 0.
GridFunction beucher_gradient(const GridFunction& f, const GridFunction& b, MorphMethod method);

/// Pixels x of `image` for which x + y stays inside `image` for every y in
/// `se`. Ranges may come out empty.
Box erosion_interior(const Box& image, const Box& se);

}  // namespace umbramorph
