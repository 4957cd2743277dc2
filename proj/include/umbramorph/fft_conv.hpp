#pragma once

// Full-mode linear convolution of N-dimensional integer arrays.
//
// Two backends compute the same thing: a direct summation (the reference)
// and a fast-transform path that multiplies zero-padded spectra and rounds
// the inverse back to integers. The fast path refuses inputs whose exact
// result could exceed the range where doubles represent integers exactly.

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "umbramorph/tensor.hpp"

namespace umbramorph {

/// Results whose magnitude may reach this bound are not handed to the FFT path.
inline constexpr double kPrecisionBudget = 4503599627370496.0;  // 2^52

/// Largest tolerated distance between an inverse-transform value and its
/// nearest integer.
inline constexpr double kRoundingTolerance = 0.25;

class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ConvBackend { Direct, Fft };

struct ConvPlan {
  Index padded_shape;  // transform length per axis
  Box in_a;            // logical box of the (trimmed) first operand
  Box in_b;            // logical box of the (trimmed) second operand
  Box out;             // logical output box
  ConvBackend backend = ConvBackend::Fft;

  /// Logical index that circular position 0 stands for.
  Index origin() const;
};

struct ConvReport {
  double max_deviation = 0.0;  // max |v - round(v)| over the returned entries
  Index padded_shape;
};

/// Smallest n' >= n whose prime factors are all in {2, 3, 5}.
std::int64_t next_fast_size(std::int64_t n);

/// Plan covering the whole full-mode output; padded lengths are fast sizes
/// at or above shapeA + shapeB - 1.
ConvPlan plan_full(const Box& a, const Box& b, ConvBackend backend = ConvBackend::Fft);

/// Plan that only has to reproduce `window` (clipped to the full output).
/// Circular wrap-around may land on entries outside the window, which lets
/// the padded length drop below shapeA + shapeB - 1.
ConvPlan plan_window(const Box& a, const Box& b, const Box& window);

/// Upper bound on max_k sum_i |a[i] b[k-i]|.
double magnitude_bound(const IntArray& a, const IntArray& b);

IntArray conv_full_direct(const IntArray& a, const IntArray& b);
IntArray conv_full_fft(const IntArray& a, const IntArray& b, ConvReport* report = nullptr);

/// Entries of the full-mode convolution over `window`; positions outside the
/// full output range are zero.
IntArray conv_window_fft(const IntArray& a, const IntArray& b, const Box& window, ConvReport* report = nullptr);

IntArray conv_full(const IntArray& a, const IntArray& b, ConvBackend backend, ConvReport* report = nullptr);

/// Part of `window` that can be nonzero for operands inside `a` and `b`;
/// nullopt when the two do not meet.
std::optional<Box> window_clip(const Box& a, const Box& b, const Box& window);

/// One windowed convolution on a fixed padded grid, for callers that write
/// operands straight into the transform buffers and read results in place.
/// Buffers are row-major over the padded shape, but each last-axis row is
/// padded to row_pitch() doubles (the in-place r2c layout).
class WindowConvolution {
 public:
  /// Throws unless window_clip(a, b, window) is non-empty.
  WindowConvolution(const Box& a, const Box& b, const Box& window);
  ~WindowConvolution();
  WindowConvolution(const WindowConvolution&) = delete;
  WindowConvolution& operator=(const WindowConvolution&) = delete;

  const ConvPlan& plan() const { return plan_; }
  const Box& clip() const { return clip_; }
  const Index& strides() const { return strides_; }
  std::int64_t row_pitch() const { return pitch_; }

  /// Zeroed operand buffer: 0 for a, 1 for b. Logical x of a lives at
  /// offset sum (x - a.lo) * strides(), likewise for b.
  double* operand(int which);

  /// Multiplies the two spectra and leaves the normalised result in
  /// operand(0); logical x then lives at floor_mod(x - plan().origin(), padded).
  void run();

 private:
  struct Fftw;
  ConvPlan plan_;
  Box clip_;
  Index strides_;
  std::int64_t pitch_ = 0;
  std::unique_ptr<Fftw> fftw_;
};

/// Half spectrum of a real array on the plan's padded grid (last axis holds
/// padded/2 + 1 bins).
struct Spectrum {
  Index padded_shape;
  std::vector<std::complex<double>> bins;

  Spectrum& operator*=(const Spectrum& other);
};

/// Forward DFT of `a` embedded at the corner of the padded grid (logical lo
/// of `a` maps to position 0).
Spectrum transform_forward(const RealArray& a, const ConvPlan& plan);

/// Normalised inverse DFT; result has the padded shape with lo = 0.
RealArray transform_inverse(const Spectrum& s, const ConvPlan& plan);

}  // namespace umbramorph
