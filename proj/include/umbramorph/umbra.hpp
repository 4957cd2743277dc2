#pragma once

// Lifting grey-value functions into 0/1 volumes with one extra tonal axis,
// and projecting convolved volumes back to grey values.

#include <cstdint>

#include "umbramorph/tensor.hpp"

namespace umbramorph {

/// An N-dimensional grey-value function on a rectangular grid. Pixels with
/// defined == 0 are gaps: outside the function's domain.
class GridFunction {
 public:
  GridFunction() = default;
  /// Gap-free function.
  GridFunction(IntArray values, std::int64_t declared_max);
  GridFunction(IntArray values, MaskArray defined, std::int64_t declared_max);

  const IntArray& values() const { return values_; }
  const MaskArray& defined() const { return defined_; }
  std::int64_t declared_max() const { return declared_max_; }
  std::size_t rank() const { return values_.rank(); }
  Box box() const { return values_.box(); }

  bool is_defined(std::span<const std::int64_t> x) const { return defined_.at(x) != 0; }
  std::int64_t at(std::span<const std::int64_t> x) const { return values_.at(x); }
  std::int64_t at(std::initializer_list<std::int64_t> x) const { return values_.at(x); }

  bool gap_free() const;
  std::int64_t defined_count() const;
  std::int64_t max_value() const;  // over defined pixels
  std::int64_t min_value() const;  // over defined pixels

  /// Throws unless every defined value lies in [0, declared_max].
  void check_tonal_range() const;

  friend bool operator==(const GridFunction&, const GridFunction&) = default;

 private:
  IntArray values_;
  MaskArray defined_;
  std::int64_t declared_max_ = 1;
};

/// (N+1)-dimensional 0/1 volume; the tonal axis is last and spans [0, lr].
struct UmbraVolume {
  IntArray bits;
  std::int64_t lr = 0;
};

/// Full-mode convolution of two umbra volumes; tonal axis last.
struct CountVolume {
  IntArray counts;
};

/// Shared tonal extent of image and structuring-element volumes.
std::int64_t required_lr(const GridFunction& f, const GridFunction& b);

UmbraVolume build_umbra(const GridFunction& g, std::int64_t lr);

/// Highest tonal index with a nonzero count for every spatial x in `out_range`;
/// 0 where the column is empty. If `covered` is given it receives 1 where
/// the column was non-empty.
GridFunction project(const CountVolume& c, const Box& out_range, std::int64_t declared_max,
                     MaskArray* covered = nullptr);

}  // namespace umbramorph
