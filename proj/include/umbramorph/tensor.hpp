#pragma once

// Dense N-dimensional arrays addressed by logical (possibly negative) indices.

#include <cstddef>
#include <concepts>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace umbramorph {

using Index = std::vector<std::int64_t>;

/// Closed integer interval [lo, hi].
struct IndexRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  std::int64_t size() const { return hi - lo + 1; }
  bool empty() const { return hi < lo; }
  bool contains(std::int64_t x) const { return lo <= x && x <= hi; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// One IndexRange per axis: an axis-aligned hyper-rectangle of logical indices.
using Box = std::vector<IndexRange>;

/// Index set of the full-mode convolution of arrays over `a` and `b`, i.e.
/// the per-axis Minkowski sum [loA+loB, hiA+hiB].
Box full_output_range(const Box& a, const Box& b);

bool box_contains(const Box& outer, const Box& inner);
std::int64_t box_volume(const Box& box);

template <typename T>
class NDArray {
 public:
  NDArray() = default;

  NDArray(Index shape, Index lo, T fill = T{}) : shape_(std::move(shape)), lo_(std::move(lo)) {
    if (shape_.size() != lo_.size()) throw std::invalid_argument("NDArray: shape/lo rank mismatch");
    for (auto s : shape_)
      if (s <= 0) throw std::invalid_argument("NDArray: extents must be positive");
    data_.assign(static_cast<std::size_t>(count(shape_)), fill);
    init_strides();
  }

  NDArray(Index shape, Index lo, std::vector<T> data) : shape_(std::move(shape)), lo_(std::move(lo)), data_(std::move(data)) {
    if (shape_.size() != lo_.size()) throw std::invalid_argument("NDArray: shape/lo rank mismatch");
    for (auto s : shape_)
      if (s <= 0) throw std::invalid_argument("NDArray: extents must be positive");
    if (static_cast<std::int64_t>(data_.size()) != count(shape_))
      throw std::invalid_argument("NDArray: data length does not match shape");
    init_strides();
  }

  // A template so that braced {shape}, {lo} pairs never bind to it.
  template <class B>
    requires std::same_as<B, Box>
  explicit NDArray(const B& box, T fill = T{}) : NDArray(shape_of(box), lo_of(box), fill) {}

  std::size_t rank() const { return shape_.size(); }
  const Index& shape() const { return shape_; }
  const Index& lo() const { return lo_; }
  const Index& strides() const { return strides_; }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

  Index hi() const {
    Index h(rank());
    for (std::size_t j = 0; j < rank(); ++j) h[j] = lo_[j] + shape_[j] - 1;
    return h;
  }

  Box box() const {
    Box b(rank());
    for (std::size_t j = 0; j < rank(); ++j) b[j] = {lo_[j], lo_[j] + shape_[j] - 1};
    return b;
  }

  bool in_bounds(std::span<const std::int64_t> x) const {
    if (x.size() != rank()) return false;
    for (std::size_t j = 0; j < rank(); ++j)
      if (x[j] < lo_[j] || x[j] >= lo_[j] + shape_[j]) return false;
    return true;
  }

  /// Flat row-major offset of logical index `x`; throws when out of bounds.
  std::int64_t offset(std::span<const std::int64_t> x) const {
    if (!in_bounds(x)) throw std::out_of_range("NDArray: index out of bounds");
    std::int64_t off = 0;
    for (std::size_t j = 0; j < rank(); ++j) off += (x[j] - lo_[j]) * strides_[j];
    return off;
  }

  const T& at(std::span<const std::int64_t> x) const { return data_[static_cast<std::size_t>(offset(x))]; }
  T& at(std::span<const std::int64_t> x) { return data_[static_cast<std::size_t>(offset(x))]; }
  const T& at(std::initializer_list<std::int64_t> x) const { return at(std::span<const std::int64_t>(x.begin(), x.size())); }
  T& at(std::initializer_list<std::int64_t> x) { return at(std::span<const std::int64_t>(x.begin(), x.size())); }

  /// Logical index of flat offset `off`.
  Index unravel(std::int64_t off) const {
    Index x(rank());
    for (std::size_t j = 0; j < rank(); ++j) {
      x[j] = lo_[j] + off / strides_[j];
      off %= strides_[j];
    }
    return x;
  }

  const T& operator[](std::int64_t off) const { return data_[static_cast<std::size_t>(off)]; }
  T& operator[](std::int64_t off) { return data_[static_cast<std::size_t>(off)]; }

  std::span<const T> data() const { return data_; }
  std::span<T> data() { return data_; }
  const std::vector<T>& values() const { return data_; }

  /// Calls fn(x, value) over every element in row-major order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    Index x = lo_;
    for (std::size_t off = 0; off < data_.size(); ++off) {
      fn(std::as_const(x), data_[off]);
      advance(x);
    }
  }

  /// Increments logical index `x` in row-major order within this array's box.
  void advance(Index& x) const {
    for (std::size_t j = rank(); j-- > 0;) {
      if (++x[j] < lo_[j] + shape_[j]) return;
      x[j] = lo_[j];
    }
  }

  template <class U>
  bool same_layout(const NDArray<U>& o) const {
    return shape_ == o.shape() && lo_ == o.lo();
  }

  friend bool operator==(const NDArray& a, const NDArray& b) {
    return a.shape_ == b.shape_ && a.lo_ == b.lo_ && a.data_ == b.data_;
  }

  static std::int64_t count(const Index& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::int64_t{1}, std::multiplies<>());
  }

  static Index shape_of(const Box& box) {
    Index s(box.size());
    for (std::size_t j = 0; j < box.size(); ++j) s[j] = box[j].size();
    return s;
  }

  static Index lo_of(const Box& box) {
    Index l(box.size());
    for (std::size_t j = 0; j < box.size(); ++j) l[j] = box[j].lo;
    return l;
  }

 private:
  void init_strides() {
    strides_.assign(rank(), 1);
    for (std::size_t j = rank(); j-- > 1;) strides_[j - 1] = strides_[j] * shape_[j];
  }

  Index shape_;
  Index lo_;
  Index strides_;
  std::vector<T> data_;
};

using IntArray = NDArray<std::int64_t>;
using RealArray = NDArray<double>;
using MaskArray = NDArray<std::uint8_t>;

}  // namespace umbramorph
