#include "umbramorph/umbra.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace umbramorph {

GridFunction::GridFunction(IntArray values, std::int64_t declared_max)
    : GridFunction(values, MaskArray(values.shape(), values.lo(), std::uint8_t{1}), declared_max) {}

GridFunction::GridFunction(IntArray values, MaskArray defined, std::int64_t declared_max)
    : values_(std::move(values)), defined_(std::move(defined)), declared_max_(declared_max) {
  if (!values_.same_layout(defined_)) throw std::invalid_argument("GridFunction: mask layout differs from values");
  if (declared_max_ <= 0) throw std::invalid_argument("GridFunction: declared maximum must be positive");
  if (defined_count() == 0) throw std::invalid_argument("GridFunction: no defined pixel");
}

bool GridFunction::gap_free() const {
  return std::all_of(defined_.data().begin(), defined_.data().end(), [](auto d) { return d != 0; });
}

std::int64_t GridFunction::defined_count() const {
  return std::count_if(defined_.data().begin(), defined_.data().end(), [](auto d) { return d != 0; });
}

std::int64_t GridFunction::max_value() const {
  std::int64_t m = std::numeric_limits<std::int64_t>::min();
  for (std::int64_t i = 0; i < values_.size(); ++i)
    if (defined_[i]) m = std::max(m, values_[i]);
  return m;
}

std::int64_t GridFunction::min_value() const {
  std::int64_t m = std::numeric_limits<std::int64_t>::max();
  for (std::int64_t i = 0; i < values_.size(); ++i)
    if (defined_[i]) m = std::min(m, values_[i]);
  return m;
}

void GridFunction::check_tonal_range() const {
  if (min_value() < 0 || max_value() > declared_max_)
    throw std::invalid_argument("GridFunction: values outside [0, " + std::to_string(declared_max_) + "]");
}

std::int64_t required_lr(const GridFunction& f, const GridFunction& b) { return f.max_value() + b.max_value(); }

UmbraVolume build_umbra(const GridFunction& g, std::int64_t lr) {
  if (g.min_value() < 0) throw std::invalid_argument("build_umbra: negative grey value");
  if (lr < g.max_value()) throw std::invalid_argument("build_umbra: tonal extent below the largest grey value");

  Index shape = g.values().shape();
  Index lo = g.values().lo();
  shape.push_back(lr + 1);
  lo.push_back(0);
  UmbraVolume u{IntArray(shape, lo), lr};
  // Row-major with the tonal axis last: pixel i owns the run [i*(lr+1), (i+1)*(lr+1)).
  const auto& vals = g.values();
  const auto& def = g.defined();
  for (std::int64_t i = 0; i < vals.size(); ++i)
    if (def[i]) u.bits[i * (lr + 1) + vals[i]] = 1;
  return u;
}

GridFunction project(const CountVolume& c, const Box& out_range, std::int64_t declared_max, MaskArray* covered) {
  const IntArray& counts = c.counts;
  if (counts.rank() != out_range.size() + 1) throw std::invalid_argument("project: rank mismatch");
  Box spatial = counts.box();
  const IndexRange tonal = spatial.back();
  spatial.pop_back();
  if (!box_contains(spatial, out_range)) throw std::invalid_argument("project: output range outside the volume");

  IntArray out(out_range);
  MaskArray cov(out_range);
  const std::int64_t run = tonal.size();
  Index x = out.lo();
  Index xt = x;
  xt.push_back(tonal.lo);
  for (std::int64_t i = 0; i < out.size(); ++i) {
    std::copy(x.begin(), x.end(), xt.begin());
    const std::int64_t* col = counts.data().data() + counts.offset(xt);
    for (std::int64_t t = run; t-- > 0;) {
      if (col[t] >= 1) {
        out[i] = tonal.lo + t;
        cov[i] = 1;
        break;
      }
    }
    out.advance(x);
  }
  if (covered) *covered = std::move(cov);
  return GridFunction(std::move(out), declared_max);
}

}  // namespace umbramorph
