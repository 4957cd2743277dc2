#include "umbramorph/tensor.hpp"

namespace umbramorph {

Box full_output_range(const Box& a, const Box& b) {
  if (a.size() != b.size()) throw std::invalid_argument("full_output_range: rank mismatch");
  Box out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j].empty() || b[j].empty()) throw std::invalid_argument("full_output_range: empty range");
    out[j] = {a[j].lo + b[j].lo, a[j].hi + b[j].hi};
  }
  return out;
}

bool box_contains(const Box& outer, const Box& inner) {
  if (outer.size() != inner.size()) return false;
  for (std::size_t j = 0; j < outer.size(); ++j)
    if (inner[j].lo < outer[j].lo || inner[j].hi > outer[j].hi) return false;
  return true;
}

std::int64_t box_volume(const Box& box) {
  std::int64_t v = 1;
  for (const auto& r : box) v *= r.size();
  return v;
}

}  // namespace umbramorph
