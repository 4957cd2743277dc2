#include "umbramorph/semiring.hpp"

#include <algorithm>
#include <stdexcept>

#include "umbramorph/fft_conv.hpp"

namespace umbramorph {

namespace {

constexpr std::int64_t kCoeffLimit = std::int64_t{1} << 53;

void check_coeffs(const std::vector<std::int64_t>& c) {
  for (auto v : c) {
    if (v < 0) throw std::invalid_argument("Polynomial: negative coefficient");
    if (v >= kCoeffLimit) throw std::overflow_error("Polynomial: coefficient reached 2^53");
  }
}

}  // namespace

MaxPlus::MaxPlus(std::int64_t v) : value_(v) {
  if (v < 0) throw std::invalid_argument("MaxPlus: negative finite value");
}

std::int64_t MaxPlus::value() const {
  if (!value_) throw std::logic_error("MaxPlus: value of negative infinity");
  return *value_;
}

MaxPlus max(const MaxPlus& a, const MaxPlus& b) { return a < b ? b : a; }

MaxPlus operator+(const MaxPlus& a, const MaxPlus& b) {
  if (a.is_neg_inf() || b.is_neg_inf()) return MaxPlus::neg_inf();
  return MaxPlus(*a.value_ + *b.value_);
}

std::strong_ordering operator<=>(const MaxPlus& a, const MaxPlus& b) {
  if (a.is_neg_inf() || b.is_neg_inf()) return !a.is_neg_inf() <=> !b.is_neg_inf();
  return *a.value_ <=> *b.value_;
}

std::ostream& operator<<(std::ostream& os, const MaxPlus& a) {
  if (a.is_neg_inf()) return os << "-inf";
  return os << a.value();
}

Polynomial::Polynomial(std::vector<std::int64_t> c) : coeffs(std::move(c)) {
  if (coeffs.empty()) coeffs.push_back(0);
  check_coeffs(coeffs);
}

bool operator==(const Polynomial& p, const Polynomial& q) {
  const std::size_t n = std::max(p.coeffs.size(), q.coeffs.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto a = k < p.coeffs.size() ? p.coeffs[k] : 0;
    const auto b = k < q.coeffs.size() ? q.coeffs[k] : 0;
    if (a != b) return false;
  }
  return true;
}

MaxPlus degree(const Polynomial& p) {
  for (std::size_t k = p.coeffs.size(); k-- > 0;)
    if (p.coeffs[k] != 0) return MaxPlus(static_cast<std::int64_t>(k));
  return MaxPlus::neg_inf();
}

Polynomial monomial(MaxPlus a) {
  if (a.is_neg_inf()) return Polynomial({0});
  std::vector<std::int64_t> c(static_cast<std::size_t>(a.value()) + 1, 0);
  c.back() = 1;
  return Polynomial(std::move(c));
}

Polynomial poly_add(const Polynomial& p, const Polynomial& q) {
  std::vector<std::int64_t> c(std::max(p.coeffs.size(), q.coeffs.size()), 0);
  for (std::size_t k = 0; k < p.coeffs.size(); ++k) c[k] += p.coeffs[k];
  for (std::size_t k = 0; k < q.coeffs.size(); ++k) c[k] += q.coeffs[k];
  return Polynomial(std::move(c));
}

Polynomial poly_mul(const Polynomial& p, const Polynomial& q) {
  // Coefficients of a product are the full-mode convolution of the factors'.
  auto as_array = [](const Polynomial& x) {
    return IntArray({static_cast<std::int64_t>(x.coeffs.size())}, {0}, x.coeffs);
  };
  const IntArray h = conv_full_direct(as_array(p), as_array(q));
  return Polynomial(h.values());
}

MaxPlus maxplus_sum_of_products(const std::vector<std::pair<MaxPlus, MaxPlus>>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("maxplus_sum_of_products: empty list");
  Polynomial sum;
  for (const auto& [a, b] : pairs) sum = poly_add(sum, poly_mul(monomial(a), monomial(b)));
  return degree(sum);
}

MaxPlus maxplus_direct(const std::vector<std::pair<MaxPlus, MaxPlus>>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("maxplus_direct: empty list");
  MaxPlus acc = MaxPlus::neg_inf();
  for (const auto& [a, b] : pairs) acc = max(acc, a + b);
  return acc;
}

}  // namespace umbramorph
