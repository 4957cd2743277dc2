#pragma once

// The max-plus semiring of non-negative integers and the semiring of
// polynomials with non-negative integer coefficients, linked by the degree
// map. Degree turns sums of products of monomials into maxima of sums, which
// is what lets a convolution compute a dilation.

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

namespace umbramorph {

/// A non-negative integer or negative infinity.
class MaxPlus {
 public:
  constexpr MaxPlus() = default;  // negative infinity
  explicit MaxPlus(std::int64_t v);

  static constexpr MaxPlus neg_inf() { return MaxPlus(); }

  constexpr bool is_neg_inf() const { return !value_.has_value(); }
  std::int64_t value() const;

  /// Semiring addition: max, with negative infinity as identity.
  friend MaxPlus max(const MaxPlus& a, const MaxPlus& b);
  /// Semiring multiplication: ordinary +, with negative infinity absorbing.
  friend MaxPlus operator+(const MaxPlus& a, const MaxPlus& b);

  friend bool operator==(const MaxPlus&, const MaxPlus&) = default;
  friend std::strong_ordering operator<=>(const MaxPlus& a, const MaxPlus& b);
  friend std::ostream& operator<<(std::ostream& os, const MaxPlus& a);

 private:
  std::optional<std::int64_t> value_;
};

/// Dense polynomial; coeffs[k] multiplies x^k. Trailing zeros are allowed.
struct Polynomial {
  std::vector<std::int64_t> coeffs{0};

  Polynomial() = default;
  explicit Polynomial(std::vector<std::int64_t> c);

  /// Equality as polynomials (ignores trailing zeros).
  friend bool operator==(const Polynomial& p, const Polynomial& q);
};

MaxPlus degree(const Polynomial& p);
Polynomial monomial(MaxPlus a);
Polynomial poly_add(const Polynomial& p, const Polynomial& q);
Polynomial poly_mul(const Polynomial& p, const Polynomial& q);

/// max_i (a_i + b_i), evaluated as the degree of sum_i x^a_i * x^b_i.
MaxPlus maxplus_sum_of_products(const std::vector<std::pair<MaxPlus, MaxPlus>>& pairs);

/// The same maximum evaluated directly in max-plus arithmetic.
MaxPlus maxplus_direct(const std::vector<std::pair<MaxPlus, MaxPlus>>& pairs);

}  // namespace umbramorph
