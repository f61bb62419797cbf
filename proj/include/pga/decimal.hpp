#pragma once
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "pga/units.hpp"

namespace pga {

// Signed fixed point with 18 fractional digits, the usual token precision.
// Parsed from text, never from binary floating point. Products and quotients
// truncate toward zero at the 18th digit.
class Decimal {
 public:
  static constexpr int kDigits = 18;
  static constexpr i128 kScale = static_cast<i128>(1'000'000'000'000'000'000LL);

  constexpr Decimal() = default;
  static constexpr Decimal from_raw(i128 raw) noexcept {
    Decimal d;
    d.raw_ = raw;
    return d;
  }
  static Decimal from_int(std::int64_t value);
  // "0.142123", "-4.96e5", "1.55496E+08". Throws ParseError on malformed
  // text or on digits beyond the 18th fractional place.
  static Decimal parse(std::string_view text);
  static Decimal from_money(Money m) noexcept { return from_raw(static_cast<i128>(m.units) * 1'000'000'000); }

  constexpr i128 raw() const noexcept { return raw_; }
  constexpr bool is_zero() const noexcept { return raw_ == 0; }
  constexpr int sign() const noexcept { return raw_ > 0 ? 1 : (raw_ < 0 ? -1 : 0); }
  double to_double() const noexcept;

  // Shortest exact form: "0.787877", "496000", "-0.5".
  std::string to_string() const;
  // Rounded half away from zero to `places` digits, always printing them.
  std::string to_fixed(int places) const;
  Decimal round(int places) const;
  // Integer part, truncated toward zero.
  i128 trunc() const noexcept { return raw_ / kScale; }

  friend constexpr auto operator<=>(Decimal, Decimal) = default;

  friend constexpr Decimal operator+(Decimal a, Decimal b) noexcept { return from_raw(a.raw_ + b.raw_); }
  friend constexpr Decimal operator-(Decimal a, Decimal b) noexcept { return from_raw(a.raw_ - b.raw_); }
  friend constexpr Decimal operator-(Decimal a) noexcept { return from_raw(-a.raw_); }
  Decimal& operator+=(Decimal b) noexcept { raw_ += b.raw_; return *this; }
  Decimal& operator-=(Decimal b) noexcept { raw_ -= b.raw_; return *this; }
  friend Decimal operator*(Decimal a, Decimal b);
  // Throws std::domain_error on division by zero.
  friend Decimal operator/(Decimal a, Decimal b);

 private:
  i128 raw_{0};
};

// Median of a non-empty range, averaging the middle pair for even sizes.
template <class It>
Decimal decimal_median(It first, It last);

}  // namespace pga

#include <algorithm>
#include <stdexcept>
#include <vector>

template <class It>
pga::Decimal pga::decimal_median(It first, It last) {
  std::vector<Decimal> v(first, last);
  if (v.empty()) throw std::invalid_argument("median of an empty range");
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const Decimal upper = *mid;
  const Decimal lower = *std::max_element(v.begin(), mid);
  return (lower + upper) / Decimal::from_int(2);
}
