#include "pga/units.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace pga {

namespace {

// Parses an optionally signed decimal with at most `max_frac` fractional
// digits into an integer scaled by 10^max_frac.
std::int64_t parse_scaled(std::string_view text, int max_frac, std::string_view what) {
  if (text.empty()) throw ParseError(std::string(what) + ": empty value");
  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  i128 value = 0;
  int frac_digits = -1;
  bool any_digit = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c == '.') {
      if (frac_digits >= 0) throw ParseError(std::string(what) + ": bad number '" + std::string(text) + "'");
      frac_digits = 0;
      continue;
    }
    if (c < '0' || c > '9') throw ParseError(std::string(what) + ": bad number '" + std::string(text) + "'");
    any_digit = true;
    if (frac_digits >= 0) {
      if (frac_digits == max_frac) {
        if (c != '0') throw ParseError(std::string(what) + ": too many fractional digits in '" + std::string(text) + "'");
        continue;
      }
      ++frac_digits;
    }
    value = value * 10 + (c - '0');
    if (value > static_cast<i128>(std::numeric_limits<std::int64_t>::max()))
      throw ParseError(std::string(what) + ": out of range '" + std::string(text) + "'");
  }
  if (!any_digit) throw ParseError(std::string(what) + ": bad number '" + std::string(text) + "'");
  for (int i = std::max(frac_digits, 0); i < max_frac; ++i) value *= 10;
  if (value > static_cast<i128>(std::numeric_limits<std::int64_t>::max()))
    throw ParseError(std::string(what) + ": out of range '" + std::string(text) + "'");
  return static_cast<std::int64_t>(negative ? -value : value);
}

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

i128 ceil_div(i128 a, i128 b) { return -floor_div(-a, b); }

}  // namespace

TimePoint TimePoint::from_seconds(double s) {
  if (!std::isfinite(s)) return infinity();
  return TimePoint{std::llround(s * static_cast<double>(kPerSecond))};
}

Money Money::from_double(double dollars) {
  return Money{std::llround(dollars * static_cast<double>(kScale))};
}

Money Money::parse(std::string_view text) { return Money{parse_scaled(text, 9, "money")}; }

std::string Money::to_string() const {
  const bool negative = units < 0;
  const std::uint64_t mag = negative ? static_cast<std::uint64_t>(-(units + 1)) + 1u
                                     : static_cast<std::uint64_t>(units);
  std::string frac = std::to_string(mag % static_cast<std::uint64_t>(kScale));
  frac.insert(0, 9 - frac.size(), '0');
  return (negative ? "-" : "") + std::to_string(mag / static_cast<std::uint64_t>(kScale)) + "." + frac;
}

Ratio Ratio::make(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw std::invalid_argument("ratio denominator must be positive");
  if (num < 0) throw std::invalid_argument("ratio must be non-negative");
  const std::int64_t g = std::gcd(num, den);
  return g == 0 ? Ratio{0, 1} : Ratio{num / g, den / g};
}

Ratio Ratio::from_double(double value) {
  if (!std::isfinite(value) || value < 0) throw std::invalid_argument("ratio must be a finite non-negative number");
  return make(std::llround(value * 1e9), 1'000'000'000);
}

Ratio Ratio::parse(std::string_view text) {
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = parse_scaled(text.substr(0, slash), 0, "ratio");
    const auto den = parse_scaled(text.substr(slash + 1), 0, "ratio");
    return make(num, den);
  }
  if (!text.empty() && text.back() == '%') {
    return make(parse_scaled(text.substr(0, text.size() - 1), 9, "ratio"), 100'000'000'000);
  }
  return make(parse_scaled(text, 9, "ratio"), 1'000'000'000);
}

std::string Ratio::to_string() const { return std::to_string(num) + "/" + std::to_string(den); }

Money mul_ceil_to_tick(Money value, Ratio factor, Money tick) {
  const i128 numer = static_cast<i128>(value.units) * factor.num;
  const i128 denom = static_cast<i128>(factor.den) * tick.units;
  return Money{static_cast<std::int64_t>(ceil_div(numer, denom) * tick.units)};
}

Money mul_floor_to_tick(Money value, Ratio factor, Money tick) {
  const i128 numer = static_cast<i128>(value.units) * factor.num;
  const i128 denom = static_cast<i128>(factor.den) * tick.units;
  return Money{static_cast<std::int64_t>(floor_div(numer, denom) * tick.units)};
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

}  // namespace pga
