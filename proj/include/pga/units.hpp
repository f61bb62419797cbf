#pragma once
#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pga {

__extension__ using i128 = __int128;
__extension__ using u128 = unsigned __int128;

// Microseconds since auction start.
struct TimePoint {
  std::int64_t micros{0};

  static constexpr std::int64_t kPerSecond = 1'000'000;

  static constexpr TimePoint infinity() noexcept {
    return TimePoint{std::numeric_limits<std::int64_t>::max()};
  }
  static TimePoint from_seconds(double s);
  static constexpr TimePoint from_micros(std::int64_t us) noexcept { return TimePoint{us}; }

  constexpr bool is_infinite() const noexcept { return micros == infinity().micros; }
  constexpr double seconds() const noexcept {
    return static_cast<double>(micros) / static_cast<double>(kPerSecond);
  }

  friend constexpr auto operator<=>(TimePoint, TimePoint) = default;
};

// Saturates at infinity so that "never" plus a latency stays "never".
constexpr TimePoint operator+(TimePoint a, TimePoint b) noexcept {
  if (a.is_infinite() || b.is_infinite()) return TimePoint::infinity();
  return TimePoint{a.micros + b.micros};
}
constexpr TimePoint operator-(TimePoint a, TimePoint b) noexcept {
  return TimePoint{a.micros - b.micros};
}

// Signed fixed point with 1e-9 resolution; the auction prize is exactly one dollar.
struct Money {
  std::int64_t units{0};

  static constexpr std::int64_t kScale = 1'000'000'000;

  static constexpr Money dollar() noexcept { return Money{kScale}; }
  static constexpr Money zero() noexcept { return Money{0}; }
  static Money from_double(double dollars);
  // Exact decimal parse, e.g. "0.146250000" or "-1.5". At most 9 fractional digits.
  static Money parse(std::string_view text);

  constexpr double to_double() const noexcept {
    return static_cast<double>(units) / static_cast<double>(kScale);
  }
  // Always nine fractional digits: "0.146250000".
  std::string to_string() const;

  friend constexpr auto operator<=>(Money, Money) = default;
};

constexpr Money operator+(Money a, Money b) noexcept { return Money{a.units + b.units}; }
constexpr Money operator-(Money a, Money b) noexcept { return Money{a.units - b.units}; }
constexpr Money operator-(Money a) noexcept { return Money{-a.units}; }

// Non-negative exact fraction, used for raise fractions and loss fractions.
struct Ratio {
  std::int64_t num{0};
  std::int64_t den{1};

  static Ratio make(std::int64_t num, std::int64_t den);
  // Decimal value rounded to 1e-9 and reduced: 0.125 -> 1/8.
  static Ratio from_double(double value);
  // Accepts "1/8", "0.125" or "12.5%".
  static Ratio parse(std::string_view text);

  constexpr double to_double() const noexcept {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  std::string to_string() const;

  friend constexpr bool operator==(Ratio a, Ratio b) noexcept {
    return static_cast<i128>(a.num) * b.den == static_cast<i128>(b.num) * a.den;
  }
  friend constexpr bool operator<(Ratio a, Ratio b) noexcept {
    return static_cast<i128>(a.num) * b.den < static_cast<i128>(b.num) * a.den;
  }
};

// value * factor, rounded up / down to a multiple of tick.
Money mul_ceil_to_tick(Money value, Ratio factor, Money tick);
Money mul_floor_to_tick(Money value, Ratio factor, Money tick);

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal form of a double ("0.026315789", "1e-09").
std::string format_double(double value);

}  // namespace pga
