#include "pga/decimal.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace pga {

namespace {

using boost::multiprecision::cpp_int;

i128 to_i128(const cpp_int& v) {
  static const cpp_int lo = -(cpp_int(1) << 127);
  static const cpp_int hi = (cpp_int(1) << 127) - 1;
  if (v < lo || v > hi) throw std::overflow_error("decimal overflow");
  const bool neg = v < 0;
  cpp_int mag = neg ? cpp_int(-v) : v;
  u128 out = 0;
  out = static_cast<u128>(static_cast<std::uint64_t>(mag >> 64)) << 64;
  out |= static_cast<std::uint64_t>(mag & cpp_int(~std::uint64_t{0}));
  return neg ? -static_cast<i128>(out) : static_cast<i128>(out);
}

cpp_int to_big(i128 v) {
  const bool neg = v < 0;
  u128 mag = neg ? -static_cast<u128>(v) : static_cast<u128>(v);
  cpp_int out = static_cast<std::uint64_t>(mag >> 64);
  out <<= 64;
  out += static_cast<std::uint64_t>(mag);
  return neg ? cpp_int(-out) : out;
}

std::string digits_of(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return {s.rbegin(), s.rend()};
}

}  // namespace

Decimal Decimal::from_int(std::int64_t value) { return from_raw(static_cast<i128>(value) * kScale); }

Decimal Decimal::parse(std::string_view text) {
  const std::string original(text);
  auto fail = [&](const char* why) { return ParseError("invalid decimal '" + original + "': " + why); };
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (text.empty()) throw fail("empty");

  bool neg = false;
  if (text.front() == '+' || text.front() == '-') {
    neg = text.front() == '-';
    text.remove_prefix(1);
  }
  std::string digits;
  int point = -1;
  std::size_t k = 0;
  for (; k < text.size(); ++k) {
    const char c = text[k];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
    } else if (c == '.' && point < 0) {
      point = static_cast<int>(digits.size());
    } else {
      break;
    }
  }
  if (digits.empty()) throw fail("no digits");
  long exponent = 0;
  if (k < text.size()) {
    if (text[k] != 'e' && text[k] != 'E') throw fail("unexpected character");
    const std::string exp_text(text.substr(k + 1));
    std::size_t used = 0;
    try {
      exponent = std::stol(exp_text, &used);
    } catch (const std::exception&) {
      throw fail("bad exponent");
    }
    if (used != exp_text.size() || exponent < -60 || exponent > 60) throw fail("bad exponent");
  }
  // value = digits * 10^(exponent - fractional_digits)
  const long frac = point < 0 ? 0 : static_cast<long>(digits.size()) - point;
  long shift = kDigits + exponent - frac;
  while (shift < 0) {
    if (digits.back() != '0') throw fail("more than 18 fractional digits");
    digits.pop_back();
    ++shift;
  }
  // cpp_int reads a leading 0 as an octal prefix.
  const auto nz = digits.find_first_not_of('0');
  cpp_int v(nz == std::string::npos ? std::string("0") : digits.substr(nz));
  for (long i = 0; i < shift; ++i) v *= 10;
  if (neg) v = -v;
  try {
    return from_raw(to_i128(v));
  } catch (const std::overflow_error&) {
    throw fail("out of range");
  }
}

double Decimal::to_double() const noexcept {
  return static_cast<double>(raw_ / kScale) + static_cast<double>(raw_ % kScale) / 1e18;
}

std::string Decimal::to_string() const {
  const u128 mag = raw_ < 0 ? -static_cast<u128>(raw_) : static_cast<u128>(raw_);
  const auto scale = static_cast<u128>(kScale);
  std::string out = raw_ < 0 ? "-" : "";
  out += digits_of(mag / scale);
  std::string frac = digits_of(mag % scale);
  if (frac != "0") {
    frac.insert(0, static_cast<std::size_t>(kDigits) - frac.size(), '0');
    while (frac.back() == '0') frac.pop_back();
    out += "." + frac;
  }
  return out;
}

Decimal Decimal::round(int places) const {
  if (places < 0 || places > kDigits) throw std::invalid_argument("places must lie in [0, 18]");
  i128 unit = 1;
  for (int i = places; i < kDigits; ++i) unit *= 10;
  const i128 rem = raw_ % unit;
  i128 down = raw_ - rem;
  if (2 * (rem < 0 ? -rem : rem) >= unit) down += raw_ < 0 ? -unit : unit;
  return from_raw(down);
}

std::string Decimal::to_fixed(int places) const {
  const Decimal r = round(places);
  const u128 mag = r.raw_ < 0 ? -static_cast<u128>(r.raw_) : static_cast<u128>(r.raw_);
  const auto scale = static_cast<u128>(kScale);
  std::string out = r.raw_ < 0 ? "-" : "";
  out += digits_of(mag / scale);
  if (places > 0) {
    std::string frac = digits_of(mag % scale);
    frac.insert(0, static_cast<std::size_t>(kDigits) - frac.size(), '0');
    out += "." + frac.substr(0, static_cast<std::size_t>(places));
  }
  return out;
}

Decimal operator*(Decimal a, Decimal b) {
  return Decimal::from_raw(to_i128(to_big(a.raw_) * to_big(b.raw_) / to_big(Decimal::kScale)));
}

Decimal operator/(Decimal a, Decimal b) {
  if (b.raw_ == 0) throw std::domain_error("decimal division by zero");
  return Decimal::from_raw(to_i128(to_big(a.raw_) * to_big(Decimal::kScale) / to_big(b.raw_)));
}

}  // namespace pga
