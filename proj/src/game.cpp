#include "pga/game.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

namespace pga {

void GameParams::validate() const {
  if (duration.kind == DurationMode::Kind::Exponential) {
    if (!(duration.lambda_per_s > 0) || !std::isfinite(duration.lambda_per_s))
      throw InvalidParams("exponential duration requires lambda > 0");
  } else if (duration.fixed.micros <= 0) {
    throw InvalidParams("fixed duration requires d > 0");
  }
  if (rate_limit.micros <= 0) throw InvalidParams("rate limit must be positive");
  if (min_start <= Money::zero() || min_start > payoff) throw InvalidParams("min_start must lie in (0, 1]");
  if (tick <= Money::zero() || tick > min_start) throw InvalidParams("tick must lie in (0, min_start]");
  if (min_raise.num <= 0) throw InvalidParams("min_raise must be positive");
  if (loss.kind == LossSpec::Kind::Constant) {
    if (loss.constant < Money::zero()) throw InvalidParams("constant loss must be non-negative");
  } else if (!(loss.fraction < Ratio{1, 1})) {
    throw InvalidParams("fraction loss must lie in [0, 1)");
  }
}

std::string_view to_string(BidViolation v) noexcept {
  switch (v) {
    case BidViolation::BelowStart: return "below_start";
    case BidViolation::BelowMinRaise: return "below_min_raise";
    case BidViolation::RateLimited: return "rate_limited";
  }
  return "unknown";
}

Money min_next_bid(Money prev_own_price, const GameParams& params) {
  const Ratio factor{params.min_raise.den + params.min_raise.num, params.min_raise.den};
  return mul_ceil_to_tick(prev_own_price, factor, params.tick);
}

std::optional<BidViolation> validate_bid(const Bid& candidate, std::span<const Bid> own_history,
                                         const GameParams& params) {
  if (candidate.price < params.min_start) return BidViolation::BelowStart;
  if (own_history.empty()) return std::nullopt;
  const Bid& last = own_history.back();
  if (candidate.price < min_next_bid(last.price, params)) return BidViolation::BelowMinRaise;
  if (candidate.time - last.time < params.rate_limit) return BidViolation::RateLimited;
  return std::nullopt;
}

Money loss(Money price, const LossSpec& spec, Money tick) {
  if (spec.kind == LossSpec::Kind::Constant) return spec.constant;
  return mul_floor_to_tick(price, spec.fraction, tick);
}

TimePoint sample_duration(const DurationMode& mode, Rng& rng) {
  if (mode.kind == DurationMode::Kind::Fixed) return mode.fixed;
  const double seconds = -std::log(rng.uniform_open_closed()) / mode.lambda_per_s;
  // 1e13 us (about 115 days) bounds every representable game.
  constexpr double kMaxMicros = 1e13;
  return TimePoint{std::llround(std::min(seconds * 1e6, kMaxMicros))};
}

bool is_well_formed(std::span<const Bid> log, const GameParams& params) {
  std::vector<Bid> per_player[2];
  TimePoint previous{};
  for (const Bid& b : log) {
    if (b.player < 0 || b.player > 1 || b.time < previous) return false;
    previous = b.time;
    auto& own = per_player[b.player];
    if (validate_bid(b, own, params)) return false;
    own.push_back(b);
  }
  return true;
}

std::optional<Bid> winner_bid(std::span<const Bid> log) {
  std::optional<Bid> best;
  for (const Bid& b : log) {
    if (!best || b.price > best->price) best = b;
  }
  return best;
}

Money money_from_json(const nlohmann::json& value) {
  if (value.is_string()) return Money::parse(value.get<std::string>());
  if (value.is_number_integer()) return Money{value.get<std::int64_t>() * Money::kScale};
  if (value.is_number()) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value.get<double>(), std::chars_format::fixed);
    if (res.ec != std::errc{}) throw ParseError("money: unrepresentable number");
    return Money::parse(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
  }
  throw ParseError("money: expected number or decimal string");
}

Ratio ratio_from_json(const nlohmann::json& value) {
  if (value.is_string()) return Ratio::parse(value.get<std::string>());
  if (value.is_number()) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value.get<double>(), std::chars_format::fixed);
    if (res.ec != std::errc{}) throw ParseError("ratio: unrepresentable number");
    return Ratio::parse(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
  }
  throw ParseError("ratio: expected number or string");
}

GameParams game_params_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("game params: expected a JSON object");
  GameParams p;
  const bool has_lambda = doc.contains("lambda_per_s");
  const bool has_fixed = doc.contains("fixed_duration_s");
  if (has_lambda && has_fixed) throw ParseError("game params: give lambda_per_s or fixed_duration_s, not both");
  if (has_lambda) p.duration = DurationMode::exponential(doc.at("lambda_per_s").get<double>());
  if (has_fixed) p.duration = DurationMode::fixed_duration(TimePoint::from_seconds(doc.at("fixed_duration_s").get<double>()));
  if (doc.contains("rate_limit_s")) p.rate_limit = TimePoint::from_seconds(doc.at("rate_limit_s").get<double>());
  if (doc.contains("tick")) p.tick = money_from_json(doc.at("tick"));
  if (doc.contains("min_raise")) p.min_raise = ratio_from_json(doc.at("min_raise"));
  if (doc.contains("min_start")) p.min_start = money_from_json(doc.at("min_start"));
  if (doc.contains("loss")) {
    const auto& l = doc.at("loss");
    const auto kind = l.at("kind").get<std::string>();
    if (kind == "constant") {
      p.loss = LossSpec::make_constant(money_from_json(l.at("value")));
    } else if (kind == "fraction") {
      p.loss = LossSpec::make_fraction(ratio_from_json(l.at("value")));
    } else {
      throw ParseError("game params: unknown loss kind '" + kind + "'");
    }
  }
  p.validate();
  return p;
}

nlohmann::json to_json(const GameParams& p) {
  nlohmann::json doc;
  if (p.duration.kind == DurationMode::Kind::Exponential) {
    doc["lambda_per_s"] = p.duration.lambda_per_s;
  } else {
    doc["fixed_duration_s"] = p.duration.fixed.seconds();
  }
  doc["rate_limit_s"] = p.rate_limit.seconds();
  doc["tick"] = p.tick.to_string();
  doc["min_raise"] = p.min_raise.to_string();
  doc["min_start"] = p.min_start.to_string();
  if (p.loss.kind == LossSpec::Kind::Constant) {
    doc["loss"] = {{"kind", "constant"}, {"value", p.loss.constant.to_string()}};
  } else {
    doc["loss"] = {{"kind", "fraction"}, {"value", p.loss.fraction.to_string()}};
  }
  return doc;
}

}  // namespace pga
