#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_int.hpp>

#include "pga/game.hpp"

using namespace pga;
using boost::multiprecision::cpp_int;

namespace {

GameParams defaults() { return GameParams{}; }

// ceil(p * (d + n) / d) to a tick, computed with arbitrary precision.
Money reference_raise(Money p, Ratio iota, Money tick) {
  cpp_int numer = cpp_int(p.units) * (iota.den + iota.num);
  cpp_int denom = cpp_int(iota.den) * tick.units;
  cpp_int q = numer / denom;
  if (q * denom < numer) ++q;
  return Money{static_cast<std::int64_t>(q * tick.units)};
}

}  // namespace

TEST(MinNextBid, Examples) {
  GameParams p = defaults();
  EXPECT_EQ(min_next_bid(Money::parse("100"), p), Money::parse("112.5"));
  EXPECT_EQ(min_next_bid(Money::parse("0.13"), p).to_string(), "0.146250000");
  p.min_raise = Ratio{0, 1};
  EXPECT_EQ(min_next_bid(p.min_start, p), p.min_start);
}

TEST(MinNextBid, MatchesBigIntegerOracleAndStrictlyRaises) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<std::int64_t> price(1, 50'000'000'000);
  std::uniform_int_distribution<std::int64_t> num(1, 999), den(1, 1000), tick(1, 1000);
  for (int i = 0; i < 10'000; ++i) {
    GameParams p = defaults();
    p.min_raise = Ratio::make(num(gen), den(gen));
    p.tick = Money{tick(gen)};
    const Money prev{price(gen)};
    const Money next = min_next_bid(prev, p);
    ASSERT_EQ(next, reference_raise(prev, p.min_raise, p.tick));
    ASSERT_GT(next, prev);
    ASSERT_EQ(next.units % p.tick.units, 0);
  }
}

TEST(ValidateBid, Boundaries) {
  const GameParams p = defaults();
  const Bid first{TimePoint{0}, p.min_start, 0};
  EXPECT_EQ(validate_bid({TimePoint{0}, p.min_start - p.tick, 0}, {}, p), BidViolation::BelowStart);
  EXPECT_FALSE(validate_bid(first, {}, p).has_value());

  const std::vector<Bid> history{first};
  const Money raised = min_next_bid(first.price, p);
  EXPECT_FALSE(validate_bid({p.rate_limit, raised, 0}, history, p).has_value());
  EXPECT_EQ(validate_bid({TimePoint{p.rate_limit.micros / 2}, raised, 0}, history, p), BidViolation::RateLimited);
  EXPECT_EQ(validate_bid({p.rate_limit, raised - p.tick, 0}, history, p), BidViolation::BelowMinRaise);
}

TEST(ValidateBid, AcceptsExactlyWellFormedLogs) {
  std::mt19937_64 gen(5);
  const GameParams p = defaults();
  for (int trial = 0; trial < 2'000; ++trial) {
    BidLog log;
    std::int64_t t = 0;
    Money last[2] = {Money{}, Money{}};
    std::int64_t last_t[2] = {-1, -1};
    bool expected = true;
    for (int k = 0; k < 6; ++k) {
      t += std::uniform_int_distribution<std::int64_t>(0, 150'000)(gen);
      const int who = static_cast<int>(gen() % 2);
      Money price{std::uniform_int_distribution<std::int64_t>(100'000'000, 1'200'000'000)(gen)};
      log.push_back({TimePoint{t}, price, who});
      // Direct statement of the log invariant.
      if (price < p.min_start) expected = false;
      if (last_t[who] >= 0) {
        if (price < min_next_bid(last[who], p) || t - last_t[who] < p.rate_limit.micros) expected = false;
      }
      last[who] = price;
      last_t[who] = t;
    }
    ASSERT_EQ(is_well_formed(log, p), expected);
  }
}

TEST(Loss, Examples) {
  EXPECT_EQ(loss(Money::parse("0.7"), LossSpec::make_constant(Money::parse("0.02"))), Money::parse("0.02"));
  EXPECT_EQ(loss(Money::parse("0.5"), LossSpec::make_fraction(Ratio::parse("0.3"))), Money::parse("0.15"));
  EXPECT_EQ(loss(Money::zero(), LossSpec::make_fraction(Ratio::parse("0.3"))), Money::zero());
}

TEST(Loss, FractionIsPartialAllPay) {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 10'000; ++i) {
    const Ratio alpha = Ratio::make(static_cast<std::int64_t>(gen() % 1000), 1000);
    const Money b{static_cast<std::int64_t>(gen() % 10'000'000'000) + 1};
    ASSERT_LT(loss(b, LossSpec::make_fraction(alpha)), b);
  }
}

TEST(SampleDuration, FixedIsDegenerate) {
  Rng rng(std::uint64_t{1});
  const auto mode = DurationMode::fixed_duration(TimePoint::from_seconds(15));
  for (int i = 0; i < 10; ++i) EXPECT_EQ(sample_duration(mode, rng).micros, 15'000'000);
}

TEST(SampleDuration, ExponentialMeanAndRepeatability) {
  const auto mode = DurationMode::exponential(1.0 / 15.0);
  Rng rng(std::uint64_t{2024});
  double sum = 0;
  constexpr int n = 100'000;
  for (int i = 0; i < n; ++i) sum += sample_duration(mode, rng).seconds();
  EXPECT_NEAR(sum / n, 15.0, 0.15);

  Rng a(std::uint64_t{77}), b(std::uint64_t{77});
  EXPECT_EQ(sample_duration(mode, a), sample_duration(mode, b));
}

TEST(SampleDuration, KolmogorovSmirnovAgainstExponential) {
  const double lambda = 1.0 / 15.0;
  const auto mode = DurationMode::exponential(lambda);
  Rng rng(std::uint64_t{99});
  constexpr int n = 100'000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = sample_duration(mode, rng).seconds();
  std::sort(xs.begin(), xs.end());
  double d = 0;
  for (int i = 0; i < n; ++i) {
    const double cdf = -std::expm1(-lambda * xs[i]);
    d = std::max({d, cdf - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - cdf});
  }
  // Asymptotic critical value at significance 0.01.
  EXPECT_LT(d, 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST(WinnerBid, TiesGoToTheEarliest) {
  EXPECT_FALSE(winner_bid({}).has_value());
  const BidLog tie{{TimePoint{1}, Money::parse("0.5"), 0}, {TimePoint{2}, Money::parse("0.5"), 1}};
  EXPECT_EQ(*winner_bid(tie), tie[0]);
  const BidLog strict{{TimePoint{1}, Money::parse("0.5"), 0}, {TimePoint{2}, Money::parse("0.6"), 1}};
  EXPECT_EQ(*winner_bid(strict), strict[1]);
}

TEST(GameParams, ValidationRejectsBrokenInvariants) {
  EXPECT_NO_THROW(defaults().validate());
  GameParams p = defaults();
  p.duration = DurationMode::exponential(0);
  EXPECT_THROW(p.validate(), InvalidParams);
  p = defaults();
  p.rate_limit = TimePoint{0};
  EXPECT_THROW(p.validate(), InvalidParams);
  p = defaults();
  p.min_start = Money::parse("1.1");
  EXPECT_THROW(p.validate(), InvalidParams);
  p = defaults();
  p.tick = Money::parse("0.2");
  EXPECT_THROW(p.validate(), InvalidParams);
  p = defaults();
  p.loss = LossSpec::make_fraction(Ratio{1, 1});
  EXPECT_THROW(p.validate(), InvalidParams);
}

TEST(GameParams, JsonRoundTrip) {
  const auto doc = nlohmann::json::parse(R"({"lambda_per_s": 0.0666666666666666667, "rate_limit_s": 0.1,
      "tick": 1e-9, "min_raise": 0.125, "min_start": 0.13, "loss": {"kind": "constant", "value": 0.01}})");
  const GameParams p = game_params_from_json(doc);
  EXPECT_EQ(p, defaults());
  EXPECT_EQ(game_params_from_json(to_json(p)), p);

  GameParams f = defaults();
  f.duration = DurationMode::fixed_duration(TimePoint::from_seconds(2.5));
  f.loss = LossSpec::make_fraction(Ratio{3, 10});
  EXPECT_EQ(game_params_from_json(to_json(f)), f);

  EXPECT_THROW(game_params_from_json(nlohmann::json::parse(R"({"lambda_per_s": 1, "fixed_duration_s": 2})")),
               ParseError);
  EXPECT_THROW(game_params_from_json(nlohmann::json::parse(R"({"min_start": 0})")), InvalidParams);
}
