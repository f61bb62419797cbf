#pragma once
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pga/rng.hpp"
#include "pga/units.hpp"

namespace pga {

using PlayerIndex = int;

struct LossSpec {
  enum class Kind { Constant, Fraction };

  Kind kind{Kind::Constant};
  Money constant{};   // Kind::Constant
  Ratio fraction{};   // Kind::Fraction, in [0, 1)

  static LossSpec make_constant(Money c) { return LossSpec{Kind::Constant, c, Ratio{}}; }
  static LossSpec make_fraction(Ratio alpha) { return LossSpec{Kind::Fraction, Money{}, alpha}; }

  friend bool operator==(const LossSpec&, const LossSpec&) = default;
};

struct DurationMode {
  enum class Kind { Exponential, Fixed };

  Kind kind{Kind::Exponential};
  double lambda_per_s{1.0 / 15.0};  // Kind::Exponential
  TimePoint fixed{};                // Kind::Fixed

  static DurationMode exponential(double lambda_per_s) { return DurationMode{Kind::Exponential, lambda_per_s, {}}; }
  static DurationMode fixed_duration(TimePoint d) { return DurationMode{Kind::Fixed, 0.0, d}; }

  friend bool operator==(const DurationMode&, const DurationMode&) = default;
};

struct GameParams {
  DurationMode duration{};
  TimePoint rate_limit{100'000};                     // delta, 0.1 s
  Money tick{1};                                     // epsilon, 1e-9
  Ratio min_raise{1, 8};                             // iota, 12.5%
  Money min_start{130'000'000};                      // s = 0.13
  LossSpec loss{LossSpec::make_constant(Money{10'000'000})};  // c = 0.01
  Money payoff{Money::dollar()};

  // Throws InvalidParams when an invariant is broken.
  void validate() const;

  friend bool operator==(const GameParams&, const GameParams&) = default;
};

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Bid {
  TimePoint time{};
  Money price{};
  PlayerIndex player{0};

  friend bool operator==(const Bid&, const Bid&) = default;
};

// Bids in publication order (non-decreasing time).
using BidLog = std::vector<Bid>;

enum class BidViolation { BelowStart, BelowMinRaise, RateLimited };

std::string_view to_string(BidViolation v) noexcept;

// prev * (1 + iota), rounded up to a tick multiple.
Money min_next_bid(Money prev_own_price, const GameParams& params);

// `own_history` holds the bidder's earlier accepted bids, oldest first.
std::optional<BidViolation> validate_bid(const Bid& candidate, std::span<const Bid> own_history,
                                         const GameParams& params);

// Constant(c) -> c; Fraction(a) -> a * price rounded down to a tick multiple.
Money loss(Money price, const LossSpec& spec, Money tick = Money{1});

// Exponential: -ln(U)/lambda with U on (0, 1], in whole microseconds.
TimePoint sample_duration(const DurationMode& mode, Rng& rng);

// True when every player's subsequence of `log` is accepted bid by bid by validate_bid.
bool is_well_formed(std::span<const Bid> log, const GameParams& params);

// Highest price; ties go to the earliest in log order. Empty log -> nullopt.
std::optional<Bid> winner_bid(std::span<const Bid> log);

// JSON document:
//   {"lambda_per_s": 0.0667 | "fixed_duration_s": 15, "rate_limit_s": 0.1,
//    "tick": 1e-9, "min_raise": 0.125, "min_start": 0.13,
//    "loss": {"kind": "constant" | "fraction", "value": 0.01}}
// Every field is optional and defaults as in GameParams{}.
GameParams game_params_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const GameParams& params);

// Money and ratio fields accept either a JSON number or a decimal string.
Money money_from_json(const nlohmann::json& value);
Ratio ratio_from_json(const nlohmann::json& value);

}  // namespace pga
