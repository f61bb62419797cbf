#pragma once
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include <json.hpp>

#include "pga/strategy.hpp"

namespace pga {

// ---- null -------------------------------------------------------------------

StrategyAction null_step(const StrategyView& view);

class NullStrategy final : public Strategy {
 public:
  StrategyAction step(const StrategyView& view) override { return null_step(view); }
  std::unique_ptr<Strategy> clone() const override { return std::make_unique<NullStrategy>(*this); }
  std::string_view kind() const noexcept override { return "null"; }
};

// ---- sealed bid ---------------------------------------------------------------

struct SealedBidState {
  Money price{};
  TimePoint at{};
  bool done{false};
};

// At its first invocation schedules one bid of `price` for time `at` (or
// now, if later), then passes forever. Two sealed bidders scheduling the
// same instant are published in random order.
Transition<SealedBidState> sealed_bid_step(const StrategyView& view, SealedBidState state);

class SealedBidStrategy final : public Strategy {
 public:
  SealedBidStrategy(Money price, TimePoint at) : state_{price, at, false} {}

  StrategyAction step(const StrategyView& view) override;
  std::unique_ptr<Strategy> clone() const override { return std::make_unique<SealedBidStrategy>(*this); }
  std::string_view kind() const noexcept override { return "sealed"; }

 private:
  SealedBidState state_;
};

// ---- blind raising --------------------------------------------------------------

struct BlindRaisingState {
  Money b0{};
  Ratio f{1, 8};
  TimePoint interval{100'000};
  Money cap{Money::dollar()};  // raises that would exceed cap are not placed
  std::int64_t k{0};           // bids placed so far
  Money last_price{};
  bool stopped{false};
};

// Bids b0 at 0 and ceil_tick(previous * (1 + f)) at k * interval. Never
// looks at visible_bids.
Transition<BlindRaisingState> blind_raising_step(const StrategyView& view, BlindRaisingState state);

class BlindRaisingStrategy final : public Strategy {
 public:
  explicit BlindRaisingStrategy(BlindRaisingState initial) : state_(initial) {}

  StrategyAction step(const StrategyView& view) override;
  std::unique_ptr<Strategy> clone() const override { return std::make_unique<BlindRaisingStrategy>(*this); }
  std::string_view kind() const noexcept override { return "blind"; }

 private:
  BlindRaisingState state_;
};

// ---- reactive counterbidding ------------------------------------------------------

struct ReactiveState {
  bool started{false};
  Money last_own{};
  TimePoint last_own_time{};
};

// Opens at s. Whenever the best visible opponent bid b0 beats its own last
// bid b1 (higher, or equal and earlier), counterbids min(max(ceil_tick(b1 (1 + iota)), b0 + eps), 1 + l(b1)),
// deferring to the earliest instant the rate limit allows. Abstains when that
// value cannot beat b0 or fails the minimum raise.
Transition<ReactiveState> reactive_counterbid_step(const StrategyView& view, ReactiveState state);

class ReactiveCounterbidStrategy final : public Strategy {
 public:
  StrategyAction step(const StrategyView& view) override;
  std::unique_ptr<Strategy> clone() const override { return std::make_unique<ReactiveCounterbidStrategy>(*this); }
  std::string_view kind() const noexcept override { return "reactive"; }

 private:
  ReactiveState state_;
};

// ---- grim-trigger cooperation --------------------------------------------------

// W[i] is bid at V[i] by the player with parity i mod 2.
struct CooperativeSchedule {
  std::vector<TimePoint> times;  // V
  std::vector<Money> prices;     // W
  PlayerIndex own_parity{0};

  // Throws InvalidParams unless sizes match, times ascend, prices start at
  // >= s and each price meets the minimum raise over its predecessor.
  void validate(const GameParams& params) const;
};

// V[i] = i * interval and W the minimum-raise chain from s, for `rounds`
// slots (i_max + 1 when rounds is not given, taking c = l($1)).
CooperativeSchedule make_cooperative_schedule(const GameParams& params, TimePoint interval, PlayerIndex parity,
                                              std::optional<std::size_t> rounds = std::nullopt);

struct GrimTriggerState {
  std::size_t next_slot{0};        // own next index into V
  std::size_t opponent_seen{0};    // opponent bids already inspected
  bool triggered{false};
  bool punished{false};
  Money punish_price{};
  std::optional<Money> last_own;
  TimePoint last_own_time{};
  // Test and analysis hook: at V[deviate_at] (an opponent slot) bid
  // W[deviate_at + 1] early, then stop.
  std::optional<std::size_t> deviate_at;
  bool deviated{false};
};

// Follows the schedule. An opponent bid b emitted at t (inferred as the
// delivery time minus own latency) is a deviation when b exceeds the
// opponent's most recent scheduled price at t (s before its first slot).
// A deviation is answered once with max(1 + l(b), min raise) at the
// earliest instant the rate limit allows, after which the player is silent.
Transition<GrimTriggerState> grim_trigger_step(const StrategyView& view, const CooperativeSchedule& schedule,
                                               GrimTriggerState state);

class GrimTriggerStrategy final : public Strategy {
 public:
  explicit GrimTriggerStrategy(CooperativeSchedule schedule, std::optional<std::size_t> deviate_at = std::nullopt)
      : schedule_(std::move(schedule)) {
    state_.deviate_at = deviate_at;
  }

  StrategyAction step(const StrategyView& view) override;
  std::unique_ptr<Strategy> clone() const override { return std::make_unique<GrimTriggerStrategy>(*this); }
  std::string_view kind() const noexcept override { return "grim"; }

  const CooperativeSchedule& schedule() const noexcept { return schedule_; }

 private:
  CooperativeSchedule schedule_;
  GrimTriggerState state_;
};

// ---- scripted -------------------------------------------------------------------

struct ScriptedBid {
  TimePoint time{};
  Money price{};
};

// Emits a fixed list of (time, price) bids regardless of what it sees.
class ScriptedStrategy final : public Strategy {
 public:
  explicit ScriptedStrategy(std::vector<ScriptedBid> bids);

  StrategyAction step(const StrategyView& view) override;
  std::unique_ptr<Strategy> clone() const override { return std::make_unique<ScriptedStrategy>(*this); }
  std::string_view kind() const noexcept override { return "scripted"; }

 private:
  std::vector<ScriptedBid> bids_;
  std::size_t next_{0};
};

// ---- construction from JSON --------------------------------------------------------

// {"kind": "null" | "sealed" | "blind" | "reactive" | "grim" | "scripted",
//  "params": {...}}. See docs/formats.md for the per-kind fields.
std::unique_ptr<Strategy> make_strategy(const nlohmann::json& spec, const GameParams& params, PlayerIndex player);

}  // namespace pga
