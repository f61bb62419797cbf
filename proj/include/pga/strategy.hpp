#pragma once
#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "pga/game.hpp"

namespace pga {

// What a player sees when it runs: every published bid emitted at or before
// now - own_latency, in publication order.
struct StrategyView {
  std::span<const Bid> visible_bids;
  TimePoint now{};
  PlayerIndex own_index{0};
  TimePoint own_latency{};
  const GameParams& params;
};

struct StrategyAction {
  std::optional<Money> bid;  // nullopt is a pass
  TimePoint next_wake{TimePoint::infinity()};
  // Publication time of the bid; the current time when unset. Must not be
  // earlier than now.
  std::optional<TimePoint> bid_at;

  static StrategyAction pass(TimePoint wake = TimePoint::infinity()) { return {std::nullopt, wake, std::nullopt}; }
  static StrategyAction place(Money price, TimePoint wake = TimePoint::infinity()) {
    return {price, wake, std::nullopt};
  }
  static StrategyAction place_at(Money price, TimePoint at, TimePoint wake = TimePoint::infinity()) {
    return {price, wake, at};
  }

  friend bool operator==(const StrategyAction&, const StrategyAction&) = default;
};

// Result of a pure transition function: the action plus the successor state.
template <class State>
struct Transition {
  StrategyAction action;
  State next;
};

// A strategy instance owns its state for one execution. The engine clones a
// prototype per execution, so step() may mutate freely.
class Strategy {
 public:
  virtual ~Strategy() = default;

  // Called at wake times and whenever an opponent bid is delivered.
  // Returned next_wake must be >= view.now.
  virtual StrategyAction step(const StrategyView& view) = 0;
  virtual std::unique_ptr<Strategy> clone() const = 0;
  virtual std::string_view kind() const noexcept = 0;
};

}  // namespace pga
