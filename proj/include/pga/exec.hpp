#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "pga/game.hpp"
#include "pga/strategy.hpp"

namespace pga {

// A strategy misbehaved (wake time in the past, bid scheduled in the past,
// or the event budget ran out). Not a game outcome.
class StrategyFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExecEvent {
  enum class Kind { Emit, Publish, Deliver, Wake, End };

  Kind kind{Kind::Wake};
  TimePoint time{};
  PlayerIndex player{0};
  std::optional<Money> price;
  bool accepted{true};

  friend bool operator==(const ExecEvent&, const ExecEvent&) = default;
};

std::string_view to_string(ExecEvent::Kind kind) noexcept;

struct ExecOptions {
  bool record_events{false};
  std::uint64_t max_events{10'000'000};
};

struct ExecutionOutcome {
  std::optional<PlayerIndex> winner;
  std::optional<Bid> winning_bid;
  std::optional<Bid> losing_bid;  // the loser's highest published bid, earliest on ties
  std::array<Money, 2> payoffs{};
  Money miner_revenue{};
  BidLog log;
  TimePoint end_time{};
  std::array<std::uint64_t, 2> dropped_bids{};
  std::vector<ExecEvent> events;

  friend bool operator==(const ExecutionOutcome&, const ExecutionOutcome&) = default;
};

// Runs one auction. The strategies are prototypes: each execution works on
// fresh clones. The first draw of the execution RNG is the auction length;
// later draws break ties between bids scheduled for the same instant.
ExecutionOutcome execute(const Strategy& s0, TimePoint latency0, const Strategy& s1, TimePoint latency1,
                         const GameParams& params, std::uint64_t seed, const ExecOptions& options = {});

ExecutionOutcome execute_with_key(const Strategy& s0, TimePoint latency0, const Strategy& s1, TimePoint latency1,
                                  const GameParams& params, std::array<std::uint64_t, 2> key,
                                  const ExecOptions& options = {});

// event_kind,time_us,player,price,accepted
void write_events_csv(std::ostream& out, std::span<const ExecEvent> events);

nlohmann::json to_json(const ExecutionOutcome& outcome);

}  // namespace pga
