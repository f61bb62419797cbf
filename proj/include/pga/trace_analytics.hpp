#pragma once
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pga/decimal.hpp"
#include "pga/exec.hpp"

namespace pga::trace {

struct TraceRecord {
  TimePoint observed_time{};
  std::string sender;
  std::uint64_t nonce{0};
  Decimal gas_price;  // Gwei
  std::uint64_t gas_limit{0};
  std::string tx_hash;
  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

using Trace = std::vector<TraceRecord>;
using AccountNonce = std::pair<std::string, std::uint64_t>;

// Reference gas price at a point in time; nullopt when unknown, in which
// case nothing at that time counts as high-value.
using MarketPriceFn = std::function<std::optional<Decimal>(TimePoint)>;

// Median gas price of the last `window` records observed strictly before t.
// Keeps its own copy of the trace.
MarketPriceFn rolling_median_market(const Trace& trace, std::size_t window = 1000);

struct Replacement {
  std::size_t index{0};     // the replacing record
  std::size_t replaced{0};  // the previous highest record of the same (sender, nonce)
  Decimal old_price;
  Decimal new_price;
  Decimal raise_pct;  // (new - old) / old * 100
  std::optional<Decimal> market_price;
  bool high_value{false};  // new_price >= 10 * market price
};

// Records that outbid an earlier record of the same (sender, nonce).
// Throws std::invalid_argument if the trace is not sorted by time.
std::vector<Replacement> detect_replacements(const Trace& trace, const MarketPriceFn& market);

struct AuctionWindow {
  TraceRecord trigger;
  TimePoint start{};
  TimePoint end{};
  std::map<AccountNonce, std::vector<TraceRecord>> bids;  // each list in trace order
  friend bool operator==(const AuctionWindow&, const AuctionWindow&) = default;
};

// The records of `trace` observed in [start, end].
AuctionWindow make_window(const Trace& trace, const TraceRecord& trigger, TimePoint start, TimePoint end);

// One window of +-radius per high-value replacement. Windows that overlap in
// time and share an (account, nonce) merge, repeatedly, until none do.
std::vector<AuctionWindow> slice_auctions(const Trace& trace, const MarketPriceFn& market,
                                          TimePoint radius = TimePoint::from_micros(30'000'000));

// Drops (account, nonce) groups with fewer than `min_bids` records.
AuctionWindow prune_bots(const AuctionWindow& window, std::size_t min_bids = 4);

struct BotAuctionStats {
  std::string sender;
  std::uint64_t num_bids{0};
  std::uint64_t num_raises{0};
  std::optional<Decimal> median_raise_pct;     // absent without raises
  std::optional<double> mean_response_latency_s;  // absent outside [0, 1] s or without opponents
};

// Response latency is a proxy: own bid time minus the latest earlier bid of
// any other sender in the window.
std::vector<BotAuctionStats> auction_stats(const AuctionWindow& window);

// ---- I/O ----------------------------------------------------------------------

// Header observed_time_s,sender,nonce,gas_price_gwei,gas_limit,tx_hash.
// Records come back stably sorted by time. Errors name the line number.
Trace read_trace_csv(std::istream& in);
void write_trace_csv(std::ostream& out, const Trace& trace);

// Publish events of an execution as a trace: sender "player<i>", one nonce
// per player, price as the gas price.
Trace records_from_events(std::span<const ExecEvent> events);
// Same, from the CSV written by write_events_csv.
Trace records_from_event_csv(std::istream& in);

nlohmann::json to_json(const AuctionWindow& window, const std::vector<BotAuctionStats>& stats);
// auction_id,sender,median_raise_pct,mean_latency_s,num_raises
void write_stats_csv_header(std::ostream& out);
void write_stats_csv_rows(std::ostream& out, std::size_t auction_id, const std::vector<BotAuctionStats>& stats);

}  // namespace pga::trace
