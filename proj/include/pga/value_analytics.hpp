#pragma once
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pga/decimal.hpp"

namespace pga::value {

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The bundle's base asset is neither traded nor ETH, and no gas cost in the
// base asset was supplied.
class MissingBase : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Block with no fees at all.
class EmptyBlock : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct TradeLeg {
  std::string exchange;
  std::string sold_asset;
  Decimal sold_amount;
  std::string bought_asset;
  Decimal bought_amount;
  std::optional<Decimal> rate;  // bought per sold, as quoted

  // bought / sold: the quoted rate if present, otherwise computed.
  Decimal effective_rate() const;
};

struct TransactionBundle {
  std::vector<TradeLeg> legs;
  std::int64_t gas_used{0};
  Decimal gas_price_gwei;
  std::string base_asset{"ETH"};
  // Gas cost already expressed in the base asset, required when the base
  // asset is not ETH.
  std::optional<Decimal> gas_cost_base;

  // Non-empty legs, non-negative amounts and gas, quoted rates within 1e-6
  // relative of bought / sold.
  void validate() const;
};

using FlowMap = std::map<std::string, Decimal>;

FlowMap net_flows(const TransactionBundle& bundle);

// Every asset that moves has strictly positive net. Assets whose inflow and
// outflow are both zero are ignored.
bool is_pure_revenue(const TransactionBundle& bundle);

struct RevenueReport {
  FlowMap net_by_asset;
  bool is_pure_revenue{false};
  Decimal gas_cost_base;
  Decimal profit_base;
};

// gas cost = gas_used * gas_price * 1e-9 ETH.
RevenueReport profit(const TransactionBundle& bundle);

struct BlockRecord {
  std::int64_t block_number{0};
  Decimal explicit_fees;
  Decimal pure_revenue_oo;
  Decimal block_reward;
  friend bool operator==(const BlockRecord&, const BlockRecord&) = default;
};

// pure_revenue_oo / (explicit_fees + pure_revenue_oo).
Decimal oo_fee_share(const BlockRecord& block);

// Blocks with share above `threshold`, largest pure revenue first.
std::vector<BlockRecord> undercutting_candidates(std::span<const BlockRecord> blocks, Decimal threshold);

struct TimeBanditScenario {
  Decimal rewindable_volume;  // USD at the old price
  Decimal old_price;
  Decimal new_price;
  Decimal attack_cost;
};

struct TimeBanditResult {
  Decimal gross;
  Decimal net;
};

// gross = volume / old * (new - old), net = gross - cost.
TimeBanditResult time_bandit_profit(const TimeBanditScenario& scenario);

struct Histogram {
  std::vector<double> edges;  // n_bins + 1 edges over [0, 1]
  std::vector<std::uint64_t> counts;
};

// Share s falls in bin floor(s * n_bins); a share of exactly 1 goes to the
// last bin. Blocks without fees are skipped.
Histogram oo_histogram(std::span<const BlockRecord> blocks, std::size_t n_bins);

// ---- I/O ----------------------------------------------------------------------

// {"base_asset"?, "legs": [{"exchange", "sold": {"asset", "amount"},
//  "bought": {"asset", "amount"}, "rate"?}], "gas_used", "gas_price_gwei",
//  "gas_cost_base"?}. Amounts may be strings or numbers.
TransactionBundle bundle_from_json(const nlohmann::json& doc);
TimeBanditScenario scenario_from_json(const nlohmann::json& doc);

// Header block_number,explicit_fees_eth,pure_revenue_oo_eth,block_reward_eth.
// Errors name the 1-based line number.
std::vector<BlockRecord> read_block_corpus(std::istream& in);
void write_block_corpus(std::ostream& out, std::span<const BlockRecord> blocks);

nlohmann::json to_json(const RevenueReport& report);
nlohmann::json to_json(const TimeBanditResult& result);
nlohmann::json to_json(const Histogram& histogram);

// Asset and exchange nodes with sold/bought edges; one exchange node per leg.
nlohmann::json graph_json(const TransactionBundle& bundle);

}  // namespace pga::value
