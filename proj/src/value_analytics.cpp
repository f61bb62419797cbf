#include "pga/value_analytics.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "csv.hpp"

namespace pga::value {

namespace {

Decimal decimal_from_json(const nlohmann::json& v, const char* what) {
  if (v.is_string()) return Decimal::parse(v.get<std::string>());
  if (v.is_number_integer()) return Decimal::from_int(v.get<std::int64_t>());
  if (v.is_number()) {
    // Shortest round-trip text, so 0.142123 stays 0.142123.
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    return Decimal::parse(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
  }
  throw ParseError(std::string(what) + ": expected a number or decimal string");
}

bool within_relative(Decimal value, Decimal reference, Decimal tolerance) {
  Decimal diff = value - reference;
  if (diff.sign() < 0) diff = -diff;
  Decimal ref = reference.sign() < 0 ? -reference : reference;
  return diff <= ref * tolerance;
}

}  // namespace

Decimal TradeLeg::effective_rate() const {
  if (rate) return *rate;
  if (sold_amount.is_zero()) throw InvalidInput("leg on " + exchange + " sells nothing");
  return bought_amount / sold_amount;
}

void TransactionBundle::validate() const {
  if (legs.empty()) throw InvalidInput("bundle has no legs");
  if (gas_used < 0) throw InvalidInput("gas_used must be non-negative");
  if (gas_price_gwei.sign() < 0) throw InvalidInput("gas price must be non-negative");
  static const Decimal tolerance = Decimal::parse("1e-6");
  for (const auto& leg : legs) {
    if (leg.sold_asset.empty() || leg.bought_asset.empty()) throw InvalidInput("leg without an asset symbol");
    if (leg.sold_amount.sign() < 0 || leg.bought_amount.sign() < 0) throw InvalidInput("negative leg amount");
    if (leg.rate && !within_relative(*leg.rate * leg.sold_amount, leg.bought_amount, tolerance))
      throw InvalidInput("leg on " + leg.exchange + ": rate times sold amount does not match bought amount");
  }
}

FlowMap net_flows(const TransactionBundle& bundle) {
  FlowMap net;
  for (const auto& leg : bundle.legs) {
    net[leg.sold_asset] -= leg.sold_amount;
    net[leg.bought_asset] += leg.bought_amount;
  }
  return net;
}

bool is_pure_revenue(const TransactionBundle& bundle) {
  std::set<std::string> moved;
  for (const auto& leg : bundle.legs) {
    if (!leg.sold_amount.is_zero()) moved.insert(leg.sold_asset);
    if (!leg.bought_amount.is_zero()) moved.insert(leg.bought_asset);
  }
  const FlowMap net = net_flows(bundle);
  return std::all_of(moved.begin(), moved.end(), [&](const std::string& a) { return net.at(a).sign() > 0; });
}

RevenueReport profit(const TransactionBundle& bundle) {
  bundle.validate();
  RevenueReport r;
  r.net_by_asset = net_flows(bundle);
  r.is_pure_revenue = is_pure_revenue(bundle);
  if (bundle.gas_cost_base) {
    r.gas_cost_base = *bundle.gas_cost_base;
  } else if (bundle.base_asset == "ETH") {
    r.gas_cost_base = Decimal::from_int(bundle.gas_used) * bundle.gas_price_gwei * Decimal::parse("1e-9");
  } else {
    throw MissingBase("base asset " + bundle.base_asset + " needs an explicit gas_cost_base");
  }
  const auto it = r.net_by_asset.find(bundle.base_asset);
  if (it == r.net_by_asset.end() && bundle.base_asset != "ETH")
    throw MissingBase("base asset " + bundle.base_asset + " is not traded by the bundle");
  r.profit_base = (it == r.net_by_asset.end() ? Decimal{} : it->second) - r.gas_cost_base;
  return r;
}

Decimal oo_fee_share(const BlockRecord& block) {
  const Decimal total = block.explicit_fees + block.pure_revenue_oo;
  if (total.is_zero()) throw EmptyBlock("block " + std::to_string(block.block_number) + " has no fees");
  return block.pure_revenue_oo / total;
}

std::vector<BlockRecord> undercutting_candidates(std::span<const BlockRecord> blocks, Decimal threshold) {
  if (threshold.sign() <= 0 || threshold > Decimal::from_int(1))
    throw std::invalid_argument("threshold must lie in (0, 1]");
  std::vector<BlockRecord> out;
  for (const auto& b : blocks) {
    if ((b.explicit_fees + b.pure_revenue_oo).is_zero()) continue;
    if (oo_fee_share(b) > threshold) out.push_back(b);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const BlockRecord& a, const BlockRecord& b) { return a.pure_revenue_oo > b.pure_revenue_oo; });
  return out;
}

TimeBanditResult time_bandit_profit(const TimeBanditScenario& s) {
  if (s.old_price.sign() <= 0) throw InvalidInput("old price must be positive");
  TimeBanditResult r;
  r.gross = s.rewindable_volume * (s.new_price - s.old_price) / s.old_price;
  r.net = r.gross - s.attack_cost;
  return r;
}

Histogram oo_histogram(std::span<const BlockRecord> blocks, std::size_t n_bins) {
  if (n_bins == 0) throw std::invalid_argument("need at least one bin");
  Histogram h;
  h.counts.assign(n_bins, 0);
  for (std::size_t i = 0; i <= n_bins; ++i) h.edges.push_back(static_cast<double>(i) / static_cast<double>(n_bins));
  for (const auto& b : blocks) {
    if ((b.explicit_fees + b.pure_revenue_oo).is_zero()) continue;
    const i128 bin = (oo_fee_share(b) * Decimal::from_int(static_cast<std::int64_t>(n_bins))).trunc();
    h.counts[std::min(static_cast<std::size_t>(bin), n_bins - 1)]++;
  }
  return h;
}

TransactionBundle bundle_from_json(const nlohmann::json& doc) {
  try {
    TransactionBundle b;
    if (doc.contains("base_asset")) b.base_asset = doc.at("base_asset").get<std::string>();
    for (const auto& l : doc.at("legs")) {
      TradeLeg leg;
      leg.exchange = l.value("exchange", "");
      leg.sold_asset = l.at("sold").at("asset").get<std::string>();
      leg.sold_amount = decimal_from_json(l.at("sold").at("amount"), "sold amount");
      leg.bought_asset = l.at("bought").at("asset").get<std::string>();
      leg.bought_amount = decimal_from_json(l.at("bought").at("amount"), "bought amount");
      if (l.contains("rate")) leg.rate = decimal_from_json(l.at("rate"), "rate");
      b.legs.push_back(std::move(leg));
    }
    b.gas_used = doc.value("gas_used", std::int64_t{0});
    if (doc.contains("gas_price_gwei")) b.gas_price_gwei = decimal_from_json(doc.at("gas_price_gwei"), "gas price");
    if (doc.contains("gas_cost_base")) b.gas_cost_base = decimal_from_json(doc.at("gas_cost_base"), "gas cost");
    b.validate();
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bundle: ") + e.what());
  }
}

TimeBanditScenario scenario_from_json(const nlohmann::json& doc) {
  try {
    TimeBanditScenario s;
    s.rewindable_volume = decimal_from_json(doc.at("rewindable_volume_usd"), "volume");
    s.old_price = decimal_from_json(doc.at("old_price_usd"), "old price");
    s.new_price = decimal_from_json(doc.at("new_price_usd"), "new price");
    s.attack_cost = decimal_from_json(doc.at("attack_cost_usd"), "attack cost");
    if (s.old_price.sign() <= 0) throw InvalidInput("old price must be positive");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
}

std::vector<BlockRecord> read_block_corpus(std::istream& in) {
  const csv::Table table(in, {"block_number", "explicit_fees_eth", "pure_revenue_oo_eth", "block_reward_eth"});
  std::vector<BlockRecord> out;
  out.reserve(table.rows().size());
  for (const auto& row : table.rows()) {
    out.push_back(csv::with_line(row, [&] {
      BlockRecord b;
      const auto& num = table.cell(row, "block_number");
      std::size_t used = 0;
      b.block_number = std::stoll(num, &used);
      if (used != num.size()) throw ParseError("bad block number '" + num + "'");
      b.explicit_fees = Decimal::parse(table.cell(row, "explicit_fees_eth"));
      b.pure_revenue_oo = Decimal::parse(table.cell(row, "pure_revenue_oo_eth"));
      b.block_reward = Decimal::parse(table.cell(row, "block_reward_eth"));
      if (b.explicit_fees.sign() < 0 || b.pure_revenue_oo.sign() < 0 || b.block_reward.sign() < 0)
        throw InvalidInput("negative amount");
      return b;
    }));
  }
  return out;
}

void write_block_corpus(std::ostream& out, std::span<const BlockRecord> blocks) {
  out << "block_number,explicit_fees_eth,pure_revenue_oo_eth,block_reward_eth\n";
  for (const auto& b : blocks)
    out << b.block_number << ',' << b.explicit_fees.to_string() << ',' << b.pure_revenue_oo.to_string() << ','
        << b.block_reward.to_string() << '\n';
}

nlohmann::json to_json(const RevenueReport& r) {
  nlohmann::json net = nlohmann::json::object();
  for (const auto& [asset, amount] : r.net_by_asset) net[asset] = amount.to_string();
  return {{"net_by_asset", net},
          {"is_pure_revenue", r.is_pure_revenue},
          {"gas_cost_base", r.gas_cost_base.to_string()},
          {"profit_base", r.profit_base.to_string()}};
}

nlohmann::json to_json(const TimeBanditResult& r) {
  return {{"gross_usd", r.gross.to_string()}, {"net_usd", r.net.to_string()}};
}

nlohmann::json to_json(const Histogram& h) { return {{"edges", h.edges}, {"counts", h.counts}}; }

nlohmann::json graph_json(const TransactionBundle& bundle) {
  nlohmann::json nodes = nlohmann::json::array();
  nlohmann::json edges = nlohmann::json::array();
  std::set<std::string> assets;
  for (const auto& leg : bundle.legs) {
    assets.insert(leg.sold_asset);
    assets.insert(leg.bought_asset);
  }
  for (const auto& a : assets) nodes.push_back({{"id", "asset:" + a}, {"kind", "asset"}, {"label", a}});
  for (std::size_t i = 0; i < bundle.legs.size(); ++i) {
    const auto& leg = bundle.legs[i];
    const std::string id = "trade:" + std::to_string(i);
    const std::string rate = leg.sold_amount.is_zero() && !leg.rate ? "" : leg.effective_rate().to_string();
    nodes.push_back({{"id", id},
                     {"kind", "exchange"},
                     {"label", leg.exchange},
                     {"rate", rate},
                     {"rate_unit", leg.bought_asset + "/" + leg.sold_asset}});
    edges.push_back({{"from", "asset:" + leg.sold_asset}, {"to", id}, {"amount", leg.sold_amount.to_string()}, {"leg", i}});
    edges.push_back({{"from", id}, {"to", "asset:" + leg.bought_asset}, {"amount", leg.bought_amount.to_string()}, {"leg", i}});
  }
  return {{"nodes", nodes}, {"edges", edges}};
}

}  // namespace pga::value
