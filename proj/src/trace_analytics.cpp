#include "pga/trace_analytics.hpp"

#include <algorithm>
#include <memory>
#include <set>

#include "csv.hpp"

namespace pga::trace {

namespace {

bool time_sorted(const Trace& trace) {
  return std::is_sorted(trace.begin(), trace.end(),
                        [](const TraceRecord& a, const TraceRecord& b) { return a.observed_time < b.observed_time; });
}

std::string seconds_text(TimePoint t) { return Decimal::from_raw(static_cast<i128>(t.micros) * 1'000'000'000'000).to_string(); }

TimePoint parse_seconds(const std::string& text) {
  const Decimal d = Decimal::parse(text).round(6);
  return TimePoint{static_cast<std::int64_t>(d.raw() / 1'000'000'000'000)};
}

std::uint64_t parse_unsigned(const std::string& text, const char* what) {
  std::size_t used = 0;
  if (text.empty() || text.front() == '-') throw ParseError(std::string("bad ") + what + " '" + text + "'");
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ParseError(std::string("bad ") + what + " '" + text + "'");
  return v;
}

struct Span {
  TimePoint start;
  TimePoint end;
  std::size_t trigger;  // index into the trace
  std::set<AccountNonce> keys;
};

std::set<AccountNonce> keys_in(const Trace& trace, TimePoint start, TimePoint end) {
  const auto lo = std::partition_point(trace.begin(), trace.end(), [&](const TraceRecord& r) { return r.observed_time < start; });
  const auto hi = std::partition_point(lo, trace.end(), [&](const TraceRecord& r) { return r.observed_time <= end; });
  std::set<AccountNonce> keys;
  for (auto it = lo; it != hi; ++it) keys.emplace(it->sender, it->nonce);
  return keys;
}

bool share_key(const std::set<AccountNonce>& a, const std::set<AccountNonce>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

}  // namespace

MarketPriceFn rolling_median_market(const Trace& trace, std::size_t window) {
  if (window == 0) throw std::invalid_argument("market window must be positive");
  if (!time_sorted(trace)) throw std::invalid_argument("trace must be sorted by time");
  auto shared = std::make_shared<const Trace>(trace);
  return [shared, window](TimePoint t) -> std::optional<Decimal> {
    const auto end = std::partition_point(shared->begin(), shared->end(),
                                          [&](const TraceRecord& r) { return r.observed_time < t; });
    const auto n = static_cast<std::size_t>(end - shared->begin());
    if (n == 0) return std::nullopt;
    std::vector<Decimal> prices;
    prices.reserve(std::min(n, window));
    for (auto it = end - static_cast<std::ptrdiff_t>(std::min(n, window)); it != end; ++it) prices.push_back(it->gas_price);
    return decimal_median(prices.begin(), prices.end());
  };
}

std::vector<Replacement> detect_replacements(const Trace& trace, const MarketPriceFn& market) {
  if (!time_sorted(trace)) throw std::invalid_argument("trace must be sorted by time");
  static const Decimal hundred = Decimal::from_int(100);
  static const Decimal ten = Decimal::from_int(10);
  std::map<AccountNonce, std::size_t> best;
  std::vector<Replacement> out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace[i];
    const AccountNonce key{r.sender, r.nonce};
    const auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(key, i);
      continue;
    }
    const Decimal old_price = trace[it->second].gas_price;
    if (r.gas_price <= old_price) continue;
    Replacement rep;
    rep.index = i;
    rep.replaced = it->second;
    rep.old_price = old_price;
    rep.new_price = r.gas_price;
    if (old_price.sign() > 0) rep.raise_pct = (r.gas_price - old_price) * hundred / old_price;
    rep.market_price = market ? market(r.observed_time) : std::nullopt;
    rep.high_value = rep.market_price && r.gas_price >= ten * *rep.market_price;
    out.push_back(rep);
    it->second = i;
  }
  return out;
}

AuctionWindow make_window(const Trace& trace, const TraceRecord& trigger, TimePoint start, TimePoint end) {
  AuctionWindow w;
  w.trigger = trigger;
  w.start = start;
  w.end = end;
  for (const auto& r : trace)
    if (r.observed_time >= start && r.observed_time <= end) w.bids[{r.sender, r.nonce}].push_back(r);
  return w;
}

std::vector<AuctionWindow> slice_auctions(const Trace& trace, const MarketPriceFn& market, TimePoint radius) {
  if (radius.micros < 0) throw std::invalid_argument("window radius must be non-negative");
  std::vector<Span> spans;
  for (const auto& rep : detect_replacements(trace, market)) {
    if (!rep.high_value) continue;
    const TimePoint t = trace[rep.index].observed_time;
    const TimePoint start = t - radius, end = t + radius;
    spans.push_back({start, end, rep.index, keys_in(trace, start, end)});
  }

  // Merging only grows spans, so the fixpoint does not depend on the order.
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t a = 0; a < spans.size() && !merged; ++a) {
      for (std::size_t b = a + 1; b < spans.size() && !merged; ++b) {
        auto& x = spans[a];
        const auto& y = spans[b];
        if (x.start > y.end || y.start > x.end || !share_key(x.keys, y.keys)) continue;
        x.start = std::min(x.start, y.start);
        x.end = std::max(x.end, y.end);
        x.trigger = std::min(x.trigger, y.trigger);
        x.keys = keys_in(trace, x.start, x.end);
        spans.erase(spans.begin() + static_cast<std::ptrdiff_t>(b));
        merged = true;
      }
    }
  }

  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) { return a.trigger < b.trigger; });
  std::vector<AuctionWindow> out;
  out.reserve(spans.size());
  for (const auto& s : spans) out.push_back(make_window(trace, trace[s.trigger], s.start, s.end));
  return out;
}

AuctionWindow prune_bots(const AuctionWindow& window, std::size_t min_bids) {
  AuctionWindow out = window;
  std::erase_if(out.bids, [&](const auto& kv) { return kv.second.size() < min_bids; });
  return out;
}

std::vector<BotAuctionStats> auction_stats(const AuctionWindow& window) {
  static const Decimal hundred = Decimal::from_int(100);
  struct Stamp {
    TimePoint time;
    const std::string* sender;
  };
  std::vector<Stamp> all;
  std::map<std::string, std::vector<const std::vector<TraceRecord>*>> by_sender;
  for (const auto& [key, records] : window.bids) {
    by_sender[key.first].push_back(&records);
    for (const auto& r : records) all.push_back({r.observed_time, &key.first});
  }
  std::stable_sort(all.begin(), all.end(), [](const Stamp& a, const Stamp& b) { return a.time < b.time; });

  std::vector<BotAuctionStats> out;
  for (const auto& [sender, groups] : by_sender) {
    BotAuctionStats s;
    s.sender = sender;
    std::vector<Decimal> raises;
    double gap_sum = 0;
    std::size_t gaps = 0;
    for (const auto* records : groups) {
      s.num_bids += records->size();
      Decimal top = records->front().gas_price;
      for (std::size_t k = 1; k < records->size(); ++k) {
        const Decimal p = (*records)[k].gas_price;
        if (p <= top) continue;
        if (top.sign() > 0) raises.push_back((p - top) * hundred / top);
        ++s.num_raises;
        top = p;
      }
      for (const auto& r : *records) {
        // Latest record of another sender at or before this one.
        auto it = std::upper_bound(all.begin(), all.end(), r.observed_time,
                                   [](TimePoint t, const Stamp& st) { return t < st.time; });
        while (it != all.begin()) {
          --it;
          if (*it->sender != sender) {
            gap_sum += (r.observed_time - it->time).seconds();
            ++gaps;
            break;
          }
        }
      }
    }
    if (!raises.empty()) s.median_raise_pct = decimal_median(raises.begin(), raises.end());
    if (gaps > 0) {
      const double mean = gap_sum / static_cast<double>(gaps);
      if (mean >= 0.0 && mean <= 1.0) s.mean_response_latency_s = mean;
    }
    out.push_back(std::move(s));
  }
  return out;
}

Trace read_trace_csv(std::istream& in) {
  const csv::Table table(in, {"observed_time_s", "sender", "nonce", "gas_price_gwei", "gas_limit", "tx_hash"});
  Trace out;
  std::set<std::tuple<std::string, std::uint64_t, std::string>> seen;
  for (const auto& row : table.rows()) {
    out.push_back(csv::with_line(row, [&] {
      TraceRecord r;
      r.observed_time = parse_seconds(table.cell(row, "observed_time_s"));
      r.sender = table.cell(row, "sender");
      if (r.sender.empty()) throw ParseError("empty sender");
      r.nonce = parse_unsigned(table.cell(row, "nonce"), "nonce");
      r.gas_price = Decimal::parse(table.cell(row, "gas_price_gwei"));
      if (r.gas_price.sign() < 0) throw ParseError("negative gas price");
      r.gas_limit = parse_unsigned(table.cell(row, "gas_limit"), "gas limit");
      r.tx_hash = table.cell(row, "tx_hash");
      if (!seen.emplace(r.sender, r.nonce, r.tx_hash).second) throw ParseError("duplicate (sender, nonce, tx_hash)");
      return r;
    }));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const TraceRecord& a, const TraceRecord& b) { return a.observed_time < b.observed_time; });
  return out;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "observed_time_s,sender,nonce,gas_price_gwei,gas_limit,tx_hash\n";
  for (const auto& r : trace)
    out << seconds_text(r.observed_time) << ',' << r.sender << ',' << r.nonce << ',' << r.gas_price.to_string() << ','
        << r.gas_limit << ',' << r.tx_hash << '\n';
}

Trace records_from_events(std::span<const ExecEvent> events) {
  Trace out;
  for (const auto& e : events) {
    if (e.kind != ExecEvent::Kind::Publish || !e.price) continue;
    TraceRecord r;
    r.observed_time = e.time;
    r.sender = "player" + std::to_string(e.player);
    r.gas_price = Decimal::from_money(*e.price);
    r.tx_hash = "sim-" + std::to_string(out.size());
    out.push_back(std::move(r));
  }
  return out;
}

Trace records_from_event_csv(std::istream& in) {
  const csv::Table table(in, {"event_kind", "time_us", "player", "price", "accepted"});
  std::vector<ExecEvent> events;
  for (const auto& row : table.rows()) {
    if (table.cell(row, "event_kind") != "publish") continue;
    events.push_back(csv::with_line(row, [&] {
      ExecEvent e;
      e.kind = ExecEvent::Kind::Publish;
      const auto& t = table.cell(row, "time_us");
      std::size_t used = 0;
      e.time = TimePoint{std::stoll(t, &used)};
      if (used != t.size()) throw ParseError("bad time '" + t + "'");
      const auto player = parse_unsigned(table.cell(row, "player"), "player");
      if (player > 1) throw ParseError("player must be 0 or 1");
      e.player = static_cast<PlayerIndex>(player);
      e.price = Money::parse(table.cell(row, "price"));
      return e;
    }));
  }
  return records_from_events(events);
}

nlohmann::json to_json(const AuctionWindow& window, const std::vector<BotAuctionStats>& stats) {
  nlohmann::json bots = nlohmann::json::array();
  for (const auto& [key, records] : window.bids)
    bots.push_back({{"sender", key.first}, {"nonce", key.second}, {"records", records.size()}});
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : stats) {
    rows.push_back({{"sender", s.sender},
                    {"num_bids", s.num_bids},
                    {"num_raises", s.num_raises},
                    {"median_raise_pct", s.median_raise_pct ? nlohmann::json(s.median_raise_pct->to_string()) : nullptr},
                    {"mean_latency_s", s.mean_response_latency_s ? nlohmann::json(*s.mean_response_latency_s) : nullptr}});
  }
  return {{"start_s", seconds_text(window.start)},
          {"end_s", seconds_text(window.end)},
          {"trigger", {{"observed_time_s", seconds_text(window.trigger.observed_time)},
                       {"sender", window.trigger.sender},
                       {"nonce", window.trigger.nonce},
                       {"gas_price_gwei", window.trigger.gas_price.to_string()},
                       {"tx_hash", window.trigger.tx_hash}}},
          {"groups", bots},
          {"stats", rows}};
}

void write_stats_csv_header(std::ostream& out) { out << "auction_id,sender,median_raise_pct,mean_latency_s,num_raises\n"; }

void write_stats_csv_rows(std::ostream& out, std::size_t auction_id, const std::vector<BotAuctionStats>& stats) {
  for (const auto& s : stats) {
    out << auction_id << ',' << s.sender << ',' << (s.median_raise_pct ? s.median_raise_pct->to_string() : "") << ','
        << (s.mean_response_latency_s ? format_double(*s.mean_response_latency_s) : "") << ',' << s.num_raises << '\n';
  }
}

}  // namespace pga::trace
