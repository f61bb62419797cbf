#include "pga/exec.hpp"

#include <algorithm>
#include <deque>
#include <memory>

namespace pga {

namespace {

class Execution {
 public:
  Execution(const Strategy& s0, TimePoint latency0, const Strategy& s1, TimePoint latency1, const GameParams& params,
            std::array<std::uint64_t, 2> key, const ExecOptions& options)
      : params_(params), options_(options), rng_(key) {
    if (latency0.micros < 0 || latency1.micros < 0) throw std::invalid_argument("latency must be non-negative");
    params_.validate();
    strategies_[0] = s0.clone();
    strategies_[1] = s1.clone();
    latency_ = {latency0, latency1};
  }

  ExecutionOutcome run() {
    out_.end_time = sample_duration(params_.duration, rng_);
    const TimePoint end = out_.end_time;
    std::uint64_t budget = options_.max_events;

    while (true) {
      const TimePoint next_pub = first_pending();
      const TimePoint next_del[2] = {front(deliveries_[0]), front(deliveries_[1])};
      const TimePoint next = std::min({next_pub, next_del[0], next_del[1], wake_[0], wake_[1]});
      if (next >= end) break;
      if (budget-- == 0) throw StrategyFault("event budget exhausted; a strategy keeps waking without progress");

      if (next_pub == next) {
        publish();
      } else if (next_del[0] == next || next_del[1] == next) {
        const PlayerIndex i = next_del[0] == next ? 0 : 1;
        deliveries_[i].pop_front();
        record(ExecEvent::Kind::Deliver, next, i, std::nullopt, true);
        invoke(i, next);
      } else {
        const PlayerIndex i = wake_[0] == next ? 0 : 1;
        record(ExecEvent::Kind::Wake, next, i, std::nullopt, true);
        invoke(i, next);
      }
    }
    record(ExecEvent::Kind::End, end, 0, std::nullopt, true);
    settle();
    return std::move(out_);
  }

 private:
  static TimePoint front(const std::deque<TimePoint>& q) { return q.empty() ? TimePoint::infinity() : q.front(); }

  TimePoint first_pending() const {
    TimePoint best = TimePoint::infinity();
    for (const Bid& b : pending_) best = std::min(best, b.time);
    return best;
  }

  void publish() {
    const TimePoint t = first_pending();
    std::vector<std::size_t> tied;
    for (std::size_t k = 0; k < pending_.size(); ++k)
      if (pending_[k].time == t) tied.push_back(k);
    const std::size_t pick = tied[tied.size() == 1 ? 0 : rng_.index(tied.size())];
    const Bid bid = pending_[pick];
    pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(pick));
    out_.log.push_back(bid);
    record(ExecEvent::Kind::Publish, t, bid.player, bid.price, true);
    const PlayerIndex other = 1 - bid.player;
    deliveries_[other].push_back(bid.time + latency_[other]);
  }

  void invoke(PlayerIndex i, TimePoint now) {
    // b*[now - latency]: published bids emitted no later than now - latency.
    const TimePoint horizon{now.micros - latency_[i].micros};
    const auto visible_end = std::partition_point(out_.log.begin(), out_.log.end(),
                                                  [&](const Bid& b) { return b.time <= horizon; });
    const StrategyView view{std::span<const Bid>(out_.log.data(), static_cast<std::size_t>(visible_end - out_.log.begin())),
                            now, i, latency_[i], params_};
    const StrategyAction action = strategies_[i]->step(view);
    if (action.next_wake < now) throw StrategyFault("strategy returned a wake time in the past");
    wake_[i] = action.next_wake;
    if (!action.bid) return;

    const TimePoint at = action.bid_at.value_or(now);
    if (at < now) throw StrategyFault("strategy scheduled a bid in the past");
    const Bid bid{at, *action.bid, i};
    const bool ok = !validate_bid(bid, emitted_[i], params_).has_value();
    record(ExecEvent::Kind::Emit, now, i, bid.price, ok);
    if (!ok) {
      ++out_.dropped_bids[i];
      return;
    }
    emitted_[i].push_back(bid);
    pending_.push_back(bid);
  }

  void settle() {
    const auto win = winner_bid(out_.log);
    if (!win) return;
    const PlayerIndex w = win->player;
    const PlayerIndex l = 1 - w;
    out_.winner = w;
    out_.winning_bid = win;
    for (const Bid& b : out_.log)
      if (b.player == l && (!out_.losing_bid || b.price > out_.losing_bid->price)) out_.losing_bid = b;
    const Money lost = out_.losing_bid ? loss(out_.losing_bid->price, params_.loss, params_.tick) : Money::zero();
    out_.payoffs[w] = params_.payoff - win->price;
    out_.payoffs[l] = -lost;
    out_.miner_revenue = win->price + lost;
  }

  void record(ExecEvent::Kind kind, TimePoint t, PlayerIndex player, std::optional<Money> price, bool accepted) {
    if (options_.record_events) out_.events.push_back({kind, t, player, price, accepted});
  }

  GameParams params_;
  ExecOptions options_;
  Rng rng_;
  std::array<std::unique_ptr<Strategy>, 2> strategies_;
  std::array<TimePoint, 2> latency_{};
  std::array<TimePoint, 2> wake_{};
  std::array<std::deque<TimePoint>, 2> deliveries_;
  std::array<std::vector<Bid>, 2> emitted_;
  std::vector<Bid> pending_;
  ExecutionOutcome out_;
};

}  // namespace

std::string_view to_string(ExecEvent::Kind kind) noexcept {
  switch (kind) {
    case ExecEvent::Kind::Emit: return "emit";
    case ExecEvent::Kind::Publish: return "publish";
    case ExecEvent::Kind::Deliver: return "deliver";
    case ExecEvent::Kind::Wake: return "wake";
    case ExecEvent::Kind::End: return "end";
  }
  return "unknown";
}

ExecutionOutcome execute_with_key(const Strategy& s0, TimePoint latency0, const Strategy& s1, TimePoint latency1,
                                  const GameParams& params, std::array<std::uint64_t, 2> key,
                                  const ExecOptions& options) {
  return Execution(s0, latency0, s1, latency1, params, key, options).run();
}

ExecutionOutcome execute(const Strategy& s0, TimePoint latency0, const Strategy& s1, TimePoint latency1,
                         const GameParams& params, std::uint64_t seed, const ExecOptions& options) {
  return execute_with_key(s0, latency0, s1, latency1, params, {seed, 0}, options);
}

void write_events_csv(std::ostream& out, std::span<const ExecEvent> events) {
  out << "event_kind,time_us,player,price,accepted\n";
  for (const auto& e : events) {
    out << to_string(e.kind) << ',' << e.time.micros << ',' << e.player << ','
        << (e.price ? e.price->to_string() : std::string()) << ',' << (e.accepted ? "true" : "false") << '\n';
  }
}

nlohmann::json to_json(const ExecutionOutcome& o) {
  nlohmann::json log = nlohmann::json::array();
  for (const Bid& b : o.log) log.push_back({{"time_us", b.time.micros}, {"price", b.price.to_string()}, {"player", b.player}});
  nlohmann::json doc{{"end_time_us", o.end_time.micros},
                     {"payoffs", {o.payoffs[0].to_string(), o.payoffs[1].to_string()}},
                     {"miner_revenue", o.miner_revenue.to_string()},
                     {"dropped_bids", {o.dropped_bids[0], o.dropped_bids[1]}},
                     {"log", log}};
  if (o.winner) {
    doc["winner"] = *o.winner;
    doc["winning_bid"] = o.winning_bid->price.to_string();
  } else {
    doc["winner"] = "none";
    doc["winning_bid"] = nullptr;
  }
  doc["losing_bid"] = o.losing_bid ? nlohmann::json(o.losing_bid->price.to_string()) : nlohmann::json(nullptr);
  return doc;
}

}  // namespace pga
