#include "pga/strategies.hpp"

#include <algorithm>
#include <cmath>

#include "pga/equilibrium.hpp"

namespace pga {

namespace {

// Highest bid of `player`, earliest among equal prices.
std::optional<Bid> best_bid_of(std::span<const Bid> bids, PlayerIndex player) {
  std::optional<Bid> best;
  for (const auto& b : bids) {
    if (b.player == player && (!best || b.price > best->price)) best = b;
  }
  return best;
}

TimePoint seconds_param(const nlohmann::json& p, const char* key, TimePoint fallback) {
  if (!p.contains(key)) return fallback;
  const double s = p.at(key).get<double>();
  if (!std::isfinite(s) || s < 0) throw InvalidParams(std::string(key) + " must be a non-negative number");
  return TimePoint::from_seconds(s);
}

}  // namespace

StrategyAction null_step(const StrategyView&) { return StrategyAction::pass(); }

Transition<SealedBidState> sealed_bid_step(const StrategyView& view, SealedBidState state) {
  if (state.done) return {StrategyAction::pass(), state};
  state.done = true;
  return {StrategyAction::place_at(state.price, std::max(state.at, view.now)), state};
}

StrategyAction SealedBidStrategy::step(const StrategyView& view) {
  auto t = sealed_bid_step(view, state_);
  state_ = t.next;
  return t.action;
}

Transition<BlindRaisingState> blind_raising_step(const StrategyView& view, BlindRaisingState state) {
  if (state.stopped) return {StrategyAction::pass(), state};
  const TimePoint scheduled{state.k * state.interval.micros};
  if (view.now < scheduled) return {StrategyAction::pass(scheduled), state};

  const Ratio growth{state.f.den + state.f.num, state.f.den};
  const Money price = state.k == 0 ? state.b0 : mul_ceil_to_tick(state.last_price, growth, view.params.tick);
  if (state.k > 0 && price > state.cap) {
    state.stopped = true;
    return {StrategyAction::pass(), state};
  }
  state.last_price = price;
  ++state.k;
  return {StrategyAction::place(price, TimePoint{state.k * state.interval.micros}), state};
}

StrategyAction BlindRaisingStrategy::step(const StrategyView& view) {
  auto t = blind_raising_step(view, state_);
  state_ = t.next;
  return t.action;
}

Transition<ReactiveState> reactive_counterbid_step(const StrategyView& view, ReactiveState state) {
  const GameParams& params = view.params;
  if (!state.started) {
    state.started = true;
    state.last_own = params.min_start;
    state.last_own_time = view.now;
    return {StrategyAction::place(params.min_start, view.now + params.rate_limit), state};
  }
  const auto best = best_bid_of(view.visible_bids, 1 - view.own_index);
  if (!best || best->price < state.last_own) return {StrategyAction::pass(), state};
  if (best->price == state.last_own) {
    // Equal prices go to whichever was published first. A same-instant tie
    // counts as lost unless the log already shows our bid ahead.
    if (best->time > state.last_own_time) return {StrategyAction::pass(), state};
    if (best->time == state.last_own_time) {
      const auto winner = winner_bid(view.visible_bids);
      if (winner && winner->player == view.own_index && winner->price == state.last_own)
        return {StrategyAction::pass(), state};
    }
  }

  const Money opponent = best->price;
  const Money b1 = state.last_own;
  const Money raised = min_next_bid(b1, params);
  const Money cap = params.payoff + loss(b1, params.loss, params.tick);
  const Money target = std::min(std::max(raised, opponent + params.tick), cap);
  if (target <= opponent || target < raised) return {StrategyAction::pass(), state};

  const TimePoint legal = state.last_own_time + params.rate_limit;
  if (view.now < legal) return {StrategyAction::pass(legal), state};
  state.last_own = target;
  state.last_own_time = view.now;
  // Look again once the rate limit allows: a same-instant tie may be lost.
  return {StrategyAction::place(target, view.now + params.rate_limit), state};
}

StrategyAction ReactiveCounterbidStrategy::step(const StrategyView& view) {
  auto t = reactive_counterbid_step(view, state_);
  state_ = t.next;
  return t.action;
}

void CooperativeSchedule::validate(const GameParams& params) const {
  if (times.size() != prices.size()) throw InvalidParams("schedule: |V| and |W| differ");
  if (times.empty()) throw InvalidParams("schedule: empty");
  if (own_parity != 0 && own_parity != 1) throw InvalidParams("schedule: parity must be 0 or 1");
  if (prices.front() < params.min_start) throw InvalidParams("schedule: W[0] below the minimum start");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] <= times[i - 1]) throw InvalidParams("schedule: V must be strictly increasing");
    if (prices[i] < min_next_bid(prices[i - 1], params))
      throw InvalidParams("schedule: W[" + std::to_string(i) + "] breaks the minimum raise");
  }
  // Each player bids every other slot, so its own spacing is V[i+2] - V[i].
  for (std::size_t i = 2; i < times.size(); ++i) {
    if (times[i] - times[i - 2] < params.rate_limit) throw InvalidParams("schedule: own bids closer than the rate limit");
  }
}

CooperativeSchedule make_cooperative_schedule(const GameParams& params, TimePoint interval, PlayerIndex parity,
                                              std::optional<std::size_t> rounds) {
  // A fractional loss is bounded by its value at the full prize.
  const Money c = loss(params.payoff, params.loss, params.tick);
  const std::size_t n = rounds ? *rounds : equilibrium::i_max(params.min_start, params.min_raise, c) + 1;
  if (n == 0) throw InvalidParams("schedule: needs at least one round");
  CooperativeSchedule schedule;
  schedule.own_parity = parity;
  schedule.prices = equilibrium::optimal_bid_schedule(params.min_start, params.min_raise, n - 1, params.tick);
  schedule.times.reserve(n);
  for (std::size_t i = 0; i < n; ++i) schedule.times.push_back(TimePoint{static_cast<std::int64_t>(i) * interval.micros});
  return schedule;
}

Transition<GrimTriggerState> grim_trigger_step(const StrategyView& view, const CooperativeSchedule& schedule,
                                               GrimTriggerState state) {
  const GameParams& params = view.params;
  const PlayerIndex me = schedule.own_parity;
  const auto legal_time = [&] {
    return state.last_own ? state.last_own_time + params.rate_limit : view.now;
  };
  const auto record = [&](Money price) {
    state.last_own = price;
    state.last_own_time = view.now;
  };

  if (state.punished || state.deviated) return {StrategyAction::pass(), state};

  if (!state.triggered) {
    // Allowed price for an opponent bid emitted at t: the opponent's latest
    // scheduled price at or before t, or s before its first slot.
    const auto allowed_at = [&](TimePoint t) {
      Money allowed = params.min_start;
      for (std::size_t m = 1 - me; m < schedule.times.size() && schedule.times[m] <= t; m += 2) allowed = schedule.prices[m];
      return allowed;
    };
    std::size_t seen = 0;
    for (const auto& b : view.visible_bids) {
      if (b.player == me) continue;
      if (seen++ < state.opponent_seen) continue;
      if (b.price > allowed_at(b.time)) {
        state.triggered = true;
        state.punish_price = params.payoff + loss(b.price, params.loss, params.tick);
        if (state.last_own) state.punish_price = std::max(state.punish_price, min_next_bid(*state.last_own, params));
        break;
      }
    }
    state.opponent_seen = seen;
  }

  if (state.triggered) {
    const TimePoint legal = legal_time();
    if (view.now < legal) return {StrategyAction::pass(legal), state};
    state.punished = true;
    record(state.punish_price);
    return {StrategyAction::place(state.punish_price), state};
  }

  const std::size_t slot = static_cast<std::size_t>(me) + 2 * state.next_slot;
  if (state.deviate_at && *state.deviate_at + 1 == slot && slot < schedule.times.size()) {
    const TimePoint at = schedule.times[*state.deviate_at];
    if (view.now < at) return {StrategyAction::pass(at), state};
    state.deviated = true;
    record(schedule.prices[slot]);
    return {StrategyAction::place(schedule.prices[slot]), state};
  }
  if (slot >= schedule.times.size()) return {StrategyAction::pass(), state};
  if (view.now < schedule.times[slot]) return {StrategyAction::pass(schedule.times[slot]), state};

  ++state.next_slot;
  record(schedule.prices[slot]);
  const std::size_t following = slot + 2;
  TimePoint wake = following < schedule.times.size() ? schedule.times[following] : TimePoint::infinity();
  if (state.deviate_at && *state.deviate_at + 1 == following && following < schedule.times.size())
    wake = schedule.times[*state.deviate_at];
  return {StrategyAction::place(schedule.prices[slot], wake), state};
}

StrategyAction GrimTriggerStrategy::step(const StrategyView& view) {
  auto t = grim_trigger_step(view, schedule_, state_);
  state_ = t.next;
  return t.action;
}

ScriptedStrategy::ScriptedStrategy(std::vector<ScriptedBid> bids) : bids_(std::move(bids)) {
  std::stable_sort(bids_.begin(), bids_.end(), [](const ScriptedBid& a, const ScriptedBid& b) { return a.time < b.time; });
}

StrategyAction ScriptedStrategy::step(const StrategyView& view) {
  if (next_ >= bids_.size()) return StrategyAction::pass();
  if (view.now < bids_[next_].time) return StrategyAction::pass(bids_[next_].time);
  const Money price = bids_[next_++].price;
  const TimePoint wake = next_ < bids_.size() ? std::max(bids_[next_].time, view.now) : TimePoint::infinity();
  return StrategyAction::place(price, wake);
}

std::unique_ptr<Strategy> make_strategy(const nlohmann::json& spec, const GameParams& params, PlayerIndex player) {
  if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string())
    throw InvalidParams("strategy: expected an object with a string 'kind'");
  const std::string kind = spec.at("kind").get<std::string>();
  const nlohmann::json p = spec.value("params", nlohmann::json::object());
  if (!p.is_object()) throw InvalidParams("strategy: 'params' must be an object");

  if (kind == "null") return std::make_unique<NullStrategy>();
  if (kind == "sealed") {
    const Money price = p.contains("price") ? money_from_json(p.at("price")) : params.payoff - params.tick;
    if (price < params.min_start) throw InvalidParams("sealed: price below the minimum start");
    return std::make_unique<SealedBidStrategy>(price, seconds_param(p, "at_s", TimePoint{1}));
  }
  if (kind == "blind") {
    BlindRaisingState s;
    s.b0 = p.contains("b0") ? money_from_json(p.at("b0")) : params.min_start;
    s.f = p.contains("f") ? ratio_from_json(p.at("f")) : params.min_raise;
    s.interval = seconds_param(p, "interval_s", params.rate_limit);
    s.cap = p.contains("cap") ? money_from_json(p.at("cap")) : params.payoff;
    if (s.b0 < params.min_start) throw InvalidParams("blind: b0 below the minimum start");
    if (s.f < params.min_raise) throw InvalidParams("blind: f below the minimum raise");
    if (s.interval < params.rate_limit) throw InvalidParams("blind: interval shorter than the rate limit");
    return std::make_unique<BlindRaisingStrategy>(s);
  }
  if (kind == "reactive") return std::make_unique<ReactiveCounterbidStrategy>();
  if (kind == "grim") {
    const TimePoint interval = seconds_param(p, "interval_s", TimePoint{400'000});
    if (interval.micros <= 0) throw InvalidParams("grim: interval must be positive");
    std::optional<std::size_t> rounds;
    if (p.contains("rounds")) rounds = p.at("rounds").get<std::size_t>();
    std::optional<std::size_t> deviate_at;
    if (p.contains("deviate_at")) deviate_at = p.at("deviate_at").get<std::size_t>();
    auto schedule = make_cooperative_schedule(params, interval, player, rounds);
    schedule.validate(params);
    if (deviate_at && (*deviate_at % 2 == static_cast<std::size_t>(player) || *deviate_at + 1 >= schedule.times.size()))
      throw InvalidParams("grim: deviate_at must name an opponent slot followed by an own slot");
    return std::make_unique<GrimTriggerStrategy>(std::move(schedule), deviate_at);
  }
  if (kind == "scripted") {
    std::vector<ScriptedBid> bids;
    for (const auto& b : p.value("bids", nlohmann::json::array())) {
      bids.push_back({seconds_param(b, "time_s", TimePoint{}), money_from_json(b.at("price"))});
    }
    return std::make_unique<ScriptedStrategy>(std::move(bids));
  }
  throw InvalidParams("strategy: unknown kind '" + kind + "'");
}

}  // namespace pga
