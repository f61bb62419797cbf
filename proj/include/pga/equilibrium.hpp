#pragma once
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "pga/units.hpp"

// Closed-form analytics for the grim-trigger cooperative auction with an
// exponentially distributed block interval. Probabilities and expectations
// are plain doubles; bid prices stay in Money so schedules match the
// simulator tick for tick.
namespace pga::equilibrium {

struct EquilibriumParams {
  double lambda_per_s{1.0 / 15.0};
  Money min_start{130'000'000};    // s
  Ratio min_raise{1, 8};           // iota
  Money loss_c{10'000'000};        // constant loss c
  double interval_s{0.4};          // gap between consecutive schedule times
  double latency0_s{0.0};
  double latency1_s{0.0};
  double rate_limit_s{0.1};

  void validate() const;
};

EquilibriumParams equilibrium_params_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const EquilibriumParams& p);

class HypothesisViolated : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Probability that the block has been mined by time t.
double p_time(double lambda, double t);

// Greatest i with s (1 + iota)^i <= 1 + c. Throws std::invalid_argument if s > 1 + c.
std::size_t i_max(Money s, Ratio iota, Money c);

// W[0] = s, W[i] = ceil_tick(W[i-1] (1 + iota)); n + 1 entries.
std::vector<Money> optimal_bid_schedule(Money s, Ratio iota, std::size_t n, Money tick = Money{1});

// V[i] = i * interval, `count` entries.
std::vector<double> uniform_schedule(double interval_s, std::size_t count);

// Probability the block lands in [V[i], V[i+1]) given survival to V[j].
// For the last index (i = |V| - 1) the interval is [V[i], infinity).
double p_interval(std::span<const double> times, double lambda, std::size_t i, std::size_t j);

// Probability, given survival to V[j], that the player with `parity` holds the
// top bid when the block is mined.
double win_probability(std::span<const double> times, double lambda, int parity, std::size_t j);

struct IntervalPayoffs {
  double bidder{0.0};
  double nonbidder{0.0};
};

// Expected contribution of interval i, conditioned on reaching V[j]:
// bidder p (1 - W[i]) and non-bidder p (-c).
IntervalPayoffs interval_payoffs(std::size_t i, std::size_t j, std::span<const double> times,
                                 std::span<const Money> prices, double lambda, double c);

// Expected payoff of continuing to cooperate from V[j] for the player with
// `parity`. Sums every interval up to and including the open-ended last one.
// A non-bidder who has not bid yet (interval 0) loses nothing.
double expected_cooperate(int parity, std::size_t j, std::span<const double> times,
                          std::span<const Money> prices, double lambda, double c);

// max(other_latency, rate_limit): how long before a deviation can be punished.
double response_delay(double other_latency_s, double rate_limit_s);

// p_time(delay) max(-c, 1 - W[i+1]) + (1 - p_time(delay)) (-c).
double expected_deviate(double delay_s, std::size_t i, std::span<const Money> prices, double lambda, double c);

// As expected_deviate, but throws HypothesisViolated unless delay is shorter
// than every gap of the schedule times.
double expected_deviate_checked(double delay_s, std::size_t i, std::span<const double> times,
                                std::span<const Money> prices, double lambda, double c);

struct NashRow {
  std::size_t j{0};
  double interval_start_s{0.0};
  int bidder{0};
  double cooperate_bidder{0.0};
  double cooperate_nonbidder{0.0};
  double deviate_nonbidder{0.0};
  double delay_s{0.0};
  bool deviation_profitable{false};
  bool delay_within_interval{true};
  // Set on every row at or before the last profitable deviation: once one
  // non-bidder gains by deviating, so does the non-bidder before it.
  bool unravels{false};
};

struct NashReport {
  std::vector<NashRow> rows;
  std::optional<std::size_t> broken_at;  // first row with a profitable deviation
  std::size_t i_max{0};
  std::vector<double> times;
  std::vector<Money> prices;

  bool is_equilibrium() const noexcept { return !broken_at.has_value(); }
};

NashReport check_nash(const EquilibriumParams& params);

// Two sealed bids of 1 - eps split the prize: eps / 2.
double sealed_bid_equilibrium_payoff(double eps);

nlohmann::json to_json(const NashReport& report);
// interval_start_s,bidder_payoff,nonbidder_payoff,deviate_payoff
void write_curves_csv(std::ostream& out, const NashReport& report);

}  // namespace pga::equilibrium
