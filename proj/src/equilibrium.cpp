#include "pga/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "pga/game.hpp"

namespace pga::equilibrium {

namespace {

using boost::multiprecision::cpp_int;

// s (1 + iota)^i <= 1 + c, evaluated exactly.
bool within_cap(Money s, Ratio iota, Money c, std::size_t i) {
  const cpp_int grow = boost::multiprecision::pow(cpp_int(iota.den + iota.num), static_cast<unsigned>(i));
  const cpp_int base = boost::multiprecision::pow(cpp_int(iota.den), static_cast<unsigned>(i));
  return cpp_int(s.units) * grow <= cpp_int((Money::dollar() + c).units) * base;
}

double survival(double lambda, double from, double to) { return std::exp(-lambda * (to - from)); }

}  // namespace

void EquilibriumParams::validate() const {
  if (!(lambda_per_s > 0)) throw InvalidParams("lambda must be positive");
  if (min_start <= Money::zero()) throw InvalidParams("min_start must be positive");
  if (min_raise.num <= 0) throw InvalidParams("min_raise must be positive");
  if (loss_c < Money::zero()) throw InvalidParams("loss c must be non-negative");
  if (!(interval_s > 0)) throw InvalidParams("interval must be positive");
  if (latency0_s < 0 || latency1_s < 0) throw InvalidParams("latencies must be non-negative");
  if (!(rate_limit_s > 0)) throw InvalidParams("rate limit must be positive");
  if (min_start > Money::dollar() + loss_c) throw InvalidParams("min_start exceeds 1 + c");
}

EquilibriumParams equilibrium_params_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("nash params: expected a JSON object");
  EquilibriumParams p;
  if (doc.contains("lambda_per_s")) p.lambda_per_s = doc.at("lambda_per_s").get<double>();
  if (doc.contains("min_start")) p.min_start = money_from_json(doc.at("min_start"));
  if (doc.contains("min_raise")) p.min_raise = ratio_from_json(doc.at("min_raise"));
  if (doc.contains("loss_c")) p.loss_c = money_from_json(doc.at("loss_c"));
  if (doc.contains("interval_s")) p.interval_s = doc.at("interval_s").get<double>();
  if (doc.contains("latency0_s")) p.latency0_s = doc.at("latency0_s").get<double>();
  if (doc.contains("latency1_s")) p.latency1_s = doc.at("latency1_s").get<double>();
  if (doc.contains("rate_limit_s")) p.rate_limit_s = doc.at("rate_limit_s").get<double>();
  p.validate();
  return p;
}

nlohmann::json to_json(const EquilibriumParams& p) {
  return {{"lambda_per_s", p.lambda_per_s},     {"min_start", p.min_start.to_string()},
          {"min_raise", p.min_raise.to_string()}, {"loss_c", p.loss_c.to_string()},
          {"interval_s", p.interval_s},         {"latency0_s", p.latency0_s},
          {"latency1_s", p.latency1_s},         {"rate_limit_s", p.rate_limit_s}};
}

double p_time(double lambda, double t) { return t <= 0 ? 0.0 : -std::expm1(-lambda * t); }

std::size_t i_max(Money s, Ratio iota, Money c) {
  if (s.units <= 0 || iota.num <= 0) throw std::invalid_argument("i_max requires s > 0 and iota > 0");
  if (s > Money::dollar() + c) throw std::invalid_argument("i_max: s exceeds 1 + c");
  const long double ratio = static_cast<long double>((Money::dollar() + c).units) / static_cast<long double>(s.units);
  const long double step = std::log1p(static_cast<long double>(iota.num) / static_cast<long double>(iota.den));
  auto k = static_cast<std::size_t>(std::floor(std::log(ratio) / step));
  // The logarithm can land one off at exact boundaries.
  while (k > 0 && !within_cap(s, iota, c, k)) --k;
  while (within_cap(s, iota, c, k + 1)) ++k;
  return k;
}

std::vector<Money> optimal_bid_schedule(Money s, Ratio iota, std::size_t n, Money tick) {
  const Ratio factor{iota.den + iota.num, iota.den};
  std::vector<Money> w;
  w.reserve(n + 1);
  w.push_back(s);
  for (std::size_t i = 1; i <= n; ++i) w.push_back(mul_ceil_to_tick(w.back(), factor, tick));
  return w;
}

std::vector<double> uniform_schedule(double interval_s, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = static_cast<double>(i) * interval_s;
  return v;
}

double p_interval(std::span<const double> times, double lambda, std::size_t i, std::size_t j) {
  if (j > i || i >= times.size()) throw std::out_of_range("p_interval: need j <= i < |V|");
  const double reach = survival(lambda, times[j], times[i]);
  if (i + 1 == times.size()) return reach;
  return reach * -std::expm1(-lambda * (times[i + 1] - times[i]));
}

double win_probability(std::span<const double> times, double lambda, int parity, std::size_t j) {
  double total = 0.0;
  for (std::size_t i = j; i < times.size(); ++i) {
    if (static_cast<int>(i % 2) == parity) total += p_interval(times, lambda, i, j);
  }
  return total;
}

IntervalPayoffs interval_payoffs(std::size_t i, std::size_t j, std::span<const double> times,
                                 std::span<const Money> prices, double lambda, double c) {
  const double p = p_interval(times, lambda, i, j);
  return {p * (1.0 - prices[i].to_double()), p * -c};
}

double expected_cooperate(int parity, std::size_t j, std::span<const double> times,
                          std::span<const Money> prices, double lambda, double c) {
  if (times.size() != prices.size()) throw std::invalid_argument("expected_cooperate: |V| != |W|");
  double total = 0.0;
  for (std::size_t i = j; i < times.size(); ++i) {
    const auto e = interval_payoffs(i, j, times, prices, lambda, c);
    if (static_cast<int>(i % 2) == parity) {
      total += e.bidder;
    } else if (i > 0) {
      total += e.nonbidder;
    }
  }
  return total;
}

double response_delay(double other_latency_s, double rate_limit_s) { return std::max(other_latency_s, rate_limit_s); }

double expected_deviate(double delay_s, std::size_t i, std::span<const Money> prices, double lambda, double c) {
  if (i + 1 >= prices.size()) throw std::out_of_range("expected_deviate: needs W[i+1]");
  const double p = p_time(lambda, delay_s);
  return p * std::max(-c, 1.0 - prices[i + 1].to_double()) + (1.0 - p) * -c;
}

double expected_deviate_checked(double delay_s, std::size_t i, std::span<const double> times,
                                std::span<const Money> prices, double lambda, double c) {
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(delay_s < times[k] - times[k - 1]))
      throw HypothesisViolated("deviation delay is not shorter than every schedule gap");
  }
  return expected_deviate(delay_s, i, prices, lambda, c);
}

NashReport check_nash(const EquilibriumParams& params) {
  params.validate();
  NashReport report;
  report.i_max = i_max(params.min_start, params.min_raise, params.loss_c);
  report.times = uniform_schedule(params.interval_s, report.i_max + 1);
  report.prices = optimal_bid_schedule(params.min_start, params.min_raise, report.i_max);
  const double c = params.loss_c.to_double();
  const double lambda = params.lambda_per_s;

  // Deviation at row j needs W[j + 1], so the last slot has no row.
  for (std::size_t j = 0; j < report.i_max; ++j) {
    NashRow row;
    row.j = j;
    row.interval_start_s = report.times[j];
    row.bidder = static_cast<int>(j % 2);
    const int nonbidder = 1 - row.bidder;
    row.cooperate_bidder = expected_cooperate(row.bidder, j, report.times, report.prices, lambda, c);
    row.cooperate_nonbidder = expected_cooperate(nonbidder, j, report.times, report.prices, lambda, c);
    // The bidder punishes: it sees the deviation after its own latency and
    // may not rebid before the rate limit expires.
    const double punisher_latency = row.bidder == 0 ? params.latency0_s : params.latency1_s;
    row.delay_s = response_delay(punisher_latency, params.rate_limit_s);
    row.delay_within_interval = row.delay_s < params.interval_s;
    row.deviate_nonbidder = expected_deviate(row.delay_s, j, report.prices, lambda, c);
    row.deviation_profitable = row.deviate_nonbidder > row.cooperate_nonbidder;
    if (row.deviation_profitable && !report.broken_at) report.broken_at = j;
    report.rows.push_back(row);
  }
  if (report.broken_at) {
    std::size_t last = 0;
    for (const auto& row : report.rows)
      if (row.deviation_profitable) last = row.j;
    for (auto& row : report.rows) row.unravels = row.j <= last;
  }
  return report;
}

double sealed_bid_equilibrium_payoff(double eps) {
  if (!(eps > 0)) throw std::invalid_argument("sealed bid payoff requires eps > 0");
  return eps / 2.0;
}

nlohmann::json to_json(const NashReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"j", r.j},
                    {"interval_start_s", r.interval_start_s},
                    {"bidder", r.bidder},
                    {"cooperate_bidder", r.cooperate_bidder},
                    {"cooperate_nonbidder", r.cooperate_nonbidder},
                    {"deviate_nonbidder", r.deviate_nonbidder},
                    {"delay_s", r.delay_s},
                    {"deviation_profitable", r.deviation_profitable},
                    {"delay_within_interval", r.delay_within_interval},
                    {"unravels", r.unravels}});
  }
  nlohmann::json prices = nlohmann::json::array();
  for (const auto& w : report.prices) prices.push_back(w.to_string());
  nlohmann::json doc{{"i_max", report.i_max}, {"schedule_times_s", report.times}, {"schedule_prices", prices},
                     {"rows", rows}};
  if (report.broken_at) {
    doc["verdict"] = "broken";
    doc["broken_at"] = *report.broken_at;
  } else {
    doc["verdict"] = "equilibrium";
    doc["broken_at"] = nullptr;
  }
  return doc;
}

void write_curves_csv(std::ostream& out, const NashReport& report) {
  out << "interval_start_s,bidder_payoff,nonbidder_payoff,deviate_payoff\n";
  for (const auto& r : report.rows) {
    out << format_double(r.interval_start_s) << ',' << format_double(r.cooperate_bidder) << ','
        << format_double(r.cooperate_nonbidder) << ',' << format_double(r.deviate_nonbidder) << '\n';
  }
}

}  // namespace pga::equilibrium
