#include "pga/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "pga/rng.hpp"
#include "pga/strategies.hpp"

namespace pga {

namespace {

struct Sums {
  i128 sum{0};
  i128 sum_sq{0};
};

// Runs sample(r) for r in [0, n) across workers and sums exactly; integer
// addition makes the reduction order irrelevant.
Sums accumulate(std::uint64_t n, unsigned workers, const std::function<std::int64_t(std::uint64_t)>& sample) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n));
  std::vector<Sums> partial(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      for (std::uint64_t r = w; r < n; r += workers) {
        const i128 x = sample(r);
        partial[w].sum += x;
        partial[w].sum_sq += x * x;
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  Sums total;
  for (const auto& p : partial) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
  }
  return total;
}

EstimateReport summarize(const Sums& s, std::uint64_t n) {
  const auto scale = static_cast<long double>(Money::kScale);
  const auto nn = static_cast<long double>(n);
  EstimateReport r;
  r.n_runs = n;
  r.mean = static_cast<double>(static_cast<long double>(s.sum) / nn / scale);
  const i128 spread = static_cast<i128>(n) * s.sum_sq - s.sum * s.sum;
  const long double variance = static_cast<long double>(spread) / (nn * (nn - 1)) / (scale * scale);
  r.std_error = static_cast<double>(std::sqrt(std::max(variance, 0.0L) / nn));
  r.ci95_low = r.mean - 1.96 * r.std_error;
  r.ci95_high = r.mean + 1.96 * r.std_error;
  return r;
}

void require_runs(std::uint64_t n) {
  if (n < 2) throw std::invalid_argument("estimates need at least two runs");
}

}  // namespace

EstimateReport estimate_payoff(const Strategy& s0, TimePoint latency0, const Strategy& s1, TimePoint latency1,
                               const GameParams& params, std::uint64_t n_runs, std::uint64_t seed,
                               const EstimateOptions& options) {
  require_runs(n_runs);
  params.validate();
  if (options.player < 0 || options.player > 1) throw std::invalid_argument("player must be 0 or 1");
  const auto sums = accumulate(n_runs, options.workers, [&](std::uint64_t r) {
    return execute_with_key(s0, latency0, s1, latency1, params, split_seed(seed, r)).payoffs[options.player].units;
  });
  return summarize(sums, n_runs);
}

EstimateReport estimate_advantage(const Strategy& s0, TimePoint latency0, const Strategy& s1, TimePoint latency1,
                                  const GameParams& params, std::uint64_t n_runs, std::uint64_t seed,
                                  const EstimateOptions& options) {
  require_runs(n_runs);
  params.validate();
  const auto sums = accumulate(n_runs, options.workers, [&](std::uint64_t r) {
    const auto key = split_seed(seed, r);
    const Money first = execute_with_key(s0, latency0, s1, latency1, params, key).payoffs[0];
    const Money second = execute_with_key(s1, latency1, s0, latency0, params, key).payoffs[0];
    return (first - second).units;
  });
  return summarize(sums, n_runs);
}

std::pair<bool, EstimateReport> is_null_profitable(const Strategy& s0, TimePoint latency0, const GameParams& params,
                                                   std::uint64_t n_runs, std::uint64_t seed,
                                                   const EstimateOptions& options) {
  const auto report = estimate_payoff(s0, latency0, NullStrategy{}, TimePoint{}, params, n_runs, seed, options);
  return {report.mean - 1.96 * report.std_error > 0, report};
}

nlohmann::json to_json(const EstimateReport& r) {
  return {{"mean", r.mean},
          {"std_error", r.std_error},
          {"n_runs", r.n_runs},
          {"ci95", {r.ci95_low, r.ci95_high}}};
}

}  // namespace pga
