#pragma once
#include <cstdint>
#include <utility>

#include <json.hpp>

#include "pga/exec.hpp"

namespace pga {

// Sample statistics in dollars. Kept as doubles: a mean of Money values can
// fall between ticks.
struct EstimateReport {
  double mean{0.0};
  double std_error{0.0};
  std::uint64_t n_runs{0};
  double ci95_low{0.0};
  double ci95_high{0.0};
};

struct EstimateOptions {
  unsigned workers{0};  // 0: one per hardware thread
  PlayerIndex player{0};  // seat whose payoff estimate_payoff averages
};

// Mean and standard error of one seat's payoff (player 0 by default). Run r uses the key
// split_seed(seed, r), so the result does not depend on the worker count.
EstimateReport estimate_payoff(const Strategy& s0, TimePoint latency0, const Strategy& s1, TimePoint latency1,
                               const GameParams& params, std::uint64_t n_runs, std::uint64_t seed,
                               const EstimateOptions& options = {});

// Mean of PO(S0 vs S1) - PO(S1 vs S0). Each strategy keeps its own latency
// when seats are swapped, and both orderings of run r share the key
// split_seed(seed, r), hence the same auction length.
EstimateReport estimate_advantage(const Strategy& s0, TimePoint latency0, const Strategy& s1, TimePoint latency1,
                                  const GameParams& params, std::uint64_t n_runs, std::uint64_t seed,
                                  const EstimateOptions& options = {});

// Payoff against the null strategy; true iff mean - 1.96 std_error > 0.
std::pair<bool, EstimateReport> is_null_profitable(const Strategy& s0, TimePoint latency0, const GameParams& params,
                                                   std::uint64_t n_runs, std::uint64_t seed,
                                                   const EstimateOptions& options = {});

nlohmann::json to_json(const EstimateReport& report);

}  // namespace pga
