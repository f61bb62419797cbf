// pga: command-line front end for the auction simulator and the analytics.
//
//   pga simulate --config sim.json --out DIR [--seed N] [--runs N]
//   pga sweep    --config sweep.json --out DIR [--seed N] [--runs N]
//   pga nash     --config nash.json --out DIR
//   pga analyze  --input trace.csv [--config analyze.json] --out DIR
//   pga value    --input bundle.json|scenario.json|blocks.csv [--config value.json] --out DIR
//
// Exit status: 0 success, 2 bad config or input, 3 runtime fault.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pga/equilibrium.hpp"
#include "pga/estimate.hpp"
#include "pga/exec.hpp"
#include "pga/strategies.hpp"
#include "pga/trace_analytics.hpp"
#include "pga/value_analytics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kRuntimeFault = 3;

// Bad configuration or input; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string out{"."};
  std::string input;
  std::string format{"json"};
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> runs;
};

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << v;
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_config(const Options& o) {
  if (o.config.empty()) return json::object();
  try {
    return json::parse(read_file(o.config));
  } catch (const json::parse_error& e) {
    throw ConfigError(o.config + ": " + e.what());
  }
}

// Output metadata shared by every file a command writes.
struct Meta {
  std::string command;
  std::optional<std::uint64_t> seed;
  std::string config_hash;

  json to_json() const {
    return {{"tool", "pga"},
            {"version", PGA_VERSION},
            {"command", command},
            {"seed", seed ? json(*seed) : json(nullptr)},
            {"config_hash", config_hash}};
  }
  std::string csv_comment() const {
    return "# pga " + std::string(PGA_VERSION) + " command=" + command +
           " seed=" + (seed ? std::to_string(*seed) : std::string("none")) + " config_hash=" + config_hash + "\n";
  }
};

Meta make_meta(const std::string& command, const json& config, const std::string& input_bytes,
               std::optional<std::uint64_t> seed) {
  std::uint64_t h = fnv1a(config.dump());
  h = fnv1a(input_bytes, h);
  return Meta{command, seed, hex64(h)};
}

// Temp file and rename, so readers never see a half-written output.
void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
  std::cout << path.string() << '\n';
}

fs::path out_dir(const Options& o) {
  fs::create_directories(o.out);
  return fs::path(o.out);
}

// Flag, then config, then a seed derived from the config bytes.
std::uint64_t effective_seed(const Options& o, const json& config) {
  if (o.seed) return *o.seed;
  if (config.contains("seed")) return config.at("seed").get<std::uint64_t>();
  return fnv1a(config.dump());
}

std::uint64_t effective_runs(const Options& o, const json& config) {
  if (o.runs) return *o.runs;
  return config.value("runs", std::uint64_t{1});
}

struct Match {
  pga::GameParams params;
  std::unique_ptr<pga::Strategy> s[2];
  pga::TimePoint latency[2];
};

Match build_match(const json& config) {
  Match m;
  m.params = pga::game_params_from_json(config.value("game", json::object()));
  const auto& players = config.at("players");
  if (!players.is_array() || players.size() != 2) throw ConfigError("players: expected an array of two entries");
  for (int i = 0; i < 2; ++i) {
    const auto& p = players.at(static_cast<std::size_t>(i));
    m.s[i] = pga::make_strategy(p.at("strategy"), m.params, i);
    const double latency = p.value("latency_s", 0.0);
    if (!(latency >= 0)) throw ConfigError("latency_s must be non-negative");
    m.latency[i] = pga::TimePoint::from_seconds(latency);
  }
  return m;
}

json estimate_both(const Match& m, std::uint64_t runs, std::uint64_t seed, unsigned workers) {
  json out = json::object();
  for (int seat = 0; seat < 2; ++seat) {
    pga::EstimateOptions opts;
    opts.workers = workers;
    opts.player = seat;
    const auto r = pga::estimate_payoff(*m.s[0], m.latency[0], *m.s[1], m.latency[1], m.params, runs, seed, opts);
    out["player" + std::to_string(seat)] = pga::to_json(r);
  }
  return out;
}

int cmd_simulate(const Options& o) {
  const json config = load_config(o);
  const std::uint64_t seed = effective_seed(o, config);
  const std::uint64_t runs = effective_runs(o, config);
  const Match m = build_match(config);
  const Meta meta = make_meta("simulate", config, "", seed);
  const fs::path dir = out_dir(o);

  pga::ExecOptions exec_opts;
  exec_opts.record_events = true;
  const auto outcome = pga::execute(*m.s[0], m.latency[0], *m.s[1], m.latency[1], m.params, seed, exec_opts);
  if (o.format == "json") write_atomic(dir / "outcome.json", json{{"meta", meta.to_json()}, {"outcome", pga::to_json(outcome)}}.dump(2) + "\n");
  std::ostringstream events;
  events << meta.csv_comment();
  pga::write_events_csv(events, outcome.events);
  write_atomic(dir / "events.csv", events.str());

  if (runs >= 2) {
    const json summary = estimate_both(m, runs, seed, 0);
    if (o.format == "json") {
      write_atomic(dir / "summary.json", json{{"meta", meta.to_json()}, {"runs", runs}, {"estimates", summary}}.dump(2) + "\n");
    } else {
      std::ostringstream csv;
      csv << meta.csv_comment() << "player,mean,std_error,n_runs,ci95_low,ci95_high\n";
      for (int seat = 0; seat < 2; ++seat) {
        const auto& r = summary.at("player" + std::to_string(seat));
        csv << seat << ',' << pga::format_double(r.at("mean").get<double>()) << ','
            << pga::format_double(r.at("std_error").get<double>()) << ',' << runs << ','
            << pga::format_double(r.at("ci95")[0].get<double>()) << ','
            << pga::format_double(r.at("ci95")[1].get<double>()) << '\n';
      }
      write_atomic(dir / "summary.csv", csv.str());
    }
  }
  return kOk;
}

// The sweep replaces the value at `path` (a JSON pointer into the config)
// with each entry of `values`. Configurations run in parallel.
int cmd_sweep(const Options& o) {
  const json config = load_config(o);
  const std::uint64_t seed = effective_seed(o, config);
  const std::uint64_t runs = effective_runs(o, config);
  const auto& sweep = config.at("sweep");
  const json::json_pointer path(sweep.at("path").get<std::string>());
  const auto& values = sweep.at("values");
  if (!values.is_array() || values.empty()) throw ConfigError("sweep.values: expected a non-empty array");
  const bool nash = config.contains("nash");
  if (!nash && runs < 2) throw ConfigError("sweep: runs must be at least 2");

  json base = config;
  base.erase("sweep");
  std::vector<json> configs;
  for (const auto& v : values) {
    json c = base;
    c[path] = v;
    configs.push_back(std::move(c));
  }
  // Validate every configuration before running any.
  for (const auto& c : configs) {
    if (nash) {
      pga::equilibrium::equilibrium_params_from_json(c.at("nash")).validate();
    } else {
      build_match(c);
    }
  }

  const Meta meta = make_meta("sweep", config, "", nash ? std::nullopt : std::optional<std::uint64_t>(seed));
  const fs::path dir = out_dir(o);
  std::vector<json> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto work = [&] {
    for (std::size_t k = next++; k < configs.size(); k = next++) {
      try {
        json r;
        if (nash) {
          const auto report = pga::equilibrium::check_nash(pga::equilibrium::equilibrium_params_from_json(configs[k].at("nash")));
          r = pga::equilibrium::to_json(report);
        } else {
          r = estimate_both(build_match(configs[k]), runs, seed, 1);
        }
        results[k] = r;
        if (o.format == "json") {
          const json doc{{"meta", meta.to_json()}, {"index", k}, {"value", values[k]}, {"config", configs[k]}, {"result", r}};
          std::lock_guard lock(io);
          write_atomic(dir / ("sweep_" + std::to_string(k) + ".json"), doc.dump(2) + "\n");
        }
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), configs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::ostringstream csv;
  csv << meta.csv_comment();
  if (nash) {
    csv << "index,value,verdict,broken_at,i_max\n";
    for (std::size_t k = 0; k < results.size(); ++k) {
      const auto& r = results[k];
      csv << k << ',' << values[k].dump() << ',' << r.at("verdict").get<std::string>() << ','
          << (r.at("broken_at").is_null() ? std::string() : std::to_string(r.at("broken_at").get<std::size_t>())) << ','
          << r.at("i_max").get<std::size_t>() << '\n';
    }
  } else {
    csv << "index,value,mean0,std_error0,mean1,std_error1\n";
    for (std::size_t k = 0; k < results.size(); ++k) {
      const auto& r = results[k];
      csv << k << ',' << values[k].dump() << ',' << pga::format_double(r.at("player0").at("mean").get<double>()) << ','
          << pga::format_double(r.at("player0").at("std_error").get<double>()) << ','
          << pga::format_double(r.at("player1").at("mean").get<double>()) << ','
          << pga::format_double(r.at("player1").at("std_error").get<double>()) << '\n';
    }
  }
  write_atomic(dir / "sweep.csv", csv.str());
  return kOk;
}

int cmd_nash(const Options& o) {
  const json config = load_config(o);
  const json& params_doc = config.contains("nash") ? config.at("nash") : config;
  const auto params = pga::equilibrium::equilibrium_params_from_json(params_doc);
  const auto report = pga::equilibrium::check_nash(params);
  const Meta meta = make_meta("nash", config, "", std::nullopt);
  const fs::path dir = out_dir(o);
  if (o.format == "json") {
    write_atomic(dir / "nash.json", json{{"meta", meta.to_json()}, {"report", pga::equilibrium::to_json(report)}}.dump(2) + "\n");
  }
  std::ostringstream curves;
  curves << meta.csv_comment();
  pga::equilibrium::write_curves_csv(curves, report);
  write_atomic(dir / "curves.csv", curves.str());
  std::cerr << "verdict: " << (report.is_equilibrium() ? "equilibrium" : "broken at interval " + std::to_string(*report.broken_at))
            << ", i_max " << report.i_max << '\n';
  return kOk;
}

int cmd_analyze(const Options& o) {
  if (o.input.empty()) throw ConfigError("analyze: --input is required");
  const json config = load_config(o);
  const std::string bytes = read_file(o.input);
  std::istringstream in(bytes);
  const auto trace = pga::trace::read_trace_csv(in);
  const double radius = config.value("window_radius_s", 30.0);
  const auto market_window = config.value("market_window", std::size_t{1000});
  const auto min_bids = config.value("min_bids", std::size_t{4});
  if (!(radius >= 0) || market_window == 0) throw ConfigError("analyze: bad window settings");

  const auto market = pga::trace::rolling_median_market(trace, market_window);
  const auto windows = pga::trace::slice_auctions(trace, market, pga::TimePoint::from_seconds(radius));
  const Meta meta = make_meta("analyze", config, bytes, std::nullopt);
  const fs::path dir = out_dir(o);

  json auctions = json::array();
  std::ostringstream csv;
  csv << meta.csv_comment();
  pga::trace::write_stats_csv_header(csv);
  std::size_t id = 0;
  for (const auto& w : windows) {
    const auto pruned = pga::trace::prune_bots(w, min_bids);
    if (pruned.bids.empty()) continue;
    const auto stats = pga::trace::auction_stats(pruned);
    json a = pga::trace::to_json(pruned, stats);
    a["auction_id"] = id;
    auctions.push_back(std::move(a));
    pga::trace::write_stats_csv_rows(csv, id, stats);
    ++id;
  }
  if (o.format == "json")
    write_atomic(dir / "auctions.json", json{{"meta", meta.to_json()}, {"n_records", trace.size()}, {"auctions", auctions}}.dump(2) + "\n");
  write_atomic(dir / "stats.csv", csv.str());
  return kOk;
}

int cmd_value(const Options& o) {
  if (o.input.empty()) throw ConfigError("value: --input is required");
  const json config = load_config(o);
  const std::string bytes = read_file(o.input);
  const Meta meta = make_meta("value", config, bytes, std::nullopt);

  std::string mode = config.value("mode", "");
  json input;
  if (mode.empty()) {
    if (fs::path(o.input).extension() == ".csv") {
      mode = "corpus";
    } else {
      try {
        input = json::parse(bytes);
      } catch (const json::parse_error& e) {
        throw ConfigError(o.input + ": " + e.what());
      }
      mode = input.contains("legs") ? "bundle" : "scenario";
    }
  } else if (mode != "corpus") {
    try {
      input = json::parse(bytes);
    } catch (const json::parse_error& e) {
      throw ConfigError(o.input + ": " + e.what());
    }
  }

  const fs::path dir = out_dir(o);
  json doc{{"meta", meta.to_json()}, {"mode", mode}};
  if (mode == "bundle") {
    const auto bundle = pga::value::bundle_from_json(input);
    doc["revenue"] = pga::value::to_json(pga::value::profit(bundle));
    doc["graph"] = pga::value::graph_json(bundle);
    std::ostringstream csv;
    csv << meta.csv_comment() << "asset,net\n";
    for (const auto& [asset, amount] : pga::value::net_flows(bundle)) csv << asset << ',' << amount.to_string() << '\n';
    write_atomic(dir / "net_flows.csv", csv.str());
  } else if (mode == "scenario") {
    doc["time_bandit"] = pga::value::to_json(pga::value::time_bandit_profit(pga::value::scenario_from_json(input)));
  } else if (mode == "corpus") {
    std::istringstream in(bytes);
    const auto blocks = pga::value::read_block_corpus(in);
    const auto threshold = pga::Decimal::parse(config.value("threshold", std::string("0.5")));
    const auto bins = config.value("bins", std::size_t{20});
    const auto candidates = pga::value::undercutting_candidates(blocks, threshold);
    doc["n_blocks"] = blocks.size();
    doc["threshold"] = threshold.to_string();
    doc["n_candidates"] = candidates.size();
    doc["histogram"] = pga::value::to_json(pga::value::oo_histogram(blocks, bins));
    std::ostringstream csv;
    csv << meta.csv_comment() << "block_number,explicit_fees_eth,pure_revenue_oo_eth,block_reward_eth,oo_fee_share\n";
    for (const auto& b : candidates)
      csv << b.block_number << ',' << b.explicit_fees.to_string() << ',' << b.pure_revenue_oo.to_string() << ','
          << b.block_reward.to_string() << ',' << pga::value::oo_fee_share(b).to_fixed(6) << '\n';
    write_atomic(dir / "candidates.csv", csv.str());
  } else {
    throw ConfigError("value: unknown mode '" + mode + "'");
  }
  if (o.format == "json") write_atomic(dir / "value.json", doc.dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Priority gas auction simulator and analytics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PGA_VERSION);
  Options o;
  std::uint64_t seed = 0, runs = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON configuration file");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--runs", runs, "Monte Carlo runs (overrides the config)");
    sub->add_option("--format", o.format, "json writes reports and tables, csv only tables")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--input", o.input, "trace, bundle, scenario or corpus file");
  };
  std::vector<std::pair<CLI::App*, int (*)(const Options&)>> commands{
      {app.add_subcommand("simulate", "run one auction, or a Monte Carlo batch with --runs"), cmd_simulate},
      {app.add_subcommand("sweep", "Monte Carlo or equilibrium checks over a parameter grid"), cmd_sweep},
      {app.add_subcommand("nash", "check the cooperative schedule for profitable deviations"), cmd_nash},
      {app.add_subcommand("analyze", "find auctions in a transaction trace"), cmd_analyze},
      {app.add_subcommand("value", "pure-revenue, time-bandit and fee-share analytics"), cmd_value},
  };
  for (auto& [sub, fn] : commands) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  for (auto& [sub, fn] : commands) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--runs")) o.runs = runs;
    try {
      return fn(o);
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kInputError;
    } catch (const pga::ParseError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kInputError;
    } catch (const pga::InvalidParams& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kInputError;
    } catch (const pga::value::InvalidInput& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kInputError;
    } catch (const pga::value::MissingBase& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kInputError;
    } catch (const json::exception& e) {
      std::cerr << "error: config: " << e.what() << '\n';
      return kInputError;
    } catch (const pga::StrategyFault& e) {
      std::cerr << "fault: " << e.what() << '\n';
      return kRuntimeFault;
    } catch (const std::exception& e) {
      std::cerr << "fault: " << e.what() << '\n';
      return kRuntimeFault;
    }
  }
  return kInputError;
}
