// Exit-code and metadata contract of the command-line tool.
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kSource = PGA_SOURCE_DIR;

int run(const std::string& args) {
  const int status = std::system((std::string(PGA_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(PGA_BINARY_DIR) / "cli_scratch" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, SimulateWritesMetadata) {
  const auto out = scratch("simulate");
  ASSERT_EQ(run("simulate --config " + (kSource / "configs/simulate_null.json").string() + " --out " + out.string()), 0);
  const auto doc = nlohmann::json::parse(slurp(out / "outcome.json"));
  EXPECT_EQ(doc["meta"]["command"], "simulate");
  EXPECT_TRUE(doc["meta"].contains("version"));
  EXPECT_TRUE(doc["meta"].contains("seed"));
  EXPECT_TRUE(doc["meta"].contains("config_hash"));
  EXPECT_EQ(slurp(out / "events.csv").rfind("# pga ", 0), 0u);
}

TEST(Cli, SeedFlagOverridesTheConfig) {
  const auto out = scratch("seed");
  ASSERT_EQ(run("simulate --seed 9 --config " + (kSource / "configs/simulate_null.json").string() + " --out " +
                out.string()),
            0);
  EXPECT_EQ(nlohmann::json::parse(slurp(out / "outcome.json"))["meta"]["seed"], 9);
}

TEST(Cli, InputErrorsExitWithTwo) {
  const auto out = scratch("errors");
  EXPECT_EQ(run("simulate --config " + (out / "missing.json").string() + " --out " + out.string()), 2);
  std::ofstream(out / "bad.json") << "{ not json";
  EXPECT_EQ(run("simulate --config " + (out / "bad.json").string() + " --out " + out.string()), 2);
  std::ofstream(out / "bad.csv") << "observed_time_s,sender,nonce,gas_price_gwei,gas_limit,tx_hash\n1,a,0,1\n";
  EXPECT_EQ(run("analyze --input " + (out / "bad.csv").string() + " --out " + out.string()), 2);
  std::ofstream(out / "params.json") << R"({"players": [{"strategy": {"kind": "sealed", "params": {"price": -1}}}, {"strategy": {"kind": "null"}}]})";
  EXPECT_EQ(run("simulate --config " + (out / "params.json").string() + " --out " + out.string()), 2);
  EXPECT_EQ(run("nosuchcommand"), 2);
}

TEST(Cli, EmptyTraceIsNotAnError) {
  const auto out = scratch("empty");
  std::ofstream(out / "empty.csv") << "observed_time_s,sender,nonce,gas_price_gwei,gas_limit,tx_hash\n";
  ASSERT_EQ(run("analyze --input " + (out / "empty.csv").string() + " --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "auctions.json"));
  EXPECT_TRUE(fs::exists(out / "stats.csv"));
}

TEST(Cli, CsvFormatWritesTablesOnly) {
  const auto out = scratch("csv");
  ASSERT_EQ(run("value --format csv --input " + (kSource / "tests/data/purerevenue_bundle.json").string() + " --out " +
                out.string()),
            0);
  EXPECT_TRUE(fs::exists(out / "net_flows.csv"));
  EXPECT_FALSE(fs::exists(out / "value.json"));
}
