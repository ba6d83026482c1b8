#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

// Exit-code contract of the command-line driver: 0 success, 1 usage/config,
// 2 data, 3 internal.

namespace {

namespace fs = std::filesystem;

int cli(const std::string& args) {
  const std::string cmd =
      std::string(ALPHAFORGE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "alphaforge_cli_test") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("cli exit codes") {
  TempDir dir;

  SUBCASE("missing subcommand is a usage error") { CHECK(cli("") == 1); }

  SUBCASE("nonexistent config file") {
    CHECK(cli("--config /nonexistent/cfg.json synth --out " + dir.file("m.csv")) == 1);
  }

  SUBCASE("malformed config file") {
    std::ofstream(dir.file("bad.json")) << "{ not json";
    CHECK(cli("--config " + dir.file("bad.json") + " synth") == 1);
  }

  SUBCASE("config with unknown keys") {
    std::ofstream(dir.file("typo.json")) << R"({"serach": {}})";
    CHECK(cli("--config " + dir.file("typo.json") + " mine") == 1);
  }

  SUBCASE("missing market data") {
    std::ofstream(dir.file("cfg.json"))
        << R"({"data": {"csv_path": ")" << dir.file("absent.csv") << R"("}})";
    CHECK(cli("--config " + dir.file("cfg.json") + " mine") == 2);
  }

  SUBCASE("broken market csv") {
    std::ofstream(dir.file("broken.csv")) << "date,symbol,open\n2020-01-02,AAA,1\n";
    std::ofstream(dir.file("cfg.json"))
        << R"({"data": {"csv_path": ")" << dir.file("broken.csv") << R"("}})";
    CHECK(cli("--config " + dir.file("cfg.json") + " mine") == 2);
  }

  SUBCASE("synth then a valid tiny pipeline succeeds") {
    std::ofstream(dir.file("cfg.json")) << R"({
      "data": {"csv_path": ")" << dir.file("m.csv") << R"(", "horizon": 5},
      "ops": {"max_length": 8},
      "search": {"simulations_per_move": 8, "max_episodes": 3,
                  "alphas_to_mine": 2, "ic_threshold": 0.0,
                  "guidance": "uniform"},
      "strategy": {"top_k": 5, "drop_n": 2, "alphas_used": 2},
      "paths": {"mined_set": ")" << dir.file("mined.jsonl") << R"(",
                 "search_log": ")" << dir.file("log.jsonl") << R"(",
                 "backtest_csv": ")" << dir.file("bt.csv") << R"(",
                 "eval_report": ")" << dir.file("eval.json") << R"("}
    })";
    const std::string cfg = " --config " + dir.file("cfg.json") + " ";
    CHECK(cli(cfg + "synth --out " + dir.file("m.csv") +
              " --seed 2 --days 60 --stocks 12") == 0);
    CHECK(cli(cfg + "mine") == 0);
    CHECK(cli(cfg + "eval --split valid") == 0);
    CHECK(cli(cfg + "backtest") == 0);
    CHECK(fs::exists(dir.file("mined.jsonl")));
    CHECK(fs::exists(dir.file("bt.csv")));
    // Unknown split name is a config error.
    CHECK(cli(cfg + "eval --split tomorrow") == 1);
  }
}
