#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "spde/config.hpp"

using namespace spde;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out);
  out << text;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SPDE_CLI_PATH) + " " + args + " >cli_stdout.txt 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

const char* kMomentsConfig = R"({
  "model": {"n_modes": 16, "nonlinearity": "scaled_arctan", "nonlinearity_params": [1.0, 1.0]},
  "scheme": {"tau": "1/2^3"},
  "estimator": {"n_samples": 50, "checkpoints": [10, 50]},
  "seed": 42,
  "output": "moments_out.csv"
})";

}  // namespace

TEST_CASE("dyadic rational parsing") {
  CHECK(DyadicRational::parse("1/2^3").value() == doctest::Approx(0.125));
  CHECK(DyadicRational::parse("3/2^2").value() == doctest::Approx(0.75));
  CHECK(DyadicRational::parse("2").value() == doctest::Approx(2.0));
  CHECK(DyadicRational::parse("1/2^3").str() == "1/2^3");
  CHECK_THROWS_AS(DyadicRational::parse("0.125"), ConfigError);
  CHECK_THROWS_AS(DyadicRational::parse("1/3"), ConfigError);
  CHECK_THROWS_AS(DyadicRational::parse("1/2^70"), ConfigError);
  CHECK_THROWS_AS(DyadicRational::parse(""), ConfigError);

  const auto r = DyadicRational::exact_ratio(DyadicRational::parse("1"),
                                             DyadicRational::parse("1/2^4"));
  REQUIRE(r.has_value());
  CHECK(*r == 16);
  CHECK_FALSE(DyadicRational::exact_ratio(DyadicRational::parse("1/2^4"),
                                          DyadicRational::parse("3/2^4"))
                  .has_value());
}

TEST_CASE("config schema is strict") {
  spit("cfg_unknown.json", R"({"model": {"n_modes": 8}, "scheme": {"tau": "1/2^2"},
                              "estimatr": {"n_samples": 10}})");
  CHECK_THROWS_AS(load_config("cfg_unknown.json"), ConfigError);

  spit("cfg_tau_big.json", R"({"scheme": {"tau": "3/2^1"}})");
  CHECK_THROWS_AS(load_config("cfg_tau_big.json"), ConfigError);

  spit("cfg_both.json", R"({"scheme": {"tau": "1/2^2", "T": "1", "m": 4}})");
  CHECK_THROWS_AS(load_config("cfg_both.json"), ConfigError);

  CHECK_THROWS_AS(load_config("no_such_file.json"), ConfigError);

  spit("cfg_ok.json", kMomentsConfig);
  const ExperimentConfig cfg = load_config("cfg_ok.json");
  CHECK(cfg.n_modes == 16);
  CHECK(cfg.tau_grid.size() == 1);
  CHECK(cfg.seed == 42);
}

TEST_CASE("cli exit codes") {
  SUBCASE("no subcommand") { CHECK(run_cli("--config cfg_ok.json") == 2); }
  SUBCASE("missing config file") {
    CHECK(run_cli("moments --config nope.json") == 2);
  }
  SUBCASE("unknown config key") {
    spit("cfg_unknown.json", R"({"estimatr": {"n_samples": 10}})");
    CHECK(run_cli("moments --config cfg_unknown.json") == 2);
  }
  SUBCASE("tau does not divide T") {
    spit("cfg_baddiv.json", R"({
      "scheme": {"tau_grid": ["1/2^1", "1/2^2", "1/2^3", "3/2^2"], "T": "1"},
      "estimator": {"n_samples": 10},
      "output": "never.csv"
    })");
    CHECK(run_cli("weak-order --config cfg_baddiv.json") == 2);
  }
  SUBCASE("invariant without burn_in") {
    spit("cfg_noburn.json", R"({
      "scheme": {"tau": "1/2^2"}, "estimator": {"steps": 100}, "output": "never.csv"
    })");
    CHECK(run_cli("invariant --config cfg_noburn.json") == 2);
  }
  SUBCASE("contraction without strict dissipativity") {
    spit("cfg_stiff.json", R"({
      "model": {"n_modes": 8, "nonlinearity": "linear_unsafe", "nonlinearity_params": [100.0]},
      "scheme": {"tau": "1/2^2"}, "estimator": {"steps": 100}, "output": "never.csv"
    })");
    CHECK(run_cli("contraction --config cfg_stiff.json") == 2);
  }
  SUBCASE("divergence is reported as such") {
    spit("cfg_blowup.json", R"({
      "model": {"n_modes": 4, "nonlinearity": "linear_unsafe", "nonlinearity_params": [500.0],
                "initial_condition": [1.0]},
      "scheme": {"tau": "1/2^1"},
      "estimator": {"n_samples": 4, "checkpoints": [10000]},
      "output": "never.csv"
    })");
    CHECK(run_cli("moments --config cfg_blowup.json") == 3);
  }
}

TEST_CASE("moments run writes the expected artifact") {
  spit("cfg_ok.json", kMomentsConfig);
  REQUIRE(run_cli("moments --config cfg_ok.json") == 0);
  const std::string body = slurp("moments_out.csv");
  CHECK(body.find("# artifact_version=") != std::string::npos);
  CHECK(body.find("# config_hash=") != std::string::npos);
  CHECK(body.find("# seed=42") != std::string::npos);
  CHECK(body.find("m,estimate,std_error\n") != std::string::npos);
  CHECK(body.find("# trend_slope=") != std::string::npos);
  CHECK(body.find("# moment_bound=") != std::string::npos);
  CHECK(body.find("\r") == std::string::npos);

  SUBCASE("reruns are byte identical") {
    REQUIRE(run_cli("moments --config cfg_ok.json --out moments_out2.csv") == 0);
    CHECK(slurp("moments_out2.csv") == body);
  }
  SUBCASE("the seed flag changes the numbers") {
    REQUIRE(run_cli("moments --config cfg_ok.json --seed 43 --out moments_out3.csv") == 0);
    const std::string other = slurp("moments_out3.csv");
    CHECK(other != body);
    CHECK(other.find("# seed=43") != std::string::npos);
  }
}

TEST_CASE("contraction run reports zero violations") {
  spit("cfg_contr.json", R"({
    "model": {"n_modes": 16, "nonlinearity": "scaled_arctan", "nonlinearity_params": [1.0, 1.0],
              "initial_condition": [2.0]},
    "scheme": {"tau_grid": ["1/2^2", "1/2^4"]},
    "estimator": {"steps": 2000},
    "seed": 7,
    "output": "contr_out.csv"
  })");
  REQUIRE(run_cli("contraction --config cfg_contr.json") == 0);
  const std::string body = slurp("contr_out.csv");
  CHECK(body.find("tau,max_ratio,bound,final_distance,violations") != std::string::npos);
  // every data row ends in ",0" (violations column)
  std::istringstream lines(body);
  std::string line;
  int data_rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("tau,", 0) == 0) continue;
    ++data_rows;
    CHECK(line.substr(line.size() - 2) == ",0");
  }
  CHECK(data_rows == 2);
}

TEST_CASE("diagnostics passes on the default model") {
  spit("cfg_diag.json", R"({
    "model": {"n_modes": 32, "nonlinearity": "scaled_arctan", "nonlinearity_params": [1.0, 1.0]},
    "seed": 5,
    "output": "diag_out.csv"
  })");
  REQUIRE(run_cli("diagnostics --config cfg_diag.json") == 0);
  const std::string body = slurp("diag_out.csv");
  CHECK(body.find("FAIL") == std::string::npos);
  CHECK(body.find("semigroup_smoothing_sigma_0.5") != std::string::npos);
  CHECK(body.find("resolvent_smoothing_c1") != std::string::npos);
  CHECK(body.find("resolvent_defect") != std::string::npos);
  CHECK(body.find("dissipativity_certificate") != std::string::npos);
  CHECK(body.find("contraction_ratio") != std::string::npos);
  CHECK(body.find("moment_bound") != std::string::npos);
}

TEST_CASE("golden artifact is reproduced byte for byte") {
  const std::string golden_dir = std::string(SPDE_SOURCE_DIR) + "/tests/golden";
  REQUIRE(run_cli("moments --config " + golden_dir + "/golden_config.json --out golden_now.csv") == 0);
  CHECK(slurp("golden_now.csv") == slurp(golden_dir + "/expected_moments.csv"));
}
