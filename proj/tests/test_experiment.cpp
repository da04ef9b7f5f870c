#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "randpoly/error.hpp"
#include "randpoly/experiment.hpp"

using namespace randpoly;

namespace {

template <class F>
Error error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an error");
  return Error(ErrorKind::InvalidParameter, "");
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RANDPOLY_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "randpoly_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("config parsing overlays the defaults") {
  const auto c = parse_config(R"({"experiment": "thm1", "trials": 3, "n_grid": [100, 1000], "eps": 0.3,
                                  "master_seed": 9, "density": {"class": "sz", "p": 1.5}})");
  CHECK(c.experiment == "thm1");
  CHECK(c.trials == 3);
  CHECK(c.n_grid == std::vector<double>{100, 1000});
  REQUIRE(c.eps.has_value());
  CHECK(*c.eps == 0.3);
  CHECK(c.master_seed == 9);
  CHECK(c.density.klass == "sz");
  CHECK(c.p == 1.5);
  CHECK_FALSE(parse_config(R"({"eps": "auto"})", "thm2").eps.has_value());
}

TEST_CASE("config errors name the field") {
  const auto bad_json = error_of([] { parse_config("{not json", "thm1"); });
  CHECK(bad_json.kind() == ErrorKind::ConfigError);
  const auto bad_type = error_of([] { parse_config(R"({"trials": "many"})", "thm1"); });
  CHECK(std::string(bad_type.what()).find("config.trials") != std::string::npos);
  const auto unknown = error_of([] { parse_config("{}", "thm9"); });
  CHECK(unknown.kind() == ErrorKind::ConfigError);

  auto c = default_config("thm1");
  c.trials = 0;
  const auto zero = error_of([&] { validate(c); });
  CHECK(zero.kind() == ErrorKind::ConfigError);
  CHECK(std::string(zero.what()).find("config.trials") != std::string::npos);
  c = default_config("thm1");
  c.p = 0.5;
  CHECK(std::string(error_of([&] { validate(c); }).what()).find("config.p") != std::string::npos);
  c = default_config("thm1");
  c.n_grid = {1000, 100};
  CHECK(error_of([&] { validate(c); }).kind() == ErrorKind::ConfigError);
  c = default_config("thm1");
  c.trials = 5000;
  CHECK(error_of([&] { validate(c); }).kind() == ErrorKind::ConfigError);
  c = default_config("lemma2");
  c.trials = 20000;
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("auto eps") {
  CHECK(auto_eps(1e4, 2) == doctest::Approx(std::max(1.0 / std::log(1e4), 3.0 / std::sqrt(1e5))));
  CHECK(auto_eps(1e6, 3) == doctest::Approx(1.0 / std::log(1e6)));
  CHECK(auto_eps(3.0, 2) == 0.5);
}

TEST_CASE("results do not depend on the worker count") {
  auto c = default_config("thm2");
  c.n_grid = {500, 2000};
  c.trials = 4;
  c.workers = 1;
  const auto one = run_experiment(c).csv();
  c.workers = 3;
  const auto three = run_experiment(c).csv();
  CHECK(one == three);
  c.master_seed = 2;
  CHECK(run_experiment(c).csv() != one);
}

TEST_CASE("a failing grid point becomes an error row") {
  auto c = default_config("thm1");
  c.n_grid = {2, 1000};
  c.trials = 2;
  c.workers = 1;
  const auto r = run_experiment(c);
  bool saw_error = false, saw_ok = false;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (r.cell(i, "kind") != "trial") continue;
    if (r.number(i, "n") == 2.0) {
      saw_error = true;
      CHECK(r.cell(i, "status") != "ok");
      CHECK_FALSE(r.cell(i, "note").empty());
    } else {
      saw_ok = saw_ok || r.cell(i, "status") == "ok";
    }
  }
  CHECK(saw_error);
  CHECK(saw_ok);
}

TEST_CASE("runtime column is filled only on request") {
  auto c = default_config("lemma2");
  c.trials = 50;
  c.workers = 1;
  const auto r = run_experiment(c);
  CHECK(r.cell(0, "runtime_ms").empty());
  c.record_runtime = true;
  const auto t = run_experiment(c);
  CHECK_FALSE(t.cell(0, "runtime_ms").empty());
}

TEST_CASE("CSV is written to the output path") {
  auto c = default_config("lemma2");
  c.trials = 20;
  c.workers = 1;
  c.output = scratch("lemma2.csv").string();
  const auto r = run_experiment(c);
  CHECK(slurp(c.output) == r.csv());
}

TEST_CASE("CLI exit codes") {
  CHECK(run_cli("net --dim 2 --eps 0.2 --out " + scratch("net.json").string()) == 0);
  CHECK(slurp(scratch("net.json")).find("\"directions\"") != std::string::npos);
  CHECK(run_cli("experiment thm1 --trials 0") == 2);
  CHECK(run_cli("experiment nonsense") == 2);
  CHECK(run_cli("experiment thm1 --eps wide") == 2);
  CHECK(run_cli("--bogus-flag") == 2);
  CHECK(run_cli("body --type floating --delta 0.5") == 3);
  CHECK(run_cli("body --type hexagon") == 2);

  const auto a = scratch("floating.json").string();
  const auto b = scratch("level.json").string();
  CHECK(run_cli("body --type floating --delta 0.001 --eps 0.2 --out " + a) == 0);
  CHECK(run_cli("body --type level-set --delta 0.001 --eps 0.2 --out " + b) == 0);
  CHECK(run_cli("distance " + a + " " + b + " --out " + scratch("dist.json").string()) == 0);
  CHECK(slurp(scratch("dist.json")).find("\"log_hausdorff\"") != std::string::npos);
  CHECK(run_cli("distance " + a + " " + scratch("missing.json").string()) != 0);

  const auto csv1 = scratch("cli1.csv").string(), csv2 = scratch("cli2.csv").string();
  CHECK(run_cli("experiment thm2 --n 1000 --trials 2 --workers 1 --out " + csv1) == 0);
  CHECK(run_cli("experiment thm2 --n 1000 --trials 2 --workers 2 --out " + csv2) == 0);
  CHECK(slurp(csv1) == slurp(csv2));
  CHECK(slurp(csv1).rfind("experiment,kind,dim,p,n,delta,trial,seed,eps,d_log,d_haus,f0,scaled_rate,runtime_ms", 0) == 0);
}
