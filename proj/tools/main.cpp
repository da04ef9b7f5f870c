// randpoly: build nets and bodies, compare bodies, run experiments.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "randpoly/convex_body.hpp"
#include "randpoly/direction_net.hpp"
#include "randpoly/error.hpp"
#include "randpoly/experiment.hpp"
#include "randpoly/float_bodies.hpp"
#include "randpoly/json_io.hpp"
#include "randpoly/sampler.hpp"

namespace {

using randpoly::Error;
using randpoly::ErrorKind;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

void emit(const std::string& text, const std::string& out) {
  if (out.empty())
    std::cout << text << (text.empty() || text.back() != '\n' ? "\n" : "");
  else
    randpoly::io::write_file(out, text.back() == '\n' ? text : text + "\n");
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> workers;
  std::optional<int> dim;
  std::optional<double> n;
  std::optional<int> trials;
  std::optional<std::string> eps;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON configuration file");
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--out", c.out, "output path (stdout when omitted)");
  app->add_option("--workers", c.workers, "worker threads (default: RANDPOLY_WORKERS or all cores)");
  app->add_option("--dim", c.dim, "dimension");
  app->add_option("--n", c.n, "sample size (replaces the n grid)");
  app->add_option("--trials", c.trials, "trials per grid point");
  app->add_option("--eps", c.eps, "net resolution, or \"auto\"");
}

double parse_eps(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::ConfigError, "config.eps: must be a number");
}

int cmd_net(const Common& c) {
  nlohmann::json j = c.config.empty() ? nlohmann::json::object() : nlohmann::json::parse(randpoly::io::read_file(c.config));
  const int dim = c.dim.value_or(j.value("dim", 2));
  const double eps = c.eps ? parse_eps(*c.eps) : j.value("eps", 0.1);
  const std::uint64_t seed = c.seed.value_or(j.value("seed", std::uint64_t{1}));
  const randpoly::DirectionNet net = randpoly::DirectionNet::build(dim, eps, seed);
  emit(randpoly::to_json(net), c.out);
  return 0;
}

int cmd_body(const Common& c, const std::string& type_flag, std::optional<double> delta_flag) {
  nlohmann::json j = c.config.empty() ? nlohmann::json::object() : nlohmann::json::parse(randpoly::io::read_file(c.config));
  const std::string type = type_flag.empty() ? j.value("type", std::string("floating")) : type_flag;
  if (c.dim) j["dim"] = *c.dim;
  if (!j.contains("experiment")) j["experiment"] = "thm1";
  // Reuse the experiment parser for the density block.
  const randpoly::ExperimentConfig cfg = randpoly::parse_config(j.dump());
  const randpoly::DensityND density = randpoly::make_density(cfg.density);
  const double eps = c.eps ? parse_eps(*c.eps) : j.value("eps", 0.1);
  const std::uint64_t seed = c.seed.value_or(j.value("seed", std::uint64_t{1}));
  const randpoly::NetPtr net = randpoly::shared_net(density.dim(), eps, seed);
  const double delta = delta_flag.value_or(j.value("delta", 0.01));
  std::string text;
  if (type == "floating") {
    text = randpoly::to_json(randpoly::floating_polytope(density, net, delta));
  } else if (type == "level-set") {
    text = randpoly::to_json(randpoly::level_set_body(density, net, delta));
  } else if (type == "radon") {
    text = randpoly::to_json(randpoly::radon_body(density, net, delta));
  } else if (type == "random-polytope") {
    const double n = c.n.value_or(j.value("n", 1000.0));
    const auto s = randpoly::sample(density, static_cast<std::size_t>(n), randpoly::derive_stream(seed, 0));
    text = randpoly::to_json(randpoly::random_polytope(s, net), "\"density_ref\": " + randpoly::io::quote(density.ref()) +
                                                                     ", \"n\": " + randpoly::io::format_double(n));
  } else {
    throw Error(ErrorKind::ConfigError, "config.type: unknown body type '" + type + "'");
  }
  emit(text, c.out);
  return 0;
}

int cmd_distance(const Common& c, const std::string& a_path, const std::string& b_path) {
  const randpoly::SupportBody a = randpoly::body_from_json(randpoly::io::read_file(a_path)).as_support();
  const randpoly::SupportBody b = randpoly::body_from_json(randpoly::io::read_file(b_path)).as_support();
  const randpoly::CenterSearch dl = randpoly::log_hausdorff(a, b);
  std::string text = "{\"log_hausdorff\": " + randpoly::io::format_double(dl.value) +
                     ", \"witness_center\": " + randpoly::io::format_vector(dl.witness_center) +
                     ", \"bm_upper\": " + randpoly::io::format_double(dl.value * dl.value);
  if (a.net().ref() == b.net().ref())
    text += ", \"hausdorff\": " + randpoly::io::format_double(randpoly::hausdorff_distance(a, b));
  text += "}";
  emit(text, c.out);
  return 0;
}

int cmd_experiment(const Common& c, const std::string& name) {
  randpoly::ExperimentConfig cfg =
      c.config.empty() ? randpoly::default_config(name) : randpoly::parse_config(randpoly::io::read_file(c.config), name);
  if (c.seed) cfg.master_seed = *c.seed;
  if (!c.out.empty()) cfg.output = c.out;
  if (c.workers) cfg.workers = *c.workers;
  if (c.dim) {
    cfg.dim = *c.dim;
    cfg.density.dim = *c.dim;
  }
  if (c.n) cfg.n_grid = {*c.n};
  if (c.trials) cfg.trials = *c.trials;
  if (c.eps) {
    if (*c.eps == "auto")
      cfg.eps.reset();
    else
      cfg.eps = parse_eps(*c.eps);
  }
  const randpoly::ExperimentResult r = randpoly::run_experiment(cfg);
  if (cfg.output.empty()) std::cout << r.csv();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random polytopes, floating bodies and net-based distances"};
  app.require_subcommand(1);
  Common common;

  auto* net = app.add_subcommand("net", "build a direction net and print it as JSON");
  add_common(net, common);

  auto* body = app.add_subcommand("body", "build a body (floating, level-set, radon, random-polytope)");
  add_common(body, common);
  std::string body_type;
  std::optional<double> delta;
  body->add_option("--type", body_type, "floating | level-set | radon | random-polytope");
  body->add_option("--delta", delta, "mass or density level");

  auto* distance = app.add_subcommand("distance", "distances between two body JSON files");
  add_common(distance, common);
  std::string a_path, b_path;
  distance->add_option("a", a_path, "first body")->required();
  distance->add_option("b", b_path, "second body")->required();

  auto* experiment = app.add_subcommand("experiment", "run an experiment and write CSV");
  add_common(experiment, common);
  std::string name;
  experiment->add_option("name", name, "thm1 | thm2 | thm3 | lemma2 | lower-bounds | universal | zeta")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*net) return cmd_net(common);
    if (*body) return cmd_body(common, body_type, delta);
    if (*distance) return cmd_distance(common, a_path, b_path);
    return cmd_experiment(common, name);
  } catch (const Error& e) {
    std::fprintf(stderr, "randpoly: %s\n", e.what());
    return e.kind() == ErrorKind::ConfigError ? kExitConfig : kExitRuntime;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "randpoly: config: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "randpoly: %s\n", e.what());
    return kExitRuntime;
  }
}
