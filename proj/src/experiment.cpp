#include "randpoly/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

#include "json.hpp"
#include "randpoly/error.hpp"
#include "randpoly/float_bodies.hpp"
#include "randpoly/json_io.hpp"
#include "randpoly/sampler.hpp"
#include "randpoly/universal.hpp"

namespace randpoly {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::ConfigError, "config." + path + ": " + what);
}

// --- config parsing --------------------------------------------------------

Density1D factor_from_json(const json& j, const std::string& path) {
  const std::string kind = j.value("kind", "gaussian");
  if (kind == "gaussian") return Density1D::gaussian();
  if (kind == "ep" || kind == "sz") return Density1D::exp_power(j.value("p", 2.0));
  if (kind == "uniform") return Density1D::uniform(j.value("a", 0.0), j.value("b", 1.0));
  config_error(path + ".kind", "unknown factor kind '" + kind + "'");
}

DensitySpec density_from_json(const json& j, int default_dim, double default_p) {
  DensitySpec s;
  s.dim = default_dim;
  s.p = default_p;
  if (j.is_string()) {
    s.klass = j.get<std::string>();
    return s;
  }
  if (!j.is_object()) config_error("density", "must be an object or a class name");
  s.klass = j.value("class", s.klass);
  s.dim = j.value("dim", s.dim);
  s.p = j.value("p", s.p);
  s.profile = j.value("profile", s.profile);
  if (j.contains("factors")) {
    const auto& f = j.at("factors");
    if (!f.is_array()) config_error("density.factors", "must be an array");
    for (std::size_t i = 0; i < f.size(); ++i)
      s.factors.push_back(factor_from_json(f[i], "density.factors[" + std::to_string(i) + "]"));
    s.dim = static_cast<int>(s.factors.size());
  }
  if (j.contains("vertices")) {
    for (const auto& v : j.at("vertices")) {
      if (!v.is_array() || v.size() != 2) config_error("density.vertices", "each vertex is [x, y]");
      s.vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
    s.dim = 2;
  }
  return s;
}

std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array()) config_error(path, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) config_error(path, "must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

// --- output rows -----------------------------------------------------------

const std::vector<std::string> kBaseColumns{"experiment", "kind", "dim", "p", "n", "delta", "trial", "seed", "eps",
                                            "d_log", "d_haus", "f0", "scaled_rate", "runtime_ms"};
const std::vector<std::string> kTailColumns{"status", "note", "budget_warning"};

std::string csv_number(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return io::format_double(x);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Row {
  std::map<std::string, std::string> cells;
  Row& set(const std::string& k, double v) {
    cells[k] = csv_number(v);
    return *this;
  }
  Row& text(const std::string& k, std::string v) {
    cells[k] = std::move(v);
    return *this;
  }
  double get(const std::string& k) const {
    const auto it = cells.find(k);
    if (it == cells.end() || it->second.empty()) return kNaN;
    return std::strtod(it->second.c_str(), nullptr);
  }
  bool ok() const {
    const auto it = cells.find("status");
    return it == cells.end() || it->second == "ok";
  }
};

class Table {
 public:
  Table(const ExperimentConfig& cfg, const std::vector<std::string>& extras) : cfg_(cfg) {
    result_.columns = kBaseColumns;
    result_.columns.insert(result_.columns.end(), extras.begin(), extras.end());
    result_.columns.insert(result_.columns.end(), kTailColumns.begin(), kTailColumns.end());
  }

  Row base(const std::string& kind) const {
    Row r;
    r.text("experiment", cfg_.experiment).text("kind", kind).set("dim", cfg_.dim).set("p", cfg_.p);
    r.text("status", "ok").text("budget_warning", "0");
    return r;
  }

  void add(const Row& row) {
    std::vector<std::string> out;
    out.reserve(result_.columns.size());
    for (const auto& c : result_.columns) {
      const auto it = row.cells.find(c);
      out.push_back(it == row.cells.end() ? "" : it->second);
    }
    result_.rows.push_back(std::move(out));
  }

  ExperimentResult finish() { return std::move(result_); }

 private:
  const ExperimentConfig& cfg_;
  ExperimentResult result_;
};

Row& mark_error(Row& row, const std::exception& e) {
  row.text("status", "error").text("note", e.what());
  return row;
}

// --- scheduling ------------------------------------------------------------

/// Runs fn(i) for i < count on `workers` threads; results land by index.
template <class T>
std::vector<T> parallel_map(std::size_t count, int workers, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) out[i] = fn(i);
  };
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (threads == 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  std::size_t k = 0;
  for (double x : v)
    if (std::isfinite(x)) {
      s += x;
      ++k;
    }
  return k ? s / static_cast<double>(k) : kNaN;
}

std::vector<double> column_of(const std::vector<Row>& rows, const std::string& name) {
  std::vector<double> v;
  for (const auto& r : rows)
    if (r.ok()) v.push_back(r.get(name));
  return v;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t grid_index, std::size_t trial) {
  return derive_stream(derive_stream(master, grid_index), trial);
}

// --- thm1 / thm2 -----------------------------------------------------------

ExperimentResult run_trend(const ExperimentConfig& cfg, bool hausdorff_rate) {
  const DensityND density = make_density(cfg.density);
  const int workers = resolve_workers(cfg);
  Table table(cfg, {"f_radius_min", "f_radius_max", "diam_ratio", "exceedance"});

  struct Level {
    double n, eps;
    std::optional<FloatingPolytope> floating;
    std::string error;
  };
  std::vector<Level> levels;
  for (double n : cfg.n_grid) {
    Level lv{n, cfg.eps ? *cfg.eps : auto_eps(n, cfg.dim), std::nullopt, ""};
    try {
      lv.floating = floating_polytope(density, shared_net(cfg.dim, lv.eps, cfg.master_seed), 1.0 / n);
    } catch (const Error& e) {
      lv.error = e.what();
    }
    levels.push_back(std::move(lv));
  }

  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const auto task = [&](std::size_t idx) {
    const std::size_t a = idx / trials, trial = idx % trials;
    const Level& lv = levels[a];
    const double n = lv.n;
    const std::uint64_t seed = trial_seed(cfg.master_seed, a, trial);
    Row row = table.base("trial");
    row.set("n", n).set("delta", 1.0 / n).set("trial", static_cast<double>(trial)).set("eps", lv.eps);
    row.text("seed", std::to_string(seed));
    const auto start = std::chrono::steady_clock::now();
    try {
      if (!lv.floating) throw Error(ErrorKind::PossiblyEmpty, lv.error);
      const SupportBody& f = lv.floating->body;
      const SampleSet s = sample(density, static_cast<std::size_t>(n), seed);
      const SupportBody p = random_polytope(s, f.net_ptr());
      if (!p.center_interior()) throw Error(ErrorKind::DegenerateHull, "sample hull is not full-dimensional");
      const double d_log = log_hausdorff(p, f).value;
      const double d_haus = hausdorff_distance(p, f);
      const double ln = std::log(n), lln = std::log(ln);
      const double rate =
          hausdorff_rate ? d_haus * std::pow(ln, 1.0 - 1.0 / cfg.p) / lln : (d_log - 1.0) * ln / lln;
      row.set("d_log", d_log).set("d_haus", d_haus).set("scaled_rate", rate);
      if (cfg.dim == 2) row.set("f0", static_cast<double>(vertex_count_2d(s)));
    } catch (const std::exception& e) {
      mark_error(row, e);
    }
    if (cfg.record_runtime) row.set("runtime_ms", elapsed_ms(start));
    return row;
  };
  const std::vector<Row> rows = parallel_map<Row>(levels.size() * trials, workers, task);

  std::vector<double> med_rate(levels.size());
  for (std::size_t a = 0; a < levels.size(); ++a) {
    const std::vector<Row> slice(rows.begin() + static_cast<std::ptrdiff_t>(a * trials),
                                 rows.begin() + static_cast<std::ptrdiff_t>((a + 1) * trials));
    med_rate[a] = median(column_of(slice, "scaled_rate"));
  }
  double fitted = -std::numeric_limits<double>::infinity(), lowest = std::numeric_limits<double>::infinity();
  for (double m : med_rate)
    if (std::isfinite(m)) {
      fitted = std::max(fitted, m);
      lowest = std::min(lowest, m);
    }

  for (std::size_t a = 0; a < levels.size(); ++a) {
    const std::vector<Row> slice(rows.begin() + static_cast<std::ptrdiff_t>(a * trials),
                                 rows.begin() + static_cast<std::ptrdiff_t>((a + 1) * trials));
    for (const auto& r : slice) table.add(r);
    const Level& lv = levels[a];
    Row s = table.base("summary");
    s.set("n", lv.n).set("delta", 1.0 / lv.n).set("eps", lv.eps).set("trial", static_cast<double>(trials));
    const double med_log = median(column_of(slice, "d_log"));
    s.set("d_log", med_log).set("d_haus", median(column_of(slice, "d_haus")));
    s.set("f0", median(column_of(slice, "f0"))).set("scaled_rate", med_rate[a]);
    if (lv.floating) {
      const auto& h = lv.floating->body.values();
      s.set("f_radius_min", *std::min_element(h.begin(), h.end()));
      s.set("f_radius_max", *std::max_element(h.begin(), h.end()));
      s.set("diam_ratio", diameter(lv.floating->body) / std::sqrt(std::log(lv.n)));
    } else {
      s.text("status", "error").text("note", lv.error);
    }
    std::size_t over = 0, ok = 0;
    for (const auto& r : slice) {
      if (!r.ok()) continue;
      ++ok;
      if (r.get("scaled_rate") > fitted) ++over;
    }
    s.set("exceedance", ok ? static_cast<double>(over) / static_cast<double>(ok) : kNaN);
    const double net_factor = 1.0 / (1.0 - lv.eps) - 1.0;
    s.text("budget_warning", std::isfinite(med_log) && net_factor > 0.1 * (med_log - 1.0) ? "1" : "0");
    table.add(s);
  }
  Row fit = table.base("fit");
  fit.set("scaled_rate", fitted).set("exceedance", kNaN);
  fit.text("note", "scaled_rate is the max over the grid of the median; spread max/min = " +
                       csv_number(fitted / lowest));
  table.add(fit);
  return table.finish();
}

// --- lemma2 ----------------------------------------------------------------

ExperimentResult run_lemma2(const ExperimentConfig& cfg) {
  const Density1D law = make_density_1d(cfg.density);
  const int workers = resolve_workers(cfg);
  Table table(cfg, {"a", "b", "lo", "hi", "prob", "prob_floor", "freq", "z_score"});
  for (std::size_t idx = 0; idx < cfg.n_grid.size(); ++idx) {
    const double n = cfg.n_grid[idx];
    Row row = table.base("summary");
    row.set("n", n).set("trial", cfg.trials).set("dim", 1.0).set("p", law.kind() == Density1D::Kind::Gaussian ? 2.0 : law.p());
    const auto start = std::chrono::steady_clock::now();
    try {
      const MaxInterval iv = max_concentration_interval(law, static_cast<long long>(n), cfg.q);
      const auto trial_fn = [&](std::size_t trial) {
        Rng rng(trial_seed(cfg.master_seed, idx, trial));
        double best = -std::numeric_limits<double>::infinity();
        for (long long i = 0; i < static_cast<long long>(n); ++i) best = std::max(best, law.sample(rng));
        return static_cast<char>(best >= iv.lo && best <= iv.hi);
      };
      const auto hits = parallel_map<char>(static_cast<std::size_t>(cfg.trials), workers, trial_fn);
      const double freq = static_cast<double>(std::count(hits.begin(), hits.end(), 1)) / cfg.trials;
      const double se = std::sqrt(iv.prob * (1.0 - iv.prob) / cfg.trials);
      row.set("a", iv.a).set("b", iv.b).set("lo", iv.lo).set("hi", iv.hi).set("prob", iv.prob);
      row.set("prob_floor", iv.prob_floor).set("freq", freq).set("z_score", (freq - iv.prob) / se);
    } catch (const std::exception& e) {
      mark_error(row, e);
    }
    if (cfg.record_runtime) row.set("runtime_ms", elapsed_ms(start));
    table.add(row);
  }
  return table.finish();
}

// --- thm3 ------------------------------------------------------------------

ExperimentResult run_thm3(const ExperimentConfig& cfg) {
  const DensityND density = make_density(cfg.density);
  const double eps = cfg.eps ? *cfg.eps : 0.1;
  const NetPtr net = shared_net(cfg.dim, eps, cfg.master_seed);
  Table table(cfg, {"d_log_radon", "level_radius_err", "max_root_gap", "f_radius_min", "f_radius_max"});

  const auto task = [&](std::size_t i) {
    const double delta = cfg.delta_grid[i];
    Row row = table.base("trial");
    row.set("delta", delta).set("eps", eps).set("trial", 0.0);
    const auto start = std::chrono::steady_clock::now();
    try {
      const FloatingPolytope f = floating_polytope(density, net, delta);
      const LevelSetBody d = level_set_body(density, net, delta);
      const RadonBody r = radon_body(density, net, delta);
      row.set("d_log", log_hausdorff(f.body, d.body.to_support()).value);
      row.set("d_log_radon", log_hausdorff(f.body, r.body).value);
      const auto& h = f.body.values();
      row.set("f_radius_min", *std::min_element(h.begin(), h.end()));
      row.set("f_radius_max", *std::max_element(h.begin(), h.end()));
      double gap = 0.0;
      for (std::size_t k = 0; k < h.size(); ++k) gap = std::max(gap, std::abs(h[k] - r.body.value(k)));
      row.set("max_root_gap", gap);
      if (density.klass() == DensityND::Class::SchechtmanZinn) {
        // {f >= delta} is (log(c^d / delta))^{1/p} B_p^d.
        const double c = density.factors().front().normalizer();
        const double level = std::pow(std::log(std::pow(c, cfg.dim) / delta), 1.0 / density.p());
        double err = 0.0;
        for (std::size_t k = 0; k < net->size(); ++k) {
          const double pn = std::pow(net->direction(k).array().abs().pow(density.p()).sum(), 1.0 / density.p());
          err = std::max(err, std::abs(d.body.values()[k] - level / pn));
        }
        row.set("level_radius_err", err);
      }
    } catch (const std::exception& e) {
      mark_error(row, e);
    }
    if (cfg.record_runtime) row.set("runtime_ms", elapsed_ms(start));
    return row;
  };
  const auto rows = parallel_map<Row>(cfg.delta_grid.size(), resolve_workers(cfg), task);
  for (const auto& r : rows) table.add(r);

  // Trend along the grid as given (decreasing delta): both distances should fall.
  bool fd = true, fr = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    fd = fd && rows[i].get("d_log") < rows[i - 1].get("d_log");
    fr = fr && rows[i].get("d_log_radon") < rows[i - 1].get("d_log_radon");
  }
  Row trend = table.base("trend");
  trend.set("eps", eps);
  if (!rows.empty()) trend.set("d_log", rows.back().get("d_log")).set("d_log_radon", rows.back().get("d_log_radon"));
  trend.text("note", std::string("decreasing_fd=") + (fd ? "1" : "0") + " decreasing_fr=" + (fr ? "1" : "0"));
  table.add(trend);
  return table.finish();
}

// --- lower bounds ----------------------------------------------------------

ExperimentResult run_lower_bounds(const ExperimentConfig& cfg) {
  const DensityND density = make_density(cfg.density);
  if (density.dim() != 2) config_error("density.dim", "lower-bounds runs in the plane");
  const int workers = resolve_workers(cfg);
  Table table(cfg, {"radius", "f0_scaled", "d_haus_scaled_min"});
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const Eigen::VectorXd e1 = unit_vector(2, 0);

  std::vector<double> radius(cfg.n_grid.size());
  for (std::size_t a = 0; a < cfg.n_grid.size(); ++a) radius[a] = upper_quantile_estimate(density, e1, 1.0 / cfg.n_grid[a]).value;

  const auto task = [&](std::size_t idx) {
    const std::size_t a = idx / trials, trial = idx % trials;
    const double n = cfg.n_grid[a];
    const std::uint64_t seed = trial_seed(cfg.master_seed, a, trial);
    Row row = table.base("trial");
    row.set("n", n).set("delta", 1.0 / n).set("trial", static_cast<double>(trial)).set("radius", radius[a]);
    row.text("seed", std::to_string(seed));
    const auto start = std::chrono::steady_clock::now();
    try {
      const SampleSet s = sample(density, static_cast<std::size_t>(n), seed);
      const planar::Polygon hull = planar::convex_hull(s.points);
      if (hull.size() < 3) throw Error(ErrorKind::DegenerateHull, "sample hull is degenerate");
      const double dh = planar::hausdorff_to_disk(hull, planar::Vec2::Zero(), radius[a]);
      const double ln = std::log(n);
      row.set("f0", static_cast<double>(hull.size())).set("d_haus", dh);
      row.set("scaled_rate", dh * std::pow(ln, 0.5 + cfg.q)).set("f0_scaled", hull.size() / std::sqrt(ln));
    } catch (const std::exception& e) {
      mark_error(row, e);
    }
    if (cfg.record_runtime) row.set("runtime_ms", elapsed_ms(start));
    return row;
  };
  const auto rows = parallel_map<Row>(cfg.n_grid.size() * trials, workers, task);
  for (std::size_t a = 0; a < cfg.n_grid.size(); ++a) {
    const std::vector<Row> slice(rows.begin() + static_cast<std::ptrdiff_t>(a * trials),
                                 rows.begin() + static_cast<std::ptrdiff_t>((a + 1) * trials));
    for (const auto& r : slice) table.add(r);
    Row s = table.base("summary");
    const auto scaled = column_of(slice, "scaled_rate");
    s.set("n", cfg.n_grid[a]).set("trial", static_cast<double>(trials)).set("radius", radius[a]);
    s.set("f0", mean(column_of(slice, "f0"))).set("f0_scaled", mean(column_of(slice, "f0_scaled")));
    s.set("d_haus", median(column_of(slice, "d_haus"))).set("scaled_rate", median(scaled));
    s.set("d_haus_scaled_min", scaled.empty() ? kNaN : *std::min_element(scaled.begin(), scaled.end()));
    table.add(s);
  }
  return table.finish();
}

// --- universal -------------------------------------------------------------

ExperimentResult run_universal(const ExperimentConfig& cfg) {
  if (cfg.dim != 2) config_error("dim", "the universal experiment runs in the plane");
  const double eps = cfg.eps ? *cfg.eps : 0.1;
  const NetPtr net = shared_net(2, eps, cfg.master_seed);
  std::vector<SupportBody> bodies;
  for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.n_max); ++i)
    bodies.push_back(john_shape(cfg.family[i % cfg.family.size()], net));
  const KappaMap kappa{BodyFamily(std::move(bodies))};
  const UniversalDensity f = UniversalDensity::normalized(kappa);

  std::vector<std::string> extras{"check", "bound", "t_match"};
  for (int j = 1; j <= cfg.n_max; ++j) extras.push_back("bm_" + std::to_string(j));
  Table table(cfg, extras);

  for (int n = 1; n <= cfg.n_max; ++n) {
    Row dom = table.base("check");
    dom.set("n", n).set("eps", eps).text("note", "dominance ratio at t = 2^(2n^2)");
    dom.set("check", dominance_ratio(n, cfg.n_max)).set("bound", std::ldexp(1.0, -n + 2));
    table.add(dom);
    Row bm = table.base("check");
    bm.set("n", n).set("eps", eps).text("note", "bm_density_check");
    try {
      bm.set("check", bm_density_check(kappa, n)).set("bound", 1.0 + std::ldexp(1.0, -n + 2) * 2.0);
    } catch (const std::exception& e) {
      mark_error(bm, e);
    }
    table.add(bm);
    Row lv = table.base("check");
    lv.set("n", n).set("eps", eps).text("note", "level_set_identity_check");
    try {
      lv.set("check", level_set_identity_check(f, n)).set("bound", 1.05);
    } catch (const std::exception& e) {
      mark_error(lv, e);
    }
    table.add(lv);
  }

  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const auto task = [&](std::size_t idx) {
    const std::size_t a = idx / trials, trial = idx % trials;
    const double n = cfg.n_grid[a];
    const std::uint64_t seed = trial_seed(cfg.master_seed, a, trial);
    Row row = table.base("trial");
    row.set("n", n).set("delta", 1.0 / n).set("trial", static_cast<double>(trial)).set("eps", eps);
    row.set("t_match", std::log2(n)).text("seed", std::to_string(seed));
    const auto start = std::chrono::steady_clock::now();
    try {
      const SampleSet s = sample(f.density(), static_cast<std::size_t>(n), seed);
      const SupportBody p = random_polytope(s, net);
      if (!p.center_interior()) throw Error(ErrorKind::DegenerateHull, "sample hull is not full-dimensional");
      for (int j = 1; j <= cfg.n_max; ++j)
        row.set("bm_" + std::to_string(j), bm_upper_homothetic(p, kappa.family().body(j)).value);
    } catch (const std::exception& e) {
      mark_error(row, e);
    }
    if (cfg.record_runtime) row.set("runtime_ms", elapsed_ms(start));
    return row;
  };
  const auto rows = parallel_map<Row>(cfg.n_grid.size() * trials, resolve_workers(cfg), task);
  for (std::size_t a = 0; a < cfg.n_grid.size(); ++a) {
    const std::vector<Row> slice(rows.begin() + static_cast<std::ptrdiff_t>(a * trials),
                                 rows.begin() + static_cast<std::ptrdiff_t>((a + 1) * trials));
    for (const auto& r : slice) table.add(r);
    Row s = table.base("summary");
    s.set("n", cfg.n_grid[a]).set("trial", static_cast<double>(trials)).set("t_match", std::log2(cfg.n_grid[a]));
    for (int j = 1; j <= cfg.n_max; ++j) s.set("bm_" + std::to_string(j), median(column_of(slice, "bm_" + std::to_string(j))));
    table.add(s);
  }
  Row scale = table.base("check");
  scale.set("check", f.c()).text("note", "normalising scale c; family " + [&] {
    std::string names;
    for (int j = 1; j <= cfg.n_max; ++j) names += (j > 1 ? "/" : "") + cfg.family[static_cast<std::size_t>(j - 1) % cfg.family.size()];
    return names;
  }());
  table.add(scale);
  return table.finish();
}

// --- zeta ------------------------------------------------------------------

ExperimentResult run_zeta(const ExperimentConfig& cfg) {
  const DensityND density = make_density(cfg.density);
  Table table(cfg, {"epsilon", "zeta", "ci", "exact", "normalized"});
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const auto task = [&](std::size_t idx) {
    const std::size_t a = idx / trials, trial = idx % trials;
    const double e = cfg.delta_grid[a];
    const std::uint64_t seed = trial_seed(cfg.master_seed, a, trial);
    Row row = table.base("trial");
    row.set("epsilon", e).set("delta", e).set("trial", static_cast<double>(trial)).text("seed", std::to_string(seed));
    const auto start = std::chrono::steady_clock::now();
    try {
      const ZetaEstimate z = zeta(density, e, cfg.samples, seed);
      const int d = density.dim();
      row.set("zeta", z.estimate).set("ci", z.ci);
      row.set("normalized", z.estimate / (e * std::pow(std::log(1.0 / e), d)));
      if (density.klass() == DensityND::Class::Gaussian) {
        // |X|^2 is chi-square(d): f < e iff |X|^2 > 2 log(1 / (e (2 pi)^{d/2})).
        const double level = -std::log(e) - 0.5 * d * std::log(2.0 * std::numbers::pi);
        row.set("exact", level <= 0.0 ? 1.0 : boost::math::gamma_q(0.5 * d, level));
      }
    } catch (const std::exception& ex) {
      mark_error(row, ex);
    }
    if (cfg.record_runtime) row.set("runtime_ms", elapsed_ms(start));
    return row;
  };
  const auto rows = parallel_map<Row>(cfg.delta_grid.size() * trials, resolve_workers(cfg), task);
  for (const auto& r : rows) table.add(r);
  return table.finish();
}

}  // namespace

// --- public API ------------------------------------------------------------

DensityND make_density(const DensitySpec& s) {
  if (s.klass == "gaussian") return DensityND::gaussian(s.dim);
  if (s.klass == "sz") return DensityND::schechtman_zinn(s.dim, s.p);
  if (s.klass == "radial") {
    if (s.profile == "gaussian") return DensityND::radial_gaussian(s.dim);
    if (s.profile == "exp-power") return DensityND::radial_exp_power(s.dim, s.p);
    config_error("density.profile", "unknown radial profile '" + s.profile + "'");
  }
  if (s.klass == "product") {
    if (s.factors.empty()) config_error("density.factors", "product density needs factors");
    return DensityND::product(s.factors);
  }
  if (s.klass == "uniform-polygon") return DensityND::uniform_polygon(s.vertices);
  if (s.klass == "general") config_error("density.class", "general densities are constructed in code, not config");
  config_error("density.class", "unknown density class '" + s.klass + "'");
}

Density1D make_density_1d(const DensitySpec& s) {
  if (s.klass == "gaussian") return Density1D::gaussian();
  if (s.klass == "sz") return Density1D::exp_power(s.p);
  if (s.klass == "product" && s.factors.size() == 1) return s.factors.front();
  config_error("density.class", "a one-dimensional law is required (gaussian or sz)");
}

std::vector<std::string> experiment_names() {
  return {"thm1", "thm2", "thm3", "lemma2", "lower-bounds", "universal", "zeta"};
}

ExperimentConfig default_config(const std::string& name) {
  ExperimentConfig c;
  c.experiment = name;
  if (name == "thm1" || name == "thm2") {
    c.n_grid = {1e3, 1e4, 1e5, 1e6};
    c.trials = 50;
  } else if (name == "lemma2") {
    c.dim = 1;
    c.density.dim = 1;
    c.n_grid = {1e2, 1e3, 1e4};
    c.trials = 10000;
    c.q = 1.0;
  } else if (name == "thm3") {
    c.density.klass = "sz";
    c.density.p = 2.0;
    c.delta_grid = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    c.eps = 0.1;
  } else if (name == "lower-bounds") {
    c.n_grid = {1e3, 1e4, 1e5, 1e6};
    c.trials = 200;
    c.q = 0.25;
  } else if (name == "universal") {
    c.n_grid = {1e3, 1e4, 1e5};
    c.trials = 5;
    c.eps = 0.1;
  } else if (name == "zeta") {
    c.delta_grid = {1e-2, 1e-3, 1e-4};
    c.samples = 1'000'000;
  } else {
    config_error("experiment", "unknown experiment '" + name + "'");
  }
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::string& experiment) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("config: ") + e.what());
  }
  if (!j.is_object()) config_error("", "top level must be an object");
  std::string name = experiment;
  if (j.contains("experiment")) {
    if (!j.at("experiment").is_string()) config_error("experiment", "must be a string");
    const std::string in_file = j.at("experiment").get<std::string>();
    if (!name.empty() && name != in_file)
      config_error("experiment", "file says '" + in_file + "' but '" + name + "' was requested");
    name = in_file;
  }
  if (name.empty()) config_error("experiment", "missing");
  ExperimentConfig c = default_config(name);

  const auto field = [&](const char* key, auto& target) {
    if (!j.contains(key)) return;
    try {
      target = j.at(key).get<std::decay_t<decltype(target)>>();
    } catch (const json::exception&) {
      config_error(key, "has the wrong type");
    }
  };
  field("dim", c.dim);
  field("p", c.p);
  field("trials", c.trials);
  field("q", c.q);
  field("output", c.output);
  field("workers", c.workers);
  field("record_runtime", c.record_runtime);
  field("n_max", c.n_max);
  field("samples", c.samples);
  field("family", c.family);
  if (j.contains("master_seed")) {
    const auto& s = j.at("master_seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      config_error("master_seed", "must be a non-negative integer");
    c.master_seed = s.get<std::uint64_t>();
  }
  if (j.contains("eps")) {
    const auto& e = j.at("eps");
    if (e.is_string() && e.get<std::string>() == "auto")
      c.eps.reset();
    else if (e.is_number())
      c.eps = e.get<double>();
    else
      config_error("eps", "must be a number or \"auto\"");
  }
  if (j.contains("n_grid")) c.n_grid = number_list(j.at("n_grid"), "n_grid");
  if (j.contains("n")) c.n_grid = {j.at("n").get<double>()};
  if (j.contains("delta_grid")) c.delta_grid = number_list(j.at("delta_grid"), "delta_grid");
  c.density.dim = c.dim;
  c.density.p = c.p;
  if (j.contains("density")) {
    try {
      c.density = density_from_json(j.at("density"), c.dim, c.p);
    } catch (const json::exception& e) {
      config_error("density", e.what());
    }
    // The density's own p (e.g. sz) drives the rate exponent unless p is given explicitly.
    if (!j.contains("p")) c.p = c.density.klass == "gaussian" || c.density.klass == "radial" ? c.p : c.density.p;
    if (!j.contains("dim")) c.dim = c.density.dim;
  }
  if (c.experiment == "lemma2") c.dim = 1;
  return c;
}

void validate(const ExperimentConfig& c) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    config_error("experiment", "unknown experiment '" + c.experiment + "'");
  if (c.trials < 1) config_error("trials", "must be >= 1");
  if (!(c.p >= 1.0)) config_error("p", "must be >= 1");
  if (c.dim < 1 || c.dim > 3) config_error("dim", "desk-scale runs use 1 <= dim <= 3");
  if (c.eps && !(*c.eps > 0.0 && *c.eps < 1.0)) config_error("eps", "must lie in (0, 1) or be \"auto\"");
  const bool cheap = c.experiment == "lemma2" || c.experiment == "thm3" || c.experiment == "zeta";
  if (!cheap && c.trials > 1000) config_error("trials", "desk-scale limit is 1000 trials per grid point");
  if (c.experiment == "lemma2" && c.trials > 100000) config_error("trials", "limit is 100000 for lemma2");
  const bool needs_n = c.experiment == "thm1" || c.experiment == "thm2" || c.experiment == "lemma2" ||
                       c.experiment == "lower-bounds" || c.experiment == "universal";
  if (needs_n) {
    if (c.n_grid.empty()) config_error("n_grid", "must not be empty");
    for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
      const double n = c.n_grid[i];
      if (!(n >= 1.0) || n != std::floor(n) || n > 1e6)
        config_error("n_grid[" + std::to_string(i) + "]", "must be an integer in [1, 1e6]");
      if (i && !(n > c.n_grid[i - 1])) config_error("n_grid", "must be increasing");
    }
  }
  if (c.experiment == "thm3" || c.experiment == "zeta") {
    if (c.delta_grid.empty()) config_error("delta_grid", "must not be empty");
    for (std::size_t i = 0; i < c.delta_grid.size(); ++i)
      if (!(c.delta_grid[i] > 0.0)) config_error("delta_grid[" + std::to_string(i) + "]", "must be positive");
  }
  if (c.experiment == "universal") {
    if (c.n_max < 1 || c.n_max > 5) config_error("n_max", "must lie in [1, 5]");
    if (c.family.empty()) config_error("family", "must not be empty");
  }
  if (c.experiment == "zeta" && c.samples == 0) config_error("samples", "must be >= 1");
}

double auto_eps(double n, int dim) {
  const double floor_eps = 3.0 * std::pow(1e5, -1.0 / dim);
  return std::min(0.5, std::max(1.0 / std::log(std::max(n, 3.0)), floor_eps));
}

int resolve_workers(const ExperimentConfig& c) {
  if (c.workers > 0) return c.workers;
  if (const char* env = std::getenv("RANDPOLY_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string ExperimentResult::csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_escape(row[i]);
    out += "\n";
  }
  return out;
}

std::size_t ExperimentResult::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error(ErrorKind::InvalidParameter, "no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

const std::string& ExperimentResult::cell(std::size_t row, const std::string& name) const {
  return rows.at(row).at(column(name));
}

double ExperimentResult::number(std::size_t row, const std::string& name) const {
  const std::string& s = cell(row, name);
  return s.empty() ? kNaN : std::strtod(s.c_str(), nullptr);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  ExperimentConfig c = config;
  c.density.dim = c.experiment == "lemma2" ? 1 : c.dim;
  ExperimentResult r;
  if (c.experiment == "thm1")
    r = run_trend(c, false);
  else if (c.experiment == "thm2")
    r = run_trend(c, true);
  else if (c.experiment == "lemma2")
    r = run_lemma2(c);
  else if (c.experiment == "thm3")
    r = run_thm3(c);
  else if (c.experiment == "lower-bounds")
    r = run_lower_bounds(c);
  else if (c.experiment == "universal")
    r = run_universal(c);
  else
    r = run_zeta(c);
  if (!c.output.empty()) io::write_file(c.output, r.csv());
  return r;
}

}  // namespace randpoly
