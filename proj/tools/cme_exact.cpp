// cme-exact: exact and oracle solvers for small stochastic reaction systems.
//
// Subcommands: solve-closed, solve-master, simulate, moments, compare,
// sweep-ternary.  Systems come from a JSON file (--system), stdin
// (--system -), or an inline DSL string (--dsl).  Output is CSV or JSON.

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cme/master_equation.hpp"
#include "cme/moments.hpp"
#include "cme/reaction.hpp"
#include "cme/semilinear.hpp"
#include "cme/series.hpp"
#include "cme/ssa.hpp"

namespace {

constexpr const char* kVersion = "cme-exact 0.1.0";

struct RunConfig {
  std::string system_path;
  std::string dsl;
  std::string initial;
  std::vector<double> times;
  int max_deg = 220;
  int n_max = -1;
  double dt = 0.0;
  int n_traj = 10000;
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string out_path;
  double sweep_step = 0.02;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// FNV-1a over the canonical JSON serialization; identifies the system in
// output metadata.
std::string system_hash(const cme::ReactionSystem& sys) {
  const std::string s = cme::system_to_json(sys);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

cme::ReactionSystem load_system(const RunConfig& cfg) {
  cme::ReactionSystem sys;
  if (!cfg.dsl.empty()) {
    sys = cme::parse_dsl(cfg.dsl);
  } else if (cfg.system_path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    const std::string text = ss.str();
    sys = (text.find("->") != std::string::npos) ? cme::parse_dsl(text)
                                                 : cme::system_from_json(text);
  } else if (!cfg.system_path.empty()) {
    std::ifstream in(cfg.system_path);
    if (!in) throw std::runtime_error("cannot open system file: " + cfg.system_path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    sys = (cfg.system_path.ends_with(".json") || text.find("->") == std::string::npos)
              ? cme::system_from_json(text)
              : cme::parse_dsl(text);
  } else {
    throw std::runtime_error("provide --system or --dsl");
  }

  if (!cfg.initial.empty()) {
    sys.initial.clear();
    if (cfg.initial.front() == '{') {
      nlohmann::json j = nlohmann::json::parse(cfg.initial);
      for (const auto& [key, v] : j.items())
        sys.initial[cme::split_counts(key, sys.n_species())] = v.get<double>();
    } else {
      if (sys.n_species() != 1)
        throw std::runtime_error("integer --initial only valid for one species");
      sys.initial[{std::stoi(cfg.initial)}] = 1.0;
    }
  }
  sys.validate();
  if (sys.initial.empty()) throw std::runtime_error("system has no initial distribution");
  return sys;
}

void write_output(const RunConfig& cfg, const std::string& csv, const nlohmann::json& meta,
                  const nlohmann::json& rows) {
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!cfg.out_path.empty()) {
    file.open(cfg.out_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + cfg.out_path);
    out = &file;
  }
  if (cfg.format == "json") {
    nlohmann::json j;
    j["meta"] = meta;
    j["rows"] = rows;
    *out << j.dump(2) << "\n";
  } else {
    *out << csv;
  }
}

nlohmann::json base_meta(const RunConfig& cfg, const cme::ReactionSystem& sys) {
  nlohmann::json meta;
  meta["version"] = kVersion;
  meta["system_hash"] = system_hash(sys);
  meta["max_deg"] = cfg.max_deg;
  return meta;
}

int pick_threads() {
  if (const char* env = std::getenv("CME_EXACT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

std::vector<int> truncation_for(const RunConfig& cfg, const cme::ReactionSystem& sys) {
  if (cfg.n_max >= 0) return std::vector<int>(sys.n_species(), cfg.n_max);
  return cme::default_truncation(sys, cfg.times.empty() ? 0.0 : cfg.times.back());
}

int cmd_solve_closed(const RunConfig& cfg) {
  cme::ReactionSystem sys = load_system(cfg);
  const cme::SystemClass cls = cme::classify(sys);
  const int nsp = sys.n_species();
  std::string csv = "t,n,p\n";
  nlohmann::json rows = nlohmann::json::array();
  for (double t : cfg.times) {
    cme::SeriesD pgf = cme::solve_closed(sys, t, cfg.max_deg);
    cme::series_detail::for_each_index(nsp, pgf.max_deg(), [&](const cme::MultiIndex& m, long r) {
      const double p = pgf.raw()[r];
      if (p == 0.0 && cme::total_degree(m) > 0) return;
      std::vector<int> counts(nsp);
      for (int j = 0; j < nsp; ++j) counts[j] = m[j];
      const std::string key = cme::join_counts(counts);
      const std::string quoted = nsp > 1 ? "\"" + key + "\"" : key;
      csv += format_double(t) + "," + quoted + "," + format_double(p) + "\n";
      rows.push_back({{"t", t}, {"n", key}, {"p", p}});
    });
  }
  nlohmann::json meta = base_meta(cfg, sys);
  meta["class"] = cme::to_string(cls);
  write_output(cfg, csv, meta, rows);
  return 0;
}

int cmd_solve_master(const RunConfig& cfg) {
  cme::ReactionSystem sys = load_system(cfg);
  const std::vector<int> n_max = truncation_for(cfg, sys);
  const double dt = cfg.dt > 0.0 ? cfg.dt : cme::default_dt(sys, n_max);
  auto snaps = cme::integrate_master(sys, cfg.times, n_max, dt);
  std::string csv = "t,n,p,leak\n";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& snap : snaps) {
    for (const auto& [counts, p] : snap.probs) {
      const std::string key = cme::join_counts(counts);
      const std::string quoted = counts.size() > 1 ? "\"" + key + "\"" : key;
      csv += format_double(snap.time) + "," + quoted + "," + format_double(p) + "," +
             format_double(snap.leak) + "\n";
      rows.push_back({{"t", snap.time}, {"n", key}, {"p", p}, {"leak", snap.leak}});
    }
  }
  nlohmann::json meta = base_meta(cfg, sys);
  meta["n_max"] = n_max;
  meta["dt"] = dt;
  write_output(cfg, csv, meta, rows);
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  cme::ReactionSystem sys = load_system(cfg);
  auto ens = cme::simulate(sys, cfg.times, cfg.n_traj, cfg.seed, pick_threads());
  std::string csv = "t,n,p,se\n";
  nlohmann::json rows = nlohmann::json::array();
  for (size_t i = 0; i < cfg.times.size(); ++i) {
    for (const auto& [counts, c] : ens.histograms[i]) {
      const double p = static_cast<double>(c) / ens.n_traj;
      const double se = std::sqrt(p * (1.0 - p) / ens.n_traj);
      const std::string key = cme::join_counts(counts);
      const std::string quoted = counts.size() > 1 ? "\"" + key + "\"" : key;
      csv += format_double(cfg.times[i]) + "," + quoted + "," + format_double(p) + "," +
             format_double(se) + "\n";
      rows.push_back({{"t", cfg.times[i]}, {"n", key}, {"p", p}, {"se", se}});
    }
  }
  nlohmann::json meta = base_meta(cfg, sys);
  meta["n_traj"] = cfg.n_traj;
  meta["seed"] = cfg.seed;
  write_output(cfg, csv, meta, rows);
  return 0;
}

int cmd_moments(const RunConfig& cfg) {
  cme::ReactionSystem sys = load_system(cfg);
  if (sys.n_species() != 1)
    throw std::runtime_error("moments currently reports single-species cumulants");
  std::string csv = "t,c1,c2,c3\n";
  nlohmann::json rows = nlohmann::json::array();
  const cme::SystemClass cls = cme::classify(sys);
  for (double t : cfg.times) {
    std::vector<double> c;
    if (cls == cme::SystemClass::Generic) {
      // no closed form: fall back to the master-equation oracle
      const std::vector<int> n_max = truncation_for(cfg, sys);
      const double dt = cfg.dt > 0.0 ? cfg.dt : cme::default_dt(sys, n_max);
      auto snaps = cme::integrate_master(sys, {t}, n_max, dt);
      cme::SeriesD pgf(1, n_max[0]);
      for (const auto& [counts, p] : snaps[0].probs)
        pgf.set(cme::MultiIndex{counts[0], 0, 0}, p);
      c = cme::cumulants_from_pgf(pgf, 3);
    } else {
      c = cme::cumulants_from_pgf(cme::solve_closed(sys, t, cfg.max_deg), 3);
    }
    csv += format_double(t) + "," + format_double(c[0]) + "," + format_double(c[1]) + "," +
           format_double(c[2]) + "\n";
    rows.push_back({{"t", t}, {"c1", c[0]}, {"c2", c[1]}, {"c3", c[2]}});
  }
  write_output(cfg, csv, base_meta(cfg, sys), rows);
  return 0;
}

int cmd_compare(const RunConfig& cfg) {
  cme::ReactionSystem sys = load_system(cfg);
  const int nsp = sys.n_species();
  const std::vector<int> n_max = truncation_for(cfg, sys);
  const double dt = cfg.dt > 0.0 ? cfg.dt : cme::default_dt(sys, n_max);
  auto snaps = cme::integrate_master(sys, cfg.times, n_max, dt);
  std::string csv = "t,sup_norm,leak\n";
  nlohmann::json rows = nlohmann::json::array();
  double worst = 0.0;
  for (size_t i = 0; i < cfg.times.size(); ++i) {
    cme::SeriesD pgf = cme::solve_closed(sys, cfg.times[i], cfg.max_deg);
    double sup = 0.0;
    // closed support vs oracle box, then leftover oracle states
    std::map<std::vector<int>, double> oracle = snaps[i].probs;
    cme::series_detail::for_each_index(nsp, pgf.max_deg(), [&](const cme::MultiIndex& m, long r) {
      std::vector<int> counts(nsp);
      for (int j = 0; j < nsp; ++j) counts[j] = m[j];
      auto it = oracle.find(counts);
      const double o = it == oracle.end() ? 0.0 : it->second;
      if (it != oracle.end()) oracle.erase(it);
      sup = std::max(sup, std::abs(pgf.raw()[r] - o));
    });
    for (const auto& [counts, o] : oracle) sup = std::max(sup, std::abs(o));
    worst = std::max(worst, sup);
    csv += format_double(cfg.times[i]) + "," + format_double(sup) + "," +
           format_double(snaps[i].leak) + "\n";
    rows.push_back({{"t", cfg.times[i]}, {"sup_norm", sup}, {"leak", snaps[i].leak}});
  }
  nlohmann::json meta = base_meta(cfg, sys);
  meta["n_max"] = n_max;
  meta["dt"] = dt;
  meta["max_sup_norm"] = worst;
  write_output(cfg, csv, meta, rows);
  return 0;
}

int cmd_sweep_ternary(const RunConfig& cfg) {
  cme::ReactionSystem sys = load_system(cfg);  // provides the initial state
  if (sys.n_species() != 1) throw std::runtime_error("ternary sweep is single-species");
  std::map<int, double> p0;
  for (const auto& [counts, p] : sys.initial) p0[counts[0]] += p;

  const int levels = static_cast<int>(std::llround(1.0 / cfg.sweep_step));
  struct Point {
    double beta, gamma, tau;
  };
  std::vector<Point> grid;
  for (int ib = 0; ib <= levels; ++ib)
    for (int ig = 0; ig + ib <= levels; ++ig)
      grid.push_back({static_cast<double>(ib) / levels, static_cast<double>(ig) / levels,
                      static_cast<double>(levels - ib - ig) / levels});

  struct Row {
    Point pt;
    double t, c1, c2;
  };
  std::vector<Row> results(grid.size() * cfg.times.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t g = next.fetch_add(1);
      if (g >= grid.size()) break;
      const Point& pt = grid[g];
      for (size_t ti = 0; ti < cfg.times.size(); ++ti) {
        cme::SeriesD pgf =
            cme::composite_one_species(0.0, pt.beta, pt.gamma, pt.tau, cfg.times[ti], p0, cfg.max_deg);
        auto c = cme::cumulants_from_pgf(pgf, 2);
        results[g * cfg.times.size() + ti] = {pt, cfg.times[ti], c[0], c[1]};
      }
    }
  };
  const int threads = pick_threads();
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::string csv = "beta,gamma,tau,t,c1,c2\n";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : results) {
    csv += format_double(r.pt.beta) + "," + format_double(r.pt.gamma) + "," +
           format_double(r.pt.tau) + "," + format_double(r.t) + "," + format_double(r.c1) + "," +
           format_double(r.c2) + "\n";
    rows.push_back({{"beta", r.pt.beta},
                    {"gamma", r.pt.gamma},
                    {"tau", r.pt.tau},
                    {"t", r.t},
                    {"c1", r.c1},
                    {"c2", r.c2}});
  }
  nlohmann::json meta = base_meta(cfg, sys);
  meta["step"] = cfg.sweep_step;
  write_output(cfg, csv, meta, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact PGF solvers and oracles for stochastic reaction systems"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto add_common = [&](CLI::App* sub, bool needs_times) {
    sub->add_option("--system", cfg.system_path, "system file (JSON or DSL), '-' for stdin");
    sub->add_option("--dsl", cfg.dsl, "inline reaction DSL");
    sub->add_option("--initial", cfg.initial, "initial state: count or JSON map");
    auto* t = sub->add_option("--times", cfg.times, "sample times (ascending)")->delimiter(',');
    if (needs_times) t->required();
    sub->add_option("--max-deg", cfg.max_deg, "series truncation degree");
    sub->add_option("--n-max", cfg.n_max, "master-equation truncation override");
    sub->add_option("--dt", cfg.dt, "RK4 step override");
    sub->add_option("--traj", cfg.n_traj, "number of SSA trajectories");
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--format", cfg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out_path, "output path (default stdout)");
  };

  auto* solve_closed = app.add_subcommand("solve-closed", "closed-form distribution table");
  add_common(solve_closed, true);
  auto* solve_master = app.add_subcommand("solve-master", "master-equation oracle table");
  add_common(solve_master, true);
  auto* simulate = app.add_subcommand("simulate", "Gillespie SSA empirical table");
  add_common(simulate, true);
  auto* moments = app.add_subcommand("moments", "first three cumulants over time");
  add_common(moments, true);
  auto* compare = app.add_subcommand("compare", "closed form vs oracle sup-norm report");
  add_common(compare, true);
  auto* sweep = app.add_subcommand("sweep-ternary", "cumulants over the beta+gamma+tau=1 simplex");
  add_common(sweep, true);
  sweep->add_option("--step", cfg.sweep_step, "simplex grid step");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_closed->parsed()) return cmd_solve_closed(cfg);
    if (solve_master->parsed()) return cmd_solve_master(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (moments->parsed()) return cmd_moments(cfg);
    if (compare->parsed()) return cmd_compare(cfg);
    if (sweep->parsed()) return cmd_sweep_ternary(cfg);
  } catch (const cme::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const cme::NumericGuardError& e) {
    std::cerr << "numeric guard: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "unsolvable: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
