#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "output.hpp"
#include "stit/errors.hpp"
#include "stit/functionals.hpp"
#include "stit/harness.hpp"
#include "stit/measure.hpp"
#include "stit/mixing.hpp"
#include "stit/parallel.hpp"
#include "stit/random.hpp"
#include "stit/stats.hpp"
#include "stit/tessellation.hpp"
#include "stit/tessellation_io.hpp"

namespace stit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> replicates;
  std::optional<unsigned> threads;
  std::string out_dir;
  bool assert_checks = false;
};

struct Context {
  std::string command;
  RunConfig cfg;
  fs::path out_dir;
  bool assert_checks = false;
  std::ostream& out;
};

// Seed and replicate count are part of the plan even when they come from flags.
std::string plan_hash(const Context& c) {
  return fnv1a_hex(c.command + "|" + c.cfg.raw.dump() + "|seed=" + std::to_string(c.cfg.seed) +
                   "|replicates=" + std::to_string(c.cfg.replicates));
}

json summary_base(const Context& c) {
  return json{{"command", c.command},
              {"plan_hash", plan_hash(c)},
              {"seed", c.cfg.seed},
              {"replicates", c.cfg.replicates},
              {"t", c.cfg.t},
              {"dim", c.cfg.dim},
              {"measure", describe_measure(c.cfg.measure_json)}};
}

void save_summary(const Context& c, const json& summary) {
  save_text(c.out_dir / "summary.json", summary.dump(2) + "\n");
}

int verdict(const Context& c, bool pass) {
  if (c.assert_checks && !pass) {
    c.out << c.command << ": assertion failed\n";
    return kExitAssert;
  }
  return kExitOk;
}

ExperimentPlan make_plan(const Context& c, const ScanBlock& s) {
  ExperimentPlan plan;
  plan.measure = c.cfg.measure;
  plan.t = c.cfg.t;
  plan.functional = s.functional;
  plan.n_values = s.n_values;
  plan.replicates = c.cfg.replicates;
  plan.margin = s.margin;
  plan.seed = c.cfg.seed;
  plan.moments = s.moments;
  plan.bootstrap = s.bootstrap;
  plan.threads = c.cfg.threads;
  plan.validate();
  return plan;
}

std::vector<std::string> plan_header() {
  return {"seed", "t", "dim", "measure", "functional", "parameters", "replicates", "margin", "delta", "theta", "kappa"};
}

std::vector<std::string> plan_cells(const Context& c, const ScanBlock& s) {
  return {std::to_string(c.cfg.seed), real(c.cfg.t), integer(c.cfg.dim), describe_measure(c.cfg.measure_json),
          s.functional.name, s.functional.parameters(), integer(c.cfg.replicates), real(s.margin),
          real(s.moments.delta), real(s.moments.theta), real(s.moments.kappa)};
}

template <class... Parts>
std::vector<std::string> concat(std::vector<std::string> a, const Parts&... rest) {
  (a.insert(a.end(), rest.begin(), rest.end()), ...);
  return a;
}

int cmd_simulate(const Context& c) {
  SimulationConfig sim;
  sim.window = ConvexPolytope::box(c.cfg.simulate.window);
  sim.t = c.cfg.t;
  sim.measure = c.cfg.measure;
  sim.seed = c.cfg.seed;
  const Tessellation y = simulate(sim);

  std::ostringstream text;
  write_tessellation(text, y);
  save_text(c.out_dir / "tessellation.txt", text.str());
  json outputs = json::array({"tessellation.txt"});
  if (c.cfg.dim == 2 && c.cfg.simulate.svg) {
    std::ostringstream svg;
    write_svg(svg, y);
    save_text(c.out_dir / "tessellation.svg", svg.str());
    outputs.push_back("tessellation.svg");
  }

  double volume = 0.0;
  for (const auto& cell : y.cells) volume += cell.polytope.volume();
  const bool conserved = std::abs(volume - y.window.volume()) <= 1e-8 * y.window.volume();
  json s = summary_base(c);
  s["cells"] = y.cells.size();
  s["events"] = y.events.size();
  s["holding_rate"] = holding_rate(y);
  s["pass"] = {{"volume_conservation", conserved}};
  s["outputs"] = outputs;
  save_summary(c, s);
  c.out << "simulate: " << y.cells.size() << " cells, " << y.events.size() << " events\n";
  return verdict(c, conserved);
}

int cmd_functionals(const Context& c) {
  const auto& f = c.cfg.functionals;
  std::vector<CuboidRegion> regions = f.regions;
  std::optional<CuboidGrid> grid;
  if (f.grid_n) grid.emplace(c.cfg.dim, *f.grid_n);

  const auto reps = static_cast<std::size_t>(c.cfg.replicates);
  // rows[r] holds the cells of replicate r, so output order is fixed.
  std::vector<std::vector<std::vector<std::string>>> rows(reps);
  std::vector<std::vector<double>> totals(reps, std::vector<double>(f.functionals.size(), 0.0));
  std::vector<char> additive_ok(reps, 1);

  parallel_for(reps, c.cfg.threads, [&](std::size_t r) {
    SimulationConfig sim;
    sim.window = ConvexPolytope::box(f.window);
    sim.t = c.cfg.t;
    sim.measure = c.cfg.measure;
    sim.seed = derive_seed(c.cfg.seed, r);
    const Tessellation y = simulate(sim);
    for (std::size_t xi = 0; xi < f.functionals.size(); ++xi) {
      const auto& x = f.functionals[xi];
      auto emit = [&](const std::string& label, double v) {
        rows[r].push_back({std::to_string(c.cfg.seed), integer(static_cast<std::int64_t>(r)),
                           std::to_string(sim.seed), real(c.cfg.t), label, x.name, x.parameters(), real(v)});
      };
      for (const auto& v : regions) {
        const double value = evaluate(y, x, v);
        emit(region_label(v), value);
        totals[r][xi] += value;
      }
      if (grid) {
        const auto values = evaluate_on_grid(y, x, *grid);
        double sum = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
          emit(region_label(grid->cube(i)), values[i]);
          sum += values[i];
        }
        const double whole = evaluate(y, x, grid->region());
        emit("n=" + std::to_string(grid->n()), whole);
        totals[r][xi] += whole;
        const double scale = std::max({1.0, std::abs(whole), std::abs(sum)});
        if (x.kind == FunctionalKind::Additive && std::abs(whole - sum) > 1e-12 * scale) additive_ok[r] = 0;
        if (x.kind == FunctionalKind::Subadditive && whole > sum + 1e-12 * scale) additive_ok[r] = 0;
        if (x.kind == FunctionalKind::Superadditive && whole < sum - 1e-12 * scale) additive_ok[r] = 0;
      }
    }
  });

  CsvTable table({"seed", "replicate", "replicate_seed", "t", "region", "functional", "parameters", "value"});
  for (auto& per : rows)
    for (auto& row : per) table.row(std::move(row));
  table.save(c.out_dir / "functionals.csv");

  json means = json::object();
  for (std::size_t xi = 0; xi < f.functionals.size(); ++xi) {
    std::vector<double> v;
    for (const auto& t : totals) v.push_back(t[xi]);
    const auto& x = f.functionals[xi];
    means[x.name + (x.parameters().empty() ? "" : "(" + x.parameters() + ")")] = stats::mean(v);
  }
  const bool kinds_ok = std::all_of(additive_ok.begin(), additive_ok.end(), [](char b) { return b != 0; });
  json s = summary_base(c);
  s["mean_total"] = means;
  s["pass"] = {{"kind_on_grid", kinds_ok}};
  s["outputs"] = json::array({"functionals.csv"});
  save_summary(c, s);
  std::size_t count = 0;
  for (const auto& per : rows) count += per.size();
  c.out << "functionals: " << count << " rows\n";
  return verdict(c, kinds_ok);
}

int cmd_variance_scan(const Context& c) {
  const auto& sb = c.cfg.variance_scan;
  const ExperimentPlan plan = make_plan(c, sb);
  const ScanResult res = variance_scan(plan);

  CsvTable table(concat(plan_header(), std::vector<std::string>{"n", "mean", "variance", "ci_lo", "ci_hi", "boot_lo",
                                                                "boot_hi", "moment"}));
  json levels = json::array();
  for (const auto& l : res.levels) {
    table.row(concat(plan_cells(c, sb),
                     std::vector<std::string>{integer(l.n), real(l.mean), real(l.variance), real(l.normal_ci.lo),
                                              real(l.normal_ci.hi), real(l.bootstrap_ci.lo), real(l.bootstrap_ci.hi),
                                              real(l.moment)}));
    levels.push_back({{"n", l.n}, {"mean", l.mean}, {"variance", l.variance}, {"moment", l.moment}});
  }
  table.save(c.out_dir / "variance_scan.csv");

  CsvTable fit(concat(plan_header(), std::vector<std::string>{"slope", "slope_lo", "slope_hi", "bound_exponent",
                                                              "consistent_with_bound", "degenerate",
                                                              "unstable_moments"}));
  fit.row(concat(plan_cells(c, sb),
                 std::vector<std::string>{real(res.slope), real(res.slope_ci.lo), real(res.slope_ci.hi),
                                          real(res.bound_exponent), flag(res.consistent_with_bound),
                                          flag(res.degenerate), flag(res.unstable_moments)}));
  fit.save(c.out_dir / "variance_fit.csv");

  json s = summary_base(c);
  s["functional"] = sb.functional.name;
  s["levels"] = levels;
  s["slope"] = res.degenerate ? json(nullptr) : json(res.slope);
  s["slope_ci"] = res.degenerate ? json(nullptr) : json::array({res.slope_ci.lo, res.slope_ci.hi});
  s["bound_exponent"] = res.bound_exponent;
  s["degenerate"] = res.degenerate;
  s["unstable_moments"] = res.unstable_moments;
  s["pass"] = {{"consistent_with_bound", res.consistent_with_bound}};
  s["outputs"] = json::array({"variance_scan.csv", "variance_fit.csv"});
  save_summary(c, s);
  if (res.degenerate)
    c.out << "variance-scan: degenerate (zero variance), slope undefined\n";
  else
    c.out << "variance-scan: slope " << real(res.slope) << " (bound exponent " << real(res.bound_exponent) << ")\n";
  if (res.unstable_moments) c.out << "variance-scan: warning: unstable moments\n";
  return verdict(c, res.consistent_with_bound && !res.degenerate);
}

int cmd_ergodic_scan(const Context& c) {
  const auto& sb = c.cfg.ergodic_scan;
  const ExperimentPlan plan = make_plan(c, sb);
  const ErgodicTrace tr = ergodic_scan(plan);

  CsvTable table(concat(plan_header(), std::vector<std::string>{"n", "mean", "stddev", "l1_deviation", "gamma_hat"}));
  for (std::size_t i = 0; i < tr.n_values.size(); ++i)
    table.row(concat(plan_cells(c, sb),
                     std::vector<std::string>{integer(tr.n_values[i]), real(tr.means[i]), real(tr.stddevs[i]),
                                              real(tr.l1_deviations[i]), real(tr.gamma_hat)}));
  table.save(c.out_dir / "ergodic_scan.csv");

  CsvTable paths({"seed", "replicate", "n", "value"});
  for (std::size_t r = 0; r < tr.values.size(); ++r)
    for (std::size_t i = 0; i < tr.n_values.size(); ++i)
      paths.row({std::to_string(c.cfg.seed), integer(static_cast<std::int64_t>(r)), integer(tr.n_values[i]),
                 real(tr.values[r][i])});
  paths.save(c.out_dir / "ergodic_paths.csv");

  bool cauchy = true;
  if (tr.means.size() >= 3) {
    const std::size_t k = tr.means.size();
    cauchy = std::abs(tr.means[k - 1] - tr.means[k - 2]) < std::abs(tr.means[1] - tr.means[0]);
  }
  const bool nonnegative = !sb.functional.nonnegative() || tr.gamma_hat >= 0.0;
  json s = summary_base(c);
  s["functional"] = sb.functional.name;
  s["n_values"] = tr.n_values;
  s["means"] = tr.means;
  s["stddevs"] = tr.stddevs;
  s["l1_deviations"] = tr.l1_deviations;
  s["gamma_hat"] = tr.gamma_hat;
  s["pass"] = {{"successive_differences", cauchy}, {"gamma_nonnegative", nonnegative}};
  s["outputs"] = json::array({"ergodic_scan.csv", "ergodic_paths.csv"});
  save_summary(c, s);
  c.out << "ergodic-scan: gamma_hat " << real(tr.gamma_hat) << "\n";
  return verdict(c, cauchy && nonnegative);
}

int cmd_beta(const Context& c) {
  const auto& bb = c.cfg.beta;
  std::vector<BetaEstimate> estimates;
  for (std::size_t i = 0; i < bb.b_values.size(); ++i) {
    EmpiricalBetaConfig e;
    e.measure = c.cfg.measure;
    e.t = c.cfg.t;
    e.a = bb.a;
    e.b = bb.b_values[i];
    e.probes = bb.probes;
    e.replicates = c.cfg.replicates;
    e.seed = derive_seed(c.cfg.seed, i);
    e.mode = bb.mode;
    e.bootstrap = bb.bootstrap;
    e.window_margin = bb.window_margin;
    e.threads = c.cfg.threads;
    estimates.push_back(empirical_beta(e));
  }

  std::optional<DecayFit> fit;
  std::string fit_status = "not enough b values";
  if (estimates.size() >= 3) {
    try {
      fit = fit_decay(estimates);
      fit_status = fit->at_boundary ? "fitted (theta at the boundary)" : "fitted";
    } catch (const DegenerateFit&) {
      fit_status = "indistinguishable from zero";
    }
  }
  std::optional<double> trend;
  if (estimates.size() >= 2) {
    std::vector<double> bs, vs;
    for (const auto& e : estimates) {
      bs.push_back(e.b);
      vs.push_back(e.value);
    }
    trend = stats::spearman(bs, vs);
  }

  CsvTable table({"seed", "t", "measure", "mode", "a", "b", "m", "k", "N", "value", "raw", "plug_in", "stderr", "chi", "theta"});
  const char* mode = bb.mode == BetaMode::Standard ? "standard" : bb.mode == BetaMode::ShuffledOuter ? "shuffled" : "self-test";
  json rows = json::array();
  for (const auto& e : estimates) {
    table.row({std::to_string(c.cfg.seed), real(c.cfg.t), describe_measure(c.cfg.measure_json), mode, real(e.a),
               real(e.b), integer(e.m), integer(e.k), integer(e.n_samples), real(e.value), real(e.raw), real(e.plug_in), real(e.std_error),
               fit ? real(fit->chi) : "", fit ? real(fit->theta) : ""});
    rows.push_back({{"a", e.a}, {"b", e.b}, {"m", e.m}, {"k", e.k}, {"N", e.n_samples}, {"value", e.value},
                    {"raw", e.raw}, {"plug_in", e.plug_in}, {"stderr", e.std_error}});
  }
  table.save(c.out_dir / "beta.csv");

  bool drop = false;
  if (estimates.size() >= 2) {
    const auto& first = estimates.front();
    const auto& last = estimates.back();
    drop = first.value - last.value > 2.0 * std::hypot(first.std_error, last.std_error);
  }
  const bool zero = fit_status == "indistinguishable from zero";
  const bool decay = zero || (trend && *trend < 0.0 && drop && fit && fit->theta > 0.0 && fit->theta < 1.0);
  // The shuffled null must look independent; the self-test must see its own bit.
  bool null_ok = true, self_ok = true;
  for (const auto& e : estimates) {
    null_ok = null_ok && e.value <= 3.0 * e.std_error;
    self_ok = self_ok && e.value > 3.0 * e.std_error;
  }
  const bool pass = bb.mode == BetaMode::Standard ? decay : bb.mode == BetaMode::ShuffledOuter ? null_ok : self_ok;

  json s = summary_base(c);
  s["mode"] = mode;
  s["estimates"] = rows;
  s["fit_status"] = fit_status;
  s["chi"] = fit ? json(fit->chi) : json(nullptr);
  s["theta"] = fit ? json(fit->theta) : json(nullptr);
  s["spearman"] = trend ? json(*trend) : json(nullptr);
  s["pass"] = {{"decay", decay}, {"null_within_3se", null_ok}, {"self_test_detected", self_ok}, {"mode_check", pass}};
  s["outputs"] = json::array({"beta.csv"});
  save_summary(c, s);
  c.out << "beta: " << estimates.size() << " estimates, fit " << fit_status << "\n";
  return verdict(c, pass);
}

int cmd_check_assumptions(const Context& c) {
  const auto rep = check_assumptions(c.cfg.measure, c.cfg.assumptions.a, c.cfg.assumptions.b);
  CsvTable table({"measure", "a", "b", "r", "separator_mass"});
  for (std::size_t r = 0; r < rep.separator_masses.size(); ++r)
    table.row({describe_measure(c.cfg.measure_json), real(c.cfg.assumptions.a), real(c.cfg.assumptions.b),
               integer(static_cast<std::int64_t>(r + 1)), real(rep.separator_masses[r])});
  table.save(c.out_dir / "assumptions.csv");

  json s = summary_base(c);
  s["direction_rank"] = rep.direction_rank;
  s["separator_masses"] = rep.separator_masses;
  s["pass"] = {{"spanning_directions", rep.spans}, {"separators_positive", rep.separators_positive},
               {"all", rep.pass()}};
  s["outputs"] = json::array({"assumptions.csv"});
  save_summary(c, s);
  c.out << "check-assumptions: rank " << rep.direction_rank << ", " << (rep.pass() ? "pass" : "fail") << "\n";
  return verdict(c, rep.pass());
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("", "cannot read config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "JSON configuration file");
  sub->add_option("--seed", o.seed, "Base seed (overrides the config)");
  sub->add_option("--replicates", o.replicates, "Replicates per level (overrides the config)");
  sub->add_option("--out-dir", o.out_dir, "Directory for reports (default: out_dir of the config, else .)");
  sub->add_flag("--assert", o.assert_checks, "Exit with status 2 when the command's checks fail");
  sub->add_option("--threads", o.threads, "Worker threads, 0 for one per core (overrides the config)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"STIT tessellation simulator and mixing/variance/ergodic experiment harness", "stit"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::pair<std::string, std::function<int(const Context&)>>> commands = {
      {"simulate", cmd_simulate},
      {"functionals", cmd_functionals},
      {"variance-scan", cmd_variance_scan},
      {"ergodic-scan", cmd_ergodic_scan},
      {"beta", cmd_beta},
      {"check-assumptions", cmd_check_assumptions},
  };
  const std::vector<std::string> help = {
      "Simulate one tessellation and write it (plus an SVG in 2D)",
      "Evaluate functionals on regions or a unit-cube grid",
      "Variance of the normalized functional across growing windows",
      "Normalized functional along growing windows of the same realizations",
      "Empirical beta-mixing lower bounds and decay envelope",
      "Check the spanning and separation assumptions of the measure",
  };
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    subs.push_back(app.add_subcommand(commands[i].first, help[i]));
    add_common(subs.back(), o);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      RunConfig cfg = parse_config(o.config_path.empty() ? std::string() : read_file(o.config_path));
      if (o.seed) cfg.seed = *o.seed;
      if (o.replicates) {
        if (*o.replicates < 1) throw ConfigError("--replicates", "must be >= 1");
        cfg.replicates = *o.replicates;
      }
      if (o.threads) cfg.threads = *o.threads;
      const fs::path dir = !o.out_dir.empty() ? fs::path(o.out_dir) : !cfg.out_dir.empty() ? fs::path(cfg.out_dir) : fs::path(".");
      fs::create_directories(dir);
      Context ctx{commands[i].first, std::move(cfg), dir, o.assert_checks, out};
      return commands[i].second(ctx);
    } catch (const ConfigError& e) {
      err << "error: " << e.what() << "\n";
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << "\n";
    } catch (const fs::filesystem_error& e) {
      err << "error: " << e.what() << "\n";
    } catch (const std::runtime_error& e) {
      err << "error: " << e.what() << "\n";
    }
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace stit::cli
