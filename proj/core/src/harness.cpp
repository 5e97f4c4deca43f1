#include "stit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "stit/errors.hpp"
#include "stit/parallel.hpp"
#include "stit/random.hpp"

namespace stit {

namespace {

bool needs_margin(const FunctionalSpec& x) {
  return x.name == "vertex_count" || x.name == "segment_center_count" || x.name == "kface_reference_count";
}

double normalizer(int dim, int n) { return std::pow(2.0 * n, dim); }

std::uint64_t replicate_seed(const ExperimentPlan& plan, int n, std::size_t r) {
  return derive_seed(plan.seed, static_cast<std::uint64_t>(n), r);
}

Tessellation simulate_level(const ExperimentPlan& plan, int n, std::size_t r) {
  SimulationConfig cfg;
  cfg.window = simulation_window(plan.dim(), n, plan.margin);
  cfg.t = plan.t;
  cfg.measure = plan.measure;
  cfg.seed = replicate_seed(plan, n, r);
  return simulate(cfg);
}

LevelStats summarize(const ExperimentPlan& plan, int n, std::vector<double> values) {
  LevelStats s;
  s.n = n;
  s.values = std::move(values);
  s.mean = stats::mean(s.values);
  s.variance = stats::variance(s.values);
  s.normal_ci = stats::normal_ci(s.values);
  s.bootstrap_ci = stats::bootstrap_ci(
      s.values, [](std::span<const double> v) { return stats::mean(v); }, plan.bootstrap,
      derive_seed(plan.seed, static_cast<std::uint64_t>(n), 1u << 30));
  s.moment = stats::abs_moment(s.values, 2.0 + plan.moments.delta);
  return s;
}

// Share of the (2+δ)-moment sum carried by the largest 1% of terms.
bool moment_dominated(std::span<const double> values, double p) {
  std::vector<double> terms;
  for (double v : values) terms.push_back(std::pow(std::abs(v), p));
  const double total = std::accumulate(terms.begin(), terms.end(), 0.0);
  if (!(total > 0.0)) return false;
  std::sort(terms.rbegin(), terms.rend());
  const std::size_t top = std::max<std::size_t>(1, terms.size() / 100);
  const double head = std::accumulate(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(top), 0.0);
  return head > 0.5 * total && terms.size() >= 20;
}

double log_log_slope(std::span<const int> n_values, std::span<const double> variances) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    lx.push_back(std::log(static_cast<double>(n_values[i])));
    ly.push_back(std::log(variances[i]));
  }
  return stats::ols(lx, ly).slope;
}

} // namespace

void ExperimentPlan::validate() const {
  if (replicates < 2) throw InvalidConfig("plan: at least 2 replicates per level are needed");
  if (n_values.empty()) throw InvalidConfig("plan: n_values is empty");
  for (int n : n_values)
    if (n < 1) throw InvalidConfig("plan: every n must be >= 1");
  if (!(margin >= 0.0) || !std::isfinite(margin)) throw InvalidConfig("plan: margin must be >= 0");
  if (needs_margin(functional) && !(margin > 0.0))
    throw InvalidConfig("plan: " + functional.name + " needs a positive window margin");
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidConfig("plan: t must be positive");
  if (bootstrap < 0) throw InvalidConfig("plan: bootstrap count must be >= 0");
  try {
    moments.validate();
  } catch (const InvalidParams& e) {
    throw InvalidConfig(std::string("plan: ") + e.what());
  }
}

double default_margin(const FunctionalSpec& x) { return needs_margin(x) ? 1.0 : 0.0; }

CuboidRegion measured_region(int dim, int n) { return CuboidRegion::cube(dim, -n, n); }

ConvexPolytope simulation_window(int dim, int n, double margin) {
  return ConvexPolytope::box(Vector::filled(dim, -n - margin), Vector::filled(dim, n + margin));
}

LevelStats estimate_density(const ExperimentPlan& plan, int n) {
  plan.validate();
  const auto count = static_cast<std::size_t>(plan.replicates);
  const CuboidRegion region = measured_region(plan.dim(), n);
  const double norm = normalizer(plan.dim(), n);
  std::vector<double> values(count);
  parallel_for(count, plan.threads, [&](std::size_t r) {
    values[r] = evaluate(simulate_level(plan, n, r), plan.functional, region) / norm;
  });
  return summarize(plan, n, std::move(values));
}

ScanResult variance_scan(const ExperimentPlan& plan) {
  plan.validate();
  ScanResult out;
  for (int n : plan.n_values) out.levels.push_back(estimate_density(plan, n));

  out.bound_exponent = -plan.moments.one_minus_rho();
  std::vector<double> variances;
  bool zero_variance = false;
  for (const auto& l : out.levels) {
    variances.push_back(l.variance);
    // Rounding noise of a constant functional counts as zero variance.
    const double noise = 1e-12 * std::max(1.0, std::abs(l.mean));
    zero_variance = zero_variance || !(l.variance > noise * noise);
    out.unstable_moments = out.unstable_moments || moment_dominated(l.values, 2.0 + plan.moments.delta);
  }
  out.degenerate = plan.n_values.size() < 2 || zero_variance;
  if (out.degenerate) {
    out.slope = std::numeric_limits<double>::quiet_NaN();
    out.slope_ci = {out.slope, out.slope};
    return out;
  }
  out.slope = log_log_slope(plan.n_values, variances);

  RandomStream rng(derive_seed(plan.seed, 0, 1u << 31));
  std::vector<double> slopes;
  std::vector<double> buf;
  for (int b = 0; b < plan.bootstrap; ++b) {
    std::vector<double> v;
    for (const auto& l : out.levels) {
      buf.resize(l.values.size());
      for (auto& x : buf) x = l.values[rng.below(l.values.size())];
      v.push_back(stats::variance(buf));
    }
    if (std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; }))
      slopes.push_back(log_log_slope(plan.n_values, v));
  }
  if (slopes.empty()) {
    out.slope_ci = {out.slope, out.slope};
  } else {
    out.slope_ci = {std::min(out.slope, stats::quantile(slopes, 0.025)),
                    std::max(out.slope, stats::quantile(slopes, 0.975))};
  }
  out.consistent_with_bound = out.slope <= out.bound_exponent;
  return out;
}

double variance_upper_bound(const MomentParams& params, int dim, double n, double var_x1, double moment, double chi) {
  params.validate();
  if (dim < 1) throw InvalidParams("dimension must be >= 1");
  if (!(n >= 1.0) || !std::isfinite(n)) throw InvalidParams("n must be >= 1");
  if (!(var_x1 >= 0.0) || !(moment >= 0.0)) throw InvalidParams("variance and moment must be nonnegative");
  if (!(chi > 0.0) || !std::isfinite(chi)) throw InvalidParams("chi must be positive");
  const double l = dim;
  const double first = std::pow(3.0, l) / std::pow(2.0 * n, l) * var_x1;
  const double second = std::pow(2.0, l) * std::pow(moment, 2.0 / (2.0 + params.delta)) * chi *
                        std::pow(2.0 * n - params.kappa, -params.one_minus_rho());
  return first + second;
}

ShellAudit shell_covariance_audit(std::span<const Tessellation> tessellations, const FunctionalSpec& x,
                                  const CuboidGrid& grid, int max_shell, int bootstrap, std::uint64_t seed) {
  if (tessellations.size() < 3) throw InsufficientSamples("shell audit: at least 3 tessellations are needed");
  if (max_shell < 1) throw std::invalid_argument("shell audit: max_shell must be >= 1");
  const std::size_t reps = tessellations.size(), cubes = grid.size();
  std::vector<std::vector<double>> v;  // v[r][i]
  for (const auto& y : tessellations) v.push_back(evaluate_on_grid(y, x, grid));

  std::vector<double> means(cubes, 0.0);
  for (std::size_t i = 0; i < cubes; ++i) {
    for (std::size_t r = 0; r < reps; ++r) means[i] += v[r][i];
    means[i] /= static_cast<double>(reps);
  }

  ShellAudit out;
  out.shells.resize(static_cast<std::size_t>(max_shell) + 1);
  for (int k = 0; k <= max_shell; ++k) {
    out.shells[static_cast<std::size_t>(k)].k = k;
    out.shells[static_cast<std::size_t>(k)].shell_size = CuboidGrid::shell_size(grid.dim(), k);
  }
  std::vector<double> insignificant(out.shells.size(), 0.0);
  std::vector<double> products(reps);
  for (std::size_t i = 0; i < cubes; ++i)
    for (std::size_t j = i; j < cubes; ++j) {
      const int k = grid.distance(i, j);
      if (k > max_shell) continue;
      for (std::size_t r = 0; r < reps; ++r) products[r] = (v[r][i] - means[i]) * (v[r][j] - means[j]);
      const double cov = stats::mean(products) * static_cast<double>(reps) / static_cast<double>(reps - 1);
      const double se = stats::stddev(products) / std::sqrt(static_cast<double>(reps));
      auto& s = out.shells[static_cast<std::size_t>(k)];
      s.pairs += 1;
      s.mean_abs_cov += std::abs(cov);
      if (std::abs(cov) < 2.0 * se) insignificant[static_cast<std::size_t>(k)] += 1.0;
      if (i == j) out.cube_variances.push_back(cov);
    }
  for (std::size_t k = 0; k < out.shells.size(); ++k) {
    auto& s = out.shells[k];
    if (s.pairs > 0) {
      s.mean_abs_cov /= static_cast<double>(s.pairs);
      s.insignificant_fraction = insignificant[k] / static_cast<double>(s.pairs);
    }
  }

  std::vector<double> ks, covs;
  for (const auto& s : out.shells)
    if (s.k >= 1 && s.pairs > 0) {
      ks.push_back(s.k);
      covs.push_back(s.mean_abs_cov);
    }
  if (ks.size() >= 2) {
    out.trend = stats::spearman(ks, covs);
    out.decaying = out.trend < 0.0;
  }

  const double pooled = stats::mean(out.cube_variances);
  std::size_t stationary = 0;
  std::vector<double> column(reps);
  for (std::size_t i = 0; i < cubes; ++i) {
    for (std::size_t r = 0; r < reps; ++r) column[r] = v[r][i];
    const auto ci = stats::bootstrap_ci(
        column, [](std::span<const double> c) { return stats::variance(c); }, bootstrap, derive_seed(seed, i));
    if (ci.contains(pooled)) ++stationary;
  }
  out.stationary_fraction = static_cast<double>(stationary) / static_cast<double>(cubes);
  return out;
}

ErgodicTrace ergodic_scan(const ExperimentPlan& plan) {
  plan.validate();
  ErgodicTrace out;
  out.n_values = plan.n_values;
  std::sort(out.n_values.begin(), out.n_values.end());
  const int n_max = out.n_values.back();
  const auto count = static_cast<std::size_t>(plan.replicates);
  out.values.assign(count, std::vector<double>(out.n_values.size(), 0.0));
  parallel_for(count, plan.threads, [&](std::size_t r) {
    const Tessellation y = simulate_level(plan, n_max, r);
    for (std::size_t i = 0; i < out.n_values.size(); ++i) {
      const int n = out.n_values[i];
      out.values[r][i] = evaluate(y, plan.functional, measured_region(plan.dim(), n)) / normalizer(plan.dim(), n);
    }
  });
  for (std::size_t i = 0; i < out.n_values.size(); ++i) {
    std::vector<double> column(count);
    for (std::size_t r = 0; r < count; ++r) column[r] = out.values[r][i];
    out.means.push_back(stats::mean(column));
    out.stddevs.push_back(stats::stddev(column));
  }
  out.gamma_hat = out.means.back();
  for (std::size_t i = 0; i < out.n_values.size(); ++i) {
    double dev = 0.0;
    for (std::size_t r = 0; r < count; ++r) dev += std::abs(out.values[r][i] - out.gamma_hat);
    out.l1_deviations.push_back(dev / static_cast<double>(count));
  }
  return out;
}

ConsistencyReport consistency_test(const HyperplaneMeasure& measure, double t, const CuboidRegion& w,
                                   const CuboidRegion& w_sub, std::int64_t n, std::uint64_t seed,
                                   std::optional<double> t_direct, unsigned threads) {
  if (n < 2) throw InvalidConfig("consistency test: at least 2 replicates are needed");
  for (int r = 0; r < w.dim(); ++r)
    if (w_sub.lower[r] < w.lower[r] || w_sub.upper[r] > w.upper[r])
      throw WindowNotContained("consistency test: W' is not inside W");
  const auto count = static_cast<std::size_t>(n);
  ConsistencyReport out;
  out.restricted.resize(count);
  out.direct.resize(count);
  parallel_for(count, threads, [&](std::size_t i) {
    SimulationConfig big{ConvexPolytope::box(w), t, measure, derive_seed(seed, i, 0)};
    out.restricted[i] = boundary_mass(simulate(big), w_sub);
    SimulationConfig small{ConvexPolytope::box(w_sub), t_direct.value_or(t), measure, derive_seed(seed, i, 1)};
    out.direct[i] = boundary_mass(simulate(small), w_sub);
  });
  out.ks = stats::ks_two_sample(out.restricted, out.direct);
  return out;
}

} // namespace stit
