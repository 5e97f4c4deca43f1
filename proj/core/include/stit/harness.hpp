#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stit/functionals.hpp"
#include "stit/measure.hpp"
#include "stit/mixing.hpp"
#include "stit/stats.hpp"
#include "stit/tessellation.hpp"

namespace stit {

/// A Monte Carlo experiment: X is measured on [-n,n[^dim inside the window
/// [-n-margin, n+margin]^dim for every n in n_values, with `replicates`
/// independent tessellations per level.
struct ExperimentPlan {
  HyperplaneMeasure measure{DirectionalDistribution::isotropic(2, 1.0)};
  double t = 1.0;
  FunctionalSpec functional = make_functional("boundary_mass");
  std::vector<int> n_values{1, 2, 4, 8};
  std::int64_t replicates = 100;
  double margin = 0.0;
  std::uint64_t seed = 0;
  MomentParams moments;
  int bootstrap = 200;
  unsigned threads = 1;

  int dim() const { return measure.dim(); }
  /// Throws InvalidConfig on N < 2, empty or nonpositive n values, negative
  /// margin, or margin 0 for functionals that see window-boundary artifacts.
  void validate() const;
};

/// Margin 1 for vertex, segment and face functionals, 0 otherwise.
double default_margin(const FunctionalSpec& x);

CuboidRegion measured_region(int dim, int n);
ConvexPolytope simulation_window(int dim, int n, double margin);

struct LevelStats {
  int n = 0;
  std::vector<double> values;  // (2n)^-dim X per replicate
  double mean = 0.0;
  double variance = 0.0;
  stats::Interval normal_ci;
  stats::Interval bootstrap_ci;
  /// E|(2n)^-dim X|^(2+δ)
  double moment = 0.0;
};

/// Normalized X on independent replicates at one level.
LevelStats estimate_density(const ExperimentPlan& plan, int n);

struct ScanResult {
  std::vector<LevelStats> levels;
  double slope = 0.0;  // NaN when degenerate
  stats::Interval slope_ci;
  /// Some level has zero variance, so the log-log slope is undefined.
  bool degenerate = false;
  /// The (2+δ)-moment estimate is dominated by a few replicates.
  bool unstable_moments = false;
  /// -θδ/(2+δ)
  double bound_exponent = 0.0;
  bool consistent_with_bound = false;
};

/// Per-level variances of (2n)^-dim X and the log-log slope of variance on n
/// with a bootstrap interval.
ScanResult variance_scan(const ExperimentPlan& plan);

/// 3^l/(2n)^l VarX1 + 2^l moment^(2/(2+δ)) chi (2n-κ)^-(1-ρ). Throws
/// InvalidParams for invalid moment parameters, negative inputs, chi <= 0 or n < 1.
double variance_upper_bound(const MomentParams& params, int dim, double n, double var_x1, double moment, double chi);

struct ShellStats {
  int k = 0;
  std::int64_t shell_size = 0;  // neighbors of a cube at distance k
  std::int64_t pairs = 0;       // pairs of grid cubes at distance k
  double mean_abs_cov = 0.0;
  /// Fraction of pairs whose |Cov| is below 2 standard errors.
  double insignificant_fraction = 0.0;
};

struct ShellAudit {
  std::vector<ShellStats> shells;  // k = 0 is the diagonal
  /// Spearman correlation of mean |Cov| with k over k >= 1.
  double trend = 0.0;
  bool decaying = false;
  /// Fraction of cubes whose variance interval contains the pooled variance.
  double stationary_fraction = 0.0;
  std::vector<double> cube_variances;
};

/// Covariances of X between grid cubes, grouped by maximum-metric distance.
ShellAudit shell_covariance_audit(std::span<const Tessellation> tessellations, const FunctionalSpec& x,
                                  const CuboidGrid& grid, int max_shell, int bootstrap = 200, std::uint64_t seed = 0);

struct ErgodicTrace {
  std::vector<int> n_values;
  /// values[r][i] = (2n_i)^-dim X on replicate r.
  std::vector<std::vector<double>> values;
  std::vector<double> means;
  std::vector<double> stddevs;
  double gamma_hat = 0.0;
  /// E|(2n)^-dim X - gamma_hat| per n.
  std::vector<double> l1_deviations;
};

/// One tessellation per replicate in the largest window; X is evaluated on
/// every [-n,n[^dim of the same realization, tracing its path in n.
ErgodicTrace ergodic_scan(const ExperimentPlan& plan);

struct ConsistencyReport {
  stats::TestResult ks;
  std::vector<double> restricted;  // boundary_mass on W' from simulations in W
  std::vector<double> direct;      // boundary_mass of simulations in W'
};

/// Two-sample KS test between boundary_mass on W' of W-simulations and of
/// W'-simulations. `t_direct` replaces t for the direct runs (negative control).
ConsistencyReport consistency_test(const HyperplaneMeasure& measure, double t, const CuboidRegion& w,
                                   const CuboidRegion& w_sub, std::int64_t n, std::uint64_t seed,
                                   std::optional<double> t_direct = std::nullopt, unsigned threads = 1);

} // namespace stit
