#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stit/geometry.hpp"
#include "stit/measure.hpp"
#include "stit/tessellation.hpp"

namespace stit {

/// Joint law P(A_r ∩ B_s) of two finite partitions, stored row-major.
class JointPartitionDistribution {
public:
  /// Throws InvalidDistribution for negative or nonfinite entries, a wrong
  /// entry count, or a total differing from 1 by more than 1e-12.
  JointPartitionDistribution(std::size_t rows, std::size_t cols, std::vector<double> entries);
  /// Normalizes nonnegative counts.
  static JointPartitionDistribution from_counts(std::size_t rows, std::size_t cols, std::span<const double> counts);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t s) const { return p_[r * cols_ + s]; }
  std::span<const double> entries() const { return p_; }
  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;

  /// The joint law of the coarser partitions given by row and column labels.
  JointPartitionDistribution coarsened(std::span<const std::size_t> row_group,
                                       std::span<const std::size_t> col_group) const;

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> p_;
};

/// (1/2) sum_{r,s} |P(A_r ∩ B_s) - P(A_r) P(B_s)|.
double beta_exact(const JointPartitionDistribution& j);
/// max over sets C of atom pairs of |sum_C (J - row x col)|, the sum of the positive parts.
double beta_variational(const JointPartitionDistribution& j);

struct InequalityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double beta = 0.0;
  bool pass = false;
};

inline constexpr double kInequalitySlack = 1e-9;

/// sum |h_rs| |J_rs - row_r col_s| against
/// 2 max{ (E_J |h|^{1+δ})^{1/(1+δ)}, (E_{row x col} |h|^{1+δ})^{1/(1+δ)} } β^{δ/(1+δ)}.
/// `h` is row-major over atom pairs.
InequalityReport yoshihara_check(const JointPartitionDistribution& j, std::span<const double> h, double delta);

/// |Cov(X, Z)| against 2 ||X||_{2+δ} ||Z||_{2+δ} β(σ(X), σ(Z))^{δ/(2+δ)}, with X
/// a function of the row atom and Z of the column atom. β is taken on the
/// partitions generated by the values of X and Z.
InequalityReport covariance_bound_check(std::span<const double> x, std::span<const double> z,
                                        const JointPartitionDistribution& j, double delta);

/// Compact probe cuboids for the hit-or-miss patterns: `inner` inside
/// [-a,a]^dim, `outer` outside [-b,b]^dim.
struct ProbeLayout {
  std::vector<CuboidRegion> inner;
  std::vector<CuboidRegion> outer;
};

/// Inner probes: the two halves of [-a,a]^dim cut at x_1 = 0. Outer probes:
/// translates of [0,2a] x [-a,a]^(dim-1) starting at x_1 = b + gap and its
/// mirror image ending at x_1 = -b - gap.
ProbeLayout default_probes(int dim, double a, double b, double gap = 1e-3);

/// Throws InvalidProbes unless 0 < a < b, 1 <= m, k <= 4, inner probes lie in
/// [-a,a]^dim and outer probes are disjoint from [-b,b]^dim.
void validate_probes(const ProbeLayout& probes, double a, double b);

enum class BetaMode {
  Standard,
  /// Outer patterns permuted across replicates: a null with independence by construction.
  ShuffledOuter,
  /// m = k = 1 with the outer bit a copy of the inner bit.
  SelfTest,
};

struct BetaEstimate {
  double a = 0.0;
  double b = 0.0;
  /// Cross-fitted lower-bound estimate, clamped to [0, 1].
  double value = 0.0;
  /// The cross-fitted estimate before clamping; near zero it may be negative.
  double raw = 0.0;
  /// beta_exact of the empirical joint matrix, biased upward.
  double plug_in = 0.0;
  std::int64_t n_samples = 0;
  int m = 0;
  int k = 0;
  double std_error = 0.0;
};

/// Hit-or-miss patterns of one batch of replicates: bit i of inner[r] tells
/// whether the boundary of replicate r meets inner probe i.
struct ProbePatterns {
  int m = 0;
  int k = 0;
  std::vector<std::uint32_t> inner;
  std::vector<std::uint32_t> outer;
};

struct EmpiricalBetaConfig {
  HyperplaneMeasure measure{DirectionalDistribution::isotropic(2, 1.0)};
  double t = 1.0;
  double a = 0.5;
  double b = 1.0;
  ProbeLayout probes;  // empty: default_probes(dim, a, b)
  std::int64_t replicates = 5000;
  std::uint64_t seed = 0;
  BetaMode mode = BetaMode::Standard;
  int bootstrap = 200;
  /// Gap between the probes' bounding box and the simulation window.
  double window_margin = 0.1;
  unsigned threads = 1;
};

/// True iff some internal facet of y meets the closed cuboid.
bool boundary_hits(const Tessellation& y, const CuboidRegion& probe);

/// Simulates the replicates in the smallest box around the probes plus the
/// margin (the consistency property makes any containing window valid) and
/// records the patterns.
ProbePatterns sample_probe_patterns(const EmpiricalBetaConfig& cfg);

/// Permutes the outer patterns across replicates.
ProbePatterns shuffle_outer(ProbePatterns p, std::uint64_t seed);

/// The 2^m x 2^k empirical joint matrix of the patterns.
JointPartitionDistribution empirical_joint(const ProbePatterns& p);

/// Cross-fitted estimate of β from the patterns: the atom pairs where the
/// joint mass exceeds the product of the marginals are picked on one half of
/// the replicates and their excess is measured on the other half, averaged
/// over both directions. Also reports the plug-in beta_exact of the empirical
/// matrix and a bootstrap standard error of the cross-fitted value.
BetaEstimate beta_from_patterns(const ProbePatterns& p, double a, double b, int bootstrap, std::uint64_t seed);

/// Lower-bound estimate of β(a, b). Throws InsufficientSamples for fewer than
/// 100 replicates and InvalidProbes for a bad layout.
BetaEstimate empirical_beta(const EmpiricalBetaConfig& cfg);

/// Power-law envelope value_i <= chi * b_i^(-theta).
struct DecayFit {
  double chi = 0.0;
  double theta = 0.0;
  double slope = 0.0;  // unconstrained least-squares slope of log value on log b
  std::vector<double> residuals;
  /// theta was clamped to the edge of (0, 1).
  bool at_boundary = false;
};

/// Fits log value against log b by least squares, clamps the slope into
/// (-1, 0) and raises chi until every point lies on or below the envelope.
/// Throws DegenerateFit when every estimate is within one stderr of zero or
/// fewer than two are positive, std::invalid_argument for fewer than three
/// estimates or nonincreasing b.
DecayFit fit_decay(std::span<const BetaEstimate> estimates);

/// (δ, θ, κ) of the variance bound; 1 - ρ = θδ/(2+δ).
struct MomentParams {
  double delta = 2.0;
  double theta = 0.9;
  double kappa = 0.25;

  double one_minus_rho() const { return theta * delta / (2.0 + delta); }
  double rho() const { return 1.0 - one_minus_rho(); }
  /// Throws InvalidParams unless δ > 0, θ in (0,1), κ in (0, 1/2).
  void validate() const;
};

} // namespace stit
