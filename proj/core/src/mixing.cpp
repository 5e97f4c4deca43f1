#include "stit/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "stit/errors.hpp"
#include "stit/parallel.hpp"
#include "stit/random.hpp"
#include "stit/stats.hpp"

namespace stit {

JointPartitionDistribution::JointPartitionDistribution(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), p_(std::move(entries)) {
  if (rows == 0 || cols == 0) throw InvalidDistribution("joint distribution needs at least one row and column");
  if (p_.size() != rows * cols) throw InvalidDistribution("joint distribution has the wrong number of entries");
  double total = 0.0;
  for (double v : p_) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidDistribution("joint distribution entries must be finite and nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidDistribution("joint distribution entries must sum to 1");
}

JointPartitionDistribution JointPartitionDistribution::from_counts(std::size_t rows, std::size_t cols,
                                                                   std::span<const double> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (!(total > 0.0)) throw InvalidDistribution("counts must have a positive total");
  std::vector<double> p(counts.begin(), counts.end());
  for (double& v : p) v /= total;
  // Renormalize the rounding residue into the largest entry.
  const double residue = 1.0 - std::accumulate(p.begin(), p.end(), 0.0);
  *std::max_element(p.begin(), p.end()) += residue;
  return {rows, cols, std::move(p)};
}

std::vector<double> JointPartitionDistribution::row_sums() const {
  std::vector<double> r(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j);
  return r;
}

std::vector<double> JointPartitionDistribution::col_sums() const {
  std::vector<double> c(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) c[j] += (*this)(i, j);
  return c;
}

JointPartitionDistribution JointPartitionDistribution::coarsened(std::span<const std::size_t> row_group,
                                                                 std::span<const std::size_t> col_group) const {
  if (row_group.size() != rows_ || col_group.size() != cols_)
    throw std::invalid_argument("coarsened: one label per row and per column");
  const std::size_t nr = *std::max_element(row_group.begin(), row_group.end()) + 1;
  const std::size_t nc = *std::max_element(col_group.begin(), col_group.end()) + 1;
  std::vector<double> q(nr * nc, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) q[row_group[i] * nc + col_group[j]] += (*this)(i, j);
  const double total = std::accumulate(q.begin(), q.end(), 0.0);
  *std::max_element(q.begin(), q.end()) += 1.0 - total;
  return {nr, nc, std::move(q)};
}

namespace {

std::vector<double> deviations(const JointPartitionDistribution& j) {
  const auto r = j.row_sums();
  const auto c = j.col_sums();
  std::vector<double> d(j.rows() * j.cols());
  for (std::size_t a = 0; a < j.rows(); ++a)
    for (std::size_t b = 0; b < j.cols(); ++b) d[a * j.cols() + b] = j(a, b) - r[a] * c[b];
  return d;
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Labels grouping equal values, in order of first appearance.
std::vector<std::size_t> value_groups(std::span<const double> v) {
  std::map<double, std::size_t> ids;
  std::vector<std::size_t> g;
  for (double x : v) g.push_back(ids.emplace(x, ids.size()).first->second);
  return g;
}

} // namespace

double beta_exact(const JointPartitionDistribution& j) {
  double s = 0.0;
  for (double d : deviations(j)) s += std::abs(d);
  return clamp01(0.5 * s);
}

double beta_variational(const JointPartitionDistribution& j) {
  double s = 0.0;
  for (double d : deviations(j)) s += std::max(d, 0.0);
  return clamp01(s);
}

InequalityReport yoshihara_check(const JointPartitionDistribution& j, std::span<const double> h, double delta) {
  if (h.size() != j.rows() * j.cols()) throw std::invalid_argument("yoshihara_check: h needs one value per atom pair");
  if (!(delta > 0.0)) throw std::invalid_argument("yoshihara_check: delta must be positive");
  const auto r = j.row_sums();
  const auto c = j.col_sums();
  const double q = 1.0 + delta;
  double lhs = 0.0, joint = 0.0, product = 0.0;
  for (std::size_t a = 0; a < j.rows(); ++a)
    for (std::size_t b = 0; b < j.cols(); ++b) {
      const double hv = std::abs(h[a * j.cols() + b]);
      const double pj = j(a, b), pp = r[a] * c[b];
      lhs += hv * std::abs(pj - pp);
      joint += std::pow(hv, q) * pj;
      product += std::pow(hv, q) * pp;
    }
  InequalityReport rep;
  rep.beta = beta_exact(j);
  rep.lhs = lhs;
  rep.rhs = 2.0 * std::max(std::pow(joint, 1.0 / q), std::pow(product, 1.0 / q)) * std::pow(rep.beta, delta / q);
  rep.pass = rep.lhs <= rep.rhs + kInequalitySlack;
  return rep;
}

InequalityReport covariance_bound_check(std::span<const double> x, std::span<const double> z,
                                        const JointPartitionDistribution& j, double delta) {
  if (x.size() != j.rows() || z.size() != j.cols())
    throw std::invalid_argument("covariance_bound_check: one value of X per row and of Z per column");
  if (!(delta > 0.0)) throw std::invalid_argument("covariance_bound_check: delta must be positive");
  const auto r = j.row_sums();
  const auto c = j.col_sums();
  const double q = 2.0 + delta;
  double ex = 0.0, ez = 0.0, exz = 0.0, mx = 0.0, mz = 0.0;
  for (std::size_t a = 0; a < j.rows(); ++a) {
    ex += x[a] * r[a];
    mx += std::pow(std::abs(x[a]), q) * r[a];
  }
  for (std::size_t b = 0; b < j.cols(); ++b) {
    ez += z[b] * c[b];
    mz += std::pow(std::abs(z[b]), q) * c[b];
  }
  for (std::size_t a = 0; a < j.rows(); ++a)
    for (std::size_t b = 0; b < j.cols(); ++b) exz += x[a] * z[b] * j(a, b);

  InequalityReport rep;
  rep.beta = beta_exact(j.coarsened(value_groups(x), value_groups(z)));
  rep.lhs = std::abs(exz - ex * ez);
  rep.rhs = 2.0 * std::pow(mx, 1.0 / q) * std::pow(mz, 1.0 / q) * std::pow(rep.beta, delta / q);
  rep.pass = rep.lhs <= rep.rhs + kInequalitySlack;
  return rep;
}

ProbeLayout default_probes(int dim, double a, double b, double gap) {
  if (dim != 2 && dim != 3) throw InvalidProbes("probes: dimension must be 2 or 3");
  if (!(a > 0.0 && b > a)) throw InvalidProbes("probes: need 0 < a < b");
  ProbeLayout p;
  Vector lo = Vector::filled(dim, -a), hi = Vector::filled(dim, a);
  Vector mid_hi = hi, mid_lo = lo;
  mid_hi[0] = 0.0;
  mid_lo[0] = 0.0;
  p.inner.emplace_back(lo, mid_hi);
  p.inner.emplace_back(mid_lo, hi);
  Vector olo = lo, ohi = hi;
  olo[0] = b + gap;
  ohi[0] = b + gap + 2.0 * a;
  p.outer.emplace_back(olo, ohi);
  Vector mlo = lo, mhi = hi;
  mlo[0] = -(b + gap + 2.0 * a);
  mhi[0] = -(b + gap);
  p.outer.emplace_back(mlo, mhi);
  return p;
}

void validate_probes(const ProbeLayout& probes, double a, double b) {
  if (!(a > 0.0 && b > a)) throw InvalidProbes("probes: need 0 < a < b");
  const auto m = probes.inner.size(), k = probes.outer.size();
  if (m < 1 || m > 4 || k < 1 || k > 4) throw InvalidProbes("probes: need 1 to 4 inner and 1 to 4 outer probes");
  const int dim = probes.inner.front().dim();
  for (const auto* family : {&probes.inner, &probes.outer})
    for (const auto& c : *family)
      if (c.dim() != dim) throw InvalidProbes("probes: mixed dimensions");
  for (std::size_t i = 0; i < m; ++i)
    for (int r = 0; r < dim; ++r)
      if (probes.inner[i].lower[r] < -a || probes.inner[i].upper[r] > a)
        throw InvalidProbes("probes: inner probe " + std::to_string(i) + " leaves [-a,a]^dim");
  for (std::size_t i = 0; i < k; ++i) {
    bool separated = false;
    for (int r = 0; r < dim; ++r)
      separated = separated || probes.outer[i].lower[r] > b || probes.outer[i].upper[r] < -b;
    if (!separated) throw InvalidProbes("probes: outer probe " + std::to_string(i) + " meets [-b,b]^dim");
  }
}

bool boundary_hits(const Tessellation& y, const CuboidRegion& probe) {
  const auto hs = probe.closed_halfspaces();
  for (const auto& ev : y.events)
    if (!clip_face(ev.facet, hs).empty()) return true;
  return false;
}

namespace {

ProbeLayout effective_probes(const EmpiricalBetaConfig& cfg) {
  ProbeLayout p = cfg.probes.inner.empty() && cfg.probes.outer.empty()
                      ? default_probes(cfg.measure.dim(), cfg.a, cfg.b)
                      : cfg.probes;
  if (cfg.mode == BetaMode::SelfTest) {
    if (p.inner.empty()) throw InvalidProbes("probes: self-test needs an inner probe");
    p.inner.resize(1);
    p.outer = p.inner;
    if (!(cfg.a > 0.0 && cfg.b > cfg.a)) throw InvalidProbes("probes: need 0 < a < b");
    return p;
  }
  validate_probes(p, cfg.a, cfg.b);
  if (p.inner.front().dim() != cfg.measure.dim()) throw InvalidProbes("probes: dimension differs from the measure");
  return p;
}

CuboidRegion bounding_box(const ProbeLayout& p, double margin) {
  Vector lo = p.inner.front().lower, hi = p.inner.front().upper;
  for (const auto* family : {&p.inner, &p.outer})
    for (const auto& c : *family)
      for (int r = 0; r < lo.dim(); ++r) {
        lo[r] = std::min(lo[r], c.lower[r]);
        hi[r] = std::max(hi[r], c.upper[r]);
      }
  for (int r = 0; r < lo.dim(); ++r) {
    lo[r] -= margin;
    hi[r] += margin;
  }
  return {lo, hi};
}

std::uint32_t pattern(const Tessellation& y, const std::vector<CuboidRegion>& probes) {
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < probes.size(); ++i)
    if (boundary_hits(y, probes[i])) bits |= 1u << i;
  return bits;
}

} // namespace

ProbePatterns sample_probe_patterns(const EmpiricalBetaConfig& cfg) {
  if (cfg.replicates < 100) throw InsufficientSamples("empirical_beta: at least 100 replicates are needed");
  if (!(cfg.window_margin > 0.0)) throw InvalidProbes("empirical_beta: window margin must be positive");
  const ProbeLayout probes = effective_probes(cfg);
  const auto n = static_cast<std::size_t>(cfg.replicates);

  SimulationConfig sim;
  sim.window = ConvexPolytope::box(bounding_box(probes, cfg.window_margin));
  sim.t = cfg.t;
  sim.measure = cfg.measure;

  ProbePatterns out;
  out.m = static_cast<int>(probes.inner.size());
  out.k = static_cast<int>(probes.outer.size());
  out.inner.resize(n);
  out.outer.resize(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    SimulationConfig c = sim;
    c.seed = derive_seed(cfg.seed, i);
    const Tessellation y = simulate(c);
    out.inner[i] = pattern(y, probes.inner);
    out.outer[i] = cfg.mode == BetaMode::SelfTest ? out.inner[i] : pattern(y, probes.outer);
  });
  if (cfg.mode == BetaMode::ShuffledOuter) out = shuffle_outer(std::move(out), derive_seed(cfg.seed, n, 1));
  return out;
}

ProbePatterns shuffle_outer(ProbePatterns p, std::uint64_t seed) {
  RandomStream rng(seed);
  for (std::size_t i = p.outer.size(); i > 1; --i) std::swap(p.outer[i - 1], p.outer[rng.below(i)]);
  return p;
}

namespace {

std::vector<double> pattern_counts(const ProbePatterns& p, std::span<const std::size_t> idx) {
  const std::size_t cols = std::size_t{1} << p.k;
  std::vector<double> counts((std::size_t{1} << p.m) * cols, 0.0);
  for (std::size_t i : idx) counts[p.inner[i] * cols + p.outer[i]] += 1.0;
  return counts;
}

// J - row x col of a count matrix, normalized.
std::vector<double> dependence(std::span<const double> counts, std::size_t rows, std::size_t cols) {
  double n = 0.0;
  for (double c : counts) n += c;
  std::vector<double> r(rows, 0.0), c(cols, 0.0), d(counts.size(), 0.0);
  if (n == 0.0) return d;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      r[i] += counts[i * cols + j] / n;
      c[j] += counts[i * cols + j] / n;
    }
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) d[i * cols + j] = counts[i * cols + j] / n - r[i] * c[j];
  return d;
}

// The set of atom pairs with positive dependence is chosen on one half of the
// sample and its dependence mass is measured on the other half, then the
// halves swap. For a fixed set this mass is at most β, so the estimate does
// not inherit the upward bias of the plug-in supremum.
double cross_fit_beta(const ProbePatterns& p, std::span<const std::size_t> idx) {
  const auto rows = std::size_t{1} << p.m, cols = std::size_t{1} << p.k;
  const std::size_t half = idx.size() / 2;
  const auto d1 = dependence(pattern_counts(p, idx.first(half)), rows, cols);
  const auto d2 = dependence(pattern_counts(p, idx.subspan(half)), rows, cols);
  double v = 0.0;
  for (std::size_t i = 0; i < d1.size(); ++i) {
    if (d1[i] > 0.0) v += d2[i];
    if (d2[i] > 0.0) v += d1[i];
  }
  return 0.5 * v;
}

} // namespace

JointPartitionDistribution empirical_joint(const ProbePatterns& p) {
  if (p.inner.empty() || p.inner.size() != p.outer.size()) throw InsufficientSamples("empirical_joint: no patterns");
  std::vector<std::size_t> all(p.inner.size());
  std::iota(all.begin(), all.end(), 0);
  return JointPartitionDistribution::from_counts(std::size_t{1} << p.m, std::size_t{1} << p.k, pattern_counts(p, all));
}

BetaEstimate beta_from_patterns(const ProbePatterns& p, double a, double b, int bootstrap, std::uint64_t seed) {
  BetaEstimate e;
  e.a = a;
  e.b = b;
  e.m = p.m;
  e.k = p.k;
  e.n_samples = static_cast<std::int64_t>(p.inner.size());
  e.plug_in = beta_exact(empirical_joint(p));
  std::vector<std::size_t> all(p.inner.size());
  std::iota(all.begin(), all.end(), 0);
  e.raw = cross_fit_beta(p, all);
  e.value = std::clamp(e.raw, 0.0, 1.0);
  if (bootstrap > 1) {
    const auto reps = stats::bootstrap_replicates(
        p.inner.size(), [&](std::span<const std::size_t> idx) { return cross_fit_beta(p, idx); }, bootstrap, seed);
    e.std_error = stats::stddev(reps);
  }
  return e;
}

BetaEstimate empirical_beta(const EmpiricalBetaConfig& cfg) {
  const auto patterns = sample_probe_patterns(cfg);
  return beta_from_patterns(patterns, cfg.a, cfg.b, cfg.bootstrap,
                            derive_seed(cfg.seed, static_cast<std::uint64_t>(cfg.replicates), 2));
}

DecayFit fit_decay(std::span<const BetaEstimate> estimates) {
  if (estimates.size() < 3) throw std::invalid_argument("fit_decay: at least three estimates are needed");
  for (std::size_t i = 1; i < estimates.size(); ++i)
    if (!(estimates[i].b > estimates[i - 1].b)) throw std::invalid_argument("fit_decay: b must be increasing");
  const bool all_zero = std::all_of(estimates.begin(), estimates.end(),
                                    [](const BetaEstimate& e) { return e.value <= e.std_error; });
  if (all_zero) throw DegenerateFit("fit_decay: every estimate is indistinguishable from zero");

  std::vector<double> lx, ly;
  for (const auto& e : estimates)
    if (e.value > 0.0) {
      lx.push_back(std::log(e.b));
      ly.push_back(std::log(e.value));
    }
  if (lx.size() < 2) throw DegenerateFit("fit_decay: fewer than two positive estimates");

  constexpr double kEdge = 1e-6;
  DecayFit fit;
  fit.slope = stats::ols(lx, ly).slope;
  fit.theta = std::clamp(-fit.slope, kEdge, 1.0 - kEdge);
  fit.at_boundary = fit.theta != -fit.slope;
  double log_chi = -INFINITY;
  for (std::size_t i = 0; i < lx.size(); ++i) log_chi = std::max(log_chi, ly[i] + fit.theta * lx[i]);
  fit.chi = std::exp(log_chi);
  for (const auto& e : estimates) fit.residuals.push_back(e.value - fit.chi * std::pow(e.b, -fit.theta));
  return fit;
}

void MomentParams::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidParams("delta must be positive");
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidParams("theta must lie in (0, 1)");
  if (!(kappa > 0.0 && kappa < 0.5)) throw InvalidParams("kappa must lie in (0, 1/2)");
}

} // namespace stit
