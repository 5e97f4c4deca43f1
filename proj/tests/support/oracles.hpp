#pragma once

// Independent reference computations used by the unit tests. They avoid the
// library's own algorithms so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "stit/geometry.hpp"
#include "stit/tessellation.hpp"

namespace oracle {

/// Shoelace area of a 2D ring in any orientation.
inline double shoelace(const std::vector<stit::Vector>& ring) {
  double s = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const auto& p = ring[i];
    const auto& q = ring[(i + 1) % ring.size()];
    s += p[0] * q[1] - p[1] * q[0];
  }
  return std::abs(s) / 2.0;
}

/// Volume by midpoint counting on a regular lattice over the bounding box: the
/// fraction of lattice points of the bounding box satisfying every halfspace.
inline double lattice_volume(const stit::ConvexPolytope& p, int per_axis) {
  const int d = p.dim();
  stit::Vector lo = p.vertices()[0], hi = lo;
  for (const auto& v : p.vertices())
    for (int r = 0; r < d; ++r) {
      lo[r] = std::min(lo[r], v[r]);
      hi[r] = std::max(hi[r], v[r]);
    }
  double box = 1.0;
  for (int r = 0; r < d; ++r) box *= hi[r] - lo[r];
  std::int64_t inside = 0, total = 0;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  while (true) {
    stit::Vector x(d);
    for (int r = 0; r < d; ++r) x[r] = lo[r] + (hi[r] - lo[r]) * (idx[static_cast<std::size_t>(r)] + 0.5) / per_axis;
    bool in = true;
    for (const auto& h : p.halfspaces())
      if (h.signed_distance(x) > 0.0) {
        in = false;
        break;
      }
    inside += in;
    ++total;
    int r = d - 1;
    while (r >= 0 && ++idx[static_cast<std::size_t>(r)] == per_axis) idx[static_cast<std::size_t>(r--)] = 0;
    if (r < 0) break;
  }
  return box * static_cast<double>(inside) / static_cast<double>(total);
}

/// Every set partition of {0..n-1} as a block label per element
/// (restricted growth strings).
inline std::vector<std::vector<std::size_t>> set_partitions(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> a(n, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t blocks) {
    if (i == n) {
      out.push_back(a);
      return;
    }
    for (std::size_t b = 0; b <= blocks; ++b) {
      a[i] = b;
      rec(i + 1, std::max(blocks, b + 1));
    }
  };
  if (n == 0) return {{}};
  a[0] = 0;
  rec(1, 1);
  return out;
}

/// β of a row-major joint matrix as the supremum over coarsenings of
/// (1/2) sum |P(A∩B) - P(A)P(B)|, the coarsenings enumerated exhaustively.
inline double beta_coarsening_sup(std::size_t rows, std::size_t cols, const std::vector<double>& p) {
  const auto rp = set_partitions(rows);
  const auto cp = set_partitions(cols);
  double best = 0.0;
  for (const auto& rg : rp)
    for (const auto& cg : cp) {
      const std::size_t nr = *std::max_element(rg.begin(), rg.end()) + 1;
      const std::size_t nc = *std::max_element(cg.begin(), cg.end()) + 1;
      std::vector<double> q(nr * nc, 0.0), rs(nr, 0.0), cs(nc, 0.0);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t s = 0; s < cols; ++s) {
          const double v = p[r * cols + s];
          q[rg[r] * nc + cg[s]] += v;
          rs[rg[r]] += v;
          cs[cg[s]] += v;
        }
      double sum = 0.0;
      for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t s = 0; s < nc; ++s) sum += std::abs(q[r * nc + s] - rs[r] * cs[s]);
      best = std::max(best, 0.5 * sum);
    }
  return best;
}

/// max over all subsets C of atom pairs of |sum_C (J - r c)|, by enumeration.
inline double beta_subset_sup(std::size_t rows, std::size_t cols, const std::vector<double>& p) {
  std::vector<double> rs(rows, 0.0), cs(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t s = 0; s < cols; ++s) {
      rs[r] += p[r * cols + s];
      cs[s] += p[r * cols + s];
    }
  const std::size_t n = rows * cols;
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) sum += p[i] - rs[i / cols] * cs[i % cols];
    best = std::max(best, std::abs(sum));
  }
  return best;
}

/// Total length of the internal chords of a 2D tessellation inside the closed
/// box, by clipping segments parametrically (Liang-Barsky).
inline double chord_length_in_box(const stit::Tessellation& y, const stit::Vector& lo, const stit::Vector& hi) {
  double total = 0.0;
  for (const auto& ev : y.events) {
    const auto& a = ev.facet.points[0];
    const auto& b = ev.facet.points[1];
    double t0 = 0.0, t1 = 1.0;
    bool empty = false;
    for (int r = 0; r < 2 && !empty; ++r) {
      const double d = b[r] - a[r];
      if (d == 0.0) {
        if (a[r] < lo[r] || a[r] > hi[r]) empty = true;
        continue;
      }
      double u0 = (lo[r] - a[r]) / d, u1 = (hi[r] - a[r]) / d;
      if (u0 > u1) std::swap(u0, u1);
      t0 = std::max(t0, u0);
      t1 = std::min(t1, u1);
      if (t0 > t1) empty = true;
    }
    if (!empty) total += (t1 - t0) * stit::distance(a, b);
  }
  return total;
}

}  // namespace oracle
