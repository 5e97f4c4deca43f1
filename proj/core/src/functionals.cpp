#include "stit/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "stit/errors.hpp"

namespace stit {

namespace {

// Tolerance-aware point set: points closer than tol are the same point.
class PointIndex {
public:
  explicit PointIndex(double tol) : tol_(tol), cell_(tol * 1024.0) {}

  /// Index of an existing point within tol of x whose payload matches, or -1.
  template <class Match>
  long find(const Vector& x, Match&& match) const {
    const auto base = key_coords(x);
    long found = -1;
    for_neighbors(base, x.dim(), [&](const Key& k) {
      if (found >= 0) return;
      auto it = buckets_.find(k);
      if (it == buckets_.end()) return;
      for (long id : it->second)
        if (distance(points_[static_cast<std::size_t>(id)], x) <= tol_ && match(id)) {
          found = id;
          return;
        }
    });
    return found;
  }

  long insert(const Vector& x) {
    const long id = static_cast<long>(points_.size());
    points_.push_back(x);
    buckets_[key_coords(x)].push_back(id);
    return id;
  }

private:
  struct Key {
    long long c[3];
    bool operator==(const Key& o) const { return c[0] == o.c[0] && c[1] == o.c[1] && c[2] == o.c[2]; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = 1469598103934665603ULL;
      for (long long v : k.c) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ULL;
      return h;
    }
  };

  Key key_coords(const Vector& x) const {
    Key k{};
    for (int r = 0; r < x.dim(); ++r) k.c[r] = static_cast<long long>(std::floor(x[r] / cell_));
    return k;
  }

  template <class F>
  static void for_neighbors(const Key& base, int dim, F&& f) {
    const int dz = dim == 3 ? 1 : 0;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -dz; c <= dz; ++c) f(Key{{base.c[0] + a, base.c[1] + b, base.c[2] + c}});
  }

  double tol_;
  double cell_;
  std::vector<Vector> points_;
  std::unordered_map<Key, std::vector<long>, KeyHash> buckets_;
};

void require_covered(const Tessellation& y, const CuboidRegion& v) {
  if (v.dim() != y.dim()) throw std::invalid_argument("region and tessellation dimensions differ");
  const double tol = y.window.tolerance();
  const int dim = v.dim();
  for (int mask = 0; mask < (1 << dim); ++mask) {
    Vector corner(dim);
    for (int r = 0; r < dim; ++r) corner[r] = (mask >> r) & 1 ? v.upper[r] : v.lower[r];
    if (!y.window.contains_point(corner, tol)) throw RegionNotCovered("region is not inside the simulation window");
  }
}

double feature_value(const ConvexPolytope& p, CellFeature phi, int k) {
  switch (phi) {
    case CellFeature::Count: return 1.0;
    case CellFeature::Volume: return p.volume();
    case CellFeature::BoundaryMeasure: return p.boundary_measure();
    case CellFeature::Diameter: return p.diameter();
    case CellFeature::FaceCount: {
      const auto f = intrinsic_features(p);
      return static_cast<double>(f.k_face_counts.at(static_cast<std::size_t>(k)));
    }
  }
  return 0.0;
}

bool boxes_overlap(const ConvexPolytope& p, const CuboidRegion& v) {
  for (int r = 0; r < v.dim(); ++r) {
    const Vector e = Vector::axis(v.dim(), r);
    if (p.support(e) < v.lower[r] || -p.support(-e) > v.upper[r]) return false;
  }
  return true;
}

bool in_window_boundary(const ConvexPolytope& window, std::span<const Vector> pts, double tol) {
  for (const auto& h : window.halfspaces()) {
    bool all = true;
    for (const auto& p : pts)
      if (std::abs(h.signed_distance(p)) > tol) {
        all = false;
        break;
      }
    if (all) return true;
  }
  return false;
}

} // namespace

std::string_view to_string(FunctionalKind k) {
  switch (k) {
    case FunctionalKind::Additive: return "additive";
    case FunctionalKind::Subadditive: return "subadditive";
    case FunctionalKind::Superadditive: return "superadditive";
  }
  return "?";
}

std::string_view to_string(CellFeature f) {
  switch (f) {
    case CellFeature::Count: return "count";
    case CellFeature::Volume: return "volume";
    case CellFeature::BoundaryMeasure: return "boundary";
    case CellFeature::Diameter: return "diameter";
    case CellFeature::FaceCount: return "faces";
  }
  return "?";
}

CellFeature parse_cell_feature(std::string_view name) {
  for (auto f : {CellFeature::Count, CellFeature::Volume, CellFeature::BoundaryMeasure, CellFeature::Diameter,
                 CellFeature::FaceCount})
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown cell feature '" + std::string(name) + "'");
}

std::string FunctionalSpec::parameters() const {
  std::string out;
  if (name == "power") out = "alpha=" + std::to_string(alpha);
  if (name == "kface_reference_count") out = "k=" + std::to_string(k);
  if (name == "contained_cell_sum" || name == "visible_cell_sum") {
    out = "phi=" + std::string(to_string(phi));
    if (phi == CellFeature::FaceCount) out += ";k=" + std::to_string(k);
  }
  if (negated) out += out.empty() ? "negated" : ";negated";
  return out;
}

bool FunctionalSpec::nonnegative() const { return !negated; }

FunctionalSpec make_functional(std::string_view name, const FunctionalParams& p) {
  FunctionalSpec x;
  x.name = std::string(name);
  x.alpha = p.alpha;
  x.k = p.k;
  x.phi = p.phi;
  x.negated = p.negated;
  if (name == "zero" || name == "vertex_count" || name == "boundary_mass" || name == "segment_center_count") {
    x.kind = FunctionalKind::Additive;
  } else if (name == "kface_reference_count") {
    if (p.k < 0 || p.k > 2) throw std::invalid_argument("kface_reference_count: k must be in 0..dim-1");
    x.kind = FunctionalKind::Additive;
  } else if (name == "contained_cell_sum") {
    x.kind = FunctionalKind::Superadditive;
  } else if (name == "visible_cell_sum") {
    x.kind = p.phi == CellFeature::Volume ? FunctionalKind::Additive : FunctionalKind::Subadditive;
  } else if (name == "power") {
    if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw std::invalid_argument("power: alpha must lie in (0, 1)");
    x.kind = FunctionalKind::Subadditive;
  } else {
    throw std::invalid_argument("unknown functional '" + std::string(name) + "'");
  }
  if ((name == "contained_cell_sum" || name == "visible_cell_sum") && p.phi == CellFeature::FaceCount &&
      (p.k < 0 || p.k > 2))
    throw std::invalid_argument("face count: k must be in 0..dim-1");
  if (x.negated && x.kind == FunctionalKind::Subadditive)
    x.kind = FunctionalKind::Superadditive;
  else if (x.negated && x.kind == FunctionalKind::Superadditive)
    x.kind = FunctionalKind::Subadditive;
  return x;
}

std::int64_t vertex_count(const Tessellation& y, const CuboidRegion& v) {
  require_covered(y, v);
  const double tol = y.window.tolerance();
  PointIndex seen(tol);
  std::int64_t count = 0;
  for (const auto& ev : y.events)
    for (const auto& p : ev.facet.points) {
      if (y.window.on_boundary(p, tol)) continue;
      if (seen.find(p, [](long) { return true; }) >= 0) continue;
      seen.insert(p);
      if (v.contains(p)) ++count;
    }
  return count;
}

double boundary_mass(const Tessellation& y, const CuboidRegion& v) {
  require_covered(y, v);
  const auto hs = v.closed_halfspaces();
  double total = 0.0;
  for (const auto& ev : y.events) total += face_measure(clip_face(ev.facet, hs));
  return total;
}

SegmentCenterCounts segment_center_counts(const Tessellation& y, const CuboidRegion& v) {
  if (y.dim() != 2) throw std::invalid_argument("segment_center_count is defined for dimension 2 only");
  require_covered(y, v);
  SegmentCenterCounts out;
  for (const auto& ev : y.events) {
    if (ev.facet.points.size() != 2) continue;
    const Vector mid = (ev.facet.points[0] + ev.facet.points[1]) * 0.5;
    if (!v.contains(mid)) continue;
    (ev.censored ? out.censored : out.inside) += 1;
  }
  return out;
}

std::int64_t segment_center_count(const Tessellation& y, const CuboidRegion& v) {
  return segment_center_counts(y, v).inside;
}

std::int64_t kface_reference_count(const Tessellation& y, const CuboidRegion& v, int k) {
  if (k < 0 || k >= y.dim()) throw std::invalid_argument("kface_reference_count: k must be in 0..dim-1");
  require_covered(y, v);
  const double tol = y.window.tolerance();
  PointIndex refs(tol);
  std::vector<std::vector<Vector>> faces;  // by index in refs
  std::int64_t count = 0;

  auto consider = [&](std::vector<Vector> pts) {
    if (in_window_boundary(y.window, pts, tol)) return;
    const Vector ref = circumcenter(pts);
    const auto same = [&](long id) {
      const auto& other = faces[static_cast<std::size_t>(id)];
      if (other.size() != pts.size()) return false;
      return std::all_of(pts.begin(), pts.end(), [&](const Vector& p) {
        return std::any_of(other.begin(), other.end(), [&](const Vector& q) { return distance(p, q) <= tol; });
      });
    };
    if (refs.find(ref, same) >= 0) return;
    refs.insert(ref);
    faces.push_back(std::move(pts));
    if (v.contains(ref)) ++count;
  };

  for (const auto& c : y.cells) {
    const auto verts = c.polytope.vertices();
    if (k == 0) {
      for (const auto& p : verts) consider({p});
    } else if (k == 1) {
      for (const auto& [a, b] : c.polytope.edges())
        consider({verts[static_cast<std::size_t>(a)], verts[static_cast<std::size_t>(b)]});
    } else {
      for (auto& f : c.polytope.facet_faces()) consider(std::move(f.points));
    }
  }
  return count;
}

double contained_cell_sum(const Tessellation& y, const CuboidRegion& v, CellFeature phi, int k) {
  require_covered(y, v);
  double total = 0.0;
  for (const auto& c : y.cells)
    if (contained_in(c.polytope, v)) total += feature_value(c.polytope, phi, k);
  return total;
}

double visible_cell_sum(const Tessellation& y, const CuboidRegion& v, CellFeature phi, int k) {
  require_covered(y, v);
  double total = 0.0;
  for (const auto& c : y.cells) {
    if (!boxes_overlap(c.polytope, v)) continue;
    const auto clipped = c.polytope.intersected(v);
    if (!clipped) continue;
    const double floor = kDegenerateVolumeFraction * std::min(c.polytope.volume(), v.volume());
    if (!(clipped->volume() > floor)) continue;
    total += feature_value(*clipped, phi, k);
  }
  return total;
}

double power_functional(const Tessellation& y, const CuboidRegion& v, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("power: alpha must lie in (0, 1)");
  return std::pow(boundary_mass(y, v), alpha);
}

double evaluate(const Tessellation& y, const FunctionalSpec& x, const CuboidRegion& v) {
  double value = 0.0;
  if (x.name == "zero") {
    require_covered(y, v);
  } else if (x.name == "vertex_count") {
    value = static_cast<double>(vertex_count(y, v));
  } else if (x.name == "boundary_mass") {
    value = boundary_mass(y, v);
  } else if (x.name == "segment_center_count") {
    value = static_cast<double>(segment_center_count(y, v));
  } else if (x.name == "kface_reference_count") {
    value = static_cast<double>(kface_reference_count(y, v, x.k));
  } else if (x.name == "contained_cell_sum") {
    value = contained_cell_sum(y, v, x.phi, x.k);
  } else if (x.name == "visible_cell_sum") {
    value = visible_cell_sum(y, v, x.phi, x.k);
  } else if (x.name == "power") {
    value = power_functional(y, v, x.alpha);
  } else {
    throw std::invalid_argument("unknown functional '" + x.name + "'");
  }
  return x.negated ? -value : value;
}

CuboidGrid::CuboidGrid(int dim, int n) : dim_(dim), n_(n), size_(1) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("CuboidGrid: dimension must be 2 or 3");
  if (n < 1) throw std::invalid_argument("CuboidGrid: n must be >= 1");
  for (int r = 0; r < dim; ++r) size_ *= static_cast<std::size_t>(2 * n);
}

std::vector<int> CuboidGrid::corner(std::size_t index) const {
  std::vector<int> i(static_cast<std::size_t>(dim_));
  const auto side = static_cast<std::size_t>(2 * n_);
  for (int r = dim_ - 1; r >= 0; --r) {
    i[static_cast<std::size_t>(r)] = static_cast<int>(index % side) - n_;
    index /= side;
  }
  return i;
}

CuboidRegion CuboidGrid::cube(std::size_t index) const {
  const auto i = corner(index);
  Vector lo(dim_), hi(dim_);
  for (int r = 0; r < dim_; ++r) {
    lo[r] = i[static_cast<std::size_t>(r)];
    hi[r] = i[static_cast<std::size_t>(r)] + 1;
  }
  return {lo, hi};
}

int CuboidGrid::distance(std::size_t a, std::size_t b) const {
  const auto i = corner(a), j = corner(b);
  int d = 0;
  for (std::size_t r = 0; r < i.size(); ++r) d = std::max(d, std::abs(i[r] - j[r]));
  return d;
}

std::int64_t CuboidGrid::shell_size(int dim, int k) {
  if (k < 0) return 0;
  if (k == 0) return 1;
  auto ipow = [](std::int64_t b, int e) {
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
  };
  return ipow(2 * k + 1, dim) - ipow(2 * k - 1, dim);
}

std::vector<double> evaluate_on_grid(const Tessellation& y, const FunctionalSpec& x, const CuboidGrid& grid) {
  if (grid.dim() != y.dim()) throw std::invalid_argument("evaluate_on_grid: dimension mismatch");
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = evaluate(y, x, grid.cube(i));
  return out;
}

double additivity_defect(const Tessellation& y, const FunctionalSpec& x, const CuboidRegion& whole,
                         std::span<const CuboidRegion> parts) {
  double sum = 0.0;
  for (const auto& p : parts) sum += evaluate(y, x, p);
  return evaluate(y, x, whole) - sum;
}

std::vector<CuboidRegion> partition_cuboid(const CuboidRegion& whole, const std::vector<std::vector<double>>& cuts) {
  const int dim = whole.dim();
  if (static_cast<int>(cuts.size()) != dim) throw std::invalid_argument("partition_cuboid: one cut list per axis");
  std::vector<std::vector<double>> edges(static_cast<std::size_t>(dim));
  for (int r = 0; r < dim; ++r) {
    auto& e = edges[static_cast<std::size_t>(r)];
    e.push_back(whole.lower[r]);
    for (double c : cuts[static_cast<std::size_t>(r)]) {
      if (!(c > whole.lower[r] && c < whole.upper[r])) throw std::invalid_argument("partition_cuboid: cut outside the cuboid");
      e.push_back(c);
    }
    e.push_back(whole.upper[r]);
    std::sort(e.begin(), e.end());
    if (std::adjacent_find(e.begin(), e.end()) != e.end()) throw std::invalid_argument("partition_cuboid: repeated cut");
  }
  std::vector<CuboidRegion> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  for (;;) {
    Vector lo(dim), hi(dim);
    for (int r = 0; r < dim; ++r) {
      const auto& e = edges[static_cast<std::size_t>(r)];
      lo[r] = e[idx[static_cast<std::size_t>(r)]];
      hi[r] = e[idx[static_cast<std::size_t>(r)] + 1];
    }
    out.emplace_back(lo, hi);
    int r = dim - 1;
    while (r >= 0 && ++idx[static_cast<std::size_t>(r)] + 1 >= edges[static_cast<std::size_t>(r)].size()) {
      idx[static_cast<std::size_t>(r)] = 0;
      --r;
    }
    if (r < 0) break;
  }
  return out;
}

} // namespace stit
