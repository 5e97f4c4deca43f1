#include "stit/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "stit/errors.hpp"

namespace stit {

namespace {

enum class Side { In, On, Out };

Side classify(double s, double tol) {
  if (s < -tol) return Side::In;
  if (s > tol) return Side::Out;
  return Side::On;
}

// Crossing point of segment (a, b) with the zero set of the affine function
// whose values at a and b are sa and sb. Arguments are put in a canonical
// order first so that clipping with h and with its flip gives identical bits.
Vector crossing(const Vector& a, double sa, const Vector& b, double sb, bool swap) {
  if (swap) return crossing(b, sb, a, sa, false);
  return a + (b - a) * (sa / (sa - sb));
}

double polygon_area(std::span<const Vector> ring) {
  if (ring.size() < 3) return 0.0;
  Vector acc(3);
  const Vector& o = ring[0];
  for (std::size_t i = 1; i + 1 < ring.size(); ++i) acc += cross(ring[i] - o, ring[i + 1] - o);
  return 0.5 * norm(acc);
}

double max_pairwise_distance(std::span<const Vector> pts) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Vector d = pts[i] - pts[j];
      d2 = std::max(d2, dot(d, d));
    }
  return std::sqrt(d2);
}

// Two unit vectors spanning the plane orthogonal to the unit vector n.
std::pair<Vector, Vector> plane_basis(const Vector& n) {
  Vector helper = std::abs(n[0]) < 0.9 ? Vector(1.0, 0.0, 0.0) : Vector(0.0, 1.0, 0.0);
  Vector e1 = normalized(cross(n, helper));
  Vector e2 = cross(n, e1);
  return {e1, e2};
}

} // namespace

Hyperplane::Hyperplane(const Vector& normal, double offset) {
  const double len = norm(normal);
  if (!(len > 0.0) || !std::isfinite(len) || !std::isfinite(offset))
    throw std::invalid_argument("Hyperplane: normal must be finite and nonzero");
  normal_ = normal * (1.0 / len);
  offset_ = offset / len;
  if (!in_canonical_hemisphere(normal_)) {
    normal_ = -normal_;
    offset_ = -offset_;
  }
}

Face Face::translated(const Vector& a) const {
  Face out;
  out.points.reserve(points.size());
  for (const auto& p : points) out.points.push_back(p + a);
  return out;
}

double face_measure(const Face& f) {
  if (f.points.size() < 2) return 0.0;
  if (f.points.size() == 2) return distance(f.points[0], f.points[1]);
  return polygon_area(f.points);
}

Face clip_face(const Face& f, std::span<const Halfspace> halfspaces) {
  if (f.points.empty()) return {};
  if (f.points.size() == 1) {
    for (const auto& h : halfspaces)
      if (h.signed_distance(f.points[0]) > 0.0) return {};
    return f;
  }
  if (f.points.size() == 2) {
    const Vector& p0 = f.points[0];
    const Vector& p1 = f.points[1];
    double t0 = 0.0, t1 = 1.0;
    for (const auto& h : halfspaces) {
      const double s0 = h.signed_distance(p0);
      const double s1 = h.signed_distance(p1);
      if (s0 > 0.0 && s1 > 0.0) return {};
      if (s0 <= 0.0 && s1 <= 0.0) continue;
      const double t = s0 / (s0 - s1);
      if (s0 > 0.0)
        t0 = std::max(t0, t);
      else
        t1 = std::min(t1, t);
      if (t0 > t1) return {};
    }
    Face out;
    out.points = {p0 + (p1 - p0) * t0, p0 + (p1 - p0) * t1};
    return out;
  }

  std::vector<Vector> ring = f.points;
  std::vector<Vector> next;
  for (const auto& h : halfspaces) {
    if (ring.empty()) break;
    next.clear();
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vector& a = ring[i];
      const Vector& b = ring[(i + 1) % n];
      const double sa = h.signed_distance(a);
      const double sb = h.signed_distance(b);
      if (sa <= 0.0) next.push_back(a);
      if ((sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0)) next.push_back(a + (b - a) * (sa / (sa - sb)));
    }
    ring.swap(next);
  }
  return Face{std::move(ring)};
}

CuboidRegion::CuboidRegion(const Vector& lo, const Vector& hi) : lower(lo), upper(hi) {
  if (lo.dim() != hi.dim()) throw std::invalid_argument("CuboidRegion: dimension mismatch");
  for (int r = 0; r < lo.dim(); ++r)
    if (!(lo[r] < hi[r])) throw std::invalid_argument("CuboidRegion: requires lower < upper");
}

CuboidRegion CuboidRegion::cube(int dim, double lo, double hi) {
  return {Vector::filled(dim, lo), Vector::filled(dim, hi)};
}

bool CuboidRegion::contains(const Vector& x) const {
  for (int r = 0; r < dim(); ++r)
    if (!(lower[r] <= x[r] && x[r] < upper[r])) return false;
  return true;
}

double CuboidRegion::volume() const {
  double v = 1.0;
  for (int r = 0; r < dim(); ++r) v *= upper[r] - lower[r];
  return v;
}

std::vector<Halfspace> CuboidRegion::closed_halfspaces() const {
  std::vector<Halfspace> hs;
  hs.reserve(static_cast<std::size_t>(2 * dim()));
  for (int r = 0; r < dim(); ++r) {
    hs.push_back({Vector::axis(dim(), r), upper[r]});
    hs.push_back({-Vector::axis(dim(), r), -lower[r]});
  }
  return hs;
}

ConvexPolytope ConvexPolytope::box(const Vector& lower, const Vector& upper) {
  const CuboidRegion region(lower, upper);  // validates
  ConvexPolytope p;
  p.dim_ = lower.dim();
  p.halfspaces_ = region.closed_halfspaces();
  if (p.dim_ == 2) {
    p.vertices_ = {{lower[0], lower[1]}, {upper[0], lower[1]}, {upper[0], upper[1]}, {lower[0], upper[1]}};
  } else {
    for (int i = 0; i < 8; ++i)
      p.vertices_.emplace_back((i & 1) ? upper[0] : lower[0], (i & 2) ? upper[1] : lower[1],
                               (i & 4) ? upper[2] : lower[2]);
    const int rings[6][4] = {{1, 3, 7, 5}, {0, 4, 6, 2}, {2, 6, 7, 3}, {0, 1, 5, 4}, {4, 5, 7, 6}, {0, 2, 3, 1}};
    for (int f = 0; f < 6; ++f)
      p.facets3_.push_back({p.halfspaces_[static_cast<std::size_t>(f)],
                            std::vector<int>(rings[f], rings[f] + 4)});
  }
  p.finalize();
  return p;
}

ConvexPolytope ConvexPolytope::polygon(std::span<const Vector> ring) {
  if (ring.size() < 3) throw std::invalid_argument("polygon: needs at least 3 vertices");
  ConvexPolytope p;
  p.dim_ = 2;
  p.vertices_.assign(ring.begin(), ring.end());
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vector& a = ring[i];
    const Vector& b = ring[(i + 1) % n];
    const Vector nrm = normalized(Vector(b[1] - a[1], a[0] - b[0]));
    p.halfspaces_.push_back({nrm, dot(nrm, a)});
  }
  p.finalize();
  if (!(p.volume_ > 0.0)) throw std::invalid_argument("polygon: ring must be counter-clockwise with positive area");
  for (const auto& v : ring)
    if (!p.contains_point(v, p.tolerance())) throw std::invalid_argument("polygon: ring is not convex");
  return p;
}

void ConvexPolytope::finalize() {
  diameter_ = max_pairwise_distance(vertices_);
  // Volumes are accumulated in extended precision around the vertex centroid:
  // slim cells cancel almost all of the signed terms, and the children of a
  // split share their cut vertices bit for bit, so the sums stay conservative.
  using ext = long double;
  const Vector c = vertex_centroid();
  if (dim_ == 2) {
    ext area2 = 0.0L;
    double perim = 0.0;
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vector& a = vertices_[i];
      const Vector& b = vertices_[(i + 1) % n];
      const ext ax = ext(a[0]) - c[0], ay = ext(a[1]) - c[1];
      const ext bx = ext(b[0]) - c[0], by = ext(b[1]) - c[1];
      area2 += ax * by - ay * bx;
      perim += distance(a, b);
    }
    volume_ = static_cast<double>(area2 / 2);
    boundary_ = perim;
    return;
  }
  ext vol6 = 0.0L;
  double area = 0.0;
  std::vector<Vector> pts;
  for (const auto& f : facets3_) {
    pts.clear();
    for (int i : f.ring) pts.push_back(vertices_[static_cast<std::size_t>(i)]);
    area += polygon_area(pts);
    // Fan of tetrahedra with apex c; each signed by the outward facet normal.
    const auto rel = [&](const Vector& v) {
      return std::array<ext, 3>{ext(v[0]) - c[0], ext(v[1]) - c[1], ext(v[2]) - c[2]};
    };
    const auto o = rel(pts[0]);
    ext facet = 0.0L;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      const auto p = rel(pts[i]), q = rel(pts[i + 1]);
      facet += o[0] * (p[1] * q[2] - p[2] * q[1]) - o[1] * (p[0] * q[2] - p[2] * q[0]) +
               o[2] * (p[0] * q[1] - p[1] * q[0]);
    }
    vol6 += std::abs(facet);
  }
  volume_ = static_cast<double>(vol6 / 6);
  boundary_ = area;
}

Vector ConvexPolytope::vertex_centroid() const {
  Vector c(dim_);
  for (const auto& v : vertices_) c += v;
  return c * (1.0 / static_cast<double>(vertices_.size()));
}

std::vector<ConvexPolytope::Facet> ConvexPolytope::facets() const {
  if (dim_ == 3) return facets3_;
  std::vector<Facet> out;
  const int n = static_cast<int>(vertices_.size());
  for (int i = 0; i < n; ++i) {
    const Vector& a = vertices_[static_cast<std::size_t>(i)];
    const Vector& b = vertices_[static_cast<std::size_t>((i + 1) % n)];
    const Vector nrm = normalized(Vector(b[1] - a[1], a[0] - b[0]));
    out.push_back({{nrm, dot(nrm, a)}, {i, (i + 1) % n}});
  }
  return out;
}

std::vector<std::pair<int, int>> ConvexPolytope::edges() const {
  std::vector<std::pair<int, int>> out;
  if (dim_ == 2) {
    const int n = static_cast<int>(vertices_.size());
    for (int i = 0; i < n; ++i) out.emplace_back(i, (i + 1) % n);
    return out;
  }
  for (const auto& f : facets3_) {
    const std::size_t n = f.ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      int a = f.ring[i], b = f.ring[(i + 1) % n];
      if (a > b) std::swap(a, b);
      out.emplace_back(a, b);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Face> ConvexPolytope::facet_faces() const {
  std::vector<Face> out;
  for (const auto& f : facets()) {
    Face face;
    for (int i : f.ring) face.points.push_back(vertices_[static_cast<std::size_t>(i)]);
    out.push_back(std::move(face));
  }
  return out;
}

double ConvexPolytope::support(const Vector& u) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : vertices_) best = std::max(best, dot(v, u));
  return best;
}

ConvexPolytope::ClipResult ConvexPolytope::clip(const Halfspace& h) const {
  const double tol = tolerance();
  const std::size_t nv = vertices_.size();
  std::vector<double> s(nv);
  std::vector<Side> side(nv);
  bool any_in = false, any_out = false;
  for (std::size_t i = 0; i < nv; ++i) {
    s[i] = h.signed_distance(vertices_[i]);
    side[i] = classify(s[i], tol);
    any_in |= side[i] == Side::In;
    any_out |= side[i] == Side::Out;
  }

  ClipResult result;
  if (!any_out || !any_in) {
    for (std::size_t i = 0; i < nv; ++i)
      if (side[i] == Side::On) result.cap.points.push_back(vertices_[i]);
    if (!any_out) {
      ConvexPolytope copy = *this;
      copy.halfspaces_.push_back(h);
      result.polytope = std::move(copy);
    }
    return result;
  }

  ConvexPolytope out;
  out.dim_ = dim_;
  out.halfspaces_ = halfspaces_;
  out.halfspaces_.push_back(h);

  if (dim_ == 2) {
    for (std::size_t i = 0; i < nv; ++i) {
      const std::size_t j = (i + 1) % nv;
      if (side[i] != Side::Out) {
        out.vertices_.push_back(vertices_[i]);
        if (side[i] == Side::On) result.cap.points.push_back(vertices_[i]);
      }
      if ((side[i] == Side::In && side[j] == Side::Out) || (side[i] == Side::Out && side[j] == Side::In)) {
        const Vector p = crossing(vertices_[i], s[i], vertices_[j], s[j], j < i);
        out.vertices_.push_back(p);
        result.cap.points.push_back(p);
      }
    }
    if (out.vertices_.size() < 3) return result;
    out.finalize();
    if (out.volume_ > 0.0) result.polytope = std::move(out);
    return result;
  }

  std::vector<int> remap(nv, -1);
  for (std::size_t i = 0; i < nv; ++i) {
    if (side[i] != Side::Out) {
      remap[i] = static_cast<int>(out.vertices_.size());
      out.vertices_.push_back(vertices_[i]);
      if (side[i] == Side::On) result.cap.points.push_back(vertices_[i]);
    }
  }
  std::map<std::pair<int, int>, int> edge_points;
  auto edge_point = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    auto [it, inserted] = edge_points.try_emplace({a, b}, -1);
    if (inserted) {
      const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
      it->second = static_cast<int>(out.vertices_.size());
      out.vertices_.push_back(crossing(vertices_[ua], s[ua], vertices_[ub], s[ub], false));
      result.cap.points.push_back(out.vertices_.back());
    }
    return it->second;
  };

  for (const auto& f : facets3_) {
    std::vector<int> ring;
    const std::size_t n = f.ring.size();
    for (std::size_t k = 0; k < n; ++k) {
      const int a = f.ring[k], b = f.ring[(k + 1) % n];
      const Side sa = side[static_cast<std::size_t>(a)], sb = side[static_cast<std::size_t>(b)];
      if (sa != Side::Out) ring.push_back(remap[static_cast<std::size_t>(a)]);
      if ((sa == Side::In && sb == Side::Out) || (sa == Side::Out && sb == Side::In)) ring.push_back(edge_point(a, b));
    }
    if (ring.size() >= 3) out.facets3_.push_back({f.plane, std::move(ring)});
  }

  // Cap polygon: order the cap vertices by angle around their centroid.
  std::vector<int> cap_ids;
  for (std::size_t i = 0; i < nv; ++i)
    if (side[i] == Side::On) cap_ids.push_back(remap[i]);
  for (const auto& [key, id] : edge_points) cap_ids.push_back(id);
  if (cap_ids.size() < 3) return result;
  Vector c(3);
  for (int id : cap_ids) c += out.vertices_[static_cast<std::size_t>(id)];
  c *= 1.0 / static_cast<double>(cap_ids.size());
  const auto [e1, e2] = plane_basis(h.normal);
  std::vector<std::pair<double, int>> angles;
  for (int id : cap_ids) {
    const Vector d = out.vertices_[static_cast<std::size_t>(id)] - c;
    angles.emplace_back(std::atan2(dot(d, e2), dot(d, e1)), id);
  }
  std::sort(angles.begin(), angles.end());
  std::vector<int> cap_ring;
  result.cap.points.clear();
  for (const auto& [ang, id] : angles) {
    cap_ring.push_back(id);
    result.cap.points.push_back(out.vertices_[static_cast<std::size_t>(id)]);
  }
  out.facets3_.push_back({h, std::move(cap_ring)});

  // Drop vertices no facet references any more.
  std::vector<int> used(out.vertices_.size(), 0);
  for (const auto& f : out.facets3_)
    for (int i : f.ring) used[static_cast<std::size_t>(i)] = 1;
  if (std::find(used.begin(), used.end(), 0) != used.end()) {
    std::vector<int> compact(out.vertices_.size(), -1);
    std::vector<Vector> kept;
    for (std::size_t i = 0; i < out.vertices_.size(); ++i)
      if (used[i]) {
        compact[i] = static_cast<int>(kept.size());
        kept.push_back(out.vertices_[i]);
      }
    for (auto& f : out.facets3_)
      for (int& i : f.ring) i = compact[static_cast<std::size_t>(i)];
    out.vertices_ = std::move(kept);
  }

  if (out.vertices_.size() < 4 || out.facets3_.size() < 4) return result;
  out.finalize();
  if (out.volume_ > 0.0) result.polytope = std::move(out);
  return result;
}

std::optional<ConvexPolytope> ConvexPolytope::intersected(const ConvexPolytope& other) const {
  std::optional<ConvexPolytope> cur = *this;
  for (const auto& h : other.halfspaces()) {
    cur = cur->clipped(h);
    if (!cur) return std::nullopt;
  }
  return cur;
}

std::optional<ConvexPolytope> ConvexPolytope::intersected(const CuboidRegion& closed_region) const {
  std::optional<ConvexPolytope> cur = *this;
  for (const auto& h : closed_region.closed_halfspaces()) {
    cur = cur->clipped(h);
    if (!cur) return std::nullopt;
  }
  return cur;
}

ConvexPolytope ConvexPolytope::translated(const Vector& a) const {
  ConvexPolytope out = *this;
  for (auto& h : out.halfspaces_) h = h.translated(a);
  for (auto& v : out.vertices_) v += a;
  for (auto& f : out.facets3_) f.plane = f.plane.translated(a);
  return out;
}

bool ConvexPolytope::contains_point(const Vector& x, double tol) const {
  for (const auto& h : halfspaces_)
    if (h.signed_distance(x) > tol) return false;
  return true;
}

bool ConvexPolytope::on_boundary(const Vector& x, double tol) const {
  for (const auto& h : halfspaces_)
    if (std::abs(h.signed_distance(x)) <= tol) return true;
  return false;
}

double support_value(const ConvexPolytope& p, const Vector& u) { return p.support(u); }

bool hits(const Hyperplane& h, const ConvexPolytope& p) {
  const double tol = p.tolerance();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& v : p.vertices()) {
    const double s = h.signed_distance(v);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return lo <= tol && hi >= -tol;
}

SplitResult split(const ConvexPolytope& p, const Hyperplane& h) {
  auto lower = p.clip(h.negative_side());
  auto upper = p.clipped(h.positive_side());
  const double floor = kDegenerateVolumeFraction * p.volume();
  if (!lower.polytope || !upper || lower.polytope->volume() < floor || upper->volume() < floor)
    throw DegenerateSplit("split: hyperplane does not separate interior points");
  const std::size_t needed = p.dim() == 2 ? 2 : 3;
  if (lower.cap.points.size() < needed) throw DegenerateSplit("split: degenerate dividing facet");
  return {std::move(*lower.polytope), std::move(*upper), std::move(lower.cap)};
}

double boundary_mass_in_region(std::span<const Face> facets, const CuboidRegion& v) {
  const auto hs = v.closed_halfspaces();
  double total = 0.0;
  for (const auto& f : facets) total += face_measure(clip_face(f, hs));
  return total;
}

bool contained_in(const ConvexPolytope& p, const CuboidRegion& v) {
  for (const auto& x : p.vertices())
    if (!v.contains(x)) return false;
  return true;
}

IntrinsicFeatures intrinsic_features(const ConvexPolytope& p) {
  IntrinsicFeatures f;
  f.volume = p.volume();
  f.boundary_measure = p.boundary_measure();
  f.diameter = p.diameter();
  const auto nv = static_cast<std::int64_t>(p.vertices().size());
  if (p.dim() == 2) {
    f.k_face_counts = {nv, nv};
  } else {
    f.k_face_counts = {nv, static_cast<std::int64_t>(p.edges().size()),
                       static_cast<std::int64_t>(p.facets().size())};
  }
  return f;
}

Vector circumcenter(std::span<const Vector> points) {
  if (points.empty()) throw std::invalid_argument("circumcenter: empty point set");
  if (points.size() == 1) return points[0];
  auto radius = [&](const Vector& c) {
    double r2 = 0.0;
    for (const auto& p : points) {
      const Vector d = p - c;
      r2 = std::max(r2, dot(d, d));
    }
    return r2;
  };
  Vector best = points[0];
  double best_r2 = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vector& c) {
    const double r2 = radius(c);
    if (r2 < best_r2) {
      best_r2 = r2;
      best = c;
    }
  };
  const std::size_t n = points.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) consider((points[i] + points[j]) * 0.5);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const Vector u = points[j] - points[i];
        const Vector v = points[k] - points[i];
        const double uu = dot(u, u), vv = dot(v, v), uv = dot(u, v);
        const double det = uu * vv - uv * uv;
        if (!(det > 1e-14 * uu * vv)) continue;
        const double alpha = 0.5 * (uu * vv - vv * uv) / det;
        const double beta = 0.5 * (vv * uu - uu * uv) / det;
        consider(points[i] + u * alpha + v * beta);
      }
  return best;
}

} // namespace stit
