#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "stit/vector.hpp"

namespace stit {

/// Relative tolerance of geometric predicates, scaled by the cell diameter.
inline constexpr double kGeomRelTol = 1e-9;
/// Children below this fraction of the parent volume make a split degenerate.
inline constexpr double kDegenerateVolumeFraction = 1e-12;

/// Closed halfspace {x : <normal, x> <= offset} with unit outward normal.
struct Halfspace {
  Vector normal;
  double offset = 0.0;

  double signed_distance(const Vector& x) const { return dot(normal, x) - offset; }
  Halfspace flipped() const { return {-normal, -offset}; }
  Halfspace translated(const Vector& a) const { return {normal, offset + dot(normal, a)}; }
};

/// Hyperplane {x : <normal, x> = offset}.
///
/// The normal is unit length with its first nonzero coordinate positive, which
/// makes the (normal, offset) pair unique.
class Hyperplane {
public:
  Hyperplane() = default;
  /// Normalizes `normal` and moves it to the canonical hemisphere.
  Hyperplane(const Vector& normal, double offset);

  const Vector& normal() const { return normal_; }
  double offset() const { return offset_; }
  int dim() const { return normal_.dim(); }

  double signed_distance(const Vector& x) const { return dot(normal_, x) - offset_; }
  Halfspace negative_side() const { return {normal_, offset_}; }
  Halfspace positive_side() const { return {-normal_, -offset_}; }
  Hyperplane translated(const Vector& a) const { return {normal_, offset_ + dot(normal_, a)}; }

  friend bool operator==(const Hyperplane&, const Hyperplane&) = default;

private:
  Vector normal_{1.0, 0.0};
  double offset_ = 0.0;
};

/// An (dim-1)-dimensional face: a segment (two points) in 2D or a convex
/// polygon given as an ordered vertex ring in 3D.
struct Face {
  std::vector<Vector> points;

  bool empty() const { return points.empty(); }
  Face translated(const Vector& a) const;
};

/// (dim-1)-volume of a face: segment length or polygon area.
double face_measure(const Face& f);

/// Intersection of a face with a family of closed halfspaces. May return a
/// face with fewer points than a proper segment/polygon when contact is
/// lower dimensional, and an empty face when they are disjoint.
Face clip_face(const Face& f, std::span<const Halfspace> halfspaces);

/// Half-open cuboid [lower, upper[.
struct CuboidRegion {
  Vector lower;
  Vector upper;

  CuboidRegion() = default;
  /// Throws std::invalid_argument unless lower < upper coordinatewise.
  CuboidRegion(const Vector& lo, const Vector& hi);

  /// [lo, hi[^dim
  static CuboidRegion cube(int dim, double lo, double hi);

  int dim() const { return lower.dim(); }
  bool contains(const Vector& x) const;
  double volume() const;
  CuboidRegion translated(const Vector& a) const { return {lower + a, upper + a}; }
  /// The 2*dim halfspaces of the closure.
  std::vector<Halfspace> closed_halfspaces() const;

  friend bool operator==(const CuboidRegion&, const CuboidRegion&) = default;
};

struct IntrinsicFeatures {
  double volume = 0.0;
  double boundary_measure = 0.0;
  double diameter = 0.0;
  /// k_face_counts[k] is the number of k-faces, k = 0..dim-1.
  std::vector<std::int64_t> k_face_counts;
};

/// A bounded convex polytope with nonempty interior in R^2 or R^3.
///
/// The halfspace list is append-only: every clip adds its halfspace even when
/// it turns out to be redundant, so a cell's halfspaces record its genealogy.
/// Vertices and facets are maintained incrementally by clipping. In 2D the
/// vertices form a counter-clockwise ring; in 3D each facet keeps its own
/// vertex ring as indices into the shared vertex list.
class ConvexPolytope {
public:
  struct Facet {
    Halfspace plane;
    std::vector<int> ring;
  };

  ConvexPolytope() = default;

  static ConvexPolytope box(const Vector& lower, const Vector& upper);
  static ConvexPolytope box(const CuboidRegion& region) { return box(region.lower, region.upper); }
  /// 2D convex polygon from a counter-clockwise vertex ring.
  static ConvexPolytope polygon(std::span<const Vector> ring);

  int dim() const { return dim_; }
  std::span<const Halfspace> halfspaces() const { return halfspaces_; }
  std::span<const Vector> vertices() const { return vertices_; }
  /// Facets with their vertex rings (edges in 2D).
  std::vector<Facet> facets() const;
  /// Edges as vertex index pairs.
  std::vector<std::pair<int, int>> edges() const;
  std::vector<Face> facet_faces() const;

  double volume() const { return volume_; }
  double boundary_measure() const { return boundary_; }
  double diameter() const { return diameter_; }
  double tolerance() const { return kGeomRelTol * diameter_; }
  Vector vertex_centroid() const;

  double support(const Vector& u) const;
  double width(const Vector& u) const { return support(u) + support(-u); }

  struct ClipResult;
  /// Intersection with a closed halfspace. `polytope` is empty when the
  /// intersection has no interior.
  ClipResult clip(const Halfspace& h) const;
  std::optional<ConvexPolytope> clipped(const Halfspace& h) const;
  /// Intersection with every halfspace of `other`.
  std::optional<ConvexPolytope> intersected(const ConvexPolytope& other) const;
  std::optional<ConvexPolytope> intersected(const CuboidRegion& closed_region) const;

  ConvexPolytope translated(const Vector& a) const;

  /// True when x satisfies every halfspace within tolerance.
  bool contains_point(const Vector& x, double tol) const;
  /// Distance-zero test against the boundary: x lies on some facet plane.
  bool on_boundary(const Vector& x, double tol) const;

private:
  void finalize();

  int dim_ = 2;
  std::vector<Halfspace> halfspaces_;
  std::vector<Vector> vertices_;
  std::vector<Facet> facets3_;  // 3D only
  double volume_ = 0.0;
  double boundary_ = 0.0;
  double diameter_ = 0.0;
};

struct ConvexPolytope::ClipResult {
  std::optional<ConvexPolytope> polytope;
  /// P ∩ boundary(h); empty when h does not cut through the interior.
  Face cap;
};

inline std::optional<ConvexPolytope> ConvexPolytope::clipped(const Halfspace& h) const { return clip(h).polytope; }

/// max over vertices of <v, u>.
double support_value(const ConvexPolytope& p, const Vector& u);

/// True iff the hyperplane meets the polytope (tangent contact counts).
bool hits(const Hyperplane& h, const ConvexPolytope& p);

struct SplitResult {
  ConvexPolytope negative;  // P ∩ {<n,x> <= offset}
  ConvexPolytope positive;  // P ∩ {<n,x> >= offset}
  Face facet;               // P ∩ H
};

/// Divides P by H. Throws DegenerateSplit when either child has volume below
/// kDegenerateVolumeFraction * vol(P).
SplitResult split(const ConvexPolytope& p, const Hyperplane& h);

/// Sum of the (dim-1)-volumes of the facets clipped to the closure of V.
double boundary_mass_in_region(std::span<const Face> facets, const CuboidRegion& v);

/// True iff every vertex of P lies in the half-open cuboid V.
bool contained_in(const ConvexPolytope& p, const CuboidRegion& v);

IntrinsicFeatures intrinsic_features(const ConvexPolytope& p);

/// Center of the smallest ball containing the points (circumcenter of the
/// point set). Used as the reference point of faces.
Vector circumcenter(std::span<const Vector> points);

} // namespace stit
