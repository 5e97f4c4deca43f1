#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stit/geometry.hpp"
#include "stit/tessellation.hpp"

namespace stit {

enum class FunctionalKind { Additive, Subadditive, Superadditive };

std::string_view to_string(FunctionalKind k);

/// Per-cell feature summed by the cell-sum functionals.
enum class CellFeature { Count, Volume, BoundaryMeasure, Diameter, FaceCount };

std::string_view to_string(CellFeature f);
CellFeature parse_cell_feature(std::string_view name);

/// Which functional X(V, y) to evaluate, with its parameters.
///
/// Names: zero, vertex_count, boundary_mass, segment_center_count,
/// kface_reference_count (k), contained_cell_sum (phi, k), visible_cell_sum
/// (phi, k), power (alpha). `negated` evaluates -X and flips the kind.
struct FunctionalSpec {
  std::string name;
  FunctionalKind kind = FunctionalKind::Additive;
  double alpha = 0.5;
  int k = 0;
  CellFeature phi = CellFeature::Count;
  bool negated = false;

  /// Parameter string for reports, e.g. "alpha=0.5" or "phi=count".
  std::string parameters() const;
  /// Whether the functional is nonnegative by construction.
  bool nonnegative() const;
};

struct FunctionalParams {
  double alpha = 0.5;
  int k = 0;
  CellFeature phi = CellFeature::Count;
  bool negated = false;
};

/// Throws std::invalid_argument for unknown names or out-of-range parameters.
FunctionalSpec make_functional(std::string_view name, const FunctionalParams& params = {});

/// Internal tessellation vertices in V (window-boundary vertices excluded).
std::int64_t vertex_count(const Tessellation& y, const CuboidRegion& v);

/// (dim-1)-volume of the internal boundary inside V.
double boundary_mass(const Tessellation& y, const CuboidRegion& v);

struct SegmentCenterCounts {
  std::int64_t inside = 0;    // uncensored maximal segments with midpoint in V
  std::int64_t censored = 0;  // censored segments with midpoint in V, reported apart
};

/// 2D only: maximal segments are the chords of the split events.
SegmentCenterCounts segment_center_counts(const Tessellation& y, const CuboidRegion& v);
std::int64_t segment_center_count(const Tessellation& y, const CuboidRegion& v);

/// Number of distinct k-faces of the surviving cells whose circumcenter lies
/// in V; faces lying in the window boundary are excluded.
std::int64_t kface_reference_count(const Tessellation& y, const CuboidRegion& v, int k);

/// Sum of phi over cells entirely inside V (half-open rule on vertices).
double contained_cell_sum(const Tessellation& y, const CuboidRegion& v, CellFeature phi, int k = 0);

/// Sum of phi over the cells clipped to the closure of V, for clips with
/// positive volume.
double visible_cell_sum(const Tessellation& y, const CuboidRegion& v, CellFeature phi, int k = 0);

/// boundary_mass(y, V)^alpha with 0 < alpha < 1.
double power_functional(const Tessellation& y, const CuboidRegion& v, double alpha);

/// X(V, y) for any FunctionalSpec. Throws RegionNotCovered when the closure of
/// V is not inside the window.
double evaluate(const Tessellation& y, const FunctionalSpec& x, const CuboidRegion& v);

/// The unit cubes c_i = prod [i_r, i_r + 1[ for i in Z^dim ∩ [-n, n[^dim, in
/// lexicographic order of i (last coordinate fastest).
class CuboidGrid {
public:
  CuboidGrid(int dim, int n);

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t size() const { return size_; }
  /// Integer corner i of cube `index`.
  std::vector<int> corner(std::size_t index) const;
  CuboidRegion cube(std::size_t index) const;
  /// [-n, n[^dim
  CuboidRegion region() const { return CuboidRegion::cube(dim_, -n_, n_); }
  /// Maximum metric between the integer corners.
  int distance(std::size_t i, std::size_t j) const;
  /// |{j in Z^dim : d(i, j) = k}| = (2k+1)^dim - (2k-1)^dim for k >= 1, 1 for k = 0.
  static std::int64_t shell_size(int dim, int k);

private:
  int dim_;
  int n_;
  std::size_t size_;
};

/// The vector (X_i) of X evaluated on every cube of the grid.
std::vector<double> evaluate_on_grid(const Tessellation& y, const FunctionalSpec& x, const CuboidGrid& grid);

/// X(whole) - sum_r X(parts_r). Zero for additive X, <= 0 for subadditive X.
double additivity_defect(const Tessellation& y, const FunctionalSpec& x, const CuboidRegion& whole,
                         std::span<const CuboidRegion> parts);

/// Splits a cuboid into the product grid given by interior cut positions per axis.
std::vector<CuboidRegion> partition_cuboid(const CuboidRegion& whole, const std::vector<std::vector<double>>& cuts);

} // namespace stit
