#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stit/geometry.hpp"
#include "stit/measure.hpp"

namespace stit {

using CellId = std::int64_t;

struct Cell {
  CellId id = 0;
  ConvexPolytope polytope;
  double birth_time = 0.0;
  std::optional<CellId> parent_id;
  double lifetime_rate = 0.0;  // hitting mass of the cell
};

struct SplitEvent {
  double time = 0.0;
  CellId cell_id = 0;
  Hyperplane hyperplane;
  Face facet;             // cell ∩ hyperplane at the time of the split
  bool censored = false;  // facet touches the window boundary
};

/// The state of the cell-division process in a window at time `time`:
/// surviving cells plus the full split genealogy.
///
/// The window is cell 1; the split of the k-th event (k = 1, 2, ...) creates
/// cells 2k and 2k+1.
struct Tessellation {
  ConvexPolytope window;
  HyperplaneMeasure measure{DirectionalDistribution::isotropic(2, 1.0)};
  double time = 0.0;
  std::uint64_t seed = 0;
  std::vector<Cell> cells;         // survivors, ascending id
  std::vector<SplitEvent> events;  // in time order
  CellId next_id = 2;

  int dim() const { return window.dim(); }
  const Cell* find_cell(CellId id) const;
};

struct SimulationConfig {
  ConvexPolytope window;
  double t = 1.0;
  HyperplaneMeasure measure{DirectionalDistribution::isotropic(2, 1.0)};
  std::uint64_t seed = 0;
  std::size_t max_events = 10'000'000;
  /// Splits of one event redrawn after DegenerateSplit before giving up.
  int max_resamples = 1000;
};

/// Runs the cell-division process in the window up to time t.
///
/// Every cell gets an exponential lifetime with rate equal to its hitting
/// mass when it is born; the cell with the earliest death time is split by a
/// hyperplane from the normalized hitting measure and its two children are
/// enqueued. Ties are broken by the smaller id. The random stream is consumed
/// in event order (lifetime at enqueue, direction and offset at split), so the
/// output is a function of the config alone.
///
/// Throws InvalidConfig for t <= 0 or a measure whose directions do not span
/// the space, and NonfiniteExplosionGuard when max_events is exceeded.
Tessellation simulate(const SimulationConfig& cfg);

/// The trivial tessellation {W} at time 0.
Tessellation trivial_tessellation(const ConvexPolytope& window, const HyperplaneMeasure& measure,
                                  std::uint64_t seed = 0);

/// Splits a surviving cell by a given hyperplane at a given time, for replaying
/// hand-made genealogies. Throws std::invalid_argument for an unknown cell or
/// a time earlier than the last event, DegenerateSplit if H misses the cell.
void apply_split(Tessellation& y, CellId cell, const Hyperplane& h, double time);

/// Sum of the hitting masses of the surviving cells: the rate of the next jump.
double holding_rate(const Tessellation& y);

/// The induced tessellation of a sub-window. Throws WindowNotContained when
/// the sub-window is not inside the window.
Tessellation restrict_to(const Tessellation& y, const ConvexPolytope& sub_window);

Tessellation translate(const Tessellation& y, const Vector& a);

/// Dividing facets of all events (the internal boundary, window excluded).
std::vector<Face> internal_facets(const Tessellation& y);

} // namespace stit
