#include "stit/tessellation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>

#include "stit/errors.hpp"

namespace stit {

namespace {

bool touches_boundary(const ConvexPolytope& window, const Face& f) {
  const double tol = window.tolerance();
  return std::any_of(f.points.begin(), f.points.end(),
                     [&](const Vector& x) { return window.on_boundary(x, tol); });
}

void validate(const SimulationConfig& cfg) {
  if (!(cfg.t > 0.0) || !std::isfinite(cfg.t)) throw InvalidConfig("simulate: t must be positive and finite");
  if (cfg.window.vertices().empty() || !(cfg.window.volume() > 0.0))
    throw InvalidConfig("simulate: window must have nonempty interior");
  if (cfg.window.dim() != cfg.measure.dim()) throw InvalidConfig("simulate: window and measure dimensions differ");
  if (cfg.measure.direction_rank() != cfg.measure.dim())
    throw InvalidConfig("simulate: hyperplane directions do not span the space (some line is parallel to all)");
}

SplitEvent make_event(const ConvexPolytope& window, double time, CellId id, const Hyperplane& h, Face facet) {
  SplitEvent ev;
  ev.time = time;
  ev.cell_id = id;
  ev.hyperplane = h;
  ev.censored = touches_boundary(window, facet);
  ev.facet = std::move(facet);
  return ev;
}

} // namespace

const Cell* Tessellation::find_cell(CellId id) const {
  auto it = std::lower_bound(cells.begin(), cells.end(), id, [](const Cell& c, CellId v) { return c.id < v; });
  return it != cells.end() && it->id == id ? &*it : nullptr;
}

Tessellation trivial_tessellation(const ConvexPolytope& window, const HyperplaneMeasure& measure, std::uint64_t seed) {
  Tessellation y;
  y.window = window;
  y.measure = measure;
  y.seed = seed;
  y.cells.push_back({1, window, 0.0, std::nullopt, measure.hitting_mass(window)});
  return y;
}

Tessellation simulate(const SimulationConfig& cfg) {
  validate(cfg);
  RandomStream rng(cfg.seed);

  Tessellation y;
  y.window = cfg.window;
  y.measure = cfg.measure;
  y.time = cfg.t;
  y.seed = cfg.seed;

  std::vector<std::optional<Cell>> slots;
  using Entry = std::pair<double, CellId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;

  auto enqueue = [&](Cell cell) {
    const double death = cell.birth_time + rng.exponential(cell.lifetime_rate);
    queue.emplace(death, cell.id);
    slots.emplace_back(std::move(cell));
  };
  enqueue({1, cfg.window, 0.0, std::nullopt, cfg.measure.hitting_mass(cfg.window)});

  while (!queue.empty() && queue.top().first <= cfg.t) {
    const auto [time, id] = queue.top();
    queue.pop();
    if (y.events.size() >= cfg.max_events)
      throw NonfiniteExplosionGuard("simulate: event count exceeded " + std::to_string(cfg.max_events));

    Cell cell = std::move(*slots[static_cast<std::size_t>(id - 1)]);
    slots[static_cast<std::size_t>(id - 1)].reset();

    std::optional<SplitResult> parts;
    Hyperplane h;
    for (int attempt = 0; !parts; ++attempt) {
      if (attempt > cfg.max_resamples) throw ProbableMeasureBug("simulate: no nondegenerate split after resampling");
      h = cfg.measure.sample_hitting(cell.polytope, rng);
      try {
        parts = split(cell.polytope, h);
      } catch (const DegenerateSplit&) {
      }
    }

    const CellId first = y.next_id;
    y.next_id += 2;
    const double rate_neg = cfg.measure.hitting_mass(parts->negative);
    const double rate_pos = cfg.measure.hitting_mass(parts->positive);
    enqueue({first, std::move(parts->negative), time, id, rate_neg});
    enqueue({first + 1, std::move(parts->positive), time, id, rate_pos});
    y.events.push_back(make_event(cfg.window, time, id, h, std::move(parts->facet)));
  }

  for (auto& slot : slots)
    if (slot) y.cells.push_back(std::move(*slot));
  return y;
}

void apply_split(Tessellation& y, CellId cell_id, const Hyperplane& h, double time) {
  auto it = std::find_if(y.cells.begin(), y.cells.end(), [&](const Cell& c) { return c.id == cell_id; });
  if (it == y.cells.end()) throw std::invalid_argument("apply_split: no surviving cell with id " + std::to_string(cell_id));
  if (!y.events.empty() && time < y.events.back().time)
    throw std::invalid_argument("apply_split: events must be replayed in time order");
  if (time < it->birth_time) throw std::invalid_argument("apply_split: split before the cell was born");

  SplitResult parts = split(it->polytope, h);
  const CellId first = y.next_id;
  y.next_id += 2;
  Cell neg{first, std::move(parts.negative), time, cell_id, 0.0};
  Cell pos{first + 1, std::move(parts.positive), time, cell_id, 0.0};
  neg.lifetime_rate = y.measure.hitting_mass(neg.polytope);
  pos.lifetime_rate = y.measure.hitting_mass(pos.polytope);
  y.cells.erase(it);
  y.cells.push_back(std::move(neg));
  y.cells.push_back(std::move(pos));
  y.events.push_back(make_event(y.window, time, cell_id, h, std::move(parts.facet)));
  y.time = std::max(y.time, time);
}

double holding_rate(const Tessellation& y) {
  double total = 0.0;
  for (const auto& c : y.cells) total += c.lifetime_rate;
  return total;
}

Tessellation restrict_to(const Tessellation& y, const ConvexPolytope& sub_window) {
  if (sub_window.dim() != y.dim()) throw std::invalid_argument("restrict_to: dimension mismatch");
  const double tol = y.window.tolerance();
  for (const auto& v : sub_window.vertices())
    if (!y.window.contains_point(v, tol)) throw WindowNotContained("restrict_to: sub-window is not inside the window");

  Tessellation out;
  out.window = sub_window;
  out.measure = y.measure;
  out.time = y.time;
  out.seed = y.seed;
  out.next_id = y.next_id;
  for (const auto& c : y.cells) {
    auto clipped = c.polytope.intersected(sub_window);
    if (!clipped || clipped->volume() < kDegenerateVolumeFraction * c.polytope.volume()) continue;
    const double rate = y.measure.hitting_mass(*clipped);
    out.cells.push_back({c.id, std::move(*clipped), c.birth_time, c.parent_id, rate});
  }
  const auto hs = sub_window.halfspaces();
  for (const auto& ev : y.events) {
    Face f = clip_face(ev.facet, hs);
    if (!(face_measure(f) > 0.0)) continue;
    out.events.push_back(make_event(sub_window, ev.time, ev.cell_id, ev.hyperplane, std::move(f)));
  }
  return out;
}

Tessellation translate(const Tessellation& y, const Vector& a) {
  Tessellation out = y;
  out.window = y.window.translated(a);
  for (auto& c : out.cells) c.polytope = c.polytope.translated(a);
  for (auto& ev : out.events) {
    ev.hyperplane = ev.hyperplane.translated(a);
    ev.facet = ev.facet.translated(a);
  }
  return out;
}

std::vector<Face> internal_facets(const Tessellation& y) {
  std::vector<Face> out;
  out.reserve(y.events.size());
  for (const auto& ev : y.events) out.push_back(ev.facet);
  return out;
}

} // namespace stit
