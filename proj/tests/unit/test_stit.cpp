#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "stit/errors.hpp"
#include "stit/measure.hpp"
#include "stit/random.hpp"
#include "stit/stats.hpp"
#include "stit/tessellation.hpp"

using namespace stit;

namespace {

HyperplaneMeasure axes2() {
  return HyperplaneMeasure(DirectionalDistribution::discrete({{Vector(1.0, 0.0), 1.0}, {Vector(0.0, 1.0), 1.0}}));
}

HyperplaneMeasure iso(int dim) { return HyperplaneMeasure(DirectionalDistribution::isotropic(dim, 1.0)); }

const ConvexPolytope kSquare = ConvexPolytope::box(Vector(0.0, 0.0), Vector(1.0, 1.0));

Tessellation run(const ConvexPolytope& w, const HyperplaneMeasure& m, double t, std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.window = w;
  cfg.measure = m;
  cfg.t = t;
  cfg.seed = seed;
  return simulate(cfg);
}

double total_volume(const Tessellation& y) {
  double v = 0.0;
  for (const auto& c : y.cells) v += c.polytope.volume();
  return v;
}

}  // namespace

TEST_SUITE("stit") {
  TEST_CASE("tiny t leaves the window unsplit") {
    int single = 0;
    for (std::uint64_t s = 0; s < 10000; ++s) single += run(kSquare, axes2(), 1e-12, s).cells.size() == 1;
    CHECK(single >= 9999);
  }

  TEST_CASE("number of splits grows with t") {
    std::vector<double> means;
    for (double t : {0.5, 1.0, 2.0}) {
      double sum = 0.0;
      for (std::uint64_t s = 0; s < 1000; ++s) sum += static_cast<double>(run(kSquare, iso(2), t, s).events.size());
      means.push_back(sum / 1000.0);
    }
    CHECK(means[0] < means[1]);
    CHECK(means[1] < means[2]);
  }

  TEST_CASE("first jump time is exponential with the window's hitting mass") {
    // P(no split by t) = exp(-t Λ([W])) with Λ([W]) = 2 for the axes measure.
    const double t = 0.3;
    int unsplit = 0;
    const int n = 20000;
    for (int s = 0; s < n; ++s) unsplit += run(kSquare, axes2(), t, static_cast<std::uint64_t>(s)).events.empty();
    const double p = std::exp(-2.0 * t);
    CHECK(std::abs(unsplit - n * p) <= 4.0 * std::sqrt(n * p * (1.0 - p)));
  }

  TEST_CASE("volume conservation, genealogy and ids") {
    for (int dim : {2, 3}) {
      const auto w = dim == 2 ? ConvexPolytope::box(Vector(-2.0, -2.0), Vector(2.0, 2.0))
                              : ConvexPolytope::box(Vector(-1.0, -1.0, -1.0), Vector(1.0, 1.0, 1.0));
      for (std::uint64_t s = 0; s < 50; ++s) {
        const auto y = run(w, iso(dim), 1.5, s);
        CHECK(std::abs(total_volume(y) - w.volume()) <= 1e-8 * w.volume());
        CHECK(y.cells.size() == y.events.size() + 1);
        std::map<CellId, double> death;
        for (std::size_t k = 0; k < y.events.size(); ++k) {
          if (k) CHECK(y.events[k].time > y.events[k - 1].time);
          CHECK(y.events[k].time <= 1.5);
          death[y.events[k].cell_id] = y.events[k].time;
        }
        for (const auto& c : y.cells) {
          CHECK(c.id >= 1);
          if (c.id == 1) {
            CHECK_FALSE(c.parent_id);
            continue;
          }
          REQUIRE(c.parent_id);
          CHECK(c.birth_time == death.at(*c.parent_id));
          // The k-th event splits a cell into 2k and 2k+1.
          CHECK(y.events[static_cast<std::size_t>(c.id / 2 - 1)].cell_id == *c.parent_id);
          CHECK(c.lifetime_rate == doctest::Approx(y.measure.hitting_mass(c.polytope)).epsilon(1e-9));
        }
        CHECK(std::is_sorted(y.cells.begin(), y.cells.end(), [](const Cell& a, const Cell& b) { return a.id < b.id; }));
      }
    }
  }

  TEST_CASE("surviving cells have disjoint interiors") {
    const auto y = run(ConvexPolytope::box(Vector(0.0, 0.0), Vector(3.0, 3.0)), iso(2), 2.0, 4);
    for (std::size_t i = 0; i < y.cells.size(); ++i)
      for (std::size_t j = i + 1; j < y.cells.size(); ++j) {
        const auto both = y.cells[i].polytope.intersected(y.cells[j].polytope);
        CHECK((!both || both->volume() <= 1e-9));
      }
  }

  TEST_CASE("same config gives the same tessellation") {
    const auto a = run(kSquare, iso(2), 3.0, 42);
    const auto b = run(kSquare, iso(2), 3.0, 42);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t k = 0; k < a.events.size(); ++k) {
      CHECK(a.events[k].time == b.events[k].time);
      CHECK(a.events[k].hyperplane == b.events[k].hyperplane);
    }
    CHECK(run(kSquare, iso(2), 3.0, 43).events.size() + a.events.size() > 0);
  }

  TEST_CASE("invalid configurations") {
    CHECK_THROWS_AS(run(kSquare, iso(2), 0.0, 1), InvalidConfig);
    CHECK_THROWS_AS(run(kSquare, iso(2), -1.0, 1), InvalidConfig);
    const HyperplaneMeasure one(DirectionalDistribution::discrete({{Vector(1.0, 0.0), 1.0}}));
    CHECK_THROWS_AS(run(kSquare, one, 1.0, 1), InvalidConfig);
    CHECK_THROWS_AS(run(kSquare, iso(3), 1.0, 1), InvalidConfig);
    SimulationConfig cfg;
    cfg.window = ConvexPolytope::box(Vector(0.0, 0.0), Vector(100.0, 100.0));
    cfg.t = 10.0;
    cfg.max_events = 50;
    CHECK_THROWS_AS(simulate(cfg), NonfiniteExplosionGuard);
  }

  TEST_CASE("holding rate examples") {
    auto y = trivial_tessellation(kSquare, axes2());
    CHECK(holding_rate(y) == doctest::Approx(2.0));
    const double before = holding_rate(y);
    apply_split(y, 1, Hyperplane(Vector(1.0, 0.0), 0.5), 0.1);
    CHECK(holding_rate(y) == doctest::Approx(3.0));
    CHECK(holding_rate(y) > before);
    apply_split(y, 2, Hyperplane(Vector(0.0, 1.0), 0.5), 0.2);
    CHECK(holding_rate(y) == doctest::Approx(3.5));
    CHECK(y.cells.size() == 3);
    CHECK(y.find_cell(4) != nullptr);
    CHECK(y.find_cell(2) == nullptr);
    CHECK_THROWS_AS(apply_split(y, 2, Hyperplane(Vector(0.0, 1.0), 0.5), 0.3), std::invalid_argument);
    CHECK_THROWS_AS(apply_split(y, 3, Hyperplane(Vector(0.0, 1.0), 0.5), 0.1), std::invalid_argument);
    CHECK_THROWS_AS(apply_split(y, 3, Hyperplane(Vector(1.0, 0.0), 5.0), 0.3), DegenerateSplit);
  }

  TEST_CASE("holding rate never decreases for the axes measure") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto y = run(ConvexPolytope::box(Vector(0.0, 0.0), Vector(2.0, 2.0)), axes2(), 2.0, s);
      auto replay = trivial_tessellation(y.window, y.measure);
      double rate = holding_rate(replay);
      for (const auto& ev : y.events) {
        apply_split(replay, ev.cell_id, ev.hyperplane, ev.time);
        const double next = holding_rate(replay);
        CHECK(next > rate);
        rate = next;
      }
      CHECK(rate == doctest::Approx(holding_rate(y)));
    }
  }

  TEST_CASE("restriction") {
    auto y = trivial_tessellation(kSquare, axes2());
    apply_split(y, 1, Hyperplane(Vector(1.0, 0.0), 0.5), 0.1);
    const auto same = restrict_to(y, kSquare);
    CHECK(same.cells.size() == 2);
    const auto left = restrict_to(y, ConvexPolytope::box(Vector(0.0, 0.0), Vector(0.4, 1.0)));
    CHECK(left.cells.size() == 1);
    CHECK(left.events.empty());
    CHECK(left.cells[0].polytope.volume() == doctest::Approx(0.4));
    CHECK_THROWS_AS(restrict_to(y, ConvexPolytope::box(Vector(0.5, 0.5), Vector(1.5, 1.5))), WindowNotContained);

    const auto big = run(ConvexPolytope::box(Vector(-1.0, -1.0), Vector(2.0, 2.0)), iso(2), 2.0, 8);
    const auto small = restrict_to(big, kSquare);
    CHECK(total_volume(small) == doctest::Approx(1.0).epsilon(1e-10));
    double len = 0.0;
    for (const auto& f : internal_facets(small)) len += face_measure(f);
    CHECK(len == doctest::Approx(oracle::chord_length_in_box(big, Vector(0.0, 0.0), Vector(1.0, 1.0))).epsilon(1e-10));
  }

  TEST_CASE("translation") {
    const auto y = run(kSquare, iso(2), 4.0, 3);
    const auto z = translate(y, Vector(0.0, 0.0));
    REQUIRE(z.cells.size() == y.cells.size());
    for (std::size_t i = 0; i < y.cells.size(); ++i)
      CHECK(z.cells[i].polytope.volume() == y.cells[i].polytope.volume());
    const Vector a(3.25, -7.5);
    const auto back = translate(translate(y, a), -a);
    for (std::size_t k = 0; k < y.events.size(); ++k)
      for (std::size_t i = 0; i < y.events[k].facet.points.size(); ++i)
        CHECK(distance(back.events[k].facet.points[i], y.events[k].facet.points[i]) <= 1e-12);
  }

  TEST_CASE("boundary length density equals t times the mass") {
    std::vector<double> v;
    for (std::uint64_t s = 0; s < 2000; ++s) {
      const auto y = run(ConvexPolytope::box(Vector(0.0, 0.0), Vector(2.0, 2.0)), iso(2), 1.0, s);
      double len = 0.0;
      for (const auto& f : internal_facets(y)) len += face_measure(f);
      v.push_back(len / 4.0);
    }
    const auto ci = stats::normal_ci(v);
    const double half = ci.hi - ci.lo;
    CHECK(ci.lo - half <= 1.0);
    CHECK(1.0 <= ci.hi + half);
  }

  TEST_CASE("censored flag marks facets touching the window boundary") {
    auto y = trivial_tessellation(kSquare, axes2());
    apply_split(y, 1, Hyperplane(Vector(1.0, 0.0), 0.5), 0.1);
    CHECK(y.events[0].censored);
    const auto z = run(ConvexPolytope::box(Vector(0.0, 0.0), Vector(4.0, 4.0)), iso(2), 3.0, 1);
    bool any_inner = false;
    for (const auto& ev : z.events) {
      bool touches = false;
      for (const auto& p : ev.facet.points) touches = touches || z.window.on_boundary(p, z.window.tolerance());
      CHECK(ev.censored == touches);
      any_inner = any_inner || !ev.censored;
    }
    CHECK(any_inner);
  }
}
