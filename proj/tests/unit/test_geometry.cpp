#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "stit/errors.hpp"
#include "stit/geometry.hpp"
#include "stit/random.hpp"

using namespace stit;

namespace {

const ConvexPolytope kSquare = ConvexPolytope::box(Vector(0.0, 0.0), Vector(1.0, 1.0));
const ConvexPolytope kCube = ConvexPolytope::box(Vector(0.0, 0.0, 0.0), Vector(1.0, 1.0, 1.0));

Vector random_unit(RandomStream& rng, int dim) {
  Vector u(dim);
  do {
    for (int r = 0; r < dim; ++r) u[r] = rng.normal();
  } while (norm(u) < 1e-6);
  return normalized(u);
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("hyperplane normal is unit and canonical") {
    const Hyperplane h(Vector(-3.0, -4.0), 5.0);
    CHECK(std::abs(norm(h.normal()) - 1.0) < 1e-12);
    CHECK(h.normal()[0] == doctest::Approx(0.6));
    CHECK(h.offset() == doctest::Approx(-1.0));
    const Hyperplane same(Vector(0.6, 0.8), -1.0);
    CHECK(distance(h.normal(), same.normal()) < 1e-15);
    CHECK(h.offset() == doctest::Approx(same.offset()).epsilon(1e-15));
    const Hyperplane v(Vector(0.0, -2.0, 0.0), 1.0);
    CHECK(v.normal()[1] == doctest::Approx(1.0));
    CHECK(v.offset() == doctest::Approx(-0.5));
  }

  TEST_CASE("support value") {
    CHECK(support_value(kSquare, Vector(1.0, 0.0)) == doctest::Approx(1.0));
    CHECK(support_value(kSquare, Vector(-1.0, 0.0)) == doctest::Approx(0.0));
    CHECK(support_value(kSquare, Vector(std::sqrt(0.5), std::sqrt(0.5))) == doctest::Approx(std::sqrt(2.0)));
  }

  TEST_CASE("hits") {
    CHECK(hits(Hyperplane(Vector(1.0, 0.0), 0.5), kSquare));
    CHECK_FALSE(hits(Hyperplane(Vector(1.0, 0.0), 2.0), kSquare));
    CHECK(hits(Hyperplane(Vector(1.0, 0.0), 1.0), kSquare));
  }

  TEST_CASE("split examples") {
    const auto a = split(kSquare, Hyperplane(Vector(1.0, 0.0), 0.5));
    CHECK(a.negative.volume() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(a.positive.volume() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(face_measure(a.facet) == doctest::Approx(1.0).epsilon(1e-14));

    const double s = std::sqrt(0.5);
    const auto b = split(kSquare, Hyperplane(Vector(s, s), 0.5 * s));
    CHECK(b.negative.volume() == doctest::Approx(0.125).epsilon(1e-13));
    CHECK(b.positive.volume() == doctest::Approx(0.875).epsilon(1e-13));
    CHECK(face_measure(b.facet) == doctest::Approx(0.5 * std::sqrt(2.0)).epsilon(1e-13));
    CHECK(b.negative.vertices().size() == 3);
    CHECK(b.positive.vertices().size() == 5);

    const auto c = split(kCube, Hyperplane(Vector(0.0, 0.0, 1.0), 0.25));
    CHECK(c.negative.volume() == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(c.positive.volume() == doctest::Approx(0.75).epsilon(1e-13));
    CHECK(face_measure(c.facet) == doctest::Approx(1.0).epsilon(1e-13));
  }

  TEST_CASE("split rejects hyperplanes that miss or graze the polytope") {
    CHECK_THROWS_AS(split(kSquare, Hyperplane(Vector(1.0, 0.0), 2.0)), DegenerateSplit);
    CHECK_THROWS_AS(split(kSquare, Hyperplane(Vector(1.0, 0.0), 1.0)), DegenerateSplit);
    CHECK_THROWS_AS(split(kSquare, Hyperplane(Vector(1.0, 0.0), 1e-14)), DegenerateSplit);
  }

  TEST_CASE("boundary mass in region examples") {
    const std::vector<Face> seg{Face{{Vector(0.0, 0.5), Vector(1.0, 0.5)}}};
    CHECK(boundary_mass_in_region(seg, CuboidRegion::cube(2, 0.0, 1.0)) == doctest::Approx(1.0));
    CHECK(boundary_mass_in_region(seg, CuboidRegion::cube(2, 0.0, 0.5)) == doctest::Approx(0.5));
    const std::vector<Face> sq{Face{{Vector(0.0, 0.0, 0.5), Vector(1.0, 0.0, 0.5), Vector(1.0, 1.0, 0.5),
                                     Vector(0.0, 1.0, 0.5)}}};
    CHECK(boundary_mass_in_region(sq, CuboidRegion::cube(3, 0.0, 0.75)) == doctest::Approx(0.5625));
    CHECK(boundary_mass_in_region(sq, CuboidRegion(Vector(0.0, 0.0, 0.0), Vector(0.25, 0.25, 0.6))) ==
          doctest::Approx(0.0625));
    CHECK(boundary_mass_in_region(sq, CuboidRegion::cube(3, 0.0, 0.25)) == doctest::Approx(0.0));
  }

  TEST_CASE("contained_in follows the half-open rule") {
    const auto v = CuboidRegion::cube(2, 0.0, 1.0);
    CHECK(contained_in(ConvexPolytope::box(Vector(0.1, 0.1), Vector(0.2, 0.2)), v));
    CHECK_FALSE(contained_in(ConvexPolytope::box(Vector(0.5, 0.0), Vector(1.5, 1.0)), v));
    CHECK_FALSE(contained_in(ConvexPolytope::box(Vector(0.5, 0.0), Vector(1.0, 0.5)), v));
    CHECK(contained_in(ConvexPolytope::box(Vector(0.0, 0.0), Vector(0.5, 0.5)), v));
  }

  TEST_CASE("cuboid region membership") {
    const auto v = CuboidRegion::cube(2, 0.0, 1.0);
    CHECK(v.contains(Vector(0.0, 0.0)));
    CHECK_FALSE(v.contains(Vector(1.0, 0.5)));
    CHECK_FALSE(v.contains(Vector(0.5, 1.0)));
    CHECK_THROWS_AS(CuboidRegion(Vector(0.0, 1.0), Vector(1.0, 1.0)), std::invalid_argument);
  }

  TEST_CASE("intrinsic features") {
    const auto sq = intrinsic_features(kSquare);
    CHECK(sq.volume == doctest::Approx(1.0));
    CHECK(sq.boundary_measure == doctest::Approx(4.0));
    CHECK(sq.diameter == doctest::Approx(std::sqrt(2.0)));
    CHECK(sq.k_face_counts == std::vector<std::int64_t>{4, 4});

    const auto cu = intrinsic_features(kCube);
    CHECK(cu.volume == doctest::Approx(1.0));
    CHECK(cu.boundary_measure == doctest::Approx(6.0));
    CHECK(cu.diameter == doctest::Approx(std::sqrt(3.0)));
    CHECK(cu.k_face_counts == std::vector<std::int64_t>{8, 12, 6});

    const auto re = intrinsic_features(ConvexPolytope::box(Vector(0.0, 0.0), Vector(0.5, 2.0)));
    CHECK(re.volume == doctest::Approx(1.0));
    CHECK(re.boundary_measure == doctest::Approx(5.0));
    CHECK(re.diameter == doctest::Approx(std::sqrt(4.25)));
  }

  TEST_CASE("circumcenter") {
    const std::vector<Vector> seg{Vector(0.0, 0.0), Vector(2.0, 2.0)};
    CHECK(distance(circumcenter(seg), Vector(1.0, 1.0)) < 1e-12);
    const std::vector<Vector> tri{Vector(0.0, 0.0), Vector(4.0, 0.0), Vector(0.0, 3.0)};
    CHECK(distance(circumcenter(tri), Vector(2.0, 1.5)) < 1e-12);
    // Obtuse triangle: the smallest enclosing ball is centered on the long side.
    const std::vector<Vector> obt{Vector(0.0, 0.0), Vector(4.0, 0.0), Vector(2.0, 0.5)};
    CHECK(distance(circumcenter(obt), Vector(2.0, 0.0)) < 1e-12);
  }

  TEST_CASE("random splits conserve volume and agree with the shoelace oracle") {
    RandomStream rng(7);
    for (int i = 0; i < 300; ++i) {
      ConvexPolytope p = ConvexPolytope::box(Vector(-1.0, -1.0), Vector(1.0, 1.0));
      for (int depth = 0; depth < 6; ++depth) {
        const Vector u = random_unit(rng, 2);
        const double lo = -support_value(p, -u), hi = support_value(p, u);
        try {
          const auto s = split(p, Hyperplane(u, rng.uniform(lo, hi)));
          CHECK(std::abs(s.negative.volume() + s.positive.volume() - p.volume()) <= 1e-9 * p.volume());
          const std::vector<Vector> ring(s.negative.vertices().begin(), s.negative.vertices().end());
          CHECK(std::abs(oracle::shoelace(ring) - s.negative.volume()) <= 1e-12);
          p = rng.uniform() < 0.5 ? s.negative : s.positive;
        } catch (const DegenerateSplit&) {
        }
      }
    }
  }

  TEST_CASE("random 3D splits: volumes, lattice oracle, vertex incidences") {
    RandomStream rng(11);
    for (int i = 0; i < 40; ++i) {
      ConvexPolytope p = kCube;
      for (int depth = 0; depth < 4; ++depth) {
        const Vector u = random_unit(rng, 3);
        const double lo = -support_value(p, -u), hi = support_value(p, u);
        try {
          const auto s = split(p, Hyperplane(u, rng.uniform(lo, hi)));
          CHECK(std::abs(s.negative.volume() + s.positive.volume() - p.volume()) <= 1e-9 * p.volume());
          p = rng.uniform() < 0.5 ? s.negative : s.positive;
        } catch (const DegenerateSplit&) {
        }
      }
      for (const auto& v : p.vertices()) {
        int tight = 0;
        for (const auto& h : p.halfspaces()) {
          CHECK(h.signed_distance(v) <= p.tolerance());
          tight += std::abs(h.signed_distance(v)) <= p.tolerance();
        }
        CHECK(tight >= 3);
      }
      if (i < 5) CHECK(oracle::lattice_volume(p, 120) == doctest::Approx(p.volume()).epsilon(0.03));
      // Euler characteristic of the boundary of a 3-polytope.
      const auto f = intrinsic_features(p);
      CHECK(f.k_face_counts[0] - f.k_face_counts[1] + f.k_face_counts[2] == 2);
    }
  }

  TEST_CASE("support values are positive in both directions") {
    RandomStream rng(3);
    for (int i = 0; i < 100; ++i) {
      const Vector u = random_unit(rng, 3);
      CHECK(support_value(kCube, u) + support_value(kCube, -u) > 0.0);
    }
  }

  TEST_CASE("translation commutes with clipping") {
    const Vector a(0.3, -1.7);
    const Hyperplane h(Vector(1.0, 2.0), 0.6);
    const auto s = split(kSquare, h);
    const auto t = split(kSquare.translated(a), h.translated(a));
    CHECK(t.negative.volume() == doctest::Approx(s.negative.volume()).epsilon(1e-12));
    CHECK(face_measure(t.facet) == doctest::Approx(face_measure(s.facet)).epsilon(1e-12));
  }

  TEST_CASE("clip_face keeps lower dimensional contact") {
    const Face seg{{Vector(0.0, 1.0), Vector(1.0, 1.0)}};
    const auto r = CuboidRegion::cube(2, 0.0, 1.0).closed_halfspaces();
    CHECK(face_measure(clip_face(seg, r)) == doctest::Approx(1.0));
    const Face far{{Vector(0.0, 2.0), Vector(1.0, 2.0)}};
    CHECK(clip_face(far, r).empty());
  }
}
