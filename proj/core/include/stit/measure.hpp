#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stit/geometry.hpp"
#include "stit/random.hpp"

namespace stit {

struct DirectionAtom {
  Vector direction;  // unit, canonical hemisphere after validation
  double weight = 0.0;

  /// 2D atom with normal direction (cos angle, sin angle).
  static DirectionAtom from_angle(double angle, double weight);
};

/// Directional part of a translation-invariant hyperplane measure.
///
/// Either a finite list of weighted directions or the isotropic law with a
/// given total mass spread uniformly over the directions.
class DirectionalDistribution {
public:
  enum class Kind { Discrete, Isotropic };

  /// Normalizes the directions into the canonical hemisphere. Throws
  /// std::invalid_argument on nonpositive weights, mixed dimensions or
  /// repeated directions.
  static DirectionalDistribution discrete(std::vector<DirectionAtom> atoms);
  static DirectionalDistribution isotropic(int dim, double mass);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double total_mass() const { return mass_; }
  std::span<const DirectionAtom> atoms() const { return atoms_; }

private:
  Kind kind_ = Kind::Isotropic;
  int dim_ = 2;
  double mass_ = 1.0;
  std::vector<DirectionAtom> atoms_;
};

/// G_r(a, b): hyperplanes weakly separating facet r of [-a,a]^dim from facet
/// r of [-b,b]^dim. Facets r = 1..dim sit at x_r = +a (resp. +b), facets
/// r = dim+1..2dim at x_{r-dim} = -a (resp. -b).
struct SeparatorClass {
  double a = 0.0;
  double b = 0.0;
  int r = 1;

  SeparatorClass(double a, double b, int r);
};

/// The measure on hyperplanes: directional distribution times Lebesgue
/// measure on the signed offset.
class HyperplaneMeasure {
public:
  explicit HyperplaneMeasure(DirectionalDistribution directional);

  int dim() const { return directional_.dim(); }
  const DirectionalDistribution& directional() const { return directional_; }

  /// Mass of the hyperplanes hitting P, i.e. the directional integral of the
  /// width of P. Exact for both kinds: discrete is a finite sum, isotropic uses
  /// the mean width of P (perimeter/pi in 2D, edge-angle sum in 3D).
  double hitting_mass(const ConvexPolytope& p) const;

  /// A hyperplane drawn from the normalized restriction of the measure to the
  /// hyperplanes hitting P.
  Hyperplane sample_hitting(const ConvexPolytope& p, RandomStream& rng) const;

  double separator_mass(const SeparatorClass& s) const;

  /// Integral of an even function of the direction against the directional
  /// distribution. Isotropic integrals use adaptive Gauss-Kronrod quadrature.
  double integrate(const std::function<double(const Vector&)>& f, double rel_tol = 1e-8) const;

  /// Rank of the set of directions in the support.
  int direction_rank() const;

private:
  DirectionalDistribution directional_;
};

/// Hitting mass by quadrature of the width over the directions.
double hitting_mass_quadrature(const HyperplaneMeasure& m, const ConvexPolytope& p, double rel_tol = 1e-8);

/// Mean width of P over uniformly distributed directions.
double mean_width(const ConvexPolytope& p);

/// Length of the offset interval of hyperplanes with normal u that weakly
/// separate facet r of [-a,a]^dim from facet r of [-b,b]^dim.
double separator_gap(const SeparatorClass& s, const Vector& u);

struct AssumptionReport {
  int dim = 2;
  int direction_rank = 0;
  bool spans = false;                   // no line parallel to every hyperplane
  std::vector<double> separator_masses; // indexed by r - 1
  bool separators_positive = false;
  bool pass() const { return spans && separators_positive; }
};

AssumptionReport check_assumptions(const HyperplaneMeasure& m, double a, double b);

} // namespace stit
