#include "stit/measure.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "stit/errors.hpp"

namespace stit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kRejectionCap = 1'000'000;

Vector canonical(Vector u) { return in_canonical_hemisphere(u) ? u : -u; }

template <class F>
double gk(F f, double lo, double hi, double tol, unsigned depth) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, depth, tol);
}

// Range of <x, u> over the box [lo, hi].
std::pair<double, double> project_box(const Vector& lo, const Vector& hi, const Vector& u) {
  double mn = 0.0, mx = 0.0;
  for (int j = 0; j < u.dim(); ++j) {
    const double p = lo[j] * u[j], q = hi[j] * u[j];
    mn += std::min(p, q);
    mx += std::max(p, q);
  }
  return {mn, mx};
}

// Facet r of [-c, c]^dim as a degenerate box.
std::pair<Vector, Vector> cube_facet(int dim, double c, int r) {
  Vector lo = Vector::filled(dim, -c), hi = Vector::filled(dim, c);
  const int axis = (r - 1) % dim;
  const double at = r <= dim ? c : -c;
  lo[axis] = at;
  hi[axis] = at;
  return {lo, hi};
}

} // namespace

DirectionAtom DirectionAtom::from_angle(double angle, double weight) {
  return {Vector(std::cos(angle), std::sin(angle)), weight};
}

DirectionalDistribution DirectionalDistribution::discrete(std::vector<DirectionAtom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("discrete directional distribution needs at least one atom");
  DirectionalDistribution d;
  d.kind_ = Kind::Discrete;
  d.dim_ = atoms.front().direction.dim();
  if (d.dim_ != 2 && d.dim_ != 3) throw std::invalid_argument("dimension must be 2 or 3");
  d.mass_ = 0.0;
  for (auto& a : atoms) {
    if (a.direction.dim() != d.dim_) throw std::invalid_argument("directions of mixed dimension");
    const double len = norm(a.direction);
    if (!(len > 0.0) || !a.direction.is_finite()) throw std::invalid_argument("direction must be finite and nonzero");
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) throw std::invalid_argument("atom weight must be positive");
    a.direction = canonical(a.direction * (1.0 / len));
    d.mass_ += a.weight;
  }
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      if (distance(atoms[i].direction, atoms[j].direction) < 1e-12)
        throw std::invalid_argument("directions must be pairwise distinct");
  d.atoms_ = std::move(atoms);
  return d;
}

DirectionalDistribution DirectionalDistribution::isotropic(int dim, double mass) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dimension must be 2 or 3");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw std::invalid_argument("isotropic mass must be positive");
  DirectionalDistribution d;
  d.kind_ = Kind::Isotropic;
  d.dim_ = dim;
  d.mass_ = mass;
  return d;
}

SeparatorClass::SeparatorClass(double a_, double b_, int r_) : a(a_), b(b_), r(r_) {
  if (!(a > 0.0) || !(b > a)) throw std::invalid_argument("separator class requires 0 < a < b");
  if (r < 1) throw std::invalid_argument("separator facet index must be >= 1");
}

HyperplaneMeasure::HyperplaneMeasure(DirectionalDistribution directional) : directional_(std::move(directional)) {}

double mean_width(const ConvexPolytope& p) {
  if (p.dim() == 2) return p.boundary_measure() / kPi;
  // Sum over edges of length times exterior dihedral angle, over 4 pi.
  const auto facets = p.facets();
  std::map<std::pair<int, int>, std::vector<std::size_t>> owners;
  for (std::size_t f = 0; f < facets.size(); ++f) {
    const auto& ring = facets[f].ring;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      int a = ring[i], b = ring[(i + 1) % ring.size()];
      if (a > b) std::swap(a, b);
      owners[{a, b}].push_back(f);
    }
  }
  const auto verts = p.vertices();
  double sum = 0.0;
  for (const auto& [edge, fs] : owners) {
    if (fs.size() != 2) continue;
    const double c = std::clamp(dot(facets[fs[0]].plane.normal, facets[fs[1]].plane.normal), -1.0, 1.0);
    sum += distance(verts[static_cast<std::size_t>(edge.first)], verts[static_cast<std::size_t>(edge.second)]) *
           std::acos(c);
  }
  return sum / (4.0 * kPi);
}

double HyperplaneMeasure::hitting_mass(const ConvexPolytope& p) const {
  if (directional_.kind() == DirectionalDistribution::Kind::Isotropic)
    return directional_.total_mass() * mean_width(p);
  double total = 0.0;
  for (const auto& a : directional_.atoms()) total += a.weight * p.width(a.direction);
  return total;
}

double HyperplaneMeasure::integrate(const std::function<double(const Vector&)>& f, double rel_tol) const {
  if (directional_.kind() == DirectionalDistribution::Kind::Discrete) {
    double total = 0.0;
    for (const auto& a : directional_.atoms()) total += a.weight * f(a.direction);
    return total;
  }
  const double mass = directional_.total_mass();
  if (dim() == 2) {
    auto g = [&](double phi) { return f(Vector(std::cos(phi), std::sin(phi))); };
    // Split the half circle so that axis-aligned kinks sit on panel ends.
    double acc = 0.0;
    for (int q = 0; q < 4; ++q) acc += gk(g, q * kPi / 4, (q + 1) * kPi / 4, rel_tol, 15);
    return mass / kPi * acc;
  }
  // Upper hemisphere in spherical coordinates; the integrand is even in u.
  auto inner = [&](double theta) {
    const double st = std::sin(theta), ct = std::cos(theta);
    auto g = [&](double phi) { return f(Vector(st * std::cos(phi), st * std::sin(phi), ct)); };
    double acc = 0.0;
    for (int q = 0; q < 4; ++q) acc += gk(g, q * kPi / 2, (q + 1) * kPi / 2, rel_tol * 0.1, 10);
    return acc * st;
  };
  const double outer = gk(inner, 0.0, kPi / 4, rel_tol, 10) + gk(inner, kPi / 4, kPi / 2, rel_tol, 10);
  return mass / (2.0 * kPi) * outer;
}

double hitting_mass_quadrature(const HyperplaneMeasure& m, const ConvexPolytope& p, double rel_tol) {
  return m.integrate([&](const Vector& u) { return p.width(u); }, rel_tol);
}

Hyperplane HyperplaneMeasure::sample_hitting(const ConvexPolytope& p, RandomStream& rng) const {
  Vector u;
  if (directional_.kind() == DirectionalDistribution::Kind::Discrete) {
    const auto atoms = directional_.atoms();
    std::vector<double> w(atoms.size());
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) total += w[i] = atoms[i].weight * p.width(atoms[i].direction);
    if (!(total > 0.0)) throw ProbableMeasureBug("sample_hitting: zero hitting mass");
    const double pick = rng.uniform() * total;
    std::size_t i = 0;
    double acc = w[0];
    while (i + 1 < atoms.size() && pick >= acc) acc += w[++i];
    u = atoms[i].direction;
  } else {
    const double envelope = p.diameter();
    std::uint64_t tries = 0;
    for (;;) {
      if (++tries > kRejectionCap) throw ProbableMeasureBug("sample_hitting: rejection loop exceeded its cap");
      if (dim() == 2) {
        const double phi = kPi * rng.uniform();
        u = Vector(std::cos(phi), std::sin(phi));
      } else {
        const double z = 2.0 * rng.uniform() - 1.0;
        const double phi = 2.0 * kPi * rng.uniform();
        const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
        u = Vector(rad * std::cos(phi), rad * std::sin(phi), z);
      }
      if (rng.uniform() * envelope <= p.width(u)) break;
    }
    u = canonical(u);
  }
  const double lo = -p.support(-u);
  const double hi = p.support(u);
  return Hyperplane(u, lo + (hi - lo) * rng.uniform());
}

double separator_gap(const SeparatorClass& s, const Vector& u) {
  const int dim = u.dim();
  if (s.r > 2 * dim) throw std::invalid_argument("separator facet index exceeds 2*dim");
  const auto [ilo, ihi] = cube_facet(dim, s.a, s.r);
  const auto [olo, ohi] = cube_facet(dim, s.b, s.r);
  const auto [in_min, in_max] = project_box(ilo, ihi, u);
  const auto [out_min, out_max] = project_box(olo, ohi, u);
  return std::max(0.0, out_min - in_max) + std::max(0.0, in_min - out_max);
}

double HyperplaneMeasure::separator_mass(const SeparatorClass& s) const {
  if (s.r > 2 * dim()) throw std::invalid_argument("separator facet index exceeds 2*dim");
  return integrate([&](const Vector& u) { return separator_gap(s, u); });
}

int HyperplaneMeasure::direction_rank() const {
  if (directional_.kind() == DirectionalDistribution::Kind::Isotropic) return dim();
  std::vector<Vector> basis;
  for (const auto& a : directional_.atoms()) {
    Vector v = a.direction;
    for (const auto& b : basis) v -= b * dot(v, b);
    if (norm(v) > 1e-9) basis.push_back(normalized(v));
  }
  return static_cast<int>(basis.size());
}

AssumptionReport check_assumptions(const HyperplaneMeasure& m, double a, double b) {
  if (!(a > 0.0) || !(b > a)) throw std::invalid_argument("check_assumptions requires 0 < a < b");
  AssumptionReport rep;
  rep.dim = m.dim();
  rep.direction_rank = m.direction_rank();
  rep.spans = rep.direction_rank == m.dim();
  rep.separators_positive = true;
  for (int r = 1; r <= 2 * m.dim(); ++r) {
    const double mass = m.separator_mass(SeparatorClass(a, b, r));
    rep.separator_masses.push_back(mass);
    if (!(mass > 0.0)) rep.separators_positive = false;
  }
  return rep;
}

} // namespace stit
