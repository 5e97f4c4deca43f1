#pragma once

#include <array>
#include <cassert>
#include <cmath>

namespace stit {

inline constexpr int kMaxDim = 3;

/// A point or direction of R^dim with dim in {2, 3}.
///
/// Coordinates beyond `dim` are kept at zero, so dot products and norms never
/// need to look at the dimension.
class Vector {
public:
  Vector() = default;
  explicit Vector(int dim) : dim_(dim) { assert(dim == 2 || dim == 3); }
  Vector(double x, double y) : dim_(2), c_{x, y, 0.0} {}
  Vector(double x, double y, double z) : dim_(3), c_{x, y, z} {}

  static Vector zero(int dim) { return Vector(dim); }
  static Vector axis(int dim, int r) {
    Vector v(dim);
    v.c_[static_cast<std::size_t>(r)] = 1.0;
    return v;
  }
  static Vector filled(int dim, double value) {
    Vector v(dim);
    for (int r = 0; r < dim; ++r) v[r] = value;
    return v;
  }

  int dim() const { return dim_; }

  double operator[](int r) const { return c_[static_cast<std::size_t>(r)]; }
  double& operator[](int r) { return c_[static_cast<std::size_t>(r)]; }

  Vector& operator+=(const Vector& o) {
    for (std::size_t i = 0; i < kMaxDim; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Vector& operator-=(const Vector& o) {
    for (std::size_t i = 0; i < kMaxDim; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Vector& operator*=(double s) {
    for (auto& x : c_) x *= s;
    return *this;
  }

  friend Vector operator+(Vector a, const Vector& b) { return a += b; }
  friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
  friend Vector operator*(Vector a, double s) { return a *= s; }
  friend Vector operator*(double s, Vector a) { return a *= s; }
  friend Vector operator-(Vector a) { return a *= -1.0; }

  friend bool operator==(const Vector& a, const Vector& b) = default;

  friend double dot(const Vector& a, const Vector& b) {
    return a.c_[0] * b.c_[0] + a.c_[1] * b.c_[1] + a.c_[2] * b.c_[2];
  }

  bool is_finite() const {
    return std::isfinite(c_[0]) && std::isfinite(c_[1]) && std::isfinite(c_[2]);
  }

private:
  int dim_ = 2;
  std::array<double, kMaxDim> c_{};
};

inline double norm(const Vector& v) { return std::sqrt(dot(v, v)); }

inline double distance(const Vector& a, const Vector& b) { return norm(a - b); }

inline Vector normalized(const Vector& v) { return v * (1.0 / norm(v)); }

inline Vector cross(const Vector& a, const Vector& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// True when the first nonzero coordinate of `u` is positive.
inline bool in_canonical_hemisphere(const Vector& u) {
  for (int r = 0; r < u.dim(); ++r) {
    if (u[r] > 0.0) return true;
    if (u[r] < 0.0) return false;
  }
  return false;
}

} // namespace stit
