#pragma once

// Numerical kernels for open polygonal arms in 3-space: vectors, triple
// products, the planar shoelace area, the signed volume of an arm and the
// projected area along an arbitrary direction.

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace lvl {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

/// Determinant of the 3x3 matrix with rows u, v, w, i.e. u . (v x w).
constexpr double triple_product(const Vec3& u, const Vec3& v, const Vec3& w) {
  return dot(u, cross(v, w));
}

/// Rodrigues rotation of v by `angle` about the unit vector `axis`.
Vec3 rotate_about(const Vec3& v, const Vec3& axis, double angle);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

constexpr Point2 operator+(const Point2& a, const Point2& b) { return {a.x + b.x, a.y + b.y}; }
constexpr Point2 operator-(const Point2& a, const Point2& b) { return {a.x - b.x, a.y - b.y}; }
constexpr Point2 operator*(double s, const Point2& a) { return {s * a.x, s * a.y}; }
constexpr double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }

/// Edge lengths l_1..l_n of an arm, n >= 2, all strictly positive.
class ArmLengths {
 public:
  explicit ArmLengths(std::vector<double> lengths);

  std::size_t size() const { return lengths_.size(); }
  double operator[](std::size_t i) const { return lengths_[i]; }
  std::span<const double> values() const { return lengths_; }
  double total() const;

  friend bool operator==(const ArmLengths&, const ArmLengths&) = default;

 private:
  std::vector<double> lengths_;
};

/// Which sphere product the configuration lives on.
///
///  - Full:    u_1 is an arbitrary unit vector held fixed, u_2..u_n on S^2.
///  - Reduced: as Full but u_1 = (1,0,0) exactly.
///  - PlaneB:  3-arms only; u_1 = (1,0,0), u_2 restricted to the xy-plane
///             (a circle), u_3 on S^2.
enum class ParamMode { Full, Reduced, PlaneB };

std::string_view to_string(ParamMode mode);
/// Accepts "full", "reduced", "plane_b"; throws std::invalid_argument otherwise.
ParamMode parse_mode(std::string_view name);

/// Tolerance under which a direction is silently renormalized to unit length.
inline constexpr double kUnitRenormTolerance = 1e-9;

/// Lengths plus unit edge directions; edge i is b_i = l_i * u_i.
class ArmConfiguration {
 public:
  /// Directions within kUnitRenormTolerance of unit length are renormalized;
  /// anything further off, or violating the mode constraints, throws
  /// std::invalid_argument.
  ArmConfiguration(ArmLengths lengths, std::vector<Vec3> directions,
                   ParamMode mode = ParamMode::Reduced);

  std::size_t size() const { return directions_.size(); }
  const ArmLengths& lengths() const { return lengths_; }
  double length(std::size_t i) const { return lengths_[i]; }
  std::span<const Vec3> directions() const { return directions_; }
  const Vec3& direction(std::size_t i) const { return directions_[i]; }
  ParamMode mode() const { return mode_; }

  Vec3 edge(std::size_t i) const { return lengths_[i] * directions_[i]; }
  std::vector<Vec3> edges() const;

  /// Same lengths and mode with new directions (validated again).
  ArmConfiguration with_directions(std::vector<Vec3> directions) const;
  ArmConfiguration with_mode(ParamMode mode) const;

  friend bool operator==(const ArmConfiguration&, const ArmConfiguration&) = default;

 private:
  ArmLengths lengths_;
  std::vector<Vec3> directions_;
  ParamMode mode_;
};

/// Ordered planar vertices, at least two.
class PlanarChain {
 public:
  explicit PlanarChain(std::vector<Point2> vertices);

  std::size_t size() const { return vertices_.size(); }
  const Point2& operator[](std::size_t i) const { return vertices_[i]; }
  std::span<const Point2> vertices() const { return vertices_; }

 private:
  std::vector<Point2> vertices_;
};

/// Shoelace area A (not 2A). The closing term from the last vertex back to
/// the first is always included, so an open chain is measured as the polygon
/// obtained by adding that edge; `closed` only documents intent.
double signed_area(const PlanarChain& chain, bool closed);

/// Sum over k of [e_1, c_k, c_{k+1}] with c_k the partial sums of `edges`;
/// the first edge plays the role of the axis. Needs at least two edges.
double signed_volume_of_edges(std::span<const Vec3> edges);

/// Signed volume of an arm with n >= 3 edges.
double signed_volume(const ArmConfiguration& cfg);

/// Signed area of the arm projected along p, scaled by |p|; identical to the
/// signed volume of the arm with p prepended as its first edge.
double projected_area(const Vec3& p, const ArmConfiguration& cfg);

/// Right-handed orthonormal basis (e_u, e_v) of the plane orthogonal to
/// `axis`, with e_u x e_v = axis / |axis|. e_u comes from Gram-Schmidt on the
/// coordinate vector least aligned with the axis (lowest index on ties).
std::pair<Vec3, Vec3> perp_basis(const Vec3& axis);

/// Vertices 0, c_2^perp, c_2^perp + c_3^perp, ... of the arm b_2..b_n
/// projected onto the plane orthogonal to `axis`, in perp_basis coordinates.
PlanarChain project_perp(const ArmConfiguration& cfg, const Vec3& axis);

}  // namespace lvl
