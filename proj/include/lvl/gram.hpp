#pragma once

// Gram-matrix picture of 3-arms. With edge lengths a, b, c on the diagonal,
// the free entries are x = b2.b3, y = b1.b3, z = b1.b2 and
//
//   det G = 2xyz - a^2 x^2 - b^2 y^2 - c^2 z^2 + a^2 b^2 c^2 = V^2.
//
// Realizable Gram matrices live in the box |x| <= bc, |y| <= ac, |z| <= ab.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "lvl/geometry.hpp"

namespace lvl {

struct GramPoint {
  double x = 0.0;  // b2 . b3
  double y = 0.0;  // b1 . b3
  double z = 0.0;  // b1 . b2
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;

  /// |x| <= bc, |y| <= ac, |z| <= ab, each widened by `slack`.
  bool in_box(double slack = 0.0) const;
};

Eigen::Matrix3d gram_matrix(const GramPoint& pt);

double gram_det(const GramPoint& pt);

/// Partial derivatives of det G with respect to (x, y, z).
Vec3 gram_gradient(const GramPoint& pt);

/// Second derivatives of det G in (x, y, z):
///   [[-2a^2, 2z, 2y], [2z, -2b^2, 2x], [2y, 2x, -2c^2]].
/// Half of this matrix has determinant -det G(-x, -y, -z).
Eigen::Matrix3d gram_hessian(const GramPoint& pt);

struct GramCriticalPoint {
  GramPoint point;
  double value = 0.0;
  std::array<double, 3> eigenvalues{};  // of gram_hessian, ascending
  int morse_index = 0;
};

/// The origin and the four box corners with xyz > 0, found by solving the
/// gradient system; indices come from the Hessian spectrum.
std::vector<GramCriticalPoint> gram_critical_points(double a, double b, double c);

/// Gram entries of a 3-arm. Throws unless the arm has exactly 3 edges.
GramPoint gram_from_config(const ArmConfiguration& cfg);

/// A Reduced-mode 3-arm realizing the Gram point, with b_2 in the upper
/// xy-half-plane and V >= 0 (V <= 0 when `mirror`). Throws
/// std::invalid_argument when the matrix has an eigenvalue below
/// -1e-8 * trace.
ArmConfiguration reconstruct_from_gram(const GramPoint& pt, bool mirror = false);

struct CosineDiagonals {
  double d12 = 0.0;  // a^2 + b^2 - 2z
  double d13 = 0.0;  // a^2 + c^2 - 2y
  double d23 = 0.0;  // b^2 + c^2 - 2x
};

CosineDiagonals cosine_rule_convert(const GramPoint& pt);

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  bool empty() const { return triangles.empty(); }
};

/// Level set {det G = level} inside the open box, on a grid of `resolution`
/// cell-centred samples per axis. Each cube is split into six tetrahedra
/// around its main diagonal, which keeps neighbouring cells consistent, so
/// the mesh has no cracks. Triangles face away from the superlevel set.
/// Slabs along z are processed in parallel (`threads` as in
/// resolve_thread_count); output order does not depend on scheduling.
TriangleMesh extract_isosurface(double a, double b, double c, double level, int resolution,
                                int threads = 0);

/// Upper bound on |det G - level| at vertices produced by linear edge
/// interpolation at this resolution: max |d^2 f| * L^2 / 8 with L the
/// longest tetrahedron edge.
double isosurface_error_bound(double a, double b, double c, int resolution);

/// Wavefront OBJ: "v x y z" with 9 significant digits, "f i j k" 1-based.
void write_obj(const TriangleMesh& mesh, std::ostream& os);

/// Grid mask (same sampling as extract_isosurface) of the 6-connected
/// component of {det G >= level} containing the sample nearest the origin.
struct GridMask {
  int resolution = 0;
  std::vector<std::uint8_t> inside;  // index i + r * (j + r * k)

  std::size_t count() const;
};

GridMask superlevel_component(double a, double b, double c, double level, int resolution);

}  // namespace lvl
