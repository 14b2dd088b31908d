#pragma once

// Decides which case of the critical-arm structure a critical configuration
// realizes, working on the projection of b_2..b_n onto the plane orthogonal
// to the first edge:
//
//   FullOrtho    every free joint satisfies the orthogonality case; the
//                projected arm is diacyclic.
//   Aligned      every joint satisfies the parallel case and the arm lies
//                on the line of b_1.
//   ZigzagFamily every joint parallel, but the projection is a nontrivial
//                back-and-forth along one diameter.
//   Mixed(k)     after moving the parallel joints to the end (mirror
//                symmetry), joints 2..k are orthogonal and k+1..n parallel.
//                The head b_2..b_k closes into a cyclic polygon when n-k is
//                odd and spans a diameter when n-k is even; the tail projects
//                onto that diameter.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lvl/geometry.hpp"

namespace lvl {

struct CircleFit {
  Point2 center;
  double radius = 0.0;  // +inf when the points are collinear
  double rms = 0.0;     // rms of |p - center| - radius

  bool valid() const { return std::isfinite(radius); }
};

/// Taubin algebraic circle fit (Newton on the characteristic cubic).
/// Requires >= 3 points; collinear input yields an infinite radius.
CircleFit fit_circle(std::span<const Point2> points);

struct Verdict {
  bool ok = false;
  double residual = 0.0;  // dimensionless; ok iff residual <= tol
};

struct ChainCircleVerdict {
  bool ok = false;
  CircleFit circle;
  double rms_residual = 0.0;    // rms / radius
  double shape_residual = 0.0;  // diameter mismatch, or closure gap
  double center_residual = 0.0; // midpoint of the end points vs. center (diacyclic only)
};

/// All vertices on one circle with the first and last vertex antipodal.
ChainCircleVerdict check_diacyclic(const PlanarChain& chain, double tol);

/// Chain closes up (|p_first - p_last| <= tol * perimeter) and its vertices
/// lie on one circle.
ChainCircleVerdict check_cyclic_closed(const PlanarChain& chain, double tol);

struct ZigzagVerdict {
  bool ok = false;
  double cancel_residual = 0.0;  // max |b_r^perp + b_{r+1}^perp| / total length
  bool lengths_ok = true;        // every tail edge reaches across the circle
  Vec3 interval_direction;       // unit direction of the common interval, or 0
};

/// Checks b_r^perp + b_{r+1}^perp = 0 for r >= from_joint (1-based, 2..n),
/// perpendicular to the first edge. When `radius` is given, also checks each
/// tail edge can realize a diameter chord of that circle, |b_i| >= 2R.
ZigzagVerdict detect_zigzag(const ArmConfiguration& cfg, std::size_t from_joint, double tol,
                            std::optional<double> radius = std::nullopt);

enum class JointFlag { Ortho, Parallel, Ambiguous };
enum class ArmLabel { FullOrtho, Aligned, ZigzagFamily, Mixed };
enum class PlanarSubtype { CyclicClosed, Diacyclic };

std::string_view to_string(JointFlag f);
std::string_view to_string(ArmLabel l);
std::string_view to_string(PlanarSubtype s);
JointFlag parse_joint_flag(std::string_view s);
ArmLabel parse_label(std::string_view s);
PlanarSubtype parse_planar_subtype(std::string_view s);

struct ClassificationReport {
  std::vector<JointFlag> pattern;  // joints 2..n
  ArmLabel label = ArmLabel::Aligned;
  int split = 1;                   // k: 1 + number of orthogonal joints
  bool degraded = false;           // some joint fell in the ambiguous zone
  bool mirror_normalized = true;   // parallel joints already at the end

  std::optional<CircleFit> circle;  // fit to the projected vertices
  double circle_rms_relative = 0.0; // circle->rms / circle->radius
  Verdict diameter_circle;          // vertices on the circle with diameter B_1 B_n^perp

  Verdict closing;   // mirror-normalized head closes up
  Verdict diameter;  // mirror-normalized head ends antipodal to its start
  Verdict zigzag;    // tail edges project onto diameters
  bool parity_ok = false;
  std::optional<PlanarSubtype> planar_subtype;

  double value_identity_residual = 0.0;  // |V - l_1 * 2A| / |V|
};

/// Default classification tolerance.
inline constexpr double kClassifyTolerance = 1e-6;

/// Tolerances are scaled by the total arm length. Throws for PlaneB mode.
ClassificationReport classify_critical(const ArmConfiguration& cfg, double tol = kClassifyTolerance);

}  // namespace lvl
