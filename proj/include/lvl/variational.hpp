#pragma once

// First- and second-order analysis of the signed volume on the sphere
// product of free edge directions. Joint indices in this header are 0-based
// positions into ArmConfiguration::directions(); joint 0 (the first edge) is
// always held fixed, so per-joint vectors below have n - 1 entries for the
// joints 1..n-1 (r = 2..n in 1-based numbering).

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lvl/geometry.hpp"

namespace lvl {

/// One unit tangent vector attached to a joint.
struct TangentDirection {
  std::size_t joint = 0;
  Vec3 dir;
};

/// Orthonormal tangent frame of the free joints: two vectors per S^2 joint,
/// one per circle joint (u_2 in PlaneB mode).
std::vector<TangentDirection> tangent_frame(const ArmConfiguration& cfg);
std::size_t tangent_dimension(const ArmConfiguration& cfg);

/// Renormalizing retraction u_j <- (u_j + sum_k xi_k t_k) / |...|.
ArmConfiguration retract(const ArmConfiguration& cfg, std::span<const TangentDirection> frame,
                         std::span<const double> xi);

/// w_r = b_1 x d_r with d_r = (b_2 + ... + b_{r-1}) - (b_{r+1} + ... + b_n),
/// so that the derivative of V along a perturbation db_r of the edge vector
/// is w_r . db_r. One entry per free joint.
std::vector<Vec3> euclidean_gradient(const ArmConfiguration& cfg);

/// Tangential part of w_r at u_r (in-plane part for the PlaneB circle joint).
/// Still expressed per edge vector: the derivative with respect to the unit
/// direction u_r is l_r times this.
std::vector<Vec3> riemannian_gradient(const ArmConfiguration& cfg);

/// Euclidean norm of the stacked riemannian_gradient.
double gradient_norm(const ArmConfiguration& cfg);

/// Derivatives of V(retract(cfg, frame, xi)) at xi = 0.
Eigen::VectorXd frame_gradient(const ArmConfiguration& cfg, std::span<const TangentDirection> frame);

struct JointResidual {
  double ortho = 0.0;     // |tangential part of w_r|
  double parallel = 0.0;  // |b_1 x d_r| = |w_r|
  Vec3 d;                 // d_r
};

struct ConditionResiduals {
  std::vector<JointResidual> joints;  // joints 1..n-1

  /// Joint satisfies the orthogonality case: gradient tangential part
  /// vanishes while b_1 x d_r does not.
  bool ortho_satisfied(std::size_t i, double tol) const {
    return joints[i].ortho <= tol && joints[i].parallel > tol;
  }
  /// Joint satisfies the parallel case: d_r lies on the line of b_1.
  bool parallel_satisfied(std::size_t i, double tol) const { return joints[i].parallel <= tol; }
};

ConditionResiduals condition_residuals(const ArmConfiguration& cfg);

/// Gradient norm above which a tangent Hessian is flagged as off-critical.
inline constexpr double kHessianGradientLimit = 1e-6;

struct TangentHessian {
  Eigen::MatrixXd matrix;
  std::vector<TangentDirection> frame;
  double step = 0.0;
  double gradient_norm = 0.0;
  bool off_critical = false;  // gradient_norm > kHessianGradientLimit
};

/// Default step: 1e-4 in the (dimensionless) frame coordinates. Truncation
/// and rounding errors then both scale like V, as does the null threshold.
double default_hessian_step(const ArmConfiguration& cfg);

/// Central second differences of V along the tangent frame, symmetrized.
TangentHessian hessian_tangent(const ArmConfiguration& cfg, std::optional<double> step = std::nullopt);

struct MorseData {
  std::vector<double> eigenvalues;  // ascending
  int morse_index = 0;              // eigenvalues < -tau
  int nullity = 0;                  // |eigenvalue| <= tau
  int transversal_index = 0;        // negatives among the non-null directions
  double tau = 0.0;
  bool off_critical = false;

  int dimension() const { return static_cast<int>(eigenvalues.size()); }
  int positives() const { return dimension() - morse_index - nullity; }
};

/// Default threshold 1e-6 * max(1, spectral radius).
MorseData morse_from_matrix(const Eigen::MatrixXd& symmetric, std::optional<double> tau = std::nullopt);
MorseData morse_data(const ArmConfiguration& cfg, std::optional<double> tau = std::nullopt);

}  // namespace lvl
