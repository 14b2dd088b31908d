#pragma once

// Shared helpers for the C++ suites. Random arms here come from a plain
// mt19937_64 + normal sampling, deliberately not the library's own start
// generator, so tests do not share code paths with what they check.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lvl/geometry.hpp"

namespace lvl::test {

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    Vec3 v{g(rng), g(rng), g(rng)};
    const double n = norm(v);
    if (n > 1e-3) return (1.0 / n) * v;
  }
}

inline std::vector<double> random_lengths(std::mt19937_64& rng, std::size_t n, double lo = 0.3, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> l(n);
  for (auto& x : l) x = u(rng);
  return l;
}

/// Random configuration with u_1 = e1 (reduced) or arbitrary u_1 (full).
inline ArmConfiguration random_arm(std::mt19937_64& rng, std::vector<double> lengths,
                                   ParamMode mode = ParamMode::Reduced) {
  std::vector<Vec3> d(lengths.size());
  for (auto& u : d) u = random_unit(rng);
  if (mode != ParamMode::Full) d[0] = {1.0, 0.0, 0.0};
  return ArmConfiguration(ArmLengths(std::move(lengths)), std::move(d), mode);
}

/// det [u; v; w] through Eigen's LU, independent of triple_product.
inline double det3(const Vec3& u, const Vec3& v, const Vec3& w) {
  Eigen::Matrix3d m;
  m << u.x, u.y, u.z, v.x, v.y, v.z, w.x, w.y, w.z;
  return m.determinant();
}

/// Term-by-term signed volume sum_k [b_1, c_k, c_{k+1}] from raw edges.
inline double volume_oracle(const std::vector<Vec3>& b) {
  std::vector<Vec3> c(b.size());
  Vec3 acc{};
  for (std::size_t i = 0; i < b.size(); ++i) {
    acc += b[i];
    c[i] = acc;
  }
  double v = 0.0;
  for (std::size_t k = 0; k + 1 < b.size(); ++k) v += det3(b[0], c[k], c[k + 1]);
  return v;
}

inline double rel_err(double got, double want, double floor = 1.0) {
  return std::abs(got - want) / std::max(std::abs(want), floor);
}

inline Vec3 apply(const Eigen::Matrix3d& r, const Vec3& v) {
  const Eigen::Vector3d out = r * Eigen::Vector3d(v.x, v.y, v.z);
  return {out(0), out(1), out(2)};
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  const Vec3 axis = random_unit(rng);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  return Eigen::AngleAxisd(ang(rng), Eigen::Vector3d(axis.x, axis.y, axis.z)).toRotationMatrix();
}

}  // namespace lvl::test
