#include "lvl/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lvl {

Vec3 rotate_about(const Vec3& v, const Vec3& axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return c * v + s * cross(axis, v) + ((1.0 - c) * dot(axis, v)) * axis;
}

ArmLengths::ArmLengths(std::vector<double> lengths) : lengths_(std::move(lengths)) {
  if (lengths_.size() < 2) {
    throw std::invalid_argument("lengths: an arm needs at least 2 edges");
  }
  for (std::size_t i = 0; i < lengths_.size(); ++i) {
    if (!std::isfinite(lengths_[i]) || lengths_[i] <= 0.0) {
      throw std::invalid_argument("lengths[" + std::to_string(i) + "]: must be finite and > 0");
    }
  }
}

double ArmLengths::total() const { return std::accumulate(lengths_.begin(), lengths_.end(), 0.0); }

std::string_view to_string(ParamMode mode) {
  switch (mode) {
    case ParamMode::Full:
      return "full";
    case ParamMode::Reduced:
      return "reduced";
    case ParamMode::PlaneB:
      return "plane_b";
  }
  return "unknown";
}

ParamMode parse_mode(std::string_view name) {
  if (name == "full") return ParamMode::Full;
  if (name == "reduced") return ParamMode::Reduced;
  if (name == "plane_b") return ParamMode::PlaneB;
  throw std::invalid_argument("mode: expected one of full, reduced, plane_b (got '" +
                              std::string(name) + "')");
}

namespace {

constexpr Vec3 kE1{1.0, 0.0, 0.0};

std::vector<Vec3> validated_directions(std::vector<Vec3> dirs, std::size_t n, ParamMode mode) {
  if (dirs.size() != n) {
    throw std::invalid_argument("directions: expected " + std::to_string(n) + " vectors, got " +
                                std::to_string(dirs.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    Vec3& u = dirs[i];
    if (!is_finite(u)) {
      throw std::invalid_argument("directions[" + std::to_string(i) + "]: non-finite component");
    }
    const double len = norm(u);
    if (std::abs(len - 1.0) > kUnitRenormTolerance) {
      throw std::invalid_argument("directions[" + std::to_string(i) +
                                  "]: not a unit vector (|u| = " + std::to_string(len) + ")");
    }
    // Leave already-normalized input bit-for-bit alone so serialized
    // configurations read back unchanged.
    if (std::abs(len - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) u *= 1.0 / len;
  }
  if (mode == ParamMode::Reduced || mode == ParamMode::PlaneB) {
    if (norm(dirs[0] - kE1) > kUnitRenormTolerance) {
      throw std::invalid_argument("directions[0]: must be (1,0,0) in this mode");
    }
    dirs[0] = kE1;
  }
  if (mode == ParamMode::PlaneB) {
    if (n != 3) {
      throw std::invalid_argument("mode plane_b: only defined for 3-arms");
    }
    if (std::abs(dirs[1].z) > kUnitRenormTolerance) {
      throw std::invalid_argument("directions[1]: must lie in the xy-plane in mode plane_b");
    }
    if (dirs[1].z != 0.0) {
      dirs[1].z = 0.0;
      dirs[1] *= 1.0 / norm(dirs[1]);
    }
  }
  return dirs;
}

}  // namespace

ArmConfiguration::ArmConfiguration(ArmLengths lengths, std::vector<Vec3> directions, ParamMode mode)
    : lengths_(std::move(lengths)),
      directions_(validated_directions(std::move(directions), lengths_.size(), mode)),
      mode_(mode) {}

std::vector<Vec3> ArmConfiguration::edges() const {
  std::vector<Vec3> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = edge(i);
  return out;
}

ArmConfiguration ArmConfiguration::with_directions(std::vector<Vec3> directions) const {
  return ArmConfiguration(lengths_, std::move(directions), mode_);
}

ArmConfiguration ArmConfiguration::with_mode(ParamMode mode) const {
  return ArmConfiguration(lengths_, directions_, mode);
}

PlanarChain::PlanarChain(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) {
    throw std::invalid_argument("chain: at least 2 vertices required");
  }
  for (const auto& p : vertices_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("chain: non-finite vertex");
    }
  }
}

double signed_area(const PlanarChain& chain, bool /*closed*/) {
  const auto v = chain.vertices();
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2& p = v[i];
    const Point2& q = v[(i + 1) % v.size()];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

double signed_volume_of_edges(std::span<const Vec3> edges) {
  if (edges.size() < 2) {
    throw std::invalid_argument("signed volume: at least 2 edges required");
  }
  // [b_1, c_k, c_{k+1}] = [b_1, c_k, b_{k+1}] since [b_1, c_k, c_k] = 0.
  const Vec3& axis = edges[0];
  Vec3 partial = edges[0];
  double v = 0.0;
  for (std::size_t k = 1; k < edges.size(); ++k) {
    v += triple_product(axis, partial, edges[k]);
    partial += edges[k];
  }
  return v;
}

double signed_volume(const ArmConfiguration& cfg) {
  if (cfg.size() < 3) {
    throw std::invalid_argument("signed volume: arm needs at least 3 edges");
  }
  const auto e = cfg.edges();
  return signed_volume_of_edges(e);
}

double projected_area(const Vec3& p, const ArmConfiguration& cfg) {
  if (!is_finite(p) || norm(p) == 0.0) {
    throw std::invalid_argument("projection: direction must be finite and nonzero");
  }
  std::vector<Vec3> e;
  e.reserve(cfg.size() + 1);
  e.push_back(p);
  for (std::size_t i = 0; i < cfg.size(); ++i) e.push_back(cfg.edge(i));
  return signed_volume_of_edges(e);
}

std::pair<Vec3, Vec3> perp_basis(const Vec3& axis) {
  const double len = norm(axis);
  if (!std::isfinite(len) || len == 0.0) {
    throw std::invalid_argument("axis: must be finite and nonzero");
  }
  const Vec3 n = (1.0 / len) * axis;
  const double mags[3] = {std::abs(n.x), std::abs(n.y), std::abs(n.z)};
  const auto pick = static_cast<std::size_t>(std::min_element(mags, mags + 3) - mags);
  Vec3 e{};
  if (pick == 0) e.x = 1.0;
  if (pick == 1) e.y = 1.0;
  if (pick == 2) e.z = 1.0;
  Vec3 u = e - dot(e, n) * n;
  u *= 1.0 / norm(u);
  return {u, cross(n, u)};
}

PlanarChain project_perp(const ArmConfiguration& cfg, const Vec3& axis) {
  const auto [eu, ev] = perp_basis(axis);
  std::vector<Point2> verts;
  verts.reserve(cfg.size());
  Point2 at{0.0, 0.0};
  verts.push_back(at);
  for (std::size_t i = 1; i < cfg.size(); ++i) {
    const Vec3 b = cfg.edge(i);
    at = at + Point2{dot(b, eu), dot(b, ev)};
    verts.push_back(at);
  }
  return PlanarChain(std::move(verts));
}

}  // namespace lvl
