#include "lvl/gram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "lvl/search.hpp"

namespace lvl {

bool GramPoint::in_box(double slack) const {
  return std::abs(x) <= b * c + slack && std::abs(y) <= a * c + slack && std::abs(z) <= a * b + slack;
}

Eigen::Matrix3d gram_matrix(const GramPoint& pt) {
  Eigen::Matrix3d g;
  g << pt.a * pt.a, pt.z, pt.y,  //
      pt.z, pt.b * pt.b, pt.x,   //
      pt.y, pt.x, pt.c * pt.c;
  return g;
}

double gram_det(const GramPoint& pt) {
  const double a2 = pt.a * pt.a;
  const double b2 = pt.b * pt.b;
  const double c2 = pt.c * pt.c;
  return 2.0 * pt.x * pt.y * pt.z - a2 * pt.x * pt.x - b2 * pt.y * pt.y - c2 * pt.z * pt.z + a2 * b2 * c2;
}

Vec3 gram_gradient(const GramPoint& pt) {
  return {2.0 * (pt.y * pt.z - pt.a * pt.a * pt.x), 2.0 * (pt.x * pt.z - pt.b * pt.b * pt.y),
          2.0 * (pt.x * pt.y - pt.c * pt.c * pt.z)};
}

Eigen::Matrix3d gram_hessian(const GramPoint& pt) {
  Eigen::Matrix3d h;
  h << -2.0 * pt.a * pt.a, 2.0 * pt.z, 2.0 * pt.y,  //
      2.0 * pt.z, -2.0 * pt.b * pt.b, 2.0 * pt.x,   //
      2.0 * pt.y, 2.0 * pt.x, -2.0 * pt.c * pt.c;
  return h;
}

std::vector<GramCriticalPoint> gram_critical_points(double a, double b, double c) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) {
    throw std::invalid_argument("gram: edge lengths must be > 0");
  }
  // x = 0 forces y = z = 0. Otherwise eliminating x from yz = a^2 x and
  // xz = b^2 y gives z^2 = a^2 b^2, and cyclically x^2 = b^2 c^2,
  // y^2 = a^2 c^2; the signs are then fixed by the gradient vanishing.
  std::vector<GramPoint> candidates{{0.0, 0.0, 0.0, a, b, c}};
  for (int sx : {1, -1}) {
    for (int sy : {1, -1}) {
      for (int sz : {1, -1}) {
        candidates.push_back({sx * b * c, sy * a * c, sz * a * b, a, b, c});
      }
    }
  }
  const double scale = a * a * b * c + a * b * b * c + a * b * c * c;
  std::vector<GramCriticalPoint> out;
  for (const auto& p : candidates) {
    if (norm(gram_gradient(p)) > 1e-12 * scale) continue;
    GramCriticalPoint cp;
    cp.point = p;
    cp.value = gram_det(p);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(gram_hessian(p), Eigen::EigenvaluesOnly);
    for (int i = 0; i < 3; ++i) {
      cp.eigenvalues[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
      if (es.eigenvalues()(i) < 0.0) ++cp.morse_index;
    }
    out.push_back(cp);
  }
  return out;
}

GramPoint gram_from_config(const ArmConfiguration& cfg) {
  if (cfg.size() != 3) {
    throw std::invalid_argument("gram: configuration must be a 3-arm");
  }
  const Vec3 b1 = cfg.edge(0);
  const Vec3 b2 = cfg.edge(1);
  const Vec3 b3 = cfg.edge(2);
  return {dot(b2, b3), dot(b1, b3), dot(b1, b2), cfg.length(0), cfg.length(1), cfg.length(2)};
}

ArmConfiguration reconstruct_from_gram(const GramPoint& pt, bool mirror) {
  if (!(pt.a > 0.0 && pt.b > 0.0 && pt.c > 0.0)) {
    throw std::invalid_argument("gram: edge lengths must be > 0");
  }
  const Eigen::Matrix3d g = gram_matrix(pt);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(g);
  const Eigen::Vector3d lam = es.eigenvalues();
  if (lam(0) < -1e-8 * g.trace()) {
    throw std::invalid_argument("gram: matrix is not positive semidefinite (smallest eigenvalue " +
                                std::to_string(lam(0)) + ")");
  }
  // Columns of B = sqrt(Lambda) Q^T satisfy B^T B = G. Rounding-level
  // eigenvalues are zeroed so rank-deficient input gives exactly planar arms.
  const Eigen::Vector3d kept = lam.unaryExpr([&](double l) { return l <= 1e-14 * g.trace() ? 0.0 : l; });
  const Eigen::Matrix3d bm = kept.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  std::array<Vec3, 3> e;
  for (int i = 0; i < 3; ++i) e[static_cast<std::size_t>(i)] = {bm(0, i), bm(1, i), bm(2, i)};

  // Right-handed frame with f1 along b1 and b2 in the (f1, f2) half-plane.
  const Vec3 f1 = (1.0 / norm(e[0])) * e[0];
  Vec3 f2{};
  for (std::size_t i = 1; i < 3 && norm(f2) == 0.0; ++i) {
    const Vec3 p = e[i] - dot(e[i], f1) * f1;
    if (norm(p) > 1e-12 * norm(e[i])) f2 = (1.0 / norm(p)) * p;
  }
  if (norm(f2) == 0.0) f2 = perp_basis(f1).first;
  const Vec3 f3 = cross(f1, f2);

  const ArmLengths lengths({pt.a, pt.b, pt.c});
  std::vector<Vec3> dirs(3);
  for (std::size_t i = 0; i < 3; ++i) {
    const Vec3 local{dot(e[i], f1), dot(e[i], f2), dot(e[i], f3)};
    dirs[i] = (1.0 / norm(local)) * local;
  }
  const double v = triple_product(dirs[0], dirs[1], dirs[2]);
  if ((v < 0.0 && !mirror) || (v > 0.0 && mirror)) {
    for (auto& u : dirs) u.z = -u.z;
  }
  return ArmConfiguration(lengths, std::move(dirs), ParamMode::Reduced);
}

CosineDiagonals cosine_rule_convert(const GramPoint& pt) {
  return {pt.a * pt.a + pt.b * pt.b - 2.0 * pt.z, pt.a * pt.a + pt.c * pt.c - 2.0 * pt.y,
          pt.b * pt.b + pt.c * pt.c - 2.0 * pt.x};
}

namespace {

struct Grid {
  int res = 0;
  double half[3] = {0, 0, 0};
  double step[3] = {0, 0, 0};

  Grid(double a, double b, double c, int resolution) : res(resolution) {
    half[0] = b * c;
    half[1] = a * c;
    half[2] = a * b;
    for (int d = 0; d < 3; ++d) step[d] = 2.0 * half[d] / res;
  }
  double coord(int axis, int i) const { return -half[axis] + (i + 0.5) * step[axis]; }
  Vec3 point(int i, int j, int k) const { return {coord(0, i), coord(1, j), coord(2, k)}; }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(res) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(res) * k);
  }
};

std::vector<double> sample(const Grid& grid, double a, double b, double c) {
  const int r = grid.res;
  std::vector<double> f(static_cast<std::size_t>(r) * r * r);
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) {
        const Vec3 p = grid.point(i, j, k);
        f[grid.index(i, j, k)] = gram_det({p.x, p.y, p.z, a, b, c});
      }
    }
  }
  return f;
}

struct EdgeVertex {
  std::uint64_t key = 0;
  Vec3 pos;
};

using RawTriangle = std::array<EdgeVertex, 3>;

// Six tetrahedra around the 0-7 diagonal; corner bit 0 = +x, 1 = +y, 2 = +z.
constexpr int kTets[6][4] = {{0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7},
                             {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7}};

}  // namespace

double isosurface_error_bound(double a, double b, double c, int resolution) {
  const Grid grid(a, b, c, resolution);
  const double l2 = grid.step[0] * grid.step[0] + grid.step[1] * grid.step[1] + grid.step[2] * grid.step[2];
  const double a2 = a * a, b2 = b * b, c2 = c * c;
  // Frobenius norm of the Hessian over the box.
  const double hbound = std::sqrt(4.0 * (a2 * a2 + b2 * b2 + c2 * c2) + 8.0 * (b2 * c2 + a2 * c2 + a2 * b2));
  return hbound * l2 / 8.0;
}

TriangleMesh extract_isosurface(double a, double b, double c, double level, int resolution, int threads) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) {
    throw std::invalid_argument("gram: edge lengths must be > 0");
  }
  if (resolution < 8) {
    throw std::invalid_argument("isosurface: resolution must be >= 8");
  }
  const Grid grid(a, b, c, resolution);
  const std::vector<double> f = sample(grid, a, b, c);
  TriangleMesh mesh;
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  if (level < *lo || level > *hi) return mesh;

  const double min_area = 1e-14 * (grid.step[0] * grid.step[0] + grid.step[1] * grid.step[1] +
                                   grid.step[2] * grid.step[2]);
  const std::uint64_t nodes = static_cast<std::uint64_t>(f.size());
  const int slabs = resolution - 1;
  std::vector<std::vector<RawTriangle>> per_slab(static_cast<std::size_t>(slabs));

  auto run_slab = [&](int k) {
    auto& out = per_slab[static_cast<std::size_t>(k)];
    for (int j = 0; j + 1 < resolution; ++j) {
      for (int i = 0; i + 1 < resolution; ++i) {
        std::size_t idx[8];
        Vec3 pos[8];
        double val[8];
        for (int corner = 0; corner < 8; ++corner) {
          const int ci = i + (corner & 1);
          const int cj = j + ((corner >> 1) & 1);
          const int ck = k + ((corner >> 2) & 1);
          idx[corner] = grid.index(ci, cj, ck);
          pos[corner] = grid.point(ci, cj, ck);
          val[corner] = f[idx[corner]] - level;
        }
        for (const auto& tet : kTets) {
          int pos_c[4], neg_c[4];
          int np = 0, nn = 0;
          for (int t : tet) {
            if (val[t] >= 0.0) {
              pos_c[np++] = t;
            } else {
              neg_c[nn++] = t;
            }
          }
          if (np == 0 || nn == 0) continue;
          auto cut = [&](int p, int q) {
            const std::size_t u = std::min(idx[p], idx[q]);
            const std::size_t w = std::max(idx[p], idx[q]);
            const double t = val[p] / (val[p] - val[q]);
            return EdgeVertex{static_cast<std::uint64_t>(u) * nodes + w, pos[p] + t * (pos[q] - pos[p])};
          };
          auto emit = [&](const EdgeVertex& v0, const EdgeVertex& v1, const EdgeVertex& v2) {
            Vec3 nrm = cross(v1.pos - v0.pos, v2.pos - v0.pos);
            if (0.5 * norm(nrm) <= min_area) return;
            const Vec3 centroid = (1.0 / 3.0) * (v0.pos + v1.pos + v2.pos);
            const Vec3 grad = gram_gradient({centroid.x, centroid.y, centroid.z, a, b, c});
            if (dot(nrm, grad) > 0.0) {
              out.push_back({v0, v2, v1});
            } else {
              out.push_back({v0, v1, v2});
            }
          };
          if (np == 1) {
            emit(cut(pos_c[0], neg_c[0]), cut(pos_c[0], neg_c[1]), cut(pos_c[0], neg_c[2]));
          } else if (nn == 1) {
            emit(cut(pos_c[0], neg_c[0]), cut(pos_c[1], neg_c[0]), cut(pos_c[2], neg_c[0]));
          } else {
            const EdgeVertex q0 = cut(pos_c[0], neg_c[0]);
            const EdgeVertex q1 = cut(pos_c[0], neg_c[1]);
            const EdgeVertex q2 = cut(pos_c[1], neg_c[1]);
            const EdgeVertex q3 = cut(pos_c[1], neg_c[0]);
            emit(q0, q1, q2);
            emit(q0, q2, q3);
          }
        }
      }
    }
  };

  const int workers = std::min(resolve_thread_count(threads), slabs);
  if (workers <= 1) {
    for (int k = 0; k < slabs; ++k) run_slab(k);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int k = w; k < slabs; k += workers) run_slab(k);
      });
    }
    for (auto& t : pool) t.join();
  }

  std::unordered_map<std::uint64_t, std::uint32_t> ids;
  for (const auto& slab : per_slab) {
    for (const auto& tri : slab) {
      std::array<std::uint32_t, 3> face{};
      for (std::size_t v = 0; v < 3; ++v) {
        auto [it, inserted] = ids.try_emplace(tri[v].key, static_cast<std::uint32_t>(mesh.vertices.size()));
        if (inserted) mesh.vertices.push_back(tri[v].pos);
        face[v] = it->second;
      }
      if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) continue;
      mesh.triangles.push_back(face);
    }
  }
  return mesh;
}

void write_obj(const TriangleMesh& mesh, std::ostream& os) {
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
    os << buf;
  }
  for (const auto& t : mesh.triangles) {
    os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

std::size_t GridMask::count() const {
  return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
}

GridMask superlevel_component(double a, double b, double c, double level, int resolution) {
  if (resolution < 2) throw std::invalid_argument("superlevel_component: resolution must be >= 2");
  const Grid grid(a, b, c, resolution);
  const std::vector<double> f = sample(grid, a, b, c);
  GridMask mask{resolution, std::vector<std::uint8_t>(f.size(), 0)};
  // Sample nearest the origin (the upper neighbour when the resolution is even).
  const int s = resolution / 2;
  if (f[grid.index(s, s, s)] < level) return mask;
  std::deque<std::array<int, 3>> queue{{s, s, s}};
  mask.inside[grid.index(s, s, s)] = 1;
  constexpr int kNbr[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  while (!queue.empty()) {
    const auto [i, j, k] = queue.front();
    queue.pop_front();
    for (const auto& d : kNbr) {
      const int ni = i + d[0], nj = j + d[1], nk = k + d[2];
      if (ni < 0 || nj < 0 || nk < 0 || ni >= resolution || nj >= resolution || nk >= resolution) continue;
      const std::size_t id = grid.index(ni, nj, nk);
      if (mask.inside[id] || f[id] < level) continue;
      mask.inside[id] = 1;
      queue.push_back({ni, nj, nk});
    }
  }
  return mask;
}

}  // namespace lvl
