#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <sstream>

#include "lvl/gram.hpp"
#include "support.hpp"

using namespace lvl;

namespace {

// Cofactor expansion of the symmetric Gram matrix along its first row.
double det_oracle(double x, double y, double z, double a, double b, double c) {
  const double g[3][3] = {{a * a, z, y}, {z, b * b, x}, {y, x, c * c}};
  return g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
         g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
}

GramPoint random_point(std::mt19937_64& rng, double a, double b, double c, double widen = 1.0) {
  std::uniform_real_distribution<double> u(-widen, widen);
  return {u(rng) * b * c, u(rng) * a * c, u(rng) * a * b, a, b, c};
}

}  // namespace

TEST_CASE("determinant examples") {
  CHECK(gram_det({0, 0, 0, 1, 1, 1}) == 1.0);
  CHECK(gram_det({1, 1, 1, 1, 1, 1}) == 0.0);
  CHECK(gram_det({0, 0, 0, 2, 1, 1}) == 4.0);
  CHECK(gram_det({0.5, 0, 0, 1, 1, 1}) == doctest::Approx(0.75));
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto l = lvl::test::random_lengths(rng, 3);
    const auto p = random_point(rng, l[0], l[1], l[2], 1.5);
    const double want = det_oracle(p.x, p.y, p.z, p.a, p.b, p.c);
    CHECK(std::abs(gram_det(p) - want) <= 1e-13 * (1 + std::abs(want)));
    CHECK(gram_matrix(p).determinant() == doctest::Approx(want).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("gradient matches finite differences of the oracle") {
  std::mt19937_64 rng(2);
  const double h = 1e-5;
  for (int t = 0; t < 200; ++t) {
    const auto l = lvl::test::random_lengths(rng, 3);
    const auto p = random_point(rng, l[0], l[1], l[2]);
    const Vec3 g = gram_gradient(p);
    const double fx = (det_oracle(p.x + h, p.y, p.z, p.a, p.b, p.c) - det_oracle(p.x - h, p.y, p.z, p.a, p.b, p.c)) / (2 * h);
    const double fy = (det_oracle(p.x, p.y + h, p.z, p.a, p.b, p.c) - det_oracle(p.x, p.y - h, p.z, p.a, p.b, p.c)) / (2 * h);
    const double fz = (det_oracle(p.x, p.y, p.z + h, p.a, p.b, p.c) - det_oracle(p.x, p.y, p.z - h, p.a, p.b, p.c)) / (2 * h);
    const double sc = std::max(1.0, norm(g));
    CHECK(std::abs(g.x - fx) <= 1e-7 * sc);
    CHECK(std::abs(g.y - fy) <= 1e-7 * sc);
    CHECK(std::abs(g.z - fz) <= 1e-7 * sc);
  }
}

TEST_CASE("Hessian is the exact second derivative") {
  std::mt19937_64 rng(3);
  const double h = 1e-4;
  for (int t = 0; t < 50; ++t) {
    const auto p = random_point(rng, 1.3, 0.7, 1.1);
    const Eigen::Matrix3d hm = gram_hessian(p);
    // the determinant is cubic, so central differences of the gradient are exact up to rounding
    for (int k = 0; k < 3; ++k) {
      GramPoint pp = p, pm = p;
      double* fp[3] = {&pp.x, &pp.y, &pp.z};
      double* fm[3] = {&pm.x, &pm.y, &pm.z};
      *fp[k] += h;
      *fm[k] -= h;
      const Vec3 col = (1.0 / (2 * h)) * (gram_gradient(pp) - gram_gradient(pm));
      CHECK(std::abs(hm(0, k) - col.x) <= 1e-8);
      CHECK(std::abs(hm(1, k) - col.y) <= 1e-8);
      CHECK(std::abs(hm(2, k) - col.z) <= 1e-8);
    }
  }
}

TEST_CASE("half Hessian determinant identity on 1000 points") {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto l = lvl::test::random_lengths(rng, 3);
    const auto p = random_point(rng, l[0], l[1], l[2], 1.5);
    const double lhs = (0.5 * gram_hessian(p)).determinant();
    const double rhs = -det_oracle(-p.x, -p.y, -p.z, p.a, p.b, p.c);
    worst = std::max(worst, lvl::test::rel_err(lhs, rhs, 1e-300));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("critical points of det G") {
  for (const auto& l : std::vector<std::array<double, 3>>{{1, 1, 1}, {2, 1, 1}, {0.7, 1.3, 0.4}}) {
    const auto [a, b, c] = l;
    const auto cps = gram_critical_points(a, b, c);
    // integer lengths make every product exact
    const bool exact = a == std::floor(a) && b == std::floor(b) && c == std::floor(c);
    const double eps = exact ? 0.0 : 1e-15 * (a * a * b * c + a * b * b * c + a * b * c * c);
    REQUIRE(cps.size() == 5);
    int origin = 0;
    std::set<std::array<int, 3>> corners;
    for (const auto& cp : cps) {
      CHECK(norm(gram_gradient(cp.point)) <= eps);
      if (cp.point.x == 0.0 && cp.point.y == 0.0 && cp.point.z == 0.0) {
        ++origin;
        CHECK(cp.value == doctest::Approx(a * a * b * b * c * c));
        CHECK(cp.morse_index == 3);
      } else {
        CHECK(std::abs(cp.point.x) == doctest::Approx(b * c));
        CHECK(std::abs(cp.point.y) == doctest::Approx(a * c));
        CHECK(std::abs(cp.point.z) == doctest::Approx(a * b));
        CHECK(cp.point.x * cp.point.y * cp.point.z > 0.0);
        CHECK(std::abs(cp.value) <= eps);
        CHECK(cp.morse_index == 2);
        corners.insert({cp.point.x > 0 ? 1 : -1, cp.point.y > 0 ? 1 : -1, cp.point.z > 0 ? 1 : -1});
      }
      CHECK(std::is_sorted(cp.eigenvalues.begin(), cp.eigenvalues.end()));
    }
    CHECK(origin == 1);
    CHECK(corners.size() == 4);
  }
  CHECK_THROWS_AS(gram_critical_points(1, 0, 1), std::invalid_argument);
}

TEST_CASE("det G equals V squared on 1000 random arms") {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto cfg = lvl::test::random_arm(rng, lvl::test::random_lengths(rng, 3));
    const auto b = cfg.edges();
    const GramPoint p = gram_from_config(cfg);
    CHECK(p.x == doctest::Approx(dot(b[1], b[2])));
    CHECK(p.in_box(1e-12));
    const double v = lvl::test::volume_oracle(b);
    worst = std::max(worst, std::abs(gram_det(p) - v * v) / (1 + v * v));
  }
  CHECK(worst <= 1e-10);
  CHECK_THROWS_AS(gram_from_config(ArmConfiguration(ArmLengths({1, 1, 1, 1}), {{1, 0, 0}, {1, 0, 0}, {1, 0, 0}, {1, 0, 0}})),
                  std::invalid_argument);
}

TEST_CASE("reconstruction round trip") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 200; ++t) {
    const auto cfg = lvl::test::random_arm(rng, lvl::test::random_lengths(rng, 3));
    const GramPoint p = gram_from_config(cfg);
    const auto r = reconstruct_from_gram(p);
    const GramPoint q = gram_from_config(r);
    CHECK(std::abs(q.x - p.x) <= 1e-10);
    CHECK(std::abs(q.y - p.y) <= 1e-10);
    CHECK(std::abs(q.z - p.z) <= 1e-10);
    CHECK(r.mode() == ParamMode::Reduced);
    CHECK(r.direction(1).y >= 0.0);
    CHECK(std::abs(r.direction(1).z) <= 1e-15);
    CHECK(std::abs(signed_volume(r) - std::abs(signed_volume(cfg))) <= 1e-10);
    CHECK(std::abs(signed_volume(reconstruct_from_gram(p, true)) + std::abs(signed_volume(cfg))) <= 1e-10);
  }
  // singular (aligned) Gram matrix
  const auto al = reconstruct_from_gram({1, -1, -1, 1, 1, 1});
  CHECK(norm(al.direction(1) + al.direction(0)) <= 1e-7);
  CHECK(signed_volume(al) == doctest::Approx(0.0).scale(1.0));
  // outside the cone
  CHECK_THROWS_AS(reconstruct_from_gram({2, 2, 2, 1, 1, 1}), std::invalid_argument);
}

TEST_CASE("cosine rule conversion") {
  const auto d = cosine_rule_convert({0.5, 0, -1, 1, 2, 3});
  CHECK(d.d12 == doctest::Approx(1 + 4 + 2));
  CHECK(d.d13 == doctest::Approx(1 + 9));
  CHECK(d.d23 == doctest::Approx(4 + 9 - 1));
  // squared distances between the tips of b1, b2 drawn from one point
  std::mt19937_64 rng(7);
  const auto cfg = lvl::test::random_arm(rng, {1.1, 0.6, 1.4});
  const auto b = cfg.edges();
  const auto c = cosine_rule_convert(gram_from_config(cfg));
  const Vec3 d12 = b[0] - b[1];
  CHECK(c.d12 == doctest::Approx(dot(d12, d12)));
}

TEST_CASE("isosurface at resolution 64") {
  const int res = 64;
  const auto mesh = extract_isosurface(1, 1, 1, 0.0, res, 1);
  REQUIRE_FALSE(mesh.empty());
  const double bound = isosurface_error_bound(1, 1, 1, res);
  CHECK(bound <= 0.02);
  double worst = 0.0;
  for (const auto& v : mesh.vertices) {
    const GramPoint p{v.x, v.y, v.z, 1, 1, 1};
    CHECK(p.in_box());
    worst = std::max(worst, std::abs(det_oracle(v.x, v.y, v.z, 1, 1, 1)));
  }
  CHECK(worst <= bound);
  CHECK(worst <= 0.02);
  const auto nv = static_cast<std::uint32_t>(mesh.vertices.size());
  for (const auto& t : mesh.triangles) {
    for (auto i : t) CHECK(i < nv);
    CHECK(t[0] != t[1]);
    CHECK(t[1] != t[2]);
    CHECK(t[0] != t[2]);
    const Vec3 n = cross(mesh.vertices[t[1]] - mesh.vertices[t[0]], mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    CHECK(norm(n) > 0.0);
  }
}

TEST_CASE("isosurface normals point out of the superlevel set") {
  const auto mesh = extract_isosurface(1, 1, 1, 0.5, 24, 1);
  REQUIRE_FALSE(mesh.empty());
  int agree = 0;
  for (const auto& t : mesh.triangles) {
    const Vec3 p0 = mesh.vertices[t[0]], p1 = mesh.vertices[t[1]], p2 = mesh.vertices[t[2]];
    const Vec3 n = cross(p1 - p0, p2 - p0);
    const Vec3 c = (1.0 / 3.0) * (p0 + p1 + p2);
    const Vec3 g = gram_gradient({c.x, c.y, c.z, 1, 1, 1});
    if (dot(n, g) < 0.0) ++agree;
  }
  CHECK(agree >= static_cast<int>(0.99 * static_cast<double>(mesh.triangles.size())));
}

TEST_CASE("isosurface is independent of the thread count") {
  const auto a = extract_isosurface(1.2, 0.9, 1.0, 0.1, 32, 1);
  const auto b = extract_isosurface(1.2, 0.9, 1.0, 0.1, 32, 5);
  REQUIRE(a.vertices.size() == b.vertices.size());
  REQUIRE(a.triangles.size() == b.triangles.size());
  for (std::size_t i = 0; i < a.vertices.size(); ++i) CHECK(a.vertices[i] == b.vertices[i]);
  CHECK(a.triangles == b.triangles);
}

TEST_CASE("isosurface above the maximum is empty") {
  CHECK(extract_isosurface(1, 1, 1, 1.5, 16, 1).empty());
  CHECK_THROWS_AS(extract_isosurface(1, 1, 1, 0.0, 1, 1), std::invalid_argument);
}

TEST_CASE("superlevel component around the origin") {
  const int res = 20;
  const auto m = superlevel_component(1, 1, 1, 0.0, res);
  REQUIRE(m.inside.size() == static_cast<std::size_t>(res * res * res));
  CHECK(m.count() > 0);
  // every marked sample has det >= 0 at the cell centres
  const double h = 2.0 / res;
  for (int k = 0; k < res; ++k) {
    for (int j = 0; j < res; ++j) {
      for (int i = 0; i < res; ++i) {
        if (!m.inside[static_cast<std::size_t>(i + res * (j + res * k))]) continue;
        const double x = -1 + (i + 0.5) * h, y = -1 + (j + 0.5) * h, z = -1 + (k + 0.5) * h;
        CHECK(det_oracle(x, y, z, 1, 1, 1) >= 0.0);
      }
    }
  }
  CHECK(superlevel_component(1, 1, 1, 0.9, res).count() < m.count());
}

TEST_CASE("OBJ output") {
  TriangleMesh mesh;
  mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0.5}};
  mesh.triangles = {{0, 1, 2}};
  std::ostringstream os;
  write_obj(mesh, os);
  CHECK(os.str() == "v 0 0 0\nv 1 0 0\nv 0 1 0.5\nf 1 2 3\n");
}
