#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <map>

#include "lvl/search.hpp"
#include "support.hpp"

using namespace lvl;

namespace {
constexpr Vec3 e1{1, 0, 0};
constexpr Vec3 e2{0, 1, 0};
constexpr Vec3 e3{0, 0, 1};

SearchOptions quick(int restarts, ParamMode mode = ParamMode::Reduced, int threads = 1) {
  SearchOptions o;
  o.restarts = restarts;
  o.mode = mode;
  o.threads = threads;
  return o;
}

// value rounded to 1e-6 -> (index, nullity) pairs seen
std::multimap<long long, std::pair<int, int>> signatures(const SearchResult& r) {
  std::multimap<long long, std::pair<int, int>> out;
  for (const auto& rec : r.records) {
    out.emplace(std::llround(rec.value * 1e6), std::make_pair(rec.morse.morse_index, rec.morse.nullity));
  }
  return out;
}
}  // namespace

TEST_CASE("random starts are deterministic and well formed") {
  const ArmLengths l({1, 2, 3, 4});
  const auto a = random_start(l, ParamMode::Reduced, 7, 3);
  const auto b = random_start(l, ParamMode::Reduced, 7, 3);
  const auto c = random_start(l, ParamMode::Reduced, 7, 4);
  CHECK(a.directions()[2] == b.directions()[2]);
  CHECK_FALSE(a.directions()[2] == c.directions()[2]);
  CHECK(a.direction(0) == e1);
  const auto pb = random_start(ArmLengths({1, 1, 1}), ParamMode::PlaneB, 0, 0);
  CHECK(pb.direction(1).z == 0.0);
}

TEST_CASE("Newton refinement converges from a perturbed tri-orthogonal arm") {
  const Vec3 u2{0.05, 1, 0.02}, u3{-0.03, 0.04, 1};
  const ArmConfiguration start(ArmLengths({1, 1, 1}), {e1, (1.0 / norm(u2)) * u2, (1.0 / norm(u3)) * u3});
  const auto r = refine_newton(start, 1e-12);
  REQUIRE(r.converged);
  CHECK(r.grad_norm <= 1e-12);
  CHECK(std::abs(signed_volume(r.configuration) - 1.0) <= 1e-10);
}

TEST_CASE("Newton refinement leaves exact critical points alone") {
  const ArmConfiguration tri(ArmLengths({1, 1, 1}), {e1, e2, e3});
  const auto r = refine_newton(tri, 1e-12);
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  const ArmConfiguration al(ArmLengths({1, 1, 1, 1}), {e1, -1.0 * e1, e1, e1});
  CHECK(refine_newton(al, 1e-12).converged);
}

TEST_CASE("canonicalize rotates the first perpendicular joint onto +e2") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 20; ++t) {
    const auto cfg = lvl::test::random_arm(rng, {1, 1, 1, 1});
    const auto can = canonicalize(cfg);
    CHECK(can.direction(1).y > 0.0);
    CHECK(std::abs(can.direction(1).z) <= 1e-15);
    CHECK(std::abs(signed_volume(can) - signed_volume(cfg)) <= 1e-13);
    // idempotent
    const auto again = canonicalize(can);
    for (std::size_t i = 0; i < 4; ++i) CHECK(norm(again.direction(i) - can.direction(i)) <= 1e-15);
  }
  const ArmConfiguration al(ArmLengths({1, 1, 1}), {e1, e1, -1.0 * e1});
  CHECK(canonicalize(al).direction(2) == -1.0 * e1);
  // first joint aligned: the second one decides
  const ArmConfiguration part(ArmLengths({1, 1, 1}), {e1, e1, {0, 0, -1}});
  CHECK(norm(canonicalize(part).direction(2) - e2) <= 1e-15);
  CHECK_THROWS_AS(canonicalize(ArmConfiguration(ArmLengths({1, 1, 1}), {e1, e2, e3}, ParamMode::PlaneB)),
                  std::invalid_argument);
}

TEST_CASE("dedupe merges near-duplicates and sorts by value") {
  const ArmLengths l({1, 1, 1});
  auto rec = [&](Vec3 u3) {
    ArmConfiguration c(l, {e1, e2, u3});
    return CriticalPointRecord{c, signed_volume(c), 0.0, {}, std::nullopt, 1};
  };
  const Vec3 near{0, 1e-8, 1};
  std::vector<CriticalPointRecord> in{rec(-1.0 * e3), rec(e3), rec(near), rec(e3)};
  const auto out = dedupe(in);
  REQUIRE(out.size() == 2);
  CHECK(out[0].value == doctest::Approx(1.0));
  CHECK(out[0].multiplicity == 3);
  CHECK(out[1].value == doctest::Approx(-1.0));

  // order independent
  std::reverse(in.begin(), in.end());
  const auto out2 = dedupe(in);
  REQUIRE(out2.size() == 2);
  CHECK(out2[0].multiplicity == 3);
}

TEST_CASE("unit 3-arm inventory in full mode") {
  const auto r = find_critical_points(ArmLengths({1, 1, 1}), quick(60, ParamMode::Full));
  CHECK(r.summary.converged + r.summary.failed == 60);
  const auto sig = signatures(r);
  REQUIRE(sig.count(1000000) == 1);
  CHECK(sig.find(1000000)->second == std::make_pair(3, 1));
  REQUIRE(sig.count(-1000000) == 1);
  CHECK(sig.find(-1000000)->second == std::make_pair(0, 1));
  REQUIRE(sig.count(0) >= 1);
  for (auto [it, end] = sig.equal_range(0); it != end; ++it) CHECK(it->second == std::make_pair(2, 0));
  CHECK(sig.size() == sig.count(1000000) + sig.count(-1000000) + sig.count(0));
  for (const auto& rec : r.records) {
    REQUIRE(rec.classification);
    CHECK_FALSE(rec.classification->degraded);
  }
}

TEST_CASE("critical values scale with the product of the lengths") {
  const auto r = find_critical_points(ArmLengths({2, 1, 1}), quick(30));
  double vmax = -1e9, vmin = 1e9;
  for (const auto& rec : r.records) {
    vmax = std::max(vmax, rec.value);
    vmin = std::min(vmin, rec.value);
  }
  CHECK(std::abs(vmax - 2.0) <= 1e-8);
  CHECK(std::abs(vmin + 2.0) <= 1e-8);

  // V is homogeneous of degree 3 in the lengths
  const double s = 1.7;
  const auto base = find_critical_points(ArmLengths({1, 0.8, 0.6, 0.9}), quick(30));
  const auto big = find_critical_points(ArmLengths({s, 0.8 * s, 0.6 * s, 0.9 * s}), quick(30));
  REQUIRE(!base.records.empty());
  REQUIRE(!big.records.empty());
  CHECK(big.records.front().value == doctest::Approx(s * s * s * base.records.front().value).epsilon(1e-10));
  CHECK(big.records.back().value == doctest::Approx(s * s * s * base.records.back().value).epsilon(1e-10));
}

TEST_CASE("every record is a genuine critical point") {
  SearchOptions o = quick(45);
  o.seed = 5;
  const auto r = find_critical_points(ArmLengths({1.0, 0.9, 0.7, 0.5, 1.2}), o);
  REQUIRE(!r.records.empty());
  int mult = 0;
  for (const auto& rec : r.records) {
    CHECK(gradient_norm(rec.configuration) <= o.grad_tol);
    CHECK(rec.value == signed_volume(rec.configuration));
    CHECK(rec.configuration.direction(0) == e1);
    mult += rec.multiplicity;
  }
  CHECK(mult == r.summary.converged);
  for (std::size_t i = 1; i < r.records.size(); ++i) CHECK_FALSE(record_less(r.records[i], r.records[i - 1]));
}

TEST_CASE("results do not depend on the thread count") {
  const ArmLengths l({1.0, 0.9, 0.7, 0.5});
  const auto one = find_critical_points(l, quick(40, ParamMode::Reduced, 1));
  const auto four = find_critical_points(l, quick(40, ParamMode::Reduced, 4));
  REQUIRE(one.records.size() == four.records.size());
  CHECK(one.summary.converged == four.summary.converged);
  for (std::size_t i = 0; i < one.records.size(); ++i) {
    CHECK(one.records[i].value == four.records[i].value);
    CHECK(one.records[i].multiplicity == four.records[i].multiplicity);
    for (std::size_t j = 0; j < l.size(); ++j) {
      CHECK(one.records[i].configuration.direction(j) == four.records[i].configuration.direction(j));
    }
  }
}

TEST_CASE("plane_b search on the unit 3-arm") {
  const auto r = find_critical_points(ArmLengths({1, 1, 1}), quick(60, ParamMode::PlaneB));
  REQUIRE(!r.records.empty());
  bool saw_max = false, saw_circle = false;
  for (const auto& rec : r.records) {
    CHECK_FALSE(rec.classification.has_value());
    if (std::abs(rec.value - 1.0) <= 1e-9) saw_max = true;
    if (std::abs(rec.value) <= 1e-9 && rec.morse.nullity == 1) {
      saw_circle = true;
      CHECK(rec.morse.transversal_index == 1);
    }
  }
  CHECK(saw_max);
  CHECK(saw_circle);
  CHECK_THROWS_AS(find_critical_points(ArmLengths({1, 1, 1, 1}), quick(3, ParamMode::PlaneB)),
                  std::invalid_argument);
}

TEST_CASE("option validation") {
  CHECK_THROWS_AS(find_critical_points(ArmLengths({1, 1}), quick(3)), std::invalid_argument);
  CHECK_THROWS_AS(find_critical_points(ArmLengths({1, 1, 1}), quick(0)), std::invalid_argument);
  SearchOptions o = quick(3);
  o.grad_tol = 0.0;
  CHECK_THROWS_AS(find_critical_points(ArmLengths({1, 1, 1}), o), std::invalid_argument);
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_thread_count(3) == 3);
  ::setenv("LVL_THREADS", "2", 1);
  CHECK(resolve_thread_count(0) == 2);
  ::setenv("LVL_THREADS", "junk", 1);
  CHECK(resolve_thread_count(0) >= 1);
  ::unsetenv("LVL_THREADS");
  CHECK(resolve_thread_count(0) >= 1);
}
