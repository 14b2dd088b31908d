#include "lvl/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lvl/variational.hpp"

namespace lvl {

CircleFit fit_circle(std::span<const Point2> points) {
  if (points.size() < 3) {
    throw std::invalid_argument("fit_circle: at least 3 points required");
  }
  const double inv_n = 1.0 / static_cast<double>(points.size());
  Point2 mean{};
  for (const auto& p : points) mean = mean + p;
  mean = inv_n * mean;

  double mxx = 0, myy = 0, mxy = 0, mxz = 0, myz = 0, mzz = 0;
  for (const auto& p : points) {
    const double xi = p.x - mean.x;
    const double yi = p.y - mean.y;
    const double zi = xi * xi + yi * yi;
    mxy += xi * yi;
    mxx += xi * xi;
    myy += yi * yi;
    mxz += xi * zi;
    myz += yi * zi;
    mzz += zi * zi;
  }
  mxx *= inv_n;
  myy *= inv_n;
  mxy *= inv_n;
  mxz *= inv_n;
  myz *= inv_n;
  mzz *= inv_n;

  const double mz = mxx + myy;
  const double cov_xy = mxx * myy - mxy * mxy;
  const double var_z = mzz - mz * mz;
  const double a3 = 4.0 * mz;
  const double a2 = -3.0 * mz * mz - mzz;
  const double a1 = var_z * mz + 4.0 * cov_xy * mz - mxz * mxz - myz * myz;
  const double a0 = mxz * (mxz * myy - myz * mxy) + myz * (myz * mxx - mxz * mxy) - var_z * cov_xy;
  const double a22 = a2 + a2;
  const double a33 = a3 + a3 + a3;

  CircleFit fit;
  const double inf = std::numeric_limits<double>::infinity();
  if (mz <= 0.0) {
    fit.radius = inf;
    fit.rms = inf;
    return fit;
  }

  // Newton from x = 0 on the characteristic cubic.
  double x = 0.0;
  double y = a0;
  for (int iter = 0; iter < 99; ++iter) {
    const double dy = a1 + x * (a22 + a33 * x);
    const double xnew = x - y / dy;
    if (xnew == x || !std::isfinite(xnew)) break;
    const double ynew = a0 + xnew * (a1 + xnew * (a2 + xnew * a3));
    if (std::abs(ynew) >= std::abs(y)) break;
    x = xnew;
    y = ynew;
  }

  const double det = x * x - x * mz + cov_xy;
  // Collinear data drives det to zero relative to the spread.
  if (!(std::abs(det) > 1e-14 * mz * mz)) {
    fit.radius = inf;
    fit.rms = inf;
    return fit;
  }
  const double cx = (mxz * (myy - x) - myz * mxy) / det / 2.0;
  const double cy = (myz * (mxx - x) - mxz * mxy) / det / 2.0;
  fit.center = {cx + mean.x, cy + mean.y};
  fit.radius = std::sqrt(cx * cx + cy * cy + mz);

  double ss = 0.0;
  for (const auto& p : points) {
    const double r = norm(p - fit.center) - fit.radius;
    ss += r * r;
  }
  fit.rms = std::sqrt(ss * inv_n);
  return fit;
}

ChainCircleVerdict check_diacyclic(const PlanarChain& chain, double tol) {
  if (chain.size() < 3) {
    throw std::invalid_argument("check_diacyclic: at least 3 vertices required");
  }
  ChainCircleVerdict v;
  v.circle = fit_circle(chain.vertices());
  if (!v.circle.valid()) {
    v.rms_residual = v.shape_residual = v.center_residual = std::numeric_limits<double>::infinity();
    return v;
  }
  const Point2 first = chain[0];
  const Point2 last = chain[chain.size() - 1];
  const double diam = 2.0 * v.circle.radius;
  v.rms_residual = v.circle.rms / v.circle.radius;
  v.shape_residual = std::abs(norm(last - first) - diam) / diam;
  v.center_residual = norm(0.5 * (first + last) - v.circle.center) / diam;
  v.ok = v.rms_residual <= tol && v.shape_residual <= tol && v.center_residual <= tol;
  return v;
}

ChainCircleVerdict check_cyclic_closed(const PlanarChain& chain, double tol) {
  if (chain.size() < 3) {
    throw std::invalid_argument("check_cyclic_closed: at least 3 vertices required");
  }
  ChainCircleVerdict v;
  double perimeter = 0.0;
  for (std::size_t i = 1; i < chain.size(); ++i) perimeter += norm(chain[i] - chain[i - 1]);
  v.shape_residual = perimeter > 0.0 ? norm(chain[chain.size() - 1] - chain[0]) / perimeter : 0.0;
  v.circle = fit_circle(chain.vertices());
  if (!v.circle.valid()) {
    v.rms_residual = std::numeric_limits<double>::infinity();
    return v;
  }
  v.rms_residual = v.circle.rms / v.circle.radius;
  v.ok = v.rms_residual <= tol && v.shape_residual <= tol;
  return v;
}

ZigzagVerdict detect_zigzag(const ArmConfiguration& cfg, std::size_t from_joint, double tol,
                            std::optional<double> radius) {
  const std::size_t n = cfg.size();
  if (from_joint < 2 || from_joint > n) {
    throw std::invalid_argument("detect_zigzag: from_joint must be in 2..n");
  }
  const Vec3 axis = cfg.direction(0);
  auto perp = [&](std::size_t i) {
    const Vec3 b = cfg.edge(i);
    return b - dot(b, axis) * axis;
  };
  const double scale = cfg.lengths().total();
  ZigzagVerdict out;
  for (std::size_t i = from_joint - 1; i + 1 < n; ++i) {
    out.cancel_residual = std::max(out.cancel_residual, norm(perp(i) + perp(i + 1)) / scale);
  }
  for (std::size_t i = from_joint - 1; i < n; ++i) {
    const Vec3 p = perp(i);
    const double len = norm(p);
    if (norm(out.interval_direction) == 0.0 && len > tol * scale) {
      out.interval_direction = (1.0 / len) * p;
    }
    if (radius && cfg.length(i) < 2.0 * *radius * (1.0 - tol)) out.lengths_ok = false;
  }
  out.ok = out.cancel_residual <= tol && out.lengths_ok;
  return out;
}

std::string_view to_string(JointFlag f) {
  switch (f) {
    case JointFlag::Ortho:
      return "O";
    case JointFlag::Parallel:
      return "P";
    case JointFlag::Ambiguous:
      return "AMBIGUOUS";
  }
  return "?";
}

std::string_view to_string(ArmLabel l) {
  switch (l) {
    case ArmLabel::FullOrtho:
      return "FULL_ORTHO";
    case ArmLabel::Aligned:
      return "ALIGNED";
    case ArmLabel::ZigzagFamily:
      return "ZIGZAG_FAMILY";
    case ArmLabel::Mixed:
      return "MIXED";
  }
  return "?";
}

std::string_view to_string(PlanarSubtype s) {
  return s == PlanarSubtype::CyclicClosed ? "CYCLIC_CLOSED" : "DIACYCLIC";
}

JointFlag parse_joint_flag(std::string_view s) {
  if (s == "O") return JointFlag::Ortho;
  if (s == "P") return JointFlag::Parallel;
  if (s == "AMBIGUOUS") return JointFlag::Ambiguous;
  throw std::invalid_argument("unknown joint flag '" + std::string(s) + "'");
}

ArmLabel parse_label(std::string_view s) {
  if (s == "FULL_ORTHO") return ArmLabel::FullOrtho;
  if (s == "ALIGNED") return ArmLabel::Aligned;
  if (s == "ZIGZAG_FAMILY") return ArmLabel::ZigzagFamily;
  if (s == "MIXED") return ArmLabel::Mixed;
  throw std::invalid_argument("unknown label '" + std::string(s) + "'");
}

PlanarSubtype parse_planar_subtype(std::string_view s) {
  if (s == "CYCLIC_CLOSED") return PlanarSubtype::CyclicClosed;
  if (s == "DIACYCLIC") return PlanarSubtype::Diacyclic;
  throw std::invalid_argument("unknown planar subtype '" + std::string(s) + "'");
}

namespace {

std::vector<Point2> distinct_points(std::span<const Point2> pts, double eps) {
  std::vector<Point2> out;
  for (const auto& p : pts) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const Point2& q) { return norm(p - q) <= eps; });
    if (!seen) out.push_back(p);
  }
  return out;
}

Point2 rotate2(const Point2& p, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

}  // namespace

ClassificationReport classify_critical(const ArmConfiguration& cfg, double tol) {
  if (cfg.mode() == ParamMode::PlaneB) {
    throw std::invalid_argument("classify: configurations must be in full or reduced mode");
  }
  if (cfg.size() < 3) {
    throw std::invalid_argument("classify: arm needs at least 3 edges");
  }
  const std::size_t n = cfg.size();
  const double scale = cfg.lengths().total();
  const double abs_tol = tol * scale;
  const ConditionResiduals res = condition_residuals(cfg);

  ClassificationReport rep;
  rep.pattern.resize(n - 1);
  std::vector<bool> is_ortho(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto& jr = res.joints[i];
    if (jr.parallel <= abs_tol) {
      rep.pattern[i] = JointFlag::Parallel;
    } else if (jr.parallel > 10.0 * abs_tol && jr.ortho <= abs_tol) {
      rep.pattern[i] = JointFlag::Ortho;
    } else {
      rep.pattern[i] = JointFlag::Ambiguous;
      rep.degraded = true;
    }
    // Ambiguous joints are resolved by whichever side of the dead zone they
    // sit closer to.
    is_ortho[i] = rep.pattern[i] == JointFlag::Ortho ||
                  (rep.pattern[i] == JointFlag::Ambiguous && jr.parallel > 10.0 * abs_tol);
  }
  const auto num_ortho = static_cast<std::size_t>(std::count(is_ortho.begin(), is_ortho.end(), true));
  const std::size_t num_parallel = (n - 1) - num_ortho;
  rep.split = static_cast<int>(1 + num_ortho);
  {
    bool seen_parallel = false;
    for (bool o : is_ortho) {
      if (!o) seen_parallel = true;
      if (o && seen_parallel) rep.mirror_normalized = false;
    }
  }

  const PlanarChain chain = project_perp(cfg, cfg.direction(0));
  const auto v = chain.vertices();
  double perp_max = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) perp_max = std::max(perp_max, norm(v[i] - v[i - 1]));

  if (num_ortho == n - 1) {
    rep.label = ArmLabel::FullOrtho;
  } else if (num_ortho == 0) {
    rep.label = perp_max <= abs_tol ? ArmLabel::Aligned : ArmLabel::ZigzagFamily;
  } else {
    rep.label = ArmLabel::Mixed;
  }

  // Every critical projection lies on the circle whose diameter joins the
  // first and last projected vertices.
  const Point2 center = 0.5 * v.back();
  const double radius = 0.5 * norm(v.back());
  {
    double worst = 0.0;
    for (const auto& p : v) worst = std::max(worst, std::abs(norm(p - center) - radius));
    rep.diameter_circle.residual = worst / scale;
    rep.diameter_circle.ok = rep.diameter_circle.residual <= tol;
  }

  if (rep.label != ArmLabel::Aligned) {
    const auto pts = distinct_points(v, 1e-9 * scale);
    std::optional<CircleFit> fit;
    if (pts.size() >= 3) {
      CircleFit f = fit_circle(pts);
      if (f.valid()) fit = f;
    }
    if (!fit && radius > abs_tol) {
      CircleFit f;
      f.center = center;
      f.radius = radius;
      double ss = 0.0;
      for (const auto& p : pts) {
        const double r = norm(p - center) - radius;
        ss += r * r;
      }
      f.rms = std::sqrt(ss / static_cast<double>(pts.size()));
      fit = f;
    }
    if (fit) {
      rep.circle = fit;
      rep.circle_rms_relative = fit->rms / fit->radius;
    }
  }

  // Mirror normalization: lay the orthogonal chords end to end around the
  // circle starting at the first vertex, each keeping its central angle.
  double head_angle = 0.0;
  double tail_residual = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Point2 p = v[i] - center;
    const Point2 q = v[i + 1] - center;
    if (is_ortho[i]) {
      head_angle += std::atan2(cross(p, q), dot(p, q));
    } else {
      tail_residual = std::max(tail_residual, norm(v[i] + v[i + 1] - v.back()) / scale);
    }
  }
  const Point2 head_start = v.front();
  const Point2 head_end = center + rotate2(head_start - center, radius > 0.0 ? head_angle : 0.0);
  rep.closing.residual = norm(head_end - head_start) / scale;
  rep.closing.ok = rep.closing.residual <= tol;
  rep.diameter.residual = norm(head_end - (2.0 * center - head_start)) / scale;
  rep.diameter.ok = rep.diameter.residual <= tol;

  rep.zigzag.residual = tail_residual;
  rep.zigzag.ok = tail_residual <= tol;
  if (rep.mirror_normalized && num_parallel > 0) {
    const auto zz = detect_zigzag(cfg, static_cast<std::size_t>(rep.split) + 1, tol, radius);
    rep.zigzag.residual = std::max(rep.zigzag.residual, zz.cancel_residual);
    rep.zigzag.ok = rep.zigzag.ok && zz.ok;
  }

  rep.parity_ok = (num_parallel % 2 == 1) ? rep.closing.ok : rep.diameter.ok;
  if (rep.label == ArmLabel::FullOrtho || rep.label == ArmLabel::Mixed) {
    if (num_parallel % 2 == 1 && rep.closing.ok) rep.planar_subtype = PlanarSubtype::CyclicClosed;
    if (num_parallel % 2 == 0 && rep.diameter.ok) rep.planar_subtype = PlanarSubtype::Diacyclic;
  }

  const double value = signed_volume(cfg);
  const double twice_area = 2.0 * signed_area(chain, false);
  rep.value_identity_residual = std::abs(value - cfg.length(0) * twice_area) /
                                std::max(std::abs(value), std::numeric_limits<double>::min());
  return rep;
}

}  // namespace lvl
